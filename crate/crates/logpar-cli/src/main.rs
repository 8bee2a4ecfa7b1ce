//! Batch front end: parse instance files, dispatch operations over the
//! declared coefficient ring, and emit deterministic machine-readable
//! reports.
//!
//! Exit codes: 0 verified, 2 refuted (with witness in the report), 3
//! incomplete (a window bound was exceeded; the report names it), 1 input
//! error.

use std::path::PathBuf;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Parser, Subcommand};
use rand_chacha::rand_core::SeedableRng;
use serde_json::{json, Value};

use logpar::coeff::Chart;
use logpar::cohomology::{group_cohomology, CohomologyError, CohomologyMethod};
use logpar::correspondence::{
    check_exactness, check_projection_formula, compare_root_stack, phi, psi, roundtrip_module,
    roundtrip_parabolic, EquivariantMap,
};
use logpar::instance::{
    parse_chart, parse_free_map, parse_header, parse_module, parse_sheaf, parse_weight_literal,
    InstanceHeader, RingKind, ScalarCodec,
};
use logpar::knmod::{gamma_sections, kernel_presentation, EquivariantModule, Section};
use logpar::parabolic::{check_axioms, ParabolicSheaf};
use logpar::random::{random_module, random_sheaf, SampleScalar};
use logpar::report::{content_hash, Report, Verdict};
use logpar::weights::{Membership, Weight};
use logpar::{Bounds, Eps2, Eps3, Eps4, Rat};

#[derive(Parser)]
#[command(name = "logpar", version, about = "Exact chart-level toolkit for parabolic sheaves and equivariant graded modules")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,

    /// Instance file(s); independent instances fan out across --jobs.
    #[arg(long, global = true)]
    instance: Vec<PathBuf>,

    /// Also write the report(s) to this file.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Override the φ-window bound (also via LOGPAR_BOUND_PHI).
    #[arg(long, global = true)]
    bound_phi: Option<u32>,

    /// Override the P^gp shift radius for saturated searches.
    #[arg(long, global = true)]
    shift_radius: Option<i64>,

    /// Override the T-degree truncation for cohomology slices.
    #[arg(long, global = true)]
    truncation: Option<usize>,

    /// Seed for randomized property runs.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Run up to this many instances concurrently.
    #[arg(long, global = true, default_value_t = 1)]
    jobs: usize,
}

#[derive(Subcommand, Clone)]
enum Cmd {
    /// Verify the diagram axioms of the sheaf payload.
    CheckSheaf,
    /// Push the module payload to a parabolic sheaf.
    Phi,
    /// Flatten the sheaf payload to an equivariant module.
    Psi,
    /// Certify the round trips on the payload (or a seeded random family).
    Roundtrip {
        /// Number of random instances when no payload is present.
        #[arg(long, default_value_t = 10)]
        count: usize,
    },
    /// Γ-sections of the twist at a weight.
    Sections {
        #[arg(long, allow_hyphen_values = true)]
        lambda: String,
    },
    /// Group cohomology of the deck lattice at a weight.
    Cohomology {
        #[arg(long, allow_hyphen_values = true)]
        lambda: String,
        #[arg(long, default_value = "both")]
        method: String,
        /// Drop the formal log variables (the negative control).
        #[arg(long)]
        no_log_vars: bool,
    },
    /// Kernel presentation of the map payload.
    Kernel,
    /// Compare the graded root-stack route against the equivariant route.
    CompareRoot {
        #[arg(long)]
        n: u32,
    },
    /// Decide λ ∈ Λ.
    LambdaMember {
        #[arg(long, allow_hyphen_values = true)]
        weight: String,
    },
    /// Stream the window Λ ∩ {φ ≤ bound}.
    Enumerate {
        #[arg(long, default_value_t = 4)]
        bound: i64,
        #[arg(long, default_value_t = 16)]
        count: usize,
    },
    /// Verify that an exact triple of modules pushes to an exact triple.
    Exactness,
    /// Verify the projection formula for the module payload.
    Projection,
}

fn main() {
    let cli = Cli::parse();
    if cli.instance.is_empty() {
        eprintln!("error: at least one --instance file is required");
        std::process::exit(1);
    }
    let mut bounds = Bounds::from_env();
    if let Some(b) = cli.bound_phi {
        bounds.phi_bound = b;
    }
    if let Some(r) = cli.shift_radius {
        bounds.shift_radius = r;
    }
    if let Some(t) = cli.truncation {
        bounds.truncation = t;
    }
    let jobs = cli.jobs.max(1);
    let tasks: Vec<(usize, PathBuf)> = cli.instance.iter().cloned().enumerate().collect();
    let mut results: Vec<Option<Result<Report>>> = (0..tasks.len()).map(|_| None).collect();
    std::thread::scope(|scope| {
        let chunks: Vec<Vec<(usize, PathBuf)>> =
            tasks.chunks(tasks.len().div_ceil(jobs)).map(|c| c.to_vec()).collect();
        let mut handles = Vec::new();
        for chunk in chunks {
            let cmd = cli.cmd.clone();
            let bounds = bounds.clone();
            let seed = cli.seed;
            handles.push(scope.spawn(move || {
                chunk
                    .into_iter()
                    .map(|(i, path)| (i, run_instance(&path, &cmd, &bounds, seed)))
                    .collect::<Vec<_>>()
            }));
        }
        for h in handles {
            for (i, r) in h.join().expect("worker panicked") {
                results[i] = Some(r);
            }
        }
    });
    let mut exit = 0i32;
    let mut rendered = Vec::new();
    for r in results.into_iter().flatten() {
        match r {
            Ok(report) => {
                exit = exit.max(report.verdict.exit_code());
                rendered.push(report.to_json());
            }
            Err(e) => {
                eprintln!("error: {e:#}");
                exit = exit.max(1);
            }
        }
    }
    let output = rendered.join("\n");
    println!("{output}");
    if let Some(path) = &cli.out {
        if let Err(e) = std::fs::write(path, format!("{output}\n")) {
            eprintln!("error: cannot write {}: {e}", path.display());
            exit = exit.max(1);
        }
    }
    std::process::exit(exit);
}

fn run_instance(path: &PathBuf, cmd: &Cmd, bounds: &Bounds, seed: Option<u64>) -> Result<Report> {
    let raw_bytes =
        std::fs::read(path).with_context(|| format!("reading {}", path.display()))?;
    let hash = content_hash(&raw_bytes);
    let raw: Value = serde_json::from_slice(&raw_bytes)
        .with_context(|| format!("parsing {}", path.display()))?;
    let header = parse_header(raw).map_err(|e| anyhow!("{}: {e}", path.display()))?;
    match header.ring {
        RingKind::Q => run_typed::<Rat>(&header, hash, cmd, bounds, seed),
        RingKind::Eps(2) => run_typed::<Eps2>(&header, hash, cmd, bounds, seed),
        RingKind::Eps(3) => run_typed::<Eps3>(&header, hash, cmd, bounds, seed),
        RingKind::Eps(4) => run_typed::<Eps4>(&header, hash, cmd, bounds, seed),
        RingKind::Eps(m) => bail!("unsupported nilpotency order {m}"),
    }
}

fn weight_json(w: &Weight) -> Value {
    Value::Array(
        w.coords()
            .iter()
            .map(|c| {
                Value::Array(
                    c.coeffs().iter().map(|r| Value::String(r.to_string())).collect(),
                )
            })
            .collect(),
    )
}

fn module_json<S: ScalarCodec>(m: &EquivariantModule<S>) -> Value {
    let gens: Vec<Value> = m.gens.iter().map(|g| json!({"weight": weight_json(g)})).collect();
    let mut rels = Vec::new();
    for (i, (mu, row)) in m.rel_weights.iter().zip(&m.rel_entries).enumerate() {
        for (j, section) in row.iter().enumerate() {
            for (a, s) in section.terms() {
                rels.push(json!({
                    "row": i,
                    "col": j,
                    "a": a.to_json(),
                    "s": weight_json(s),
                    "mu": weight_json(mu),
                }));
            }
        }
    }
    json!({"gens": gens, "rels": rels})
}

fn sheaf_json<S: ScalarCodec>(sh: &ParabolicSheaf<S>) -> Value {
    let reps: Vec<Value> = sh.system.reps().iter().map(weight_json).collect();
    let pieces: Vec<Value> = sh
        .pieces
        .iter()
        .map(|p| {
            json!({
                "gens": p.gens(),
                "rels": p.rels().iter().map(|r| Value::Array(
                    r.iter().map(|a| a.to_json()).collect()
                )).collect::<Vec<_>>(),
            })
        })
        .collect();
    let transitions: Vec<Value> = sh
        .transitions
        .iter()
        .map(|t| {
            json!({
                "from": t.from,
                "to": t.to,
                "jump": weight_json(&t.jump),
                "matrix": (0..t.matrix.rows()).map(|i| Value::Array(
                    (0..t.matrix.cols()).map(|j| t.matrix.at(i, j).to_json()).collect()
                )).collect::<Vec<_>>(),
            })
        })
        .collect();
    json!({"reps": reps, "pieces": pieces, "transitions": transitions})
}

fn run_typed<S: ScalarCodec + SampleScalar>(
    header: &InstanceHeader,
    hash: String,
    cmd: &Cmd,
    bounds: &Bounds,
    seed: Option<u64>,
) -> Result<Report> {
    let chart: Chart<S> = parse_chart(header)?;
    let mk = |op: &str, verdict: Verdict, body: Value| {
        Ok(Report::new(op, hash.clone(), verdict, bounds, body))
    };
    match cmd {
        Cmd::CheckSheaf => {
            let sheaf = parse_sheaf::<S>(header, &chart, bounds)?
                .ok_or_else(|| anyhow!("check-sheaf requires a sheaf payload"))?;
            let rep = check_axioms(&chart, &sheaf, bounds);
            let verdict = if !rep.passed() {
                Verdict::Refuted
            } else if rep.unverified.is_empty() {
                Verdict::Verified
            } else {
                Verdict::Incomplete
            };
            mk(
                "check-sheaf",
                verdict,
                json!({
                    "violations": rep.violations.iter().map(|v| json!({
                        "condition": v.condition, "detail": v.detail
                    })).collect::<Vec<_>>(),
                    "unverified": rep.unverified,
                }),
            )
        }
        Cmd::Phi => {
            let module = parse_module::<S>(header, &chart, bounds)?
                .ok_or_else(|| anyhow!("phi requires a module payload"))?;
            let mut classes: Vec<Weight> =
                module.gens.iter().map(|g| g.neg().frac()).collect();
            for w in &module.rel_weights {
                let c = w.neg().frac();
                if !classes.contains(&c) {
                    classes.push(c);
                }
            }
            let system = chart.lambda.fine_system(&classes, bounds)?;
            let out = phi(&chart, &module, &system, bounds)?;
            mk(
                "phi",
                Verdict::Verified,
                json!({"sheaf": sheaf_json(&out.sheaf), "warnings": out.warnings}),
            )
        }
        Cmd::Psi => {
            let sheaf = parse_sheaf::<S>(header, &chart, bounds)?
                .ok_or_else(|| anyhow!("psi requires a sheaf payload"))?;
            let out = psi(&chart, &sheaf, bounds)?;
            mk("psi", Verdict::Verified, json!({"module": module_json(&out.module)}))
        }
        Cmd::Roundtrip { count } => {
            let sheaf = parse_sheaf::<S>(header, &chart, bounds)?;
            let module = parse_module::<S>(header, &chart, bounds)?;
            let mut witnesses = Vec::new();
            let mut all_valid = true;
            if let Some(sh) = &sheaf {
                let w = roundtrip_parabolic(&chart, sh, bounds)?;
                all_valid &= w.valid;
                witnesses.push(json!({
                    "kind": "parabolic", "valid": w.valid,
                    "piece_maps": w.piece_maps, "failures": w.failures,
                }));
            }
            if let Some(m) = &module {
                let w = roundtrip_module(&chart, m, bounds)?;
                all_valid &= w.valid;
                witnesses.push(json!({
                    "kind": "module", "valid": w.valid, "failures": w.failures,
                }));
            }
            if sheaf.is_none() && module.is_none() {
                let mut rng =
                    rand_chacha::ChaCha8Rng::seed_from_u64(seed.unwrap_or(0));
                let g = chart.lambda.ground().clone();
                let mut reps =
                    vec![Weight::zero(&g, chart.rank())];
                for w in chart.lambda.enumerate_window(1).take(3) {
                    let c = w.frac();
                    if !reps.contains(&c) {
                        reps.push(c);
                    }
                }
                let system = chart.lambda.fine_system(&reps, bounds)?;
                for k in 0..*count {
                    let sh = random_sheaf(&chart, &system, &mut rng, 3, bounds)?;
                    let w = roundtrip_parabolic(&chart, &sh, bounds)?;
                    all_valid &= w.valid;
                    witnesses.push(json!({
                        "kind": "parabolic", "index": k, "valid": w.valid,
                        "failures": w.failures,
                    }));
                    let m = random_module(&chart, &mut rng, 3, 3, 3, bounds);
                    let w = roundtrip_module(&chart, &m, bounds)?;
                    all_valid &= w.valid;
                    witnesses.push(json!({
                        "kind": "module", "index": k, "valid": w.valid,
                        "failures": w.failures,
                    }));
                }
            }
            let verdict = if all_valid { Verdict::Verified } else { Verdict::Refuted };
            mk("roundtrip", verdict, json!({"seed": seed, "witnesses": witnesses}))
        }
        Cmd::Sections { lambda } => {
            let lam = parse_weight_literal(&header.ground, chart.rank(), lambda)?;
            match gamma_sections(&chart, &lam, bounds) {
                Ok(gm) => {
                    let class_rep = chart.lambda.class_witness(&lam, bounds).0;
                    mk(
                        "sections",
                        Verdict::Verified,
                        json!({
                            "lambda": weight_json(&lam),
                            "basis_shifts": gm.basis,
                            "torsion": gm.module.shape().torsion,
                            "free_rank": gm.module.shape().free,
                            "length": gm.module.length(),
                            "class_representable": matches!(class_rep, Membership::Member),
                        }),
                    )
                }
                Err(e) => mk("sections", Verdict::Incomplete, json!({"error": e.to_string()})),
            }
        }
        Cmd::Cohomology { lambda, method, no_log_vars } => {
            let lam = parse_weight_literal(&header.ground, chart.rank(), lambda)?;
            let method = match method.as_str() {
                "recursion" => CohomologyMethod::Recursion,
                "koszul" | "truncated-koszul" => CohomologyMethod::TruncatedKoszul,
                "both" => CohomologyMethod::Both,
                other => bail!("unknown method {other:?}"),
            };
            let truncation = bounds.truncation.max(chart.rank() + 2);
            match group_cohomology(&chart, &lam, method, truncation, !no_log_vars, bounds) {
                Ok(rep) => {
                    let verdict = Verdict::Verified;
                    let body = serde_json::to_value(&rep)?;
                    mk("cohomology", verdict, body)
                }
                Err(CohomologyError::MethodDisagreement { recursion, koszul }) => mk(
                    "cohomology",
                    Verdict::Refuted,
                    json!({"disagreement": {"recursion": recursion, "koszul": koszul}}),
                ),
                Err(CohomologyError::Incomplete(msg)) => {
                    mk("cohomology", Verdict::Incomplete, json!({"error": msg}))
                }
                Err(e) => Err(e.into()),
            }
        }
        Cmd::Kernel => {
            let map = parse_free_map::<S>(header, &chart, bounds)?
                .ok_or_else(|| anyhow!("kernel requires a map payload"))?;
            match kernel_presentation(&chart, &map, bounds) {
                Ok(k) => {
                    let gens: Vec<Value> =
                        k.generators.rel_weights.iter().map(weight_json).collect();
                    let images: Vec<Value> = k
                        .images
                        .iter()
                        .map(|row| {
                            Value::Array(row.iter().map(section_json::<S>).collect())
                        })
                        .collect();
                    mk(
                        "kernel",
                        Verdict::Verified,
                        json!({"generators": gens, "images": images, "window": k.window}),
                    )
                }
                Err(logpar::knmod::KnError::WindowExceeded(b)) => {
                    mk("kernel", Verdict::Incomplete, json!({"window": b}))
                }
                Err(logpar::knmod::KnError::Incomplete(m)) => {
                    mk("kernel", Verdict::Incomplete, json!({"error": m}))
                }
                Err(e) => Err(e.into()),
            }
        }
        Cmd::CompareRoot { n } => {
            let sheaf = parse_sheaf::<S>(header, &chart, bounds)?
                .ok_or_else(|| anyhow!("compare-root requires a sheaf payload"))?;
            let rep = compare_root_stack(&chart, &sheaf, *n, bounds)?;
            let verdict = if rep.passed() { Verdict::Verified } else { Verdict::Refuted };
            mk(
                "compare-root",
                verdict,
                json!({"weights": rep.weights_checked, "failures": rep.failures}),
            )
        }
        Cmd::LambdaMember { weight } => {
            let lam = parse_weight_literal(&header.ground, chart.rank(), weight)?;
            let (verdict_m, witness) = chart.lambda.class_witness(&lam, bounds);
            let member = chart.lambda.member(&lam, bounds);
            let (verdict, value) = match member {
                Membership::Member => (Verdict::Verified, json!(true)),
                Membership::NonMember => (Verdict::Verified, json!(false)),
                Membership::Incomplete => (Verdict::Incomplete, json!("incomplete")),
            };
            let _ = verdict_m;
            mk(
                "lambda-member",
                verdict,
                json!({
                    "weight": weight_json(&lam),
                    "member": value,
                    "witness_multiplicities": witness,
                    "note": if member == Membership::Incomplete {
                        format!("exceeded shift radius {}; raise --shift-radius", bounds.shift_radius)
                    } else {
                        String::new()
                    },
                }),
            )
        }
        Cmd::Enumerate { bound, count } => {
            let xs: Vec<Value> = chart
                .lambda
                .enumerate_window(*bound)
                .take(*count)
                .map(|w| Value::String(w.to_string()))
                .collect();
            mk("enumerate", Verdict::Verified, json!({"bound": bound, "elements": xs}))
        }
        Cmd::Exactness => {
            let triple = header
                .raw
                .get("triple")
                .ok_or_else(|| anyhow!("exactness requires a triple payload"))?
                .clone();
            let f = parse_triple_map::<S>(header, &chart, &triple, "f", bounds)?;
            let g = parse_triple_map::<S>(header, &chart, &triple, "g", bounds)?;
            let rep = check_exactness(&chart, &f, &g, bounds)?;
            let verdict = if rep.passed() { Verdict::Verified } else { Verdict::Refuted };
            mk(
                "exactness",
                verdict,
                json!({
                    "slices": rep.slice_exact,
                    "pushed_exact": rep.pushed_exact,
                }),
            )
        }
        Cmd::Projection => {
            let module = parse_module::<S>(header, &chart, bounds)?
                .ok_or_else(|| anyhow!("projection requires a module payload"))?;
            let gdim = header
                .raw
                .get("params")
                .and_then(|p| p.get("g_rank"))
                .and_then(Value::as_u64)
                .unwrap_or(1) as usize;
            let g = logpar::fgmod::FgModule::<S>::free(gdim);
            let rep = check_projection_formula(&chart, &module, &g, bounds)?;
            let verdict = if rep.iso { Verdict::Verified } else { Verdict::Refuted };
            mk(
                "projection",
                verdict,
                json!({"lhs_length": rep.lhs_length, "rhs_length": rep.rhs_length}),
            )
        }
    }
}

fn section_json<S: ScalarCodec>(s: &Section<S>) -> Value {
    Value::Array(
        s.terms()
            .iter()
            .map(|(a, w)| json!({"a": a.to_json(), "s": weight_json(w)}))
            .collect(),
    )
}

/// Exact-triple payload: {"triple": {"modules": [m0, m1, m2], "f": {...}, "g": {...}}}
fn parse_triple_map<S: ScalarCodec>(
    header: &InstanceHeader,
    chart: &Chart<S>,
    triple: &Value,
    which: &str,
    bounds: &Bounds,
) -> Result<EquivariantMap<S>> {
    let modules = triple
        .get("modules")
        .and_then(Value::as_array)
        .ok_or_else(|| anyhow!("/triple/modules: expected three presentations"))?;
    if modules.len() != 3 {
        bail!("/triple/modules: expected exactly three presentations");
    }
    let parse_at = |i: usize| -> Result<EquivariantModule<S>> {
        logpar::instance::parse_presentation_value(header, chart, &modules[i], bounds)
            .map_err(|e| anyhow!("{e}"))
    };
    let (src, tgt) = if which == "f" {
        (parse_at(0)?, parse_at(1)?)
    } else {
        (parse_at(1)?, parse_at(2)?)
    };
    let spec = triple
        .get(which)
        .ok_or_else(|| anyhow!("/triple/{which}: missing"))?;
    let mut entries =
        vec![vec![Section::<S>::zero(); tgt.gens.len()]; src.gens.len()];
    if let Some(es) = spec.get("entries").and_then(Value::as_array) {
        for e in es {
            let row = e.get("row").and_then(Value::as_u64).unwrap_or(0) as usize;
            let col = e.get("col").and_then(Value::as_u64).unwrap_or(0) as usize;
            if row >= src.gens.len() || col >= tgt.gens.len() {
                bail!("/triple/{which}: entry out of range");
            }
            let a = e
                .get("a")
                .and_then(|x| S::parse_json(x))
                .ok_or_else(|| anyhow!("/triple/{which}: bad scalar"))?;
            let s = match e.get("s") {
                None => Weight::zero(&header.ground, chart.rank()),
                Some(sv) => logpar::instance::parse_weight(
                    &header.ground,
                    chart.rank(),
                    sv,
                    &format!("/triple/{which}/s"),
                )
                .map_err(|er| anyhow!("{er}"))?,
            };
            entries[row][col] = entries[row][col].add(&Section::monomial(a, s));
        }
    }
    Ok(EquivariantMap { source: src, target: tgt, entries })
}
