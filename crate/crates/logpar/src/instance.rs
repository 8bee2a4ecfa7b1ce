//! Instance file schemas: the JSON documents the batch front end consumes.
//!
//! All exact scalars travel as strings ("p/q", never floats); weights are
//! arrays of power-basis coefficient lists. A missing ground field defaults
//! to √2 on (1, 2), the corpus default. Schema violations are reported with
//! pointer-style paths.

use std::sync::Arc;

use serde_json::Value;

use crate::algebraic::{AlgebraicGround, WeightFieldElement};
use crate::coeff::{Chart, CoefficientRing};
use crate::knmod::{EquivariantModule, Section};
use crate::monoid::ToricMonoid;
use crate::parabolic::{ParabolicSheaf, Transition};
use crate::scalar::{Dual, LocalScalar};
use crate::weights::{Weight, WeightKind, WeightMonoid};
use crate::{Bounds, Int, Rat};

#[derive(Debug, thiserror::Error)]
pub enum InstanceError {
    #[error("{path}: {message}")]
    Schema { path: String, message: String },
    #[error("ground field: {0}")]
    Ground(#[from] crate::algebraic::GroundError),
    #[error("monoid: {0}")]
    Monoid(#[from] crate::monoid::MonoidError),
    #[error("weights: {0}")]
    Weights(#[from] crate::weights::WeightError),
    #[error("coefficient ring: {0}")]
    Coeff(#[from] crate::coeff::CoeffError),
    #[error("payload: {0}")]
    Payload(String),
}

fn schema_err<T>(path: &str, message: impl Into<String>) -> Result<T, InstanceError> {
    Err(InstanceError::Schema { path: path.to_string(), message: message.into() })
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum RingKind {
    Q,
    Eps(u32),
}

/// The scalar-independent part of an instance.
pub struct InstanceHeader {
    pub ground: Arc<AlgebraicGround>,
    pub monoid: Arc<ToricMonoid>,
    pub lambda: WeightMonoid,
    pub ring: RingKind,
    pub raw: Value,
}

/// JSON codec for the coefficient scalars.
pub trait ScalarCodec: LocalScalar {
    fn parse_json(v: &Value) -> Option<Self>;
    fn to_json(&self) -> Value;
}

fn rat_from_value(v: &Value) -> Option<Rat> {
    match v {
        Value::String(s) => s.trim().parse::<Rat>().ok(),
        Value::Number(n) => n.as_i64().map(|i| Rat::from_integer(i.into())),
        _ => None,
    }
}

impl ScalarCodec for Rat {
    fn parse_json(v: &Value) -> Option<Self> {
        rat_from_value(v)
    }

    fn to_json(&self) -> Value {
        Value::String(self.to_string())
    }
}

impl<const M: usize> ScalarCodec for Dual<M> {
    fn parse_json(v: &Value) -> Option<Self> {
        match v {
            Value::Array(xs) => {
                let coeffs: Option<Vec<Rat>> = xs.iter().map(rat_from_value).collect();
                Some(Dual::new(coeffs?))
            }
            other => rat_from_value(other).map(Dual::from_rat),
        }
    }

    fn to_json(&self) -> Value {
        Value::Array(self.coeffs().iter().map(|c| Value::String(c.to_string())).collect())
    }
}

fn parse_rat_at(v: &Value, path: &str) -> Result<Rat, InstanceError> {
    rat_from_value(v)
        .ok_or(())
        .or_else(|_| schema_err(path, "expected a rational string like \"3/2\""))
}

/// A single weight coordinate: either one rational string (a rational
/// coordinate) or a list of power-basis coefficients.
fn parse_coord(
    ground: &Arc<AlgebraicGround>,
    v: &Value,
    path: &str,
) -> Result<WeightFieldElement, InstanceError> {
    match v {
        Value::Array(xs) => {
            let mut coeffs = Vec::with_capacity(xs.len());
            for (i, x) in xs.iter().enumerate() {
                coeffs.push(parse_rat_at(x, &format!("{path}[{i}]"))?);
            }
            if coeffs.len() > ground.degree() {
                return schema_err(path, "more coefficients than the field degree");
            }
            Ok(WeightFieldElement::new(ground.clone(), coeffs))
        }
        other => Ok(WeightFieldElement::from_rat(ground, parse_rat_at(other, path)?)),
    }
}

pub fn parse_weight(
    ground: &Arc<AlgebraicGround>,
    rank: usize,
    v: &Value,
    path: &str,
) -> Result<Weight, InstanceError> {
    let Value::Array(xs) = v else {
        return schema_err(path, "expected an array of coordinates");
    };
    // rank-1 shorthand: a flat list of rational strings is one coordinate
    if rank == 1 && xs.iter().all(|x| x.is_string() || x.is_number()) && xs.len() > 1 {
        return Ok(Weight::new(vec![parse_coord(ground, v, path)?]));
    }
    if xs.len() != rank {
        return schema_err(path, format!("expected {rank} coordinates, found {}", xs.len()));
    }
    let mut coords = Vec::with_capacity(rank);
    for (i, x) in xs.iter().enumerate() {
        coords.push(parse_coord(ground, x, &format!("{path}[{i}]"))?);
    }
    Ok(Weight::new(coords))
}

/// Weight literals for command-line flags: comma-separated coordinates,
/// each a linear expression in `a`, e.g. `"3-2a"`, `"1/2"`, `"a, -1"`.
pub fn parse_weight_literal(
    ground: &Arc<AlgebraicGround>,
    rank: usize,
    s: &str,
) -> Result<Weight, InstanceError> {
    let parts: Vec<&str> = s.split(',').collect();
    if parts.len() != rank {
        return schema_err("weight", format!("expected {rank} coordinates, found {}", parts.len()));
    }
    let mut coords = Vec::with_capacity(rank);
    for part in parts {
        coords.push(parse_coord_literal(ground, part.trim())?);
    }
    Ok(Weight::new(coords))
}

fn parse_coord_literal(
    ground: &Arc<AlgebraicGround>,
    s: &str,
) -> Result<WeightFieldElement, InstanceError> {
    let mut rat = Rat::from_integer(0.into());
    let mut alpha = Rat::from_integer(0.into());
    let mut rest = s;
    let mut sign = Rat::from_integer(1.into());
    if rest.is_empty() {
        return schema_err("weight", "empty coordinate");
    }
    while !rest.is_empty() {
        rest = rest.trim_start();
        if let Some(r) = rest.strip_prefix('+') {
            rest = r;
            continue;
        }
        if let Some(r) = rest.strip_prefix('-') {
            sign = -Rat::from_integer(1.into());
            rest = r;
            continue;
        }
        // a term: [coefficient][a]
        let end = rest
            .find(['+', '-'])
            .unwrap_or(rest.len());
        let term = rest[..end].trim();
        rest = &rest[end..];
        let (coeff_str, has_alpha) = match term.strip_suffix('a') {
            Some(c) => (c.trim_end_matches('*').trim(), true),
            None => (term, false),
        };
        let coeff = if coeff_str.is_empty() {
            Rat::from_integer(1.into())
        } else {
            coeff_str
                .parse::<Rat>()
                .map_err(|_| InstanceError::Schema {
                    path: "weight".into(),
                    message: format!("cannot parse term {term:?}"),
                })?
        };
        if has_alpha {
            alpha += sign.clone() * coeff;
        } else {
            rat += sign.clone() * coeff;
        }
        sign = Rat::from_integer(1.into());
    }
    Ok(WeightFieldElement::new(ground.clone(), vec![rat, alpha]))
}

pub fn parse_header(raw: Value) -> Result<InstanceHeader, InstanceError> {
    // ground field, defaulting to √2 on (1, 2)
    let ground = match raw.get("ground") {
        None => AlgebraicGround::new(
            vec![Int::from(-2), Int::from(0), Int::from(1)],
            (Rat::from_integer(1.into()), Rat::from_integer(2.into())),
        )?,
        Some(g) => {
            let mp = g
                .get("minpoly")
                .and_then(Value::as_array)
                .ok_or(())
                .or_else(|_| schema_err::<&Vec<Value>>("/ground/minpoly", "expected an array"))?;
            let coeffs: Vec<Int> = mp
                .iter()
                .map(|c| {
                    c.as_i64().map(Int::from).or_else(|| {
                        c.as_str().and_then(|s| s.parse::<Int>().ok())
                    })
                })
                .collect::<Option<_>>()
                .ok_or(())
                .or_else(|_| schema_err("/ground/minpoly", "expected integers"))?;
            let iv = g
                .get("interval")
                .and_then(Value::as_array)
                .filter(|a| a.len() == 2)
                .ok_or(())
                .or_else(|_| {
                    schema_err::<&Vec<Value>>("/ground/interval", "expected two rationals")
                })?;
            let lo = parse_rat_at(&iv[0], "/ground/interval[0]")?;
            let hi = parse_rat_at(&iv[1], "/ground/interval[1]")?;
            AlgebraicGround::new(coeffs, (lo, hi))?
        }
    };
    // monoid
    let m = raw
        .get("monoid")
        .ok_or(())
        .or_else(|_| schema_err::<&Value>("/monoid", "missing"))?;
    let gens = m
        .get("generators")
        .and_then(Value::as_array)
        .ok_or(())
        .or_else(|_| schema_err::<&Vec<Value>>("/monoid/generators", "expected an array"))?;
    let mut generators = Vec::with_capacity(gens.len());
    for (i, g) in gens.iter().enumerate() {
        let row = g
            .as_array()
            .ok_or(())
            .or_else(|_| {
                schema_err::<&Vec<Value>>(
                    &format!("/monoid/generators[{i}]"),
                    "expected an integer vector",
                )
            })?;
        let v: Vec<i64> = row
            .iter()
            .map(Value::as_i64)
            .collect::<Option<_>>()
            .ok_or(())
            .or_else(|_| {
                schema_err(&format!("/monoid/generators[{i}]"), "expected integers")
            })?;
        generators.push(v);
    }
    let monoid = Arc::new(ToricMonoid::new(generators)?);
    if let Some(rank) = m.get("rank").and_then(Value::as_u64) {
        if rank as usize != monoid.rank() {
            return schema_err("/monoid/rank", "declared rank does not match the lattice rank");
        }
    }
    // lambda
    let lam = raw
        .get("lambda")
        .ok_or(())
        .or_else(|_| schema_err::<&Value>("/lambda", "missing"))?;
    let kind = lam.get("kind").and_then(Value::as_str).unwrap_or("fraction");
    let lambda = match kind {
        "fraction" => {
            let n = lam.get("n").and_then(Value::as_u64).unwrap_or(1) as u32;
            WeightMonoid::fraction(monoid.clone(), ground.clone(), n.max(1))
        }
        "saturated" => {
            let gs = lam
                .get("generators")
                .and_then(Value::as_array)
                .ok_or(())
                .or_else(|_| {
                    schema_err::<&Vec<Value>>("/lambda/generators", "expected an array")
                })?;
            let mut weights = Vec::with_capacity(gs.len());
            for (i, g) in gs.iter().enumerate() {
                weights.push(parse_weight(
                    &ground,
                    monoid.rank(),
                    g,
                    &format!("/lambda/generators[{i}]"),
                )?);
            }
            WeightMonoid::new(monoid.clone(), ground.clone(), WeightKind::Saturated(weights))?
        }
        other => return schema_err("/lambda/kind", format!("unknown kind {other:?}")),
    };
    // coefficient ring
    let ring = match raw.get("coeff").and_then(|c| c.get("ring")) {
        None => RingKind::Q,
        Some(Value::String(s)) if s == "Q" || s == "q" => RingKind::Q,
        Some(Value::String(s)) if s.starts_with("eps") => {
            let m: u32 = s[3..].parse().unwrap_or(2);
            RingKind::Eps(m.clamp(2, 4))
        }
        Some(Value::Object(o)) => match o.get("eps").and_then(Value::as_u64) {
            Some(m) => RingKind::Eps((m as u32).clamp(2, 4)),
            None => return schema_err("/coeff/ring", "expected \"Q\" or {\"eps\": m}"),
        },
        Some(v) => {
            return schema_err("/coeff/ring", format!("unrecognized ring {v}"));
        }
    };
    Ok(InstanceHeader { ground, monoid, lambda, ring, raw })
}

/// The typed chart: parses the f-values for the chosen scalar ring.
pub fn parse_chart<S: ScalarCodec>(header: &InstanceHeader) -> Result<Chart<S>, InstanceError> {
    let coeff = match header.raw.get("coeff").and_then(|c| c.get("f")) {
        None => CoefficientRing::log_point(header.monoid.clone()),
        Some(Value::String(s)) if s == "log-point" => {
            CoefficientRing::log_point(header.monoid.clone())
        }
        Some(Value::String(s)) if s == "eps-point" => {
            CoefficientRing::eps_point(header.monoid.clone())
        }
        Some(Value::Array(values)) => {
            let hb = header.monoid.hilbert_basis_ambient();
            let mut f = vec![S::zero(); hb.len()];
            if values.iter().all(|v| v.is_object()) {
                for (i, entry) in values.iter().enumerate() {
                    let p = entry
                        .get("p")
                        .and_then(Value::as_array)
                        .ok_or(())
                        .or_else(|_| {
                            schema_err::<&Vec<Value>>(
                                &format!("/coeff/f[{i}]/p"),
                                "expected an ambient lattice point",
                            )
                        })?;
                    let pv: Vec<i64> = p
                        .iter()
                        .map(Value::as_i64)
                        .collect::<Option<_>>()
                        .ok_or(())
                        .or_else(|_| schema_err(&format!("/coeff/f[{i}]/p"), "expected integers"))?;
                    let pos = hb.iter().position(|h| *h == pv).ok_or(()).or_else(|_| {
                        schema_err(
                            &format!("/coeff/f[{i}]/p"),
                            "not a Hilbert basis element of the monoid",
                        )
                    })?;
                    let val = entry.get("value").ok_or(()).or_else(|_| {
                        schema_err::<&Value>(&format!("/coeff/f[{i}]/value"), "missing")
                    })?;
                    f[pos] = S::parse_json(val).ok_or(()).or_else(|_| {
                        schema_err(&format!("/coeff/f[{i}]/value"), "bad scalar")
                    })?;
                }
            } else {
                if values.len() != hb.len() {
                    return schema_err(
                        "/coeff/f",
                        format!("expected {} values (one per Hilbert element)", hb.len()),
                    );
                }
                for (i, v) in values.iter().enumerate() {
                    f[i] = S::parse_json(v).ok_or(()).or_else(|_| {
                        schema_err(&format!("/coeff/f[{i}]"), "bad scalar")
                    })?;
                }
            }
            CoefficientRing::new(header.monoid.clone(), f)?
        }
        Some(v) => return schema_err("/coeff/f", format!("unrecognized f specification {v}")),
    };
    Ok(Chart::new(header.lambda.clone(), coeff))
}

/// Sheaf payload: representatives, pieces, and transitions. Returns the
/// sheaf with indices remapped onto the canonicalized weight system.
pub fn parse_sheaf<S: ScalarCodec>(
    header: &InstanceHeader,
    chart: &Chart<S>,
    bounds: &Bounds,
) -> Result<Option<ParabolicSheaf<S>>, InstanceError> {
    let Some(sh) = header.raw.get("sheaf") else { return Ok(None) };
    let rank = header.monoid.rank();
    let reps_v = sh
        .get("reps")
        .and_then(Value::as_array)
        .ok_or(())
        .or_else(|_| schema_err::<&Vec<Value>>("/sheaf/reps", "expected an array of weights"))?;
    let mut reps = Vec::with_capacity(reps_v.len());
    for (i, r) in reps_v.iter().enumerate() {
        reps.push(parse_weight(&header.ground, rank, r, &format!("/sheaf/reps[{i}]"))?);
    }
    let system = chart.lambda.fine_system(&reps, bounds)?;
    if system.len() != reps.len() {
        return schema_err("/sheaf/reps", "representatives collide modulo P^gp");
    }
    let order: Vec<usize> = reps
        .iter()
        .map(|r| system.class_index(r).expect("canonicalized rep"))
        .collect();
    let pieces_v = sh
        .get("pieces")
        .and_then(Value::as_array)
        .ok_or(())
        .or_else(|_| schema_err::<&Vec<Value>>("/sheaf/pieces", "expected an array"))?;
    if pieces_v.len() != reps.len() {
        return schema_err("/sheaf/pieces", "piece count must match rep count");
    }
    let mut pieces = vec![crate::fgmod::FgModule::free(0); reps.len()];
    for (i, pv) in pieces_v.iter().enumerate() {
        let gens = pv.get("gens").and_then(Value::as_u64).unwrap_or(0) as usize;
        let mut m = crate::fgmod::FgModule::free(gens);
        if let Some(rels) = pv.get("rels").and_then(Value::as_array) {
            for (ri, row) in rels.iter().enumerate() {
                let row_v = row.as_array().ok_or(()).or_else(|_| {
                    schema_err::<&Vec<Value>>(
                        &format!("/sheaf/pieces[{i}]/rels[{ri}]"),
                        "expected a row",
                    )
                })?;
                let parsed: Option<Vec<S>> = row_v.iter().map(S::parse_json).collect();
                let parsed = parsed.ok_or(()).or_else(|_| {
                    schema_err(&format!("/sheaf/pieces[{i}]/rels[{ri}]"), "bad scalar")
                })?;
                if parsed.len() != gens {
                    return schema_err(
                        &format!("/sheaf/pieces[{i}]/rels[{ri}]"),
                        "row width must equal the generator count",
                    );
                }
                m.push_rel(parsed);
            }
        }
        pieces[order[i]] = m;
    }
    let mut transitions = Vec::new();
    if let Some(ts) = sh.get("transitions").and_then(Value::as_array) {
        for (ti, tv) in ts.iter().enumerate() {
            let from = tv.get("from").and_then(Value::as_u64).unwrap_or(u64::MAX) as usize;
            let to = tv.get("to").and_then(Value::as_u64).unwrap_or(u64::MAX) as usize;
            if from >= reps.len() || to >= reps.len() {
                return schema_err(&format!("/sheaf/transitions[{ti}]"), "index out of range");
            }
            let jump = parse_weight(
                &header.ground,
                rank,
                tv.get("jump").unwrap_or(&Value::Null),
                &format!("/sheaf/transitions[{ti}]/jump"),
            )?;
            let mat_v = tv
                .get("matrix")
                .and_then(Value::as_array)
                .ok_or(())
                .or_else(|_| {
                    schema_err::<&Vec<Value>>(
                        &format!("/sheaf/transitions[{ti}]/matrix"),
                        "expected a matrix",
                    )
                })?;
            let mut rows = Vec::with_capacity(mat_v.len());
            for row in mat_v {
                let row_v = row.as_array().ok_or(()).or_else(|_| {
                    schema_err::<&Vec<Value>>(
                        &format!("/sheaf/transitions[{ti}]/matrix"),
                        "expected rows",
                    )
                })?;
                let parsed: Option<Vec<S>> = row_v.iter().map(S::parse_json).collect();
                rows.push(parsed.ok_or(()).or_else(|_| {
                    schema_err(&format!("/sheaf/transitions[{ti}]/matrix"), "bad scalar")
                })?);
            }
            transitions.push(Transition {
                from: order[from],
                to: order[to],
                jump,
                matrix: crate::linalg::Matrix::new(rows),
            });
        }
    }
    let sheaf = ParabolicSheaf::new(system, pieces, transitions)
        .map_err(|e| InstanceError::Payload(e.to_string()))?;
    Ok(Some(sheaf))
}

fn parse_presentation<S: ScalarCodec>(
    header: &InstanceHeader,
    chart: &Chart<S>,
    v: &Value,
    path: &str,
    bounds: &Bounds,
) -> Result<EquivariantModule<S>, InstanceError> {
    let rank = header.monoid.rank();
    let gens_v = v
        .get("gens")
        .and_then(Value::as_array)
        .ok_or(())
        .or_else(|_| schema_err::<&Vec<Value>>(&format!("{path}/gens"), "expected an array"))?;
    let mut gens = Vec::with_capacity(gens_v.len());
    for (i, g) in gens_v.iter().enumerate() {
        let w = g.get("weight").unwrap_or(g);
        gens.push(parse_weight(&header.ground, rank, w, &format!("{path}/gens[{i}]"))?);
    }
    let mut module = EquivariantModule::free(gens.clone());
    if let Some(rels) = v.get("rels").and_then(Value::as_array) {
        // group entries by row index; the row weight is derived from the
        // first entry as μ = λ_col − p − s
        use std::collections::BTreeMap;
        let mut rows: BTreeMap<u64, Vec<(usize, S, Vec<i64>, Weight)>> = BTreeMap::new();
        for (ei, e) in rels.iter().enumerate() {
            let row = e.get("row").and_then(Value::as_u64).unwrap_or(0);
            let col = e.get("col").and_then(Value::as_u64).unwrap_or(0) as usize;
            if col >= gens.len() {
                return schema_err(&format!("{path}/rels[{ei}]/col"), "out of range");
            }
            let a = e
                .get("a")
                .and_then(|x| S::parse_json(x))
                .ok_or(())
                .or_else(|_| schema_err(&format!("{path}/rels[{ei}]/a"), "bad scalar"))?;
            let p: Vec<i64> = match e.get("p").and_then(Value::as_array) {
                None => vec![0; rank],
                Some(arr) => arr
                    .iter()
                    .map(Value::as_i64)
                    .collect::<Option<_>>()
                    .ok_or(())
                    .or_else(|_| schema_err(&format!("{path}/rels[{ei}]/p"), "expected integers"))?,
            };
            let s = match e.get("s") {
                None => Weight::zero(&header.ground, rank),
                Some(sv) => {
                    parse_weight(&header.ground, rank, sv, &format!("{path}/rels[{ei}]/s"))?
                }
            };
            rows.entry(row).or_default().push((col, a, p, s));
        }
        for (row, entries) in rows {
            let (col0, _, p0, s0) = &entries[0];
            let mu = gens[*col0]
                .sub(&Weight::from_ints(&header.ground, p0))
                .sub(s0);
            let mut sections = vec![Section::zero(); gens.len()];
            for (col, a, p, s) in &entries {
                let mu_check = gens[*col].sub(&Weight::from_ints(&header.ground, p)).sub(s);
                if !mu_check.sub(&mu).is_integral() {
                    return schema_err(
                        &format!("{path}/rels (row {row})"),
                        "entries disagree on the relation weight class",
                    );
                }
                sections[*col] = sections[*col].add(&Section::monomial(a.clone(), s.add(
                    &mu_check.sub(&mu),
                )));
            }
            module.push_relation(mu, sections);
        }
    }
    module
        .validate(chart, bounds)
        .map_err(|e| InstanceError::Payload(e.to_string()))?;
    Ok(module)
}

pub fn parse_module<S: ScalarCodec>(
    header: &InstanceHeader,
    chart: &Chart<S>,
    bounds: &Bounds,
) -> Result<Option<EquivariantModule<S>>, InstanceError> {
    match header.raw.get("module") {
        None => Ok(None),
        Some(v) => Ok(Some(parse_presentation(header, chart, v, "/module", bounds)?)),
    }
}

/// Parse a presentation from an arbitrary JSON value (used for payloads
/// embedded outside the top-level "module" key).
pub fn parse_presentation_value<S: ScalarCodec>(
    header: &InstanceHeader,
    chart: &Chart<S>,
    v: &Value,
    bounds: &Bounds,
) -> Result<EquivariantModule<S>, InstanceError> {
    parse_presentation(header, chart, v, "/payload", bounds)
}

/// A map between shifted frees for the kernel op: source/target weights and
/// Γ-form entries. Encoded as a presentation whose relation rows are the
/// source summands.
pub fn parse_free_map<S: ScalarCodec>(
    header: &InstanceHeader,
    chart: &Chart<S>,
    bounds: &Bounds,
) -> Result<Option<EquivariantModule<S>>, InstanceError> {
    let Some(v) = header.raw.get("map") else { return Ok(None) };
    let rank = header.monoid.rank();
    let tgt = v
        .get("target")
        .and_then(Value::as_array)
        .ok_or(())
        .or_else(|_| schema_err::<&Vec<Value>>("/map/target", "expected weights"))?;
    let src = v
        .get("source")
        .and_then(Value::as_array)
        .ok_or(())
        .or_else(|_| schema_err::<&Vec<Value>>("/map/source", "expected weights"))?;
    let mut gens = Vec::new();
    for (i, g) in tgt.iter().enumerate() {
        let w = g.get("weight").unwrap_or(g);
        gens.push(parse_weight(&header.ground, rank, w, &format!("/map/target[{i}]"))?);
    }
    let mut module = EquivariantModule::free(gens.clone());
    let mut rows: Vec<(Weight, Vec<Section<S>>)> = Vec::new();
    for (i, g) in src.iter().enumerate() {
        let w = g.get("weight").unwrap_or(g);
        rows.push((
            parse_weight(&header.ground, rank, w, &format!("/map/source[{i}]"))?,
            vec![Section::zero(); gens.len()],
        ));
    }
    if let Some(entries) = v.get("entries").and_then(Value::as_array) {
        for (ei, e) in entries.iter().enumerate() {
            let row = e.get("row").and_then(Value::as_u64).unwrap_or(0) as usize;
            let col = e.get("col").and_then(Value::as_u64).unwrap_or(0) as usize;
            if row >= rows.len() || col >= gens.len() {
                return schema_err(&format!("/map/entries[{ei}]"), "index out of range");
            }
            let a = e
                .get("a")
                .and_then(|x| S::parse_json(x))
                .ok_or(())
                .or_else(|_| schema_err(&format!("/map/entries[{ei}]/a"), "bad scalar"))?;
            let s = match e.get("s") {
                None => Weight::zero(&header.ground, rank),
                Some(sv) => {
                    parse_weight(&header.ground, rank, sv, &format!("/map/entries[{ei}]/s"))?
                }
            };
            rows[row].1[col] = rows[row].1[col].add(&Section::monomial(a, s));
        }
    }
    for (mu, sections) in rows {
        module.push_relation(mu, sections);
    }
    module
        .validate(chart, bounds)
        .map_err(|e| InstanceError::Payload(e.to_string()))?;
    Ok(Some(module))
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn header_defaults_and_rings() {
        let raw = json!({
            "monoid": {"rank": 1, "generators": [[1]]},
            "lambda": {"kind": "fraction", "n": 2}
        });
        let h = parse_header(raw).unwrap();
        assert_eq!(h.ground.degree(), 2);
        assert_eq!(h.ring, RingKind::Q);
        let raw2 = json!({
            "monoid": {"generators": [[1]]},
            "lambda": {"kind": "fraction", "n": 3},
            "coeff": {"ring": {"eps": 2}}
        });
        assert_eq!(parse_header(raw2).unwrap().ring, RingKind::Eps(2));
    }

    #[test]
    fn saturated_lambda_with_flat_generator() {
        let raw = json!({
            "monoid": {"rank": 1, "generators": [[1]]},
            "lambda": {"kind": "saturated", "generators": [["0/1", "1/1"]]}
        });
        let h = parse_header(raw).unwrap();
        match h.lambda.kind() {
            WeightKind::Saturated(gs) => {
                assert_eq!(gs.len(), 1);
                assert_eq!(gs[0].coords()[0], WeightFieldElement::alpha(&h.ground));
            }
            _ => panic!("expected saturated"),
        }
    }

    #[test]
    fn weight_literals() {
        let raw = json!({
            "monoid": {"rank": 1, "generators": [[1]]},
            "lambda": {"kind": "fraction", "n": 2}
        });
        let h = parse_header(raw).unwrap();
        let w = parse_weight_literal(&h.ground, 1, "3-2a").unwrap();
        assert_eq!(
            w.coords()[0],
            WeightFieldElement::new(
                h.ground.clone(),
                vec![Rat::from_integer(3.into()), Rat::from_integer((-2).into())]
            )
        );
        let w2 = parse_weight_literal(&h.ground, 1, "1/2").unwrap();
        assert!(w2.coords()[0].is_rational());
        let w3 = parse_weight_literal(&h.ground, 2, "a, -1").unwrap();
        assert_eq!(w3.coords()[0], WeightFieldElement::alpha(&h.ground));
        assert_eq!(w3.coords()[1], WeightFieldElement::from_int(&h.ground, -1));
        // wrong coordinate count is a schema error
        assert!(parse_weight_literal(&h.ground, 2, "1/2").is_err());
    }

    #[test]
    fn sheaf_payload_roundtrip() {
        let raw = json!({
            "monoid": {"rank": 1, "generators": [[1]]},
            "lambda": {"kind": "fraction", "n": 2},
            "sheaf": {
                "reps": [["0"], ["1/2"]],
                "pieces": [{"gens": 1, "rels": []}, {"gens": 1, "rels": []}],
                "transitions": [
                    {"from": 0, "to": 1, "jump": ["1/2"], "matrix": [["1"]]},
                    {"from": 1, "to": 0, "jump": ["1/2"], "matrix": [["0"]]}
                ]
            }
        });
        let h = parse_header(raw).unwrap();
        let chart = parse_chart::<Rat>(&h).unwrap();
        let b = Bounds::default();
        let sheaf = parse_sheaf::<Rat>(&h, &chart, &b).unwrap().unwrap();
        assert_eq!(sheaf.system.len(), 2);
        assert_eq!(sheaf.transitions.len(), 2);
        assert!(crate::parabolic::check_axioms(&chart, &sheaf, &b).passed());
    }

    #[test]
    fn module_payload() {
        let raw = json!({
            "monoid": {"rank": 1, "generators": [[1]]},
            "lambda": {"kind": "fraction", "n": 2},
            "module": {
                "gens": [{"weight": ["0"]}],
                "rels": [{"row": 0, "col": 0, "a": "1", "p": [0], "s": ["1/2"]}]
            }
        });
        let h = parse_header(raw).unwrap();
        let chart = parse_chart::<Rat>(&h).unwrap();
        let b = Bounds::default();
        let m = parse_module::<Rat>(&h, &chart, &b).unwrap().unwrap();
        assert_eq!(m.gens.len(), 1);
        assert_eq!(m.rel_weights.len(), 1);
        // μ = λ − p − s = −1/2
        assert_eq!(
            m.rel_weights[0],
            Weight::from_rats(&h.ground, &[Rat::new((-1).into(), 2.into())])
        );
    }
}
