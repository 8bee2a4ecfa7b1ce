//! Acceptance suite: the exit criteria of the toolkit, one test per
//! criterion, each printing a pass/fail line (`--nocapture` shows them).
//!
//! Configurations: base monoids N, N², and the quadric-cone monoid
//! generated by (2,0), (1,1), (0,2); weight monoids (1/2)P, (1/3)P and the
//! saturation of P with one √2-irrational generator; coefficient rings Q
//! and Q[ε]/(ε²). All tolerances are exact: witnesses are certified by
//! integer/rational matrix identities, never numerically.

use std::sync::Arc;
use std::time::Instant;

use num_traits::{One, Signed, Zero};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use logpar::algebraic::{AlgebraicGround, WeightFieldElement};
use logpar::coeff::{Chart, CoefficientRing};
use logpar::cohomology::{group_cohomology, CohomologyMethod};
use logpar::correspondence::{
    check_exactness, compare_root_stack, phi, psi, roundtrip_module, roundtrip_parabolic,
    EquivariantMap,
};
use logpar::fgmod::ModuleMap;
use logpar::knmod::{gamma_sections, kernel_presentation, EquivariantModule, Section};
use logpar::linalg::Matrix;
use logpar::parabolic::{check_axioms, induce, restrict};
use logpar::random::{random_module, random_sheaf, SampleScalar};
use logpar::instance::ScalarCodec;
use logpar::scalar::LocalScalar;
use logpar::weights::{FineWeightSystem, Weight, WeightKind, WeightMonoid};
use logpar::{Bounds, Eps2, Int, Rat};

fn sqrt2() -> Arc<AlgebraicGround> {
    AlgebraicGround::new(
        vec![Int::from(-2), Int::from(0), Int::from(1)],
        (Rat::from_integer(1.into()), Rat::from_integer(2.into())),
    )
    .unwrap()
}

fn monoids() -> Vec<(&'static str, Arc<logpar::monoid::ToricMonoid>)> {
    vec![
        ("N", Arc::new(logpar::monoid::ToricMonoid::new(vec![vec![1]]).unwrap())),
        (
            "N^2",
            Arc::new(logpar::monoid::ToricMonoid::new(vec![vec![1, 0], vec![0, 1]]).unwrap()),
        ),
        (
            "quadric",
            Arc::new(
                logpar::monoid::ToricMonoid::new(vec![vec![2, 0], vec![0, 2], vec![1, 1]])
                    .unwrap(),
            ),
        ),
    ]
}

/// One √2-irrational weight inside the real cone, in basis coordinates.
fn irrational_generator(g: &Arc<AlgebraicGround>, rank: usize) -> Weight {
    let alpha = WeightFieldElement::alpha(g);
    let mut coords = vec![WeightFieldElement::from_int(g, 1); rank];
    coords[0] = alpha;
    Weight::new(coords)
}

fn lambda_kinds(
    g: &Arc<AlgebraicGround>,
    p: &Arc<logpar::monoid::ToricMonoid>,
) -> Vec<(String, WeightMonoid)> {
    let irr = irrational_generator(g, p.rank());
    vec![
        ("(1/2)P".into(), WeightMonoid::fraction(p.clone(), g.clone(), 2)),
        ("(1/3)P".into(), WeightMonoid::fraction(p.clone(), g.clone(), 3)),
        (
            "sat(P ∪ {√2-weight})".into(),
            WeightMonoid::new(p.clone(), g.clone(), WeightKind::Saturated(vec![irr])).unwrap(),
        ),
    ]
}

/// Two-class fine system for random sheaves: the zero class plus the first
/// nontrivial window class.
fn test_system(lambda: &WeightMonoid, bounds: &Bounds) -> FineWeightSystem {
    let g = lambda.ground().clone();
    let mut reps = vec![Weight::zero(&g, lambda.rank())];
    for w in lambda.enumerate_window(2).take(8) {
        let c = w.frac();
        if !c.is_zero() && !reps.iter().any(|r| r.class_eq(&c)) {
            reps.push(c);
            break;
        }
    }
    lambda.fine_system(&reps, bounds).unwrap()
}

fn verdict_line(id: u32, name: &str, pass: bool) {
    println!("[{}] criterion {}: {}", if pass { "PASS" } else { "FAIL" }, id, name);
    assert!(pass, "criterion {id} ({name}) failed");
}

/// Chart with the canonical log values: f ≡ 0 over a field, f_h = ε over
/// the dual numbers (ε-powers vanish over fields, so this is uniform).
fn chart_for<S: LocalScalar>(
    lambda: &WeightMonoid,
    p: &Arc<logpar::monoid::ToricMonoid>,
) -> Chart<S> {
    Chart::new(lambda.clone(), CoefficientRing::eps_point(p.clone()))
}

fn roundtrip_parabolic_config<S: SampleScalar + ScalarCodec>(
    ring: &str,
    count: usize,
    seed: u64,
) -> usize {
    let g = sqrt2();
    let bounds = Bounds::default();
    let mut total = 0;
    for (pname, p) in monoids() {
        for (lname, lambda) in lambda_kinds(&g, &p) {
            let chart: Chart<S> = chart_for(&lambda, &p);
            let system = test_system(&lambda, &bounds);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            for k in 0..count {
                let sheaf = random_sheaf(&chart, &system, &mut rng, 3, &bounds)
                    .unwrap_or_else(|e| panic!("{pname}/{lname}/{ring} #{k}: {e}"));
                let w = roundtrip_parabolic(&chart, &sheaf, &bounds)
                    .unwrap_or_else(|e| panic!("{pname}/{lname}/{ring} #{k}: {e}"));
                assert!(
                    w.valid,
                    "{pname}/{lname}/{ring} #{k}: {:?}",
                    w.failures
                );
                total += 1;
            }
        }
    }
    total
}

#[test]
fn criterion_1_roundtrip_phi_psi() {
    let t0 = Instant::now();
    let n = roundtrip_parabolic_config::<Rat>("Q", 100, 20_001)
        + roundtrip_parabolic_config::<Eps2>("Q[ε]/(ε²)", 100, 20_002);
    let elapsed = t0.elapsed();
    println!("  {n} parabolic round trips in {elapsed:?}");
    verdict_line(
        1,
        "Φ∘Ψ ≅ id on seeded random fine sheaves, exact witnesses",
        n == 1800 && elapsed.as_secs() < 60,
    );
}

fn roundtrip_module_config<S: SampleScalar + ScalarCodec>(
    ring: &str,
    count: usize,
    seed: u64,
) -> usize {
    let g = sqrt2();
    let bounds = Bounds::default();
    let mut total = 0;
    for (pname, p) in monoids() {
        for (lname, lambda) in lambda_kinds(&g, &p) {
            let chart: Chart<S> = chart_for(&lambda, &p);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            for k in 0..count {
                let module = random_module(&chart, &mut rng, 3, 3, 3, &bounds);
                let w = roundtrip_module(&chart, &module, &bounds)
                    .unwrap_or_else(|e| panic!("{pname}/{lname}/{ring} #{k}: {e}"));
                assert!(w.valid, "{pname}/{lname}/{ring} #{k}: {:?}", w.failures);
                total += 1;
            }
        }
    }
    total
}

#[test]
fn criterion_2_roundtrip_psi_phi() {
    let t0 = Instant::now();
    let n = roundtrip_module_config::<Rat>("Q", 100, 30_001)
        + roundtrip_module_config::<Eps2>("Q[ε]/(ε²)", 100, 30_002);
    let elapsed = t0.elapsed();
    println!("  {n} module round trips in {elapsed:?}");
    verdict_line(
        2,
        "Ψ∘Φ ≅ id on seeded random finite presentations, exact witnesses",
        n == 1800 && elapsed.as_secs() < 60,
    );
}

#[test]
fn criterion_3_cohomology_vanishing() {
    let g = sqrt2();
    let bounds = Bounds { phi_bound: 2, ..Bounds::default() };
    let mut ok = true;
    let mut checked = 0;
    for (pname, p) in monoids().into_iter().filter(|(_, p)| p.rank() <= 2) {
        for (lname, lambda) in lambda_kinds(&g, &p) {
            let chart: Chart<Rat> =
                Chart::new(lambda.clone(), CoefficientRing::log_point(p.clone()));
            let r = chart.rank();
            // 20 sampled λ per configuration: window elements, their
            // negations, and unit shifts of both
            let mut samples: Vec<Weight> = Vec::new();
            for w in lambda.enumerate_window(2).take(14) {
                let shifted = w.add_ints(&vec![1; p.rank()]);
                for cand in [w.clone(), w.neg(), shifted.clone(), shifted.neg()] {
                    if !samples.contains(&cand) {
                        samples.push(cand);
                    }
                }
                if samples.len() >= 20 {
                    break;
                }
            }
            samples.truncate(20);
            assert_eq!(samples.len(), 20, "{pname}/{lname}: sample pool too small");
            for lam in &samples {
                let rep = group_cohomology(
                    &chart,
                    lam,
                    CohomologyMethod::Both,
                    r + 2,
                    true,
                    &bounds,
                )
                .unwrap_or_else(|e| panic!("{pname}/{lname} λ={lam}: {e}"));
                let rec = rep.recursion_dims.as_ref().unwrap();
                let vanish = rec.iter().skip(1).all(|&d| d == 0)
                    && rep.koszul_transitions_vanish.unwrap().iter().all(|&b| b);
                if !vanish {
                    eprintln!("  vanishing fails at {pname}/{lname} λ={lam}");
                    ok = false;
                }
                checked += 1;
            }
        }
    }
    // negative control: trivial character with no log variables on the
    // circle has a one-dimensional H^1
    let p = Arc::new(logpar::monoid::ToricMonoid::new(vec![vec![1]]).unwrap());
    let chart: Chart<Rat> = Chart::new(
        WeightMonoid::fraction(p.clone(), g.clone(), 2),
        CoefficientRing::log_point(p),
    );
    let negative = group_cohomology(
        &chart,
        &Weight::zero(&g, 1),
        CohomologyMethod::Both,
        3,
        false,
        &Bounds { phi_bound: 0, ..Bounds::default() },
    )
    .unwrap();
    let rec = negative.recursion_dims.clone().unwrap();
    let control_ok = rec == vec![1, 1]
        && negative.koszul_slices.as_ref().unwrap().0.dims[1] == 1
        && !negative.koszul_transitions_vanish.unwrap()[0];
    println!("  {checked} weights checked; negative control H^1 = {}", rec[1]);
    verdict_line(
        3,
        "H^(m>0) vanishes by both methods; plain coefficients keep H^1",
        ok && control_ok && checked == 180,
    );
}

fn exact_triples_config<S: SampleScalar + ScalarCodec>(ring: &str, count: usize, seed: u64) -> usize {
    let g = sqrt2();
    let bounds = Bounds::default();
    let mut total = 0;
    for (pname, p) in monoids() {
        for (lname, lambda) in lambda_kinds(&g, &p) {
            let chart: Chart<S> = chart_for(&lambda, &p);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut built = 0;
            let mut attempts = 0;
            while built < count && attempts < count * 8 {
                attempts += 1;
                // a random map φ: relations → free, then the triple
                // 0 → im φ → free → coker φ → 0
                let m = random_module(&chart, &mut rng, 2, 2, 2, &bounds);
                if m.rel_weights.is_empty() {
                    continue;
                }
                let free = EquivariantModule::<S>::free(m.gens.clone());
                let kernel = match kernel_presentation(&chart, &m, &bounds) {
                    Ok(k) => k,
                    Err(_) => continue,
                };
                let image = EquivariantModule {
                    gens: m.rel_weights.clone(),
                    rel_weights: kernel.generators.rel_weights.clone(),
                    rel_entries: kernel.images.clone(),
                };
                let f = EquivariantMap {
                    source: image,
                    target: free.clone(),
                    entries: m.rel_entries.clone(),
                };
                let gmap = EquivariantMap {
                    source: free,
                    target: m.clone(),
                    entries: (0..m.gens.len())
                        .map(|i| {
                            (0..m.gens.len())
                                .map(|j| {
                                    if i == j {
                                        Section::monomial(
                                            S::one(),
                                            Weight::zero(&g, chart.rank()),
                                        )
                                    } else {
                                        Section::zero()
                                    }
                                })
                                .collect()
                        })
                        .collect(),
                };
                let rep = check_exactness(&chart, &f, &gmap, &bounds)
                    .unwrap_or_else(|e| panic!("{pname}/{lname}/{ring}: {e}"));
                assert!(rep.passed(), "{pname}/{lname}/{ring}: {rep:?}");
                built += 1;
                total += 1;
            }
            assert!(built >= count, "{pname}/{lname}/{ring}: only {built} triples built");
        }
    }
    total
}

#[test]
fn criterion_4_pushforward_exactness() {
    let n = exact_triples_config::<Rat>("Q", 20, 40_001)
        + exact_triples_config::<Eps2>("Q[ε]/(ε²)", 20, 40_002);
    println!("  {n} short exact triples pushed forward");
    verdict_line(4, "exact triples push to exact triples over A", n == 360);
}

/// Raw monomial scan of Λ within a φ-cap, built directly from the kind
/// data (lattice points over n, or multiples of the saturated generator
/// plus integer shifts) with facet sign tests only — independent of the
/// window-enumeration and class machinery under test.
fn raw_scan(lambda: &WeightMonoid, cap: i64, max_multiplicity: u32) -> Vec<Weight> {
    let g = lambda.ground().clone();
    let monoid = lambda.monoid().clone();
    let capw = WeightFieldElement::from_int(&g, cap);
    let mut out: Vec<Weight> = Vec::new();
    match lambda.kind() {
        WeightKind::Fraction(n) => {
            for q in monoid.cone_points_upto(cap * *n as i64) {
                out.push(
                    Weight::from_ints(&g, &q).scale(&Rat::new(1.into(), (*n as i64).into())),
                );
            }
        }
        WeightKind::Saturated(gens) => {
            assert_eq!(gens.len(), 1, "acceptance configs use one irrational generator");
            for k in 0..=max_multiplicity {
                let base = gens[0].scale(&Rat::from_integer(k.into()));
                let boxes = monoid.box_for_phi(cap);
                let base_floor = base.floor_ints();
                let mut shifts = vec![vec![]];
                for (i, &(lo, hi)) in boxes.iter().enumerate() {
                    let mut next = Vec::new();
                    for s in &shifts {
                        for v in (lo - base_floor[i] - 1)..=(hi - base_floor[i]) {
                            let mut t: Vec<i64> = s.clone();
                            t.push(v);
                            next.push(t);
                        }
                    }
                    shifts = next;
                }
                for s in shifts {
                    let w = base.add_ints(&s);
                    if monoid.cone_contains(w.coords())
                        && lambda.phi(&w).sub(&capw).sign() <= 0
                        && !out.contains(&w)
                    {
                        out.push(w);
                    }
                }
            }
        }
    }
    out
}

/// Independent brute-force invariants oracle for Γ(L_λ): class-filter the
/// scanned monomials of the truncated chart ring, keep the irreducible
/// ones as generators, and impose the identification rows coming from the
/// reductions of the deeper monomials (a single S^σ rewriting as f_p·S^s
/// through several irreducibles glues them). Works entirely by raw cone
/// tests on the scan.
fn gamma_oracle<S: LocalScalar>(
    chart: &Chart<S>,
    lam: &Weight,
    scan: &[Weight],
) -> (logpar::fgmod::FgModule<S>, Vec<Weight>) {
    let monoid = chart.lambda.monoid().clone();
    let in_lambda = |w: &Weight| scan.iter().any(|s| s == w);
    let mut basis: Vec<Weight> = Vec::new();
    let mut class_monomials: Vec<Weight> = Vec::new();
    for s in scan {
        if !s.sub(lam).is_integral() {
            continue;
        }
        class_monomials.push(s.clone());
        let mut divisible = false;
        for h in monoid.hilbert_basis() {
            let neg: Vec<i64> = h.iter().map(|a| -a).collect();
            let down = s.add_ints(&neg);
            if monoid.cone_contains(down.coords()) && in_lambda(&down) {
                divisible = true;
                break;
            }
        }
        if !divisible {
            basis.push(s.clone());
        }
    }
    let mut module = logpar::fgmod::FgModule::<S>::free(basis.len());
    for sigma in &class_monomials {
        // all ways σ rewrites through an irreducible monomial
        let hits: Vec<(usize, Vec<i64>)> = basis
            .iter()
            .enumerate()
            .filter_map(|(i, s)| {
                let p = sigma.sub(s).to_ints()?;
                monoid.member(&p).then_some((i, p))
            })
            .collect();
        for pair in hits.windows(2) {
            let (i, pi) = &pair[0];
            let (j, pj) = &pair[1];
            let fi = chart.coeff.f(pi);
            let fj = chart.coeff.f(pj);
            if fi.is_zero() && fj.is_zero() {
                continue;
            }
            let mut row = vec![S::zero(); basis.len()];
            row[*i] = fi;
            row[*j] = row[*j].clone() - fj;
            module.push_rel(row);
        }
    }
    (module, basis)
}

fn colimit_formula_config<S: SampleScalar + ScalarCodec>(ring: &str) -> (usize, bool) {
    let g = sqrt2();
    let bounds = Bounds::default();
    let mut checked = 0;
    let mut ok = true;
    for (pname, p) in monoids() {
        for (lname, lambda) in lambda_kinds(&g, &p) {
            let chart: Chart<S> = chart_for(&lambda, &p);
            let scan = raw_scan(&lambda, 7, 8);
            // test weights: window elements with φ(λ) ≤ 3, their
            // negations, and P^gp shifts
            let mut tests: Vec<Weight> = Vec::new();
            let three = WeightFieldElement::from_int(&g, 3);
            for w in lambda.enumerate_window(3).take(24) {
                if lambda.phi(&w).sub(&three).sign() <= 0 {
                    tests.push(w.clone());
                    tests.push(w.neg());
                    tests.push(w.add_ints(&vec![1; p.rank()]));
                }
            }
            for lam in &tests {
                let gamma = match gamma_sections(&chart, lam, &bounds) {
                    Ok(gm) => gm,
                    Err(e) => panic!("{pname}/{lname}/{ring} λ={lam}: {e}"),
                };
                let (oracle_module, oracle_basis) = gamma_oracle(&chart, lam, &scan);
                // exact module isomorphism: identical canonical shapes and
                // the same basis monomials
                let gamma_monomials: Vec<Weight> = gamma
                    .basis
                    .iter()
                    .map(|p_| lam.sub(&Weight::from_ints(&g, p_)))
                    .collect();
                let same = gamma.module.shape() == oracle_module.shape()
                    && oracle_basis.len() == gamma_monomials.len()
                    && oracle_basis.iter().all(|b| gamma_monomials.contains(b));
                if !same {
                    eprintln!(
                        "  disagreement at {pname}/{lname}/{ring} λ={lam}: oracle {:?} vs gamma {:?}",
                        oracle_basis, gamma_monomials
                    );
                    ok = false;
                }
                checked += 1;
            }
        }
    }
    (checked, ok)
}

#[test]
fn criterion_5_colimit_formula() {
    let (n1, ok1) = colimit_formula_config::<Rat>("Q");
    let (n2, ok2) = colimit_formula_config::<Eps2>("Q[ε]/(ε²)");
    println!("  {} weights compared against the invariants oracle", n1 + n2);
    verdict_line(
        5,
        "Γ-colimit formula matches brute-force invariants",
        ok1 && ok2 && n1 + n2 > 200,
    );
}

#[test]
fn criterion_6_root_stack_comparison() {
    let g = sqrt2();
    let bounds = Bounds::default();
    let t0 = Instant::now();
    let mut total = 0;
    for n in [2u32, 3, 4] {
        for (pname, p) in monoids().into_iter().filter(|(_, p)| p.rank() <= 2) {
            let lambda = WeightMonoid::fraction(p.clone(), g.clone(), n);
            let chart: Chart<Rat> =
                Chart::new(lambda.clone(), CoefficientRing::log_point(p.clone()));
            let system = test_system(&lambda, &bounds);
            let mut rng = ChaCha8Rng::seed_from_u64(60_000 + n as u64);
            for k in 0..4 {
                let sheaf = random_sheaf(&chart, &system, &mut rng, 2, &bounds).unwrap();
                let rep = compare_root_stack(&chart, &sheaf, n, &bounds)
                    .unwrap_or_else(|e| panic!("{pname} n={n} #{k}: {e}"));
                assert!(rep.passed(), "{pname} n={n} #{k}: {:?}", rep.failures);
                total += 1;
            }
        }
    }
    let elapsed = t0.elapsed();
    println!("  {total} graded-vs-equivariant comparisons in {elapsed:?}");
    verdict_line(
        6,
        "graded root-stack route agrees with the equivariant route",
        total >= 30 && elapsed.as_secs() < 30,
    );
}

#[test]
fn criterion_7_adjunction_unit() {
    let g = sqrt2();
    let bounds = Bounds::default();
    let mut total = 0;
    for (pname, p) in monoids() {
        let lambda = WeightMonoid::fraction(p.clone(), g.clone(), 2);
        let chart: Chart<Rat> = Chart::new(lambda.clone(), CoefficientRing::log_point(p.clone()));
        let big = test_system(&lambda, &bounds);
        let small = lambda
            .fine_system(&[Weight::zero(&g, p.rank())], &bounds)
            .unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(70_000);
        for k in 0..50 {
            let seed_sheaf = random_sheaf(&chart, &small, &mut rng, 3, &bounds).unwrap();
            let up = induce(&chart, &seed_sheaf, &big, &bounds)
                .unwrap_or_else(|e| panic!("{pname} #{k}: {e}"));
            assert!(check_axioms(&chart, &up, &bounds).passed(), "{pname} #{k}");
            let back = restrict(&up, &small).unwrap();
            // the unit is the identity on pieces, exactly
            assert_eq!(back.pieces, seed_sheaf.pieces, "{pname} #{k}");
            for t in &seed_sheaf.transitions {
                let m = back
                    .derived_transition(&chart, t.from, t.to, &t.jump)
                    .expect("transition survives");
                let lhs = ModuleMap::new(
                    back.pieces[t.from].clone(),
                    back.pieces[t.to].clone(),
                    m,
                );
                let rhs = ModuleMap::new(
                    seed_sheaf.pieces[t.from].clone(),
                    seed_sheaf.pieces[t.to].clone(),
                    t.matrix.clone(),
                );
                assert!(lhs.equals(&rhs), "{pname} #{k}");
            }
            total += 1;
        }
    }
    println!("  {total} restrict∘induce identities certified");
    verdict_line(7, "restrict∘induce = id, exact equality on pieces", total == 150);
}

#[test]
fn criterion_8_saturated_enumeration() {
    let g = sqrt2();
    let p = Arc::new(logpar::monoid::ToricMonoid::new(vec![vec![1]]).unwrap());
    let alpha = Weight::new(vec![WeightFieldElement::alpha(&g)]);
    let lambda =
        WeightMonoid::new(p, g.clone(), WeightKind::Saturated(vec![alpha])).unwrap();
    let mine: Vec<String> =
        lambda.enumerate_window(1).take(10).map(|w| w.to_string()).collect();
    // independent oracle: rational interval arithmetic from scratch on
    // x² = 2 bracketed by (1, 2); stage-wise in the multiple of α, each
    // stage's elements ordered by value via interval separation
    let oracle = interval_oracle(10);
    println!("  stream: {mine:?}");
    verdict_line(8, "first 10 saturated window elements match the interval oracle", mine == oracle);
}

/// Enumerates {nα + m : n ∈ N, m ∈ Z} ∩ [0, 1] stage-wise in n, ordering
/// each stage by value, using only rational interval bisection of x² = 2.
fn interval_oracle(count: usize) -> Vec<String> {
    let two = Rat::from_integer(2.into());
    let mut lo = Rat::one();
    let mut hi = two.clone();
    let refine = |lo: &mut Rat, hi: &mut Rat| {
        for _ in 0..8 {
            let mid = (lo.clone() + hi.clone()) / two.clone();
            if mid.clone() * mid.clone() < two {
                *lo = mid;
            } else {
                *hi = mid;
            }
        }
    };
    refine(&mut lo, &mut hi);
    let mut out: Vec<String> = Vec::new();
    let mut stage: u32 = 0;
    while out.len() < count && stage < 64 {
        let n = Rat::from_integer(stage.into());
        // nα + m ∈ [0, 1]: m ranges over [−ceil(n·hi), 1]
        let mut batch: Vec<(Rat, i64, i64)> = Vec::new(); // (approx value key, n, m)
        let lo_b = -(n.clone() * hi.clone()).ceil().to_integer();
        let hi_b = Int::from(2) - (n.clone() * lo.clone()).floor().to_integer();
        let lo_i: i64 = lo_b.to_string().parse().unwrap();
        let hi_i: i64 = hi_b.to_string().parse().unwrap();
        for m in lo_i..=hi_i {
            // decide 0 ≤ nα + m ≤ 1 exactly: refine until the interval
            // separates from both endpoints (nα + m is irrational for
            // n ≥ 1; the n = 0 case is exact)
            if stage == 0 {
                if (0..=1).contains(&m) {
                    batch.push((Rat::from_integer(m.into()), 0, m));
                }
                continue;
            }
            let mut llo = lo.clone();
            let mut lhi = hi.clone();
            let value = loop {
                let vlo = n.clone() * llo.clone() + Rat::from_integer(m.into());
                let vhi = n.clone() * lhi.clone() + Rat::from_integer(m.into());
                if vlo > Rat::one() || vhi < Rat::zero() {
                    break None;
                }
                if vlo >= Rat::zero() && vhi <= Rat::one() {
                    break Some(vlo);
                }
                refine(&mut llo, &mut lhi);
            };
            if let Some(v) = value {
                batch.push((v, stage as i64, m));
            }
        }
        batch.sort_by(|a, b| a.0.cmp(&b.0));
        for (_, n_, m) in batch {
            let alpha = if n_ == 1 { "a".to_string() } else { format!("{n_}a") };
            let s = match (n_, m) {
                (0, m) => format!("({m})"),
                (_, 0) => format!("({alpha})"),
                (_, m) => format!("({m} + {alpha})"),
            };
            if !out.contains(&s) {
                out.push(s);
            }
            if out.len() >= count {
                break;
            }
        }
        stage += 1;
    }
    out
}
