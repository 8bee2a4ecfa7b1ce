//! Throwaway per-config profiling.
use std::sync::Arc;
use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use logpar::algebraic::{AlgebraicGround, WeightFieldElement};
use logpar::coeff::{Chart, CoefficientRing};
use logpar::correspondence::{roundtrip_module, roundtrip_parabolic};
use logpar::random::{random_module, random_sheaf};
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
            "N2",
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

fn irr(g: &Arc<AlgebraicGround>, rank: usize) -> Weight {
    let alpha = WeightFieldElement::alpha(g);
    let mut coords = vec![WeightFieldElement::from_int(g, 1); rank];
    coords[0] = alpha;
    Weight::new(coords)
}

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

fn run_config<S: logpar::random::SampleScalar>(
    lambda: &WeightMonoid,
    p: &Arc<logpar::monoid::ToricMonoid>,
    bounds: &Bounds,
    n: usize,
) -> (std::time::Duration, std::time::Duration) {
    let chart: Chart<S> = Chart::new(lambda.clone(), CoefficientRing::eps_point(p.clone()));
    let system = test_system(lambda, bounds);
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let t0 = Instant::now();
    for _ in 0..n {
        let sh = random_sheaf(&chart, &system, &mut rng, 3, bounds).unwrap();
        assert!(roundtrip_parabolic(&chart, &sh, bounds).unwrap().valid);
    }
    let para = t0.elapsed();
    let t1 = Instant::now();
    for _ in 0..n {
        let m = random_module(&chart, &mut rng, 3, 3, 3, bounds);
        assert!(roundtrip_module(&chart, &m, bounds).unwrap().valid);
    }
    (para, t1.elapsed())
}

#[test]
#[ignore]
fn per_config() {
    let g = sqrt2();
    let bounds = Bounds::default();
    for (pname, p) in monoids() {
        let kinds: Vec<(String, WeightMonoid)> = vec![
            ("half".into(), WeightMonoid::fraction(p.clone(), g.clone(), 2)),
            ("third".into(), WeightMonoid::fraction(p.clone(), g.clone(), 3)),
            (
                "sat".into(),
                WeightMonoid::new(
                    p.clone(),
                    g.clone(),
                    WeightKind::Saturated(vec![irr(&g, p.rank())]),
                )
                .unwrap(),
            ),
        ];
        for (lname, lambda) in kinds {
            let (pq, mq) = run_config::<Rat>(&lambda, &p, &bounds, 5);
            let (pe, me) = run_config::<Eps2>(&lambda, &p, &bounds, 5);
            println!("{pname}/{lname}: Q para {pq:?} mod {mq:?} | E2 para {pe:?} mod {me:?}");
        }
    }
}
