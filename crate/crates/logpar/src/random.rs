//! Seeded random instances for the property suites: axiom-valid parabolic
//! sheaves and arbitrary finite presentations of equivariant modules.
//!
//! Random sheaves are built from ingredients that preserve the diagram
//! axioms by construction — single-orbit seeds pushed through induction,
//! direct sums, and base changes by random invertible matrices — so every
//! generated sheaf passes the checker and can seed round trips.

use rand::Rng;

use crate::coeff::Chart;
use crate::fgmod::FgModule;
use crate::knmod::{EquivariantModule, Section};
use crate::linalg::Matrix;
use crate::parabolic::{induce, ParabolicSheaf, SheafError, Transition};
use crate::scalar::{Dual, LocalScalar};
use crate::weights::{FineWeightSystem, Weight};
use crate::{Bounds, Rat};

/// Scalars that can be drawn from a small exact pool.
pub trait SampleScalar: LocalScalar {
    fn sample<R: Rng>(rng: &mut R) -> Self;

    /// A unit for conjugation matrices.
    fn sample_unit<R: Rng>(rng: &mut R) -> Self;
}

fn small_rat<R: Rng>(rng: &mut R) -> Rat {
    let pool: [(i64, i64); 7] = [(0, 1), (1, 1), (-1, 1), (2, 1), (1, 2), (-1, 2), (3, 1)];
    let (p, q) = pool[rng.gen_range(0..pool.len())];
    Rat::new(p.into(), q.into())
}

impl SampleScalar for Rat {
    fn sample<R: Rng>(rng: &mut R) -> Self {
        small_rat(rng)
    }

    fn sample_unit<R: Rng>(rng: &mut R) -> Self {
        let pool: [(i64, i64); 5] = [(1, 1), (-1, 1), (2, 1), (1, 2), (3, 1)];
        let (p, q) = pool[rng.gen_range(0..pool.len())];
        Rat::new(p.into(), q.into())
    }
}

impl<const M: usize> SampleScalar for Dual<M> {
    fn sample<R: Rng>(rng: &mut R) -> Self {
        let mut c = vec![Rat::from_integer(0.into()); M];
        for slot in c.iter_mut() {
            *slot = small_rat(rng);
        }
        Dual::new(c)
    }

    fn sample_unit<R: Rng>(rng: &mut R) -> Self {
        let mut c = vec![Rat::from_integer(0.into()); M];
        c[0] = Rat::sample_unit(rng);
        for slot in c.iter_mut().skip(1) {
            *slot = small_rat(rng);
        }
        Dual::new(c)
    }
}

/// Random invertible matrix: a product of elementary operations applied to
/// the identity.
pub fn random_invertible<S: SampleScalar, R: Rng>(n: usize, rng: &mut R) -> Matrix<S> {
    let mut m = Matrix::<S>::identity(n);
    for _ in 0..(2 * n) {
        let i = rng.gen_range(0..n);
        let j = rng.gen_range(0..n);
        if i == j {
            let u = S::sample_unit(rng);
            for k in 0..n {
                let v = m.at(i, k).clone() * u.clone();
                m.set(i, k, v);
            }
        } else {
            let c = S::sample(rng);
            for k in 0..n {
                let v = m.at(i, k).clone() + c.clone() * m.at(j, k).clone();
                m.set(i, k, v);
            }
        }
    }
    m
}

fn random_piece<S: SampleScalar, R: Rng>(rng: &mut R, max_rank: usize) -> FgModule<S> {
    let gens = rng.gen_range(1..=max_rank);
    let mut m = FgModule::free(gens);
    let rels = rng.gen_range(0..=1);
    for _ in 0..rels {
        let row: Vec<S> = (0..gens).map(|_| S::sample(rng)).collect();
        m.push_rel(row);
    }
    m
}

/// An axiom-valid random sheaf on the given system: a direct sum of
/// single-orbit seeds induced up, base-changed by random invertible
/// matrices on every piece.
pub fn random_sheaf<S: SampleScalar, R: Rng>(
    chart: &Chart<S>,
    system: &FineWeightSystem,
    rng: &mut R,
    max_rank: usize,
    bounds: &Bounds,
) -> Result<ParabolicSheaf<S>, SheafError> {
    let strands = rng.gen_range(1..=2);
    let mut total: Option<ParabolicSheaf<S>> = None;
    for _ in 0..strands {
        let seed_rep = system.reps()[rng.gen_range(0..system.len())].clone();
        let seed_sys = system
            .lambda()
            .fine_system(&[seed_rep], bounds)
            .expect("rep stays in the group");
        let piece = random_piece(rng, max_rank);
        let seed = ParabolicSheaf::new(seed_sys, vec![piece], vec![])?;
        let induced = induce(chart, &seed, system, bounds)?;
        total = Some(match total {
            None => induced,
            Some(t) => direct_sum(&t, &induced)?,
        });
    }
    let sheaf = total.expect("at least one strand");
    Ok(conjugate(&sheaf, rng))
}

/// Blockwise direct sum of two sheaves on the same system.
pub fn direct_sum<S: LocalScalar>(
    a: &ParabolicSheaf<S>,
    b: &ParabolicSheaf<S>,
) -> Result<ParabolicSheaf<S>, SheafError> {
    assert_eq!(a.system.reps(), b.system.reps());
    let pieces: Vec<FgModule<S>> =
        a.pieces.iter().zip(&b.pieces).map(|(x, y)| x.direct_sum(y)).collect();
    let mut transitions = Vec::new();
    let block = |ma: Option<&Matrix<S>>, mb: Option<&Matrix<S>>, rows: (usize, usize), cols: (usize, usize)| {
        let mut m = Matrix::<S>::zero(rows.0 + rows.1, cols.0 + cols.1);
        if let Some(x) = ma {
            for i in 0..rows.0 {
                for j in 0..cols.0 {
                    m.set(i, j, x.at(i, j).clone());
                }
            }
        }
        if let Some(y) = mb {
            for i in 0..rows.1 {
                for j in 0..cols.1 {
                    m.set(rows.0 + i, cols.0 + j, y.at(i, j).clone());
                }
            }
        }
        m
    };
    // transitions exist for the same (from, to, jump) triples on both sides
    for ta in &a.transitions {
        let tb = b
            .transitions
            .iter()
            .find(|t| t.from == ta.from && t.to == ta.to && t.jump == ta.jump);
        let rows = (a.pieces[ta.to].gens(), b.pieces[ta.to].gens());
        let cols = (a.pieces[ta.from].gens(), b.pieces[ta.from].gens());
        transitions.push(Transition {
            from: ta.from,
            to: ta.to,
            jump: ta.jump.clone(),
            matrix: block(Some(&ta.matrix), tb.map(|t| &t.matrix), rows, cols),
        });
    }
    for tb in &b.transitions {
        if a.transitions.iter().any(|t| t.from == tb.from && t.to == tb.to && t.jump == tb.jump) {
            continue;
        }
        let rows = (a.pieces[tb.to].gens(), b.pieces[tb.to].gens());
        let cols = (a.pieces[tb.from].gens(), b.pieces[tb.from].gens());
        transitions.push(Transition {
            from: tb.from,
            to: tb.to,
            jump: tb.jump.clone(),
            matrix: block(None, Some(&tb.matrix), rows, cols),
        });
    }
    ParabolicSheaf::new(a.system.clone(), pieces, transitions)
}

/// Base change every piece by a random invertible matrix; an isomorphic
/// sheaf with scrambled presentation.
pub fn conjugate<S: SampleScalar, R: Rng>(
    sheaf: &ParabolicSheaf<S>,
    rng: &mut R,
) -> ParabolicSheaf<S> {
    let us: Vec<Matrix<S>> =
        sheaf.pieces.iter().map(|p| random_invertible(p.gens(), rng)).collect();
    let inverses: Vec<Matrix<S>> = us
        .iter()
        .map(|u| {
            // invert by solving U X = I column by column
            let n = u.rows();
            let mut cols = Vec::with_capacity(n);
            for j in 0..n {
                let mut e = vec![S::zero(); n];
                e[j] = S::one();
                cols.push(u.solve(&e).expect("unit-triangular product is invertible"));
            }
            Matrix::from_cols(cols, n)
        })
        .collect();
    // base change by C = U_k: relation columns become C·ρ (rows pick up
    // Cᵀ on the right) and transitions become U_t·M·U_s^{-1}
    let pieces: Vec<FgModule<S>> = sheaf
        .pieces
        .iter()
        .zip(&us)
        .map(|(p, u)| {
            let ut = u.transpose();
            let rows: Vec<Vec<S>> = p
                .rels()
                .iter()
                .map(|r| {
                    let rm = Matrix::new(vec![r.clone()]);
                    rm.mul(&ut).row(0).to_vec()
                })
                .collect();
            FgModule::new(p.gens(), rows)
        })
        .collect();
    let transitions = sheaf
        .transitions
        .iter()
        .map(|t| Transition {
            from: t.from,
            to: t.to,
            jump: t.jump.clone(),
            matrix: us[t.to].mul(&t.matrix).mul(&inverses[t.from]),
        })
        .collect();
    ParabolicSheaf::new(sheaf.system.clone(), pieces, transitions).expect("shape preserved")
}

/// A random finite presentation: generators at window weights (optionally
/// negated), relation rows with random Γ-form entries.
pub fn random_module<S: SampleScalar, R: Rng>(
    chart: &Chart<S>,
    rng: &mut R,
    max_gens: usize,
    max_rels: usize,
    phi_bound: i64,
    bounds: &Bounds,
) -> EquivariantModule<S> {
    let window: Vec<Weight> = chart.lambda.enumerate_window(phi_bound).take(24).collect();
    let ngens = rng.gen_range(1..=max_gens);
    let gens: Vec<Weight> = (0..ngens)
        .map(|_| {
            let w = window[rng.gen_range(0..window.len())].clone();
            if rng.gen_bool(0.5) {
                w.neg()
            } else {
                w
            }
        })
        .collect();
    let mut module = EquivariantModule::free(gens.clone());
    let nrels = rng.gen_range(0..=max_rels);
    for _ in 0..nrels {
        // relation weight: a generator weight minus a window monomial
        let j = rng.gen_range(0..gens.len());
        let s = window[rng.gen_range(0..window.len())].clone();
        let mu = gens[j].sub(&s);
        let mut entries = Vec::with_capacity(gens.len());
        for lam in &gens {
            let (maxima, _) = chart.lambda.maximal_below(&lam.sub(&mu), bounds);
            let mut section = Section::zero();
            for p in maxima {
                if rng.gen_bool(0.6) {
                    continue;
                }
                let smin = lam.sub(&mu).sub(&Weight::from_ints(lam.ground(), &p));
                section = section.add(&Section::monomial(S::sample(rng), smin));
            }
            entries.push(section);
        }
        module.push_relation(mu, entries);
    }
    module
        .validate(chart, bounds)
        .expect("constructed entries are canonical");
    module
}
