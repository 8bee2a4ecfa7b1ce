//! Coefficient rings with a log structure: a local scalar ring A together
//! with the chart values f_p ∈ A for p ∈ P.
//!
//! The chart map is a monoid homomorphism P → (A, ·) with f_0 = 1 and every
//! f_p for p ∈ P⁺ in the maximal ideal (the log-point condition; over a
//! field this forces f_p = 0). Values are stored on the Hilbert basis and
//! extended multiplicatively; well-definedness across different Hilbert
//! decompositions is checked on a φ-window at construction.

use std::sync::Arc;


use crate::monoid::{IVec, ToricMonoid};
use crate::scalar::LocalScalar;
use crate::weights::WeightMonoid;

#[derive(Debug, thiserror::Error)]
pub enum CoeffError {
    #[error("expected one value per Hilbert basis element ({0}), found {1}")]
    ValueCount(usize, usize),
    #[error("f-value on Hilbert element #{0} is a unit; log values must lie in the maximal ideal")]
    UnitValue(usize),
    #[error("f is not well-defined: decompositions of {0:?} produce different products")]
    Inconsistent(IVec),
}

/// A together with the multiplicative system f: P → A. Clones share the
/// value cache.
#[derive(Clone, Debug)]
pub struct CoefficientRing<S> {
    monoid: Arc<ToricMonoid>,
    f_hilbert: Vec<S>,
    cache: Arc<std::sync::Mutex<std::collections::HashMap<IVec, S>>>,
}

impl<S: LocalScalar> CoefficientRing<S> {
    pub fn new(monoid: Arc<ToricMonoid>, f_hilbert: Vec<S>) -> Result<Self, CoeffError> {
        let n = monoid.hilbert_basis().len();
        if f_hilbert.len() != n {
            return Err(CoeffError::ValueCount(n, f_hilbert.len()));
        }
        for (i, v) in f_hilbert.iter().enumerate() {
            if v.is_unit() {
                return Err(CoeffError::UnitValue(i));
            }
        }
        let ring = CoefficientRing { monoid, f_hilbert, cache: Default::default() };
        // consistency window: products of ≥ m factors vanish anyway
        let cap = ring.monoid.max_phi_hilbert() * S::nilpotency() as i64;
        for p in ring.monoid.cone_points_upto(cap) {
            let decomps = ring.monoid.hilbert_decompositions(&p);
            let mut val: Option<S> = None;
            for d in decomps {
                let prod = ring.product_of(&d);
                match &val {
                    None => val = Some(prod),
                    Some(v) => {
                        if *v != prod {
                            return Err(CoeffError::Inconsistent(p));
                        }
                    }
                }
            }
        }
        Ok(ring)
    }

    /// Log point: every f_p with p ∈ P⁺ vanishes.
    pub fn log_point(monoid: Arc<ToricMonoid>) -> Self {
        let n = monoid.hilbert_basis().len();
        CoefficientRing { monoid, f_hilbert: vec![S::zero(); n], cache: Default::default() }
    }

    /// f_h = ε on every Hilbert basis element (interesting over Q[ε]/(ε^m)).
    pub fn eps_point(monoid: Arc<ToricMonoid>) -> Self {
        let n = monoid.hilbert_basis().len();
        CoefficientRing { monoid, f_hilbert: vec![S::eps_pow(1); n], cache: Default::default() }
    }

    pub fn monoid(&self) -> &Arc<ToricMonoid> {
        &self.monoid
    }

    pub fn f_on_hilbert(&self) -> &[S] {
        &self.f_hilbert
    }

    fn product_of(&self, multiplicities: &[u32]) -> S {
        let mut acc = S::one();
        for (v, m) in self.f_hilbert.iter().zip(multiplicities) {
            for _ in 0..*m {
                acc = acc * v.clone();
            }
        }
        acc
    }

    /// f_p for p ∈ P (basis coordinates); panics outside the monoid.
    pub fn f(&self, p: &[i64]) -> S {
        if p.iter().all(|&a| a == 0) {
            return S::one();
        }
        if let Some(hit) = self.cache.lock().unwrap().get(p) {
            return hit.clone();
        }
        let decomps = self.monoid.hilbert_decompositions(p);
        let d = decomps.first().unwrap_or_else(|| {
            panic!("f_p requested outside the monoid: {p:?}")
        });
        let out = self.product_of(d);
        self.cache.lock().unwrap().insert(p.to_vec(), out.clone());
        out
    }
}

/// The full chart context: weight monoid Λ over P plus the coefficient
/// ring with its log values.
#[derive(Clone, Debug)]
pub struct Chart<S> {
    pub lambda: WeightMonoid,
    pub coeff: CoefficientRing<S>,
}

impl<S: LocalScalar> Chart<S> {
    pub fn new(lambda: WeightMonoid, coeff: CoefficientRing<S>) -> Self {
        assert!(
            Arc::ptr_eq(lambda.monoid(), coeff.monoid()) || lambda.monoid() == coeff.monoid(),
            "weight monoid and coefficient ring disagree on the base monoid"
        );
        Chart { lambda, coeff }
    }

    pub fn rank(&self) -> usize {
        self.lambda.rank()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Dual;
    use crate::Rat;
    use num_traits::{One, Zero};

    type E2 = Dual<2>;
    type E3 = Dual<3>;

    fn quadric() -> Arc<ToricMonoid> {
        Arc::new(ToricMonoid::new(vec![vec![2, 0], vec![0, 2], vec![1, 1]]).unwrap())
    }

    #[test]
    fn field_log_values_must_vanish() {
        let p = Arc::new(ToricMonoid::new(vec![vec![1]]).unwrap());
        assert!(CoefficientRing::<Rat>::new(p.clone(), vec![Rat::zero()]).is_ok());
        assert!(matches!(
            CoefficientRing::<Rat>::new(p, vec![Rat::one()]),
            Err(CoeffError::UnitValue(0))
        ));
    }

    #[test]
    fn eps_values_multiply() {
        let p = Arc::new(ToricMonoid::new(vec![vec![1]]).unwrap());
        let c = CoefficientRing::<E2>::eps_point(p);
        assert_eq!(c.f(&[1]), E2::eps());
        assert_eq!(c.f(&[2]), E2::zero()); // ε² = 0
        assert_eq!(c.f(&[0]), E2::one());
    }

    #[test]
    fn consistency_across_decompositions() {
        // (2,2) = (2,0)+(0,2) = 2·(1,1): over Q[ε]/(ε³) the products agree
        // for the all-ε assignment
        let q = quadric();
        let all_eps = CoefficientRing::<E3>::new(q.clone(), vec![E3::eps(); 3]);
        assert!(all_eps.is_ok());
        // but f(2,0) = ε, f(0,2) = ε, f(1,1) = 0 breaks on (2,2)
        let bad = CoefficientRing::<E3>::new(q, vec![E3::eps(), E3::zero(), E3::eps()]);
        assert!(matches!(bad, Err(CoeffError::Inconsistent(_))));
    }
}
