//! Phase classes (weights modulo 1) and their multiplicative embedding into
//! the equivariance scalar field Q(ζ_N)(u)(v).
//!
//! A deck transformation acts on a monomial of weight λ through the phase
//! e^{2πi g(λ)}, which only depends on g(λ) mod 1. We keep that exponent
//! additively as a [`PhaseClass`] and embed it multiplicatively by
//! q + nα mod 1 ↦ ζ_N^{qN}·u^n, with u the formal image of e^{2πiα} and v
//! reserved for 2πi. Injectivity of the embedding is exactly the
//! irrationality of α.

use std::sync::Arc;

use num_integer::Integer;
use num_traits::{One, Zero};

use crate::algebraic::{AlgebraicGround, WeightFieldElement};
use crate::poly::{Cyclo, Poly, RatFunc};
use crate::{Int, Rat, Sf};

/// A weight taken modulo 1, canonical representative in [0, 1).
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct PhaseClass {
    theta: WeightFieldElement,
}

impl PhaseClass {
    pub fn new(x: &WeightFieldElement) -> Self {
        PhaseClass { theta: x.frac() }
    }

    pub fn zero(ground: &Arc<AlgebraicGround>) -> Self {
        PhaseClass { theta: WeightFieldElement::zero(ground) }
    }

    pub fn representative(&self) -> &WeightFieldElement {
        &self.theta
    }

    pub fn add(&self, o: &Self) -> Self {
        Self::new(&self.theta.add(&o.theta))
    }

    pub fn neg(&self) -> Self {
        Self::new(&self.theta.neg())
    }

    /// True iff the underlying weight is an integer.
    pub fn is_trivial(&self) -> bool {
        self.theta.is_zero()
    }
}

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum EmbedError {
    #[error("rational part has denominator {0} which does not divide the cyclotomic level {1}")]
    DenominatorOverflow(Int, u32),
    #[error("α-coefficient has denominator {0} which does not divide the u-level {1}")]
    UDenominatorOverflow(Int, u32),
    #[error("phase involves α^{0} with k ≥ 2; a single-u scalar field cannot embed it")]
    UnsupportedPhase(usize),
}

/// Descriptor of the scalar field Q(ζ_N)(u)(v): cyclotomic level N and the
/// denominator level carried by u (so that rational multiples of α embed).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ScalarField {
    pub cyclo_level: u32,
    pub u_level: u32,
}

impl ScalarField {
    pub fn new(cyclo_level: u32, u_level: u32) -> Self {
        assert!(cyclo_level >= 1 && u_level >= 1);
        ScalarField { cyclo_level, u_level }
    }

    /// Smallest field accommodating the given phases (lcm of rational-part
    /// and α-part denominators).
    pub fn for_phases<'a>(phases: impl IntoIterator<Item = &'a PhaseClass>) -> Self {
        let mut n: Int = Int::one();
        let mut un: Int = Int::one();
        for p in phases {
            let r = p.representative();
            n = n.lcm(r.rat_part().denom());
            for c in r.alpha_coeffs() {
                un = un.lcm(c.denom());
            }
        }
        let to_u32 = |x: &Int| -> u32 { x.to_string().parse().unwrap_or(u32::MAX) };
        ScalarField::new(to_u32(&n).max(1), to_u32(&un).max(1))
    }

    pub fn one(&self) -> Sf {
        Sf::one()
    }

    /// The formal 2πi, the outer variable.
    pub fn v(&self) -> Sf {
        Sf::var()
    }

    /// u^k for integer k (u is w^{u_level} with w the inner variable).
    pub fn u_pow_times_level(&self, k_times_level: i64) -> Sf {
        let inner = if k_times_level >= 0 {
            RatFunc::from_poly(Poly::monomial(Cyclo::one(), k_times_level as usize))
        } else {
            RatFunc::new(Poly::one(), Poly::monomial(Cyclo::one(), (-k_times_level) as usize))
        };
        Sf::from_poly(Poly::constant(inner))
    }

    pub fn zeta_pow(&self, k: i64) -> Sf {
        let z = Cyclo::root_of_unity_pow(self.cyclo_level, k);
        Sf::from_poly(Poly::constant(RatFunc::from_poly(Poly::constant(z))))
    }

    /// The injective homomorphism PhaseClass → ScalarField^×.
    pub fn embed_phase(&self, theta: &PhaseClass) -> Result<Sf, EmbedError> {
        let r = theta.representative();
        for (k, c) in r.alpha_coeffs().iter().enumerate().skip(1) {
            if !c.is_zero() {
                return Err(EmbedError::UnsupportedPhase(k + 1));
            }
        }
        let q = r.rat_part();
        let qn = q.clone() * Rat::from_integer(self.cyclo_level.into());
        if !qn.is_integer() {
            return Err(EmbedError::DenominatorOverflow(
                q.denom().clone(),
                self.cyclo_level,
            ));
        }
        let alpha_coeff = r
            .alpha_coeffs()
            .first()
            .cloned()
            .unwrap_or_else(Rat::zero);
        let cn = alpha_coeff * Rat::from_integer(self.u_level.into());
        if !cn.is_integer() {
            return Err(EmbedError::UDenominatorOverflow(
                r.alpha_coeffs()[0].denom().clone(),
                self.u_level,
            ));
        }
        let zk: i64 = qn.to_integer().to_string().parse().expect("small exponent");
        let uk: i64 = cn.to_integer().to_string().parse().expect("small exponent");
        Ok(self.zeta_pow(zk) * self.u_pow_times_level(uk))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sqrt2() -> Arc<AlgebraicGround> {
        AlgebraicGround::new(
            vec![Int::from(-2), Int::from(0), Int::from(1)],
            (Rat::from_integer(1.into()), Rat::from_integer(2.into())),
        )
        .unwrap()
    }

    fn wfe(g: &Arc<AlgebraicGround>, c0: Rat, c1: Rat) -> WeightFieldElement {
        WeightFieldElement::new(g.clone(), vec![c0, c1])
    }

    #[test]
    fn phase_triviality() {
        let g = sqrt2();
        // integer 3
        assert!(PhaseClass::new(&WeightFieldElement::from_int(&g, 3)).is_trivial());
        // 1/2
        let half = wfe(&g, Rat::new(1.into(), 2.into()), Rat::zero());
        assert!(!PhaseClass::new(&half).is_trivial());
        // 2α − 2 is irrational: α-coefficient nonzero in the class
        let x = wfe(&g, Rat::from_integer((-2).into()), Rat::from_integer(2.into()));
        assert!(!PhaseClass::new(&x).is_trivial());
    }

    #[test]
    fn phase_group_laws() {
        let g = sqrt2();
        let a = PhaseClass::new(&wfe(&g, Rat::new(3.into(), 4.into()), Rat::one()));
        let z = PhaseClass::zero(&g);
        assert_eq!(a.add(&z), a);
        assert!(a.add(&a.neg()).is_trivial());
    }

    #[test]
    fn embed_examples() {
        let g = sqrt2();
        let sf = ScalarField::new(2, 1);
        // θ = 0 → 1
        assert_eq!(sf.embed_phase(&PhaseClass::zero(&g)).unwrap(), Sf::one());
        // θ = 1/2, N = 2 → ζ_2 = −1
        let half = PhaseClass::new(&wfe(&g, Rat::new(1.into(), 2.into()), Rat::zero()));
        assert_eq!(sf.embed_phase(&half).unwrap(), -Sf::one());
        // θ = α mod 1 → u (the inner variable, u_level = 1)
        let alpha = PhaseClass::new(&WeightFieldElement::alpha(&g));
        assert_eq!(alpha.representative().rat_part(), &-Rat::one());
        let u = sf.embed_phase(&alpha).unwrap();
        // α mod 1 = α − 1 ↦ ζ^{-N}·u = u
        assert_eq!(u, sf.u_pow_times_level(1));
    }

    #[test]
    fn embed_denominator_overflow() {
        let g = sqrt2();
        let sf = ScalarField::new(2, 1);
        let third = PhaseClass::new(&wfe(&g, Rat::new(1.into(), 3.into()), Rat::zero()));
        assert!(matches!(sf.embed_phase(&third), Err(EmbedError::DenominatorOverflow(..))));
        let halfa = PhaseClass::new(&wfe(&g, Rat::zero(), Rat::new(1.into(), 2.into())));
        assert!(matches!(sf.embed_phase(&halfa), Err(EmbedError::UDenominatorOverflow(..))));
        // with u_level 2 it embeds
        let sf2 = ScalarField::new(2, 2);
        assert!(sf2.embed_phase(&halfa).is_ok());
    }

    #[test]
    fn embed_is_homomorphic_with_kernel() {
        let g = sqrt2();
        let sf = ScalarField::new(12, 4);
        let mk = |q: Rat, c: Rat| PhaseClass::new(&wfe(&g, q, c));
        let samples = [
            mk(Rat::new(1.into(), 3.into()), Rat::one()),
            mk(Rat::new(5.into(), 12.into()), Rat::new(3.into(), 4.into())),
            mk(Rat::from_integer(2.into()), Rat::zero()),
            mk(Rat::new((-1).into(), 4.into()), Rat::new((-1).into(), 2.into())),
        ];
        for a in &samples {
            for b in &samples {
                let lhs = sf.embed_phase(&a.add(b)).unwrap();
                let rhs = sf.embed_phase(a).unwrap() * sf.embed_phase(b).unwrap();
                assert_eq!(lhs, rhs);
            }
            // kernel: image = 1 iff the phase is trivial
            let img = sf.embed_phase(a).unwrap();
            assert_eq!(img == Sf::one(), a.is_trivial());
        }
    }
}
