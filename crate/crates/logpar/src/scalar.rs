//! Scalar rings the module algebra is generic over.
//!
//! The two coefficient rings of interest are the field Q and the local rings
//! Q[ε]/(ε^m); both implement [`LocalScalar`], which is what the exact
//! linear algebra in [`crate::linalg`] requires: every element splits as a
//! unit times a power of the uniformizer ε (with ε = 0 in a field).

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Zero};

use crate::Rat;

/// An exact commutative ring with decidable equality and unit inversion.
pub trait Scalar:
    Clone
    + PartialEq
    + fmt::Debug
    + fmt::Display
    + Zero
    + One
    + Neg<Output = Self>
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Send
    + Sync
    + 'static
{
    /// Multiplicative inverse, if this element is a unit.
    fn inv(&self) -> Option<Self>;

    fn is_unit(&self) -> bool {
        self.inv().is_some()
    }
}

/// Marker for scalars forming a field (every nonzero element is a unit).
pub trait Field: Scalar {}

/// A local ring A = k[ε]/(ε^m): every nonzero element is unit·ε^k.
///
/// Fields are the m = 1 case. This is exactly the structure needed for
/// deterministic Smith-style canonical forms of presented modules.
pub trait LocalScalar: Scalar {
    /// Nilpotency order m of the uniformizer (1 for fields).
    fn nilpotency() -> usize;

    /// Decompose `self = unit · ε^k`; `None` for zero.
    fn unit_and_order(&self) -> Option<(Self, usize)>;

    /// ε^k (zero once k ≥ m).
    fn eps_pow(k: usize) -> Self;

    /// ε-adic order; `None` for zero.
    fn order(&self) -> Option<usize> {
        self.unit_and_order().map(|(_, k)| k)
    }
}

impl<F: Field> LocalScalar for F {
    fn nilpotency() -> usize {
        1
    }

    fn unit_and_order(&self) -> Option<(Self, usize)> {
        if self.is_zero() {
            None
        } else {
            Some((self.clone(), 0))
        }
    }

    fn eps_pow(k: usize) -> Self {
        if k == 0 {
            Self::one()
        } else {
            Self::zero()
        }
    }
}

impl Scalar for Rat {
    fn inv(&self) -> Option<Self> {
        if self.is_zero() {
            None
        } else {
            Some(Self::one() / self.clone())
        }
    }
}

impl Field for Rat {}

/// Truncated dual numbers Q[ε]/(ε^M), coefficients in the power basis
/// 1, ε, …, ε^{M−1}.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Dual<const M: usize> {
    c: Vec<Rat>,
}

impl<const M: usize> Dual<M> {
    pub fn new(mut c: Vec<Rat>) -> Self {
        assert!(M >= 1, "nilpotency order must be at least 1");
        c.resize(M, Rat::zero());
        c.truncate(M);
        Dual { c }
    }

    pub fn from_rat(r: Rat) -> Self {
        let mut c = vec![Rat::zero(); M];
        c[0] = r;
        Dual { c }
    }

    /// The uniformizer ε (zero when M = 1).
    pub fn eps() -> Self {
        let mut c = vec![Rat::zero(); M];
        if M > 1 {
            c[1] = Rat::one();
        }
        Dual { c }
    }

    pub fn coeffs(&self) -> &[Rat] {
        &self.c
    }

    pub fn constant_term(&self) -> &Rat {
        &self.c[0]
    }
}

impl<const M: usize> fmt::Display for Dual<M> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut wrote = false;
        for (k, a) in self.c.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            if wrote {
                write!(f, " + ")?;
            }
            match k {
                0 => write!(f, "{a}")?,
                1 => write!(f, "{a}*e")?,
                _ => write!(f, "{a}*e^{k}")?,
            }
            wrote = true;
        }
        if !wrote {
            write!(f, "0")?;
        }
        Ok(())
    }
}

impl<const M: usize> Add for Dual<M> {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        Dual { c: self.c.into_iter().zip(rhs.c).map(|(a, b)| a + b).collect() }
    }
}

impl<const M: usize> Sub for Dual<M> {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        Dual { c: self.c.into_iter().zip(rhs.c).map(|(a, b)| a - b).collect() }
    }
}

impl<const M: usize> Neg for Dual<M> {
    type Output = Self;
    fn neg(self) -> Self {
        Dual { c: self.c.into_iter().map(|a| -a).collect() }
    }
}

impl<const M: usize> Mul for Dual<M> {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        let mut c = vec![Rat::zero(); M];
        for (i, a) in self.c.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.c.iter().enumerate() {
                if i + j >= M {
                    break;
                }
                c[i + j] += a.clone() * b.clone();
            }
        }
        Dual { c }
    }
}

impl<const M: usize> Zero for Dual<M> {
    fn zero() -> Self {
        Dual { c: vec![Rat::zero(); M] }
    }
    fn is_zero(&self) -> bool {
        self.c.iter().all(|a| a.is_zero())
    }
}

impl<const M: usize> One for Dual<M> {
    fn one() -> Self {
        Self::from_rat(Rat::one())
    }
}

impl<const M: usize> Scalar for Dual<M> {
    fn inv(&self) -> Option<Self> {
        if self.c[0].is_zero() {
            return None;
        }
        // (a0 + n)^{-1} = a0^{-1} Σ (-n/a0)^k, the sum is finite by nilpotency
        let a0 = self.c[0].clone();
        let a0_inv = Self::from_rat(Rat::one() / a0.clone());
        let mut nil = self.clone();
        nil.c[0] = Rat::zero();
        let m = a0_inv.clone() * nil; // n/a0
        let mut acc = Self::one();
        let mut pow = Self::one();
        for _ in 1..M {
            pow = pow * (-m.clone());
            acc = acc + pow.clone();
        }
        Some(a0_inv * acc)
    }
}

impl<const M: usize> LocalScalar for Dual<M> {
    fn nilpotency() -> usize {
        M
    }

    fn unit_and_order(&self) -> Option<(Self, usize)> {
        let k = self.c.iter().position(|a| !a.is_zero())?;
        // self = ε^k · unit with unit = shifted coefficients
        let mut u = vec![Rat::zero(); M];
        for (i, a) in self.c[k..].iter().enumerate() {
            u[i] = a.clone();
        }
        Some((Dual { c: u }, k))
    }

    fn eps_pow(k: usize) -> Self {
        let mut c = vec![Rat::zero(); M];
        if k < M {
            c[k] = Rat::one();
        }
        Dual { c }
    }
}

/// Parse a rational from the serialized "p/q" (or plain integer) form.
pub fn parse_rat(s: &str) -> Option<Rat> {
    s.trim().parse::<Rat>().ok()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(s: &str) -> Rat {
        parse_rat(s).unwrap()
    }

    #[test]
    fn dual_inverse() {
        let x = Eps2t::new(vec![q("2"), q("3")]);
        let y = x.inv().unwrap();
        assert_eq!(x * y, Eps2t::one());
        assert!(Eps2t::eps().inv().is_none());
    }

    type Eps2t = Dual<2>;
    type Eps3t = Dual<3>;

    #[test]
    fn dual_nilpotency() {
        let e = Eps2t::eps();
        assert!((e.clone() * e).is_zero());
        let e3 = Eps3t::eps();
        assert!(!(e3.clone() * e3.clone()).is_zero());
        assert!((e3.clone() * e3.clone() * e3).is_zero());
    }

    #[test]
    fn unit_order_split() {
        let x = Eps3t::new(vec![q("0"), q("4"), q("1")]);
        let (u, k) = x.unit_and_order().unwrap();
        assert_eq!(k, 1);
        assert!(u.is_unit());
        assert_eq!(u * Eps3t::eps_pow(k), x);
        assert_eq!(q("5").unit_and_order().unwrap(), (q("5"), 0));
    }
}
