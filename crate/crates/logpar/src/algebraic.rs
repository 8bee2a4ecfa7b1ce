//! The weight scalar field Q(α) for a fixed real algebraic irrational α,
//! with total decidable sign.
//!
//! α is pinned by an integer minimal polynomial and an isolating interval
//! with rational endpoints containing exactly one real root. An element is
//! a rational coefficient vector in the power basis 1, α, …, α^{d−1}. The
//! sign of a nonzero element is decided by refining the isolating interval
//! by bisection until the evaluated interval excludes zero; this terminates
//! because a nonzero coefficient vector denotes a nonzero real number.

use std::fmt;
use std::sync::Arc;

use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::poly::Poly;
use crate::{Int, Rat};

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum GroundError {
    #[error("minimal polynomial must have degree at least 2")]
    DegreeTooSmall,
    #[error("minimal polynomial has a rational root {0}, so it is reducible")]
    RationalRoot(Rat),
    #[error("minimal polynomial is not squarefree")]
    NotSquarefree,
    #[error("isolating interval must contain exactly one real root, found {0}")]
    RootCount(usize),
    #[error("isolating interval is empty or reversed")]
    BadInterval,
}

/// A real algebraic irrational α: integer minimal polynomial plus an
/// isolating interval bracketing exactly one real root.
#[derive(Debug)]
pub struct AlgebraicGround {
    minpoly: Vec<Int>,
    interval: (Rat, Rat),
    /// Pre-refined interval so that typical sign queries decide instantly.
    refined: (Rat, Rat),
    monic: Poly<Rat>,
}

impl PartialEq for AlgebraicGround {
    fn eq(&self, other: &Self) -> bool {
        self.minpoly == other.minpoly && self.interval == other.interval
    }
}

fn eval_int_poly(p: &[Int], x: &Rat) -> Rat {
    let mut acc = Rat::zero();
    for c in p.iter().rev() {
        acc = acc * x.clone() + Rat::from_integer(c.clone());
    }
    acc
}

/// Number of distinct real roots of `p` in the open interval (lo, hi),
/// assuming p(lo) ≠ 0 ≠ p(hi), by Sturm's theorem.
fn sturm_count(p: &Poly<Rat>, lo: &Rat, hi: &Rat) -> usize {
    let mut chain = vec![p.clone(), p.derivative()];
    loop {
        let n = chain.len();
        if chain[n - 1].is_zero() {
            chain.pop();
            break;
        }
        let (_, r) = chain[n - 2].divmod(&chain[n - 1]);
        if r.is_zero() {
            break;
        }
        chain.push(-r);
    }
    let eval = |x: &Rat| -> usize {
        let mut variations = 0;
        let mut last: Option<bool> = None; // sign as positivity
        for q in &chain {
            let mut v = Rat::zero();
            for c in q.coeffs().iter().rev() {
                v = v * x.clone() + c.clone();
            }
            if v.is_zero() {
                continue;
            }
            let pos = v.is_positive();
            if let Some(l) = last {
                if l != pos {
                    variations += 1;
                }
            }
            last = Some(pos);
        }
        variations
    };
    eval(lo) - eval(hi)
}

impl AlgebraicGround {
    /// Validates: degree ≥ 2, squarefree, no rational root (hence
    /// irreducible for degree ≤ 3), and exactly one real root in the
    /// interval. Irreducibility in degree ≥ 4 beyond these necessary
    /// conditions is the caller's responsibility.
    pub fn new(minpoly: Vec<Int>, interval: (Rat, Rat)) -> Result<Arc<Self>, GroundError> {
        let mut mp = minpoly.clone();
        while mp.last().map_or(false, |c| c.is_zero()) {
            mp.pop();
        }
        if mp.len() < 3 {
            return Err(GroundError::DegreeTooSmall);
        }
        if interval.0 >= interval.1 {
            return Err(GroundError::BadInterval);
        }
        let monic_den = Rat::from_integer(mp.last().unwrap().clone());
        let monic = Poly::new(
            mp.iter().map(|c| Rat::from_integer(c.clone()) / monic_den.clone()).collect(),
        );
        let der = monic.derivative();
        if monic.gcd(&der).degree() != Some(0) {
            return Err(GroundError::NotSquarefree);
        }
        if let Some(root) = rational_root(&mp) {
            return Err(GroundError::RationalRoot(root));
        }
        // endpoints are rational, hence not roots; Sturm applies directly
        let count = sturm_count(&monic, &interval.0, &interval.1);
        if count != 1 {
            return Err(GroundError::RootCount(count));
        }
        let mut ground = AlgebraicGround {
            minpoly: mp,
            interval: interval.clone(),
            refined: interval,
            monic,
        };
        ground.refined = ground.refine(ground.refined.clone(), 32);
        Ok(Arc::new(ground))
    }

    pub fn degree(&self) -> usize {
        self.minpoly.len() - 1
    }

    pub fn minpoly(&self) -> &[Int] {
        &self.minpoly
    }

    pub fn isolating_interval(&self) -> &(Rat, Rat) {
        &self.interval
    }

    pub(crate) fn monic_minpoly(&self) -> &Poly<Rat> {
        &self.monic
    }

    /// Bisect `iv` around the root `steps` times.
    pub fn refine(&self, iv: (Rat, Rat), steps: usize) -> (Rat, Rat) {
        let (mut lo, mut hi) = iv;
        let sign_at = |x: &Rat| eval_int_poly(&self.minpoly, x).is_positive();
        let slo = sign_at(&lo);
        for _ in 0..steps {
            let mid = (lo.clone() + hi.clone()) / Rat::from_integer(2.into());
            // mid is rational and the polynomial has no rational roots
            if sign_at(&mid) == slo {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        (lo, hi)
    }

    pub(crate) fn start_interval(&self) -> (Rat, Rat) {
        self.refined.clone()
    }
}

fn rational_root(p: &[Int]) -> Option<Rat> {
    use num_integer::Integer;
    let a0 = &p[0];
    let an = p.last().unwrap();
    if a0.is_zero() {
        return Some(Rat::zero());
    }
    let divisors = |n: &Int| -> Vec<Int> {
        let n = n.abs();
        let mut out = Vec::new();
        let mut d = Int::one();
        // desk scale: trial division up to |n|
        while &d * &d <= n {
            if n.is_multiple_of(&d) {
                out.push(d.clone());
                out.push(&n / &d);
            }
            d += 1;
        }
        out.sort();
        out.dedup();
        out
    };
    for p_div in divisors(a0) {
        for q_div in divisors(an) {
            for sign in [1i64, -1] {
                let cand = Rat::new(p_div.clone() * Int::from(sign), q_div.clone());
                if eval_int_poly(p, &cand).is_zero() {
                    return Some(cand);
                }
            }
        }
    }
    None
}

/// Closed rational interval, endpoints inclusive.
#[derive(Clone, Debug)]
struct Iv(Rat, Rat);

impl Iv {
    fn point(x: Rat) -> Self {
        Iv(x.clone(), x)
    }

    fn add(&self, o: &Iv) -> Iv {
        Iv(self.0.clone() + o.0.clone(), self.1.clone() + o.1.clone())
    }

    fn mul(&self, o: &Iv) -> Iv {
        let cands = [
            self.0.clone() * o.0.clone(),
            self.0.clone() * o.1.clone(),
            self.1.clone() * o.0.clone(),
            self.1.clone() * o.1.clone(),
        ];
        let mut lo = cands[0].clone();
        let mut hi = cands[0].clone();
        for c in &cands[1..] {
            if *c < lo {
                lo = c.clone();
            }
            if *c > hi {
                hi = c.clone();
            }
        }
        Iv(lo, hi)
    }

    fn sign(&self) -> Option<i8> {
        if self.0.is_positive() {
            Some(1)
        } else if self.1.is_negative() {
            Some(-1)
        } else {
            None
        }
    }
}

/// Exact scalar a₀ + a₁α + … + a_{d−1}α^{d−1} with decidable total sign.
#[derive(Clone)]
pub struct WeightFieldElement {
    ground: Arc<AlgebraicGround>,
    c: Vec<Rat>,
}

impl fmt::Debug for WeightFieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "WeightFieldElement({self})")
    }
}

impl PartialEq for WeightFieldElement {
    fn eq(&self, other: &Self) -> bool {
        self.same_ground(other) && self.c == other.c
    }
}

impl Eq for WeightFieldElement {}

impl WeightFieldElement {
    pub fn new(ground: Arc<AlgebraicGround>, mut c: Vec<Rat>) -> Self {
        let d = ground.degree();
        assert!(c.len() <= d, "coefficient vector longer than the field degree");
        c.resize(d, Rat::zero());
        WeightFieldElement { ground, c }
    }

    pub fn zero(ground: &Arc<AlgebraicGround>) -> Self {
        Self::new(ground.clone(), vec![])
    }

    pub fn from_rat(ground: &Arc<AlgebraicGround>, r: Rat) -> Self {
        Self::new(ground.clone(), vec![r])
    }

    pub fn from_int(ground: &Arc<AlgebraicGround>, n: i64) -> Self {
        Self::from_rat(ground, Rat::from_integer(n.into()))
    }

    pub fn alpha(ground: &Arc<AlgebraicGround>) -> Self {
        Self::new(ground.clone(), vec![Rat::zero(), Rat::one()])
    }

    pub fn ground(&self) -> &Arc<AlgebraicGround> {
        &self.ground
    }

    pub fn coeffs(&self) -> &[Rat] {
        &self.c
    }

    fn same_ground(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.ground, &other.ground) || *self.ground == *other.ground
    }

    pub fn is_zero(&self) -> bool {
        self.c.iter().all(|a| a.is_zero())
    }

    pub fn is_rational(&self) -> bool {
        self.c[1..].iter().all(|a| a.is_zero())
    }

    pub fn rat_part(&self) -> &Rat {
        &self.c[0]
    }

    /// Coefficients of α, α², … (everything above the rational part).
    pub fn alpha_coeffs(&self) -> &[Rat] {
        &self.c[1..]
    }

    pub fn as_rat(&self) -> Option<&Rat> {
        self.is_rational().then(|| &self.c[0])
    }

    pub fn is_integer(&self) -> bool {
        self.is_rational() && self.c[0].is_integer()
    }

    pub fn add(&self, o: &Self) -> Self {
        assert!(self.same_ground(o));
        Self::new(
            self.ground.clone(),
            self.c.iter().zip(&o.c).map(|(a, b)| a.clone() + b.clone()).collect(),
        )
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }

    pub fn neg(&self) -> Self {
        Self::new(self.ground.clone(), self.c.iter().map(|a| -a.clone()).collect())
    }

    pub fn scale(&self, a: &Rat) -> Self {
        Self::new(self.ground.clone(), self.c.iter().map(|x| x.clone() * a.clone()).collect())
    }

    pub fn mul(&self, o: &Self) -> Self {
        assert!(self.same_ground(o));
        let p = Poly::new(self.c.clone()) * Poly::new(o.c.clone());
        let (_, r) = p.divmod(self.ground.monic_minpoly());
        Self::new(self.ground.clone(), r.coeffs().to_vec())
    }

    pub fn inv(&self) -> Option<Self> {
        if self.is_zero() {
            return None;
        }
        let (g, s, _) = Poly::new(self.c.clone()).xgcd(self.ground.monic_minpoly());
        assert_eq!(g.degree(), Some(0), "minimal polynomial not coprime to element");
        let gi = Rat::one() / g.coeffs()[0].clone();
        let inv = s.scale(&gi);
        let (_, r) = inv.divmod(self.ground.monic_minpoly());
        Some(Self::new(self.ground.clone(), r.coeffs().to_vec()))
    }

    pub fn div(&self, o: &Self) -> Self {
        self.mul(&o.inv().expect("division by zero"))
    }

    /// Total decidable sign. Zero iff the coefficient vector is zero;
    /// otherwise bisect the isolating interval until the evaluation
    /// interval excludes zero.
    pub fn sign(&self) -> i8 {
        if self.is_zero() {
            return 0;
        }
        if self.is_rational() {
            return if self.c[0].is_positive() { 1 } else { -1 };
        }
        let mut iv = self.ground.start_interval();
        for _ in 0..10_000 {
            let alpha = Iv(iv.0.clone(), iv.1.clone());
            let mut acc = Iv::point(self.c.last().unwrap().clone());
            for a in self.c.iter().rev().skip(1) {
                acc = acc.mul(&alpha).add(&Iv::point(a.clone()));
            }
            if let Some(s) = acc.sign() {
                return s;
            }
            iv = self.ground.refine(iv, 8);
        }
        unreachable!("sign refinement did not converge; ground field invariant violated")
    }

    pub fn is_positive(&self) -> bool {
        self.sign() > 0
    }

    pub fn is_negative(&self) -> bool {
        self.sign() < 0
    }

    pub fn cmp_exact(&self, o: &Self) -> std::cmp::Ordering {
        match self.sub(o).sign() {
            1 => std::cmp::Ordering::Greater,
            -1 => std::cmp::Ordering::Less,
            _ => std::cmp::Ordering::Equal,
        }
    }

    /// Largest integer ≤ self.
    pub fn floor(&self) -> Int {
        if self.is_rational() {
            return self.c[0].floor().to_integer();
        }
        let mut iv = self.ground.start_interval();
        loop {
            let alpha = Iv(iv.0.clone(), iv.1.clone());
            let mut acc = Iv::point(self.c.last().unwrap().clone());
            for a in self.c.iter().rev().skip(1) {
                acc = acc.mul(&alpha).add(&Iv::point(a.clone()));
            }
            let flo = acc.0.floor().to_integer();
            let fhi = acc.1.floor().to_integer();
            if flo == fhi {
                return flo;
            }
            // candidates collapse once the value interval is narrow; test
            // the larger candidate exactly (self is irrational here, so the
            // difference cannot be zero)
            if &fhi - &flo == Int::one() {
                let probe = self.sub(&Self::from_rat(&self.ground, Rat::from_integer(fhi.clone())));
                return if probe.sign() > 0 { fhi } else { flo };
            }
            iv = self.ground.refine(iv, 8);
        }
    }

    /// self − floor(self), the canonical [0,1) representative modulo Z.
    pub fn frac(&self) -> Self {
        self.sub(&Self::from_rat(&self.ground, Rat::from_integer(self.floor())))
    }
}

impl fmt::Display for WeightFieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut wrote = false;
        for (k, a) in self.c.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            if wrote {
                if a.is_negative() {
                    write!(f, " - ")?;
                } else {
                    write!(f, " + ")?;
                }
            } else if a.is_negative() && k > 0 {
                write!(f, "-")?;
            }
            let mag = if wrote || k > 0 { a.abs() } else { a.clone() };
            match k {
                0 => write!(f, "{mag}")?,
                1 => {
                    if mag.is_one() {
                        write!(f, "a")?;
                    } else {
                        write!(f, "{mag}a")?;
                    }
                }
                _ => {
                    if mag.is_one() {
                        write!(f, "a^{k}")?;
                    } else {
                        write!(f, "{mag}a^{k}")?;
                    }
                }
            }
            wrote = true;
        }
        if !wrote {
            write!(f, "0")?;
        }
        Ok(())
    }
}

impl Serialize for WeightFieldElement {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeSeq;
        let mut seq = s.serialize_seq(Some(self.c.len()))?;
        for a in &self.c {
            seq.serialize_element(&a.to_string())?;
        }
        seq.end()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    pub fn sqrt2() -> Arc<AlgebraicGround> {
        AlgebraicGround::new(
            vec![Int::from(-2), Int::from(0), Int::from(1)],
            (Rat::from_integer(1.into()), Rat::from_integer(2.into())),
        )
        .unwrap()
    }

    fn w(g: &Arc<AlgebraicGround>, c0: i64, c1: i64) -> WeightFieldElement {
        WeightFieldElement::new(
            g.clone(),
            vec![Rat::from_integer(c0.into()), Rat::from_integer(c1.into())],
        )
    }

    #[test]
    fn ground_validation() {
        // x^2 - 4 has the rational root 2
        let e = AlgebraicGround::new(
            vec![Int::from(-4), Int::from(0), Int::from(1)],
            (Rat::from_integer(1.into()), Rat::from_integer(3.into())),
        );
        assert!(matches!(e, Err(GroundError::RationalRoot(_))));
        // x^2 - 2 on (-2, 2) brackets two roots
        let e = AlgebraicGround::new(
            vec![Int::from(-2), Int::from(0), Int::from(1)],
            (Rat::from_integer((-2).into()), Rat::from_integer(2.into())),
        );
        assert!(matches!(e, Err(GroundError::RootCount(2))));
        assert!(AlgebraicGround::new(vec![Int::from(1), Int::from(1)], (Rat::zero(), Rat::one()))
            .is_err());
    }

    #[test]
    fn sign_examples() {
        let g = sqrt2();
        // zero coefficient vector
        assert_eq!(WeightFieldElement::zero(&g).sign(), 0);
        // sign(α − 1) = +1, cross-checked by hand: √2 ≈ 1.414 > 1
        assert_eq!(w(&g, -1, 1).sign(), 1);
        // sign(3 − 2α) = +1: 2√2 ≈ 2.828 < 3
        assert_eq!(w(&g, 3, -2).sign(), 1);
        assert_eq!(w(&g, -3, 2).sign(), -1);
        // a tighter one: 577/408 > √2 (continued fraction convergent)
        let x = WeightFieldElement::new(
            g.clone(),
            vec![Rat::new(577.into(), 408.into()), -Rat::one()],
        );
        assert_eq!(x.sign(), 1);
    }

    #[test]
    fn field_arithmetic() {
        let g = sqrt2();
        let a = WeightFieldElement::alpha(&g);
        assert_eq!(a.mul(&a), w(&g, 2, 0));
        let x = w(&g, 1, 1); // 1 + √2
        let xi = x.inv().unwrap(); // √2 - 1
        assert_eq!(x.mul(&xi), w(&g, 1, 0));
        assert_eq!(xi, w(&g, -1, 1));
    }

    #[test]
    fn floor_and_frac() {
        let g = sqrt2();
        let a = WeightFieldElement::alpha(&g);
        assert_eq!(a.floor(), Int::from(1));
        assert_eq!(a.neg().floor(), Int::from(-2));
        let x = w(&g, -4, 3); // 3√2 - 4 ≈ 0.2426
        assert_eq!(x.floor(), Int::from(0));
        assert_eq!(w(&g, 7, 0).scale(&Rat::new(1.into(), 2.into())).floor(), Int::from(3));
        // frac lands in [0, 1)
        let f = a.scale(&Rat::from_integer(5.into())).frac();
        assert_eq!(f.sign(), 1);
        assert_eq!(f.sub(&w(&g, 1, 0)).sign(), -1);
    }

    #[test]
    fn total_order_on_samples() {
        let g = sqrt2();
        let xs = [w(&g, 0, 0), w(&g, -1, 1), w(&g, 1, 0), w(&g, 0, 1), w(&g, 3, -2)];
        // trichotomy against the f64 oracle
        let approx = |x: &WeightFieldElement| -> f64 {
            let a = 2f64.sqrt();
            x.coeffs()
                .iter()
                .enumerate()
                .map(|(i, c)| {
                    let num: f64 = c.numer().to_string().parse().unwrap();
                    let den: f64 = c.denom().to_string().parse().unwrap();
                    num / den * a.powi(i as i32)
                })
                .sum()
        };
        for x in &xs {
            for y in &xs {
                let exact = x.cmp_exact(y);
                let float = approx(x).partial_cmp(&approx(y)).unwrap();
                assert_eq!(exact, float, "{x} vs {y}");
            }
        }
    }
}
