//! Univariate polynomials and rational functions over a field, and the
//! cyclotomic field Q(ζ_N).
//!
//! Stacking [`RatFunc`] twice over [`Cyclo`] yields the equivariance scalar
//! field Q(ζ_N)(u)(v): `u` stands for the phase generator e^{2πiα} (inner
//! variable) and `v` for 2πi (outer variable). Both are formal independent
//! transcendentals; no analytic identity is ever used.

use std::collections::HashMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Mutex;
use std::sync::OnceLock;

use num_traits::{One, Zero};

use crate::scalar::{Field, Scalar};
use crate::Rat;

/// Dense univariate polynomial over a field, trailing zeros trimmed.
#[derive(Clone, PartialEq, Debug)]
pub struct Poly<F: Field> {
    c: Vec<F>,
}

impl<F: Field> Poly<F> {
    pub fn new(mut c: Vec<F>) -> Self {
        while c.last().map_or(false, |a| a.is_zero()) {
            c.pop();
        }
        Poly { c }
    }

    pub fn constant(a: F) -> Self {
        Self::new(vec![a])
    }

    pub fn monomial(a: F, deg: usize) -> Self {
        let mut c = vec![F::zero(); deg + 1];
        c[deg] = a;
        Self::new(c)
    }

    pub fn coeffs(&self) -> &[F] {
        &self.c
    }

    pub fn degree(&self) -> Option<usize> {
        if self.c.is_empty() {
            None
        } else {
            Some(self.c.len() - 1)
        }
    }

    pub fn leading(&self) -> Option<&F> {
        self.c.last()
    }

    pub fn scale(&self, a: &F) -> Self {
        Self::new(self.c.iter().map(|x| x.clone() * a.clone()).collect())
    }

    /// Euclidean division; the divisor must be nonzero.
    pub fn divmod(&self, d: &Self) -> (Self, Self) {
        let dd = d.degree().expect("division by zero polynomial");
        let lead_inv = d.leading().unwrap().inv().expect("field leading coeff");
        let mut rem = self.c.clone();
        if rem.len() < dd + 1 {
            return (Self::new(vec![]), self.clone());
        }
        let mut quot = vec![F::zero(); rem.len() - dd];
        while rem.len() >= dd + 1 {
            let k = rem.len() - 1 - dd;
            let q = rem.last().unwrap().clone() * lead_inv.clone();
            if !q.is_zero() {
                for (i, a) in d.c.iter().enumerate() {
                    let t = rem[k + i].clone() - q.clone() * a.clone();
                    rem[k + i] = t;
                }
            }
            quot[k] = q;
            rem.pop();
            while rem.last().map_or(false, |a| a.is_zero()) {
                rem.pop();
            }
            if rem.len() < dd + 1 {
                break;
            }
        }
        (Self::new(quot), Self::new(rem))
    }

    /// Monic gcd via Euclid.
    pub fn gcd(&self, other: &Self) -> Self {
        let mut a = self.clone();
        let mut b = other.clone();
        while !b.is_zero() {
            let (_, r) = a.divmod(&b);
            a = b;
            b = r;
        }
        a.monic()
    }

    pub fn monic(&self) -> Self {
        match self.leading() {
            None => self.clone(),
            Some(l) => self.scale(&l.inv().expect("nonzero leading")),
        }
    }

    /// Extended gcd: returns (g, s, t) with s·self + t·other = g, g monic.
    pub fn xgcd(&self, other: &Self) -> (Self, Self, Self) {
        let mut r0 = self.clone();
        let mut r1 = other.clone();
        let mut s0 = Self::constant(F::one());
        let mut s1 = Self::new(vec![]);
        let mut t0 = Self::new(vec![]);
        let mut t1 = Self::constant(F::one());
        while !r1.is_zero() {
            let (q, r) = r0.divmod(&r1);
            let s = s0.clone() - q.clone() * s1.clone();
            let t = t0.clone() - q * t1.clone();
            r0 = r1;
            r1 = r;
            s0 = s1;
            s1 = s;
            t0 = t1;
            t1 = t;
        }
        match r0.leading() {
            None => (r0, s0, t0),
            Some(l) => {
                let li = l.inv().unwrap();
                (r0.scale(&li), s0.scale(&li), t0.scale(&li))
            }
        }
    }

    pub fn derivative(&self) -> Self {
        if self.c.len() <= 1 {
            return Self::new(vec![]);
        }
        let mut c = Vec::with_capacity(self.c.len() - 1);
        for (i, a) in self.c.iter().enumerate().skip(1) {
            let mut s = F::zero();
            for _ in 0..i {
                s = s + a.clone();
            }
            c.push(s);
        }
        Self::new(c)
    }
}

impl<F: Field> fmt::Display for Poly<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.c.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, a) in self.c.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            if i == 0 {
                write!(f, "{a}")?;
            } else if i == 1 {
                write!(f, "({a})x")?;
            } else {
                write!(f, "({a})x^{i}")?;
            }
            first = false;
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

impl<F: Field> Add for Poly<F> {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        let n = self.c.len().max(rhs.c.len());
        let mut c = Vec::with_capacity(n);
        for i in 0..n {
            let a = self.c.get(i).cloned().unwrap_or_else(F::zero);
            let b = rhs.c.get(i).cloned().unwrap_or_else(F::zero);
            c.push(a + b);
        }
        Self::new(c)
    }
}

impl<F: Field> Sub for Poly<F> {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        self + (-rhs)
    }
}

impl<F: Field> Neg for Poly<F> {
    type Output = Self;
    fn neg(self) -> Self {
        Self::new(self.c.into_iter().map(|a| -a).collect())
    }
}

impl<F: Field> Mul for Poly<F> {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        if self.c.is_empty() || rhs.c.is_empty() {
            return Self::new(vec![]);
        }
        let mut c = vec![F::zero(); self.c.len() + rhs.c.len() - 1];
        for (i, a) in self.c.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.c.iter().enumerate() {
                if b.is_zero() {
                    continue;
                }
                let t = c[i + j].clone() + a.clone() * b.clone();
                c[i + j] = t;
            }
        }
        Self::new(c)
    }
}

impl<F: Field> Zero for Poly<F> {
    fn zero() -> Self {
        Poly { c: vec![] }
    }
    fn is_zero(&self) -> bool {
        self.c.is_empty()
    }
}

impl<F: Field> One for Poly<F> {
    fn one() -> Self {
        Self::constant(F::one())
    }
}

/// Reduced fraction of polynomials; denominator monic and nonzero.
#[derive(Clone, Debug)]
pub struct RatFunc<F: Field> {
    num: Poly<F>,
    den: Poly<F>,
}

impl<F: Field> RatFunc<F> {
    pub fn new(num: Poly<F>, den: Poly<F>) -> Self {
        assert!(!den.is_zero(), "zero denominator");
        let mut r = RatFunc { num, den };
        r.reduce();
        r
    }

    pub fn from_poly(p: Poly<F>) -> Self {
        RatFunc { num: p, den: Poly::one() }
    }

    pub fn var() -> Self {
        Self::from_poly(Poly::monomial(F::one(), 1))
    }

    pub fn num(&self) -> &Poly<F> {
        &self.num
    }

    pub fn den(&self) -> &Poly<F> {
        &self.den
    }

    pub fn as_poly(&self) -> Option<&Poly<F>> {
        (self.den == Poly::one()).then_some(&self.num)
    }

    fn reduce(&mut self) {
        if self.num.is_zero() {
            self.den = Poly::one();
            return;
        }
        // constant denominators need no gcd
        if self.den.degree() == Some(0) {
            let l = self.den.leading().unwrap().inv().expect("nonzero");
            if !l.is_one() {
                self.num = self.num.scale(&l);
            }
            self.den = Poly::one();
            return;
        }
        let g = self.num.gcd(&self.den);
        if g.degree() != Some(0) {
            self.num = self.num.divmod(&g).0;
            self.den = self.den.divmod(&g).0;
        }
        let l = self.den.leading().unwrap().inv().expect("nonzero");
        self.den = self.den.scale(&l);
        self.num = self.num.scale(&l);
    }
}

impl<F: Field> PartialEq for RatFunc<F> {
    fn eq(&self, other: &Self) -> bool {
        // both reduced with monic denominators, so representation is canonical
        self.num == other.num && self.den == other.den
    }
}

impl<F: Field> fmt::Display for RatFunc<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den == Poly::one() {
            write!(f, "{}", self.num)
        } else {
            write!(f, "({})/({})", self.num, self.den)
        }
    }
}

impl<F: Field> Add for RatFunc<F> {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        Self::new(
            self.num * rhs.den.clone() + rhs.num * self.den.clone(),
            self.den * rhs.den,
        )
    }
}

impl<F: Field> Sub for RatFunc<F> {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        self + (-rhs)
    }
}

impl<F: Field> Neg for RatFunc<F> {
    type Output = Self;
    fn neg(self) -> Self {
        RatFunc { num: -self.num, den: self.den }
    }
}

impl<F: Field> Mul for RatFunc<F> {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        Self::new(self.num * rhs.num, self.den * rhs.den)
    }
}

impl<F: Field> Zero for RatFunc<F> {
    fn zero() -> Self {
        Self::from_poly(Poly::zero())
    }
    fn is_zero(&self) -> bool {
        self.num.is_zero()
    }
}

impl<F: Field> One for RatFunc<F> {
    fn one() -> Self {
        Self::from_poly(Poly::one())
    }
}

impl<F: Field> Scalar for RatFunc<F> {
    fn inv(&self) -> Option<Self> {
        if self.is_zero() {
            return None;
        }
        Some(Self::new(self.den.clone(), self.num.clone()))
    }
}

impl<F: Field> Field for RatFunc<F> {}

/// Element of a cyclotomic field Q(ζ_N), residue polynomial in ζ modulo the
/// N-th cyclotomic polynomial.
///
/// `level == 0` marks a plain rational constant, compatible with every
/// level; arithmetic unifies levels, so `Zero::zero`/`One::one` need no
/// context. Mixing two distinct nonzero levels is a caller bug and panics.
#[derive(Clone, Debug)]
pub struct Cyclo {
    level: u32,
    c: Vec<Rat>,
}

fn cyclotomic_poly(n: u32) -> Vec<Rat> {
    static CACHE: OnceLock<Mutex<HashMap<u32, Vec<Rat>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(p) = cache.lock().unwrap().get(&n) {
        return p.clone();
    }
    // x^n - 1 = prod over d | n of Phi_d
    let mut num = vec![Rat::zero(); n as usize + 1];
    num[0] = -Rat::one();
    num[n as usize] = Rat::one();
    let mut num = Poly::<Rat>::new(num);
    for d in 1..n {
        if n % d == 0 {
            let phi_d = Poly::<Rat>::new(cyclotomic_poly(d));
            let (q, r) = num.divmod(&phi_d);
            debug_assert!(r.is_zero());
            num = q;
        }
    }
    let out: Vec<Rat> = num.coeffs().to_vec();
    cache.lock().unwrap().insert(n, out.clone());
    out
}

impl Cyclo {
    pub fn from_rat(r: Rat) -> Self {
        if r.is_zero() {
            Cyclo { level: 0, c: vec![] }
        } else {
            Cyclo { level: 0, c: vec![r] }
        }
    }

    /// ζ_N^k at level N.
    pub fn root_of_unity_pow(level: u32, k: i64) -> Self {
        assert!(level >= 1);
        let k = k.rem_euclid(level as i64) as usize;
        let mut out = Cyclo { level, c: vec![Rat::zero(); k + 1] };
        out.c[k] = Rat::one();
        out.reduce();
        out
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    fn reduce(&mut self) {
        if self.level == 0 {
            return;
        }
        let phi = cyclotomic_poly(self.level);
        if self.c.len() < phi.len() {
            self.canonicalize();
            return;
        }
        let phi = Poly::<Rat>::new(phi);
        let me = Poly::<Rat>::new(std::mem::take(&mut self.c));
        let (_, r) = me.divmod(&phi);
        self.c = r.coeffs().to_vec();
        self.canonicalize();
    }

    fn canonicalize(&mut self) {
        while self.c.last().map_or(false, |a| a.is_zero()) {
            self.c.pop();
        }
        if self.c.len() <= 1 {
            self.level = 0;
        }
    }

    fn unify(a: &Self, b: &Self) -> u32 {
        match (a.level, b.level) {
            (0, l) | (l, 0) => l,
            (x, y) => {
                assert_eq!(x, y, "mixed cyclotomic levels {x} and {y}");
                x
            }
        }
    }
}

impl PartialEq for Cyclo {
    fn eq(&self, other: &Self) -> bool {
        // canonical: rationals are always level 0
        self.level == other.level && self.c == other.c
    }
}

impl fmt::Display for Cyclo {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.c.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, a) in self.c.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            match i {
                0 => write!(f, "{a}")?,
                1 => write!(f, "({a})z")?,
                _ => write!(f, "({a})z^{i}")?,
            }
            first = false;
        }
        Ok(())
    }
}

impl Add for Cyclo {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        let level = Self::unify(&self, &rhs);
        let n = self.c.len().max(rhs.c.len());
        let mut c = Vec::with_capacity(n);
        for i in 0..n {
            let a = self.c.get(i).cloned().unwrap_or_else(Rat::zero);
            let b = rhs.c.get(i).cloned().unwrap_or_else(Rat::zero);
            c.push(a + b);
        }
        let mut out = Cyclo { level, c };
        out.canonicalize();
        out
    }
}

impl Sub for Cyclo {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        self + (-rhs)
    }
}

impl Neg for Cyclo {
    type Output = Self;
    fn neg(self) -> Self {
        Cyclo { level: self.level, c: self.c.into_iter().map(|a| -a).collect() }
    }
}

impl Mul for Cyclo {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        let level = Self::unify(&self, &rhs);
        if self.c.is_empty() || rhs.c.is_empty() {
            return Cyclo { level: 0, c: vec![] };
        }
        let mut c = vec![Rat::zero(); self.c.len() + rhs.c.len() - 1];
        for (i, a) in self.c.iter().enumerate() {
            for (j, b) in rhs.c.iter().enumerate() {
                let t = c[i + j].clone() + a.clone() * b.clone();
                c[i + j] = t;
            }
        }
        let mut out = Cyclo { level, c };
        out.reduce();
        out
    }
}

impl Zero for Cyclo {
    fn zero() -> Self {
        Cyclo { level: 0, c: vec![] }
    }
    fn is_zero(&self) -> bool {
        self.c.is_empty()
    }
}

impl One for Cyclo {
    fn one() -> Self {
        Self::from_rat(Rat::one())
    }
}

impl Scalar for Cyclo {
    fn inv(&self) -> Option<Self> {
        if self.is_zero() {
            return None;
        }
        if self.level == 0 {
            return Some(Self::from_rat(Rat::one() / self.c[0].clone()));
        }
        let phi = Poly::<Rat>::new(cyclotomic_poly(self.level));
        let me = Poly::<Rat>::new(self.c.clone());
        let (g, s, _) = me.xgcd(&phi);
        assert_eq!(g.degree(), Some(0), "cyclotomic polynomial not coprime to residue");
        let ginv = g.coeffs()[0].inv().unwrap();
        let mut out = Cyclo { level: self.level, c: s.scale(&ginv).coeffs().to_vec() };
        out.reduce();
        Some(out)
    }
}

impl Field for Cyclo {}
