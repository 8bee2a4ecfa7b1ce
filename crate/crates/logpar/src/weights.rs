//! Weight monoids M̄ ⊆ Λ ⊆ M̄_ℝ on a chart: membership, the induced
//! preorder, canonical character classes, maximal shifts below a weight,
//! fine systems of orbit representatives, and window enumeration.
//!
//! A saturated weight monoid is P^gp-saturated by definition, so membership
//! factors exactly: λ ∈ Λ iff λ lies in the real cone and its class modulo
//! P^gp is an N-combination of the generator classes. The class search is
//! solved exactly when the α-parts pin the multiplicities (one irrational
//! generator, or rational generators with their denominator cycle), and
//! falls back to a φ-bounded search with an explicit `Incomplete` verdict
//! otherwise — a verdict is never silently wrong.

use std::cmp::Ordering;
use std::fmt;
use std::sync::Arc;

use num_traits::{One, Signed, Zero};

use crate::algebraic::{AlgebraicGround, WeightFieldElement};
use crate::linalg::Matrix;
use crate::monoid::{IVec, ToricMonoid};
use crate::{Bounds, Int, Rat};

/// λ ∈ P^gp ⊗ R in the coordinates of the chosen basis of P^gp.
#[derive(Clone, PartialEq, Eq)]
pub struct Weight {
    coords: Vec<WeightFieldElement>,
}

impl fmt::Debug for Weight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Weight({self})")
    }
}

impl fmt::Display for Weight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.coords.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

impl Weight {
    pub fn new(coords: Vec<WeightFieldElement>) -> Self {
        assert!(!coords.is_empty());
        Weight { coords }
    }

    pub fn zero(ground: &Arc<AlgebraicGround>, rank: usize) -> Self {
        Weight::new(vec![WeightFieldElement::zero(ground); rank])
    }

    pub fn from_ints(ground: &Arc<AlgebraicGround>, v: &[i64]) -> Self {
        Weight::new(v.iter().map(|&a| WeightFieldElement::from_int(ground, a)).collect())
    }

    pub fn from_rats(ground: &Arc<AlgebraicGround>, v: &[Rat]) -> Self {
        Weight::new(v.iter().map(|a| WeightFieldElement::from_rat(ground, a.clone())).collect())
    }

    pub fn coords(&self) -> &[WeightFieldElement] {
        &self.coords
    }

    pub fn rank(&self) -> usize {
        self.coords.len()
    }

    pub fn ground(&self) -> &Arc<AlgebraicGround> {
        self.coords[0].ground()
    }

    pub fn add(&self, o: &Self) -> Self {
        Weight::new(self.coords.iter().zip(&o.coords).map(|(a, b)| a.add(b)).collect())
    }

    pub fn sub(&self, o: &Self) -> Self {
        Weight::new(self.coords.iter().zip(&o.coords).map(|(a, b)| a.sub(b)).collect())
    }

    pub fn neg(&self) -> Self {
        Weight::new(self.coords.iter().map(|a| a.neg()).collect())
    }

    pub fn scale(&self, r: &Rat) -> Self {
        Weight::new(self.coords.iter().map(|a| a.scale(r)).collect())
    }

    pub fn add_ints(&self, v: &[i64]) -> Self {
        let g = self.ground().clone();
        Weight::new(
            self.coords
                .iter()
                .zip(v)
                .map(|(a, &b)| a.add(&WeightFieldElement::from_int(&g, b)))
                .collect(),
        )
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(|a| a.is_zero())
    }

    pub fn is_integral(&self) -> bool {
        self.coords.iter().all(|a| a.is_integer())
    }

    pub fn is_rational(&self) -> bool {
        self.coords.iter().all(|a| a.is_rational())
    }

    pub fn to_ints(&self) -> Option<IVec> {
        if !self.is_integral() {
            return None;
        }
        self.coords
            .iter()
            .map(|a| a.rat_part().to_integer().to_string().parse().ok())
            .collect()
    }

    /// Canonical representative modulo Z^r: every coordinate in [0, 1).
    pub fn frac(&self) -> Self {
        Weight::new(self.coords.iter().map(|a| a.frac()).collect())
    }

    pub fn floor_ints(&self) -> IVec {
        self.coords.iter().map(|a| a.floor().to_string().parse().unwrap()).collect()
    }

    pub fn class_eq(&self, o: &Self) -> bool {
        self.sub(o).is_integral()
    }

    pub fn cmp_lex(&self, o: &Self) -> Ordering {
        for (a, b) in self.coords.iter().zip(&o.coords) {
            match a.cmp_exact(b) {
                Ordering::Equal => continue,
                ord => return ord,
            }
        }
        Ordering::Equal
    }
}

/// A weight with all coordinates reduced into [0, 1) — the canonical
/// representative of λ modulo P^gp.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct CharacterClass {
    rep: Weight,
}

impl CharacterClass {
    pub fn of(w: &Weight) -> Self {
        CharacterClass { rep: w.frac() }
    }

    pub fn representative(&self) -> &Weight {
        &self.rep
    }

    pub fn add(&self, o: &Self) -> Self {
        Self::of(&self.rep.add(&o.rep))
    }

    pub fn is_trivial(&self) -> bool {
        self.rep.is_zero()
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Membership {
    Member,
    NonMember,
    /// The bounded search was exhausted without a decision; never wrong,
    /// only inconclusive. The caller surfaces the bound that was hit.
    Incomplete,
}

impl Membership {
    pub fn is_member(&self) -> bool {
        matches!(self, Membership::Member)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum WeightKind {
    /// Λ = (1/n)P.
    Fraction(u32),
    /// P^gp-saturation of the monoid generated by P and the extra
    /// generators, inside the real cone.
    Saturated(Vec<Weight>),
}

#[derive(Debug, thiserror::Error)]
pub enum WeightError {
    #[error("saturated-kind generator {0} lies outside the real cone of the base monoid")]
    GeneratorOutsideCone(String),
    #[error("weight {0} is not in the weight group Λ^gp")]
    NotInGroup(String),
    #[error("group membership of {0} undecided within shift radius {1}")]
    GroupSearchIncomplete(String, i64),
}

type ClassCache = Arc<std::sync::Mutex<std::collections::HashMap<String, (Vec<Weight>, Membership)>>>;
type WitnessCache =
    Arc<std::sync::Mutex<std::collections::HashMap<String, (Membership, Option<Vec<u32>>)>>>;

/// Weight monoid P ⊆ Λ ⊆ P_ℝ with P^gp-saturation semantics.
///
/// Clones share the internal memoization caches; all cached functions are
/// pure, so this only affects speed.
#[derive(Clone, Debug)]
pub struct WeightMonoid {
    monoid: Arc<ToricMonoid>,
    ground: Arc<AlgebraicGround>,
    kind: WeightKind,
    min_class_cache: ClassCache,
    witness_cache: WitnessCache,
}

impl WeightMonoid {
    pub fn new(
        monoid: Arc<ToricMonoid>,
        ground: Arc<AlgebraicGround>,
        kind: WeightKind,
    ) -> Result<Self, WeightError> {
        if let WeightKind::Saturated(gens) = &kind {
            for g in gens {
                assert_eq!(g.rank(), monoid.rank());
                if !monoid.cone_contains(g.coords()) || g.is_zero() {
                    return Err(WeightError::GeneratorOutsideCone(g.to_string()));
                }
            }
        }
        Ok(WeightMonoid {
            monoid,
            ground,
            kind,
            min_class_cache: Default::default(),
            witness_cache: Default::default(),
        })
    }

    pub fn fraction(monoid: Arc<ToricMonoid>, ground: Arc<AlgebraicGround>, n: u32) -> Self {
        assert!(n >= 1);
        WeightMonoid {
            monoid,
            ground,
            kind: WeightKind::Fraction(n),
            min_class_cache: Default::default(),
            witness_cache: Default::default(),
        }
    }

    pub fn monoid(&self) -> &Arc<ToricMonoid> {
        &self.monoid
    }

    pub fn ground(&self) -> &Arc<AlgebraicGround> {
        &self.ground
    }

    pub fn kind(&self) -> &WeightKind {
        &self.kind
    }

    pub fn rank(&self) -> usize {
        self.monoid.rank()
    }

    pub fn zero_weight(&self) -> Weight {
        Weight::zero(&self.ground, self.rank())
    }

    pub fn phi(&self, w: &Weight) -> WeightFieldElement {
        self.monoid.phi_weight(w.coords())
    }

    fn saturated_generators(&self) -> &[Weight] {
        match &self.kind {
            WeightKind::Saturated(g) => g,
            WeightKind::Fraction(_) => &[],
        }
    }

    /// Membership λ ∈ Λ.
    pub fn member(&self, lam: &Weight, bounds: &Bounds) -> Membership {
        match &self.kind {
            WeightKind::Fraction(n) => {
                let scaled = lam.scale(&Rat::from_integer((*n).into()));
                match scaled.to_ints() {
                    None => Membership::NonMember,
                    Some(v) => {
                        if self.monoid.member(&v) {
                            Membership::Member
                        } else {
                            Membership::NonMember
                        }
                    }
                }
            }
            WeightKind::Saturated(_) => {
                if !self.monoid.cone_contains(lam.coords()) {
                    return Membership::NonMember;
                }
                self.class_witness(lam, bounds).0
            }
        }
    }

    /// μ − λ ∈ Λ, the weight-system preorder.
    pub fn leq(&self, lam: &Weight, mu: &Weight, bounds: &Bounds) -> Membership {
        self.member(&mu.sub(lam), bounds)
    }

    /// Searches n_g ∈ N with Σ n_g·g ≡ λ (mod P^gp). Complete whenever the
    /// α-parts determine the multiplicities uniquely or all generators are
    /// rational; otherwise φ-bounded with an `Incomplete` fallback.
    pub fn class_witness(&self, lam: &Weight, bounds: &Bounds) -> (Membership, Option<Vec<u32>>) {
        match &self.kind {
            WeightKind::Fraction(n) => {
                let scaled = lam.scale(&Rat::from_integer((*n).into()));
                if scaled.is_integral() {
                    (Membership::Member, None)
                } else {
                    (Membership::NonMember, None)
                }
            }
            WeightKind::Saturated(_) => {
                let key = lam.frac().to_string();
                if let Some(hit) = self.witness_cache.lock().unwrap().get(&key) {
                    return hit.clone();
                }
                let out = self.combination_witness(&lam.frac(), bounds, false);
                self.witness_cache.lock().unwrap().insert(key, out.clone());
                out
            }
        }
    }

    /// Searches m_g ∈ Z with Σ m_g·g ≡ λ (mod P^gp): membership of the
    /// class of λ in the group Λ^gp/P^gp.
    pub fn in_group(&self, lam: &Weight, bounds: &Bounds) -> Membership {
        match &self.kind {
            WeightKind::Fraction(n) => {
                if lam.scale(&Rat::from_integer((*n).into())).is_integral() {
                    Membership::Member
                } else {
                    Membership::NonMember
                }
            }
            WeightKind::Saturated(_) => self.combination_witness(lam, bounds, true).0,
        }
    }

    fn combination_witness(
        &self,
        lam: &Weight,
        bounds: &Bounds,
        signed: bool,
    ) -> (Membership, Option<Vec<u32>>) {
        let gens = self.saturated_generators().to_vec();
        let degree = self.ground.degree();
        let irr: Vec<usize> = (0..gens.len()).filter(|&i| !gens[i].is_rational()).collect();
        let rat: Vec<usize> = (0..gens.len()).filter(|&i| gens[i].is_rational()).collect();

        // α-part linear system rows: one per (coordinate, power k ≥ 1)
        let alpha_rows = |w: &Weight| -> Vec<Rat> {
            let mut rows = Vec::new();
            for c in w.coords() {
                for k in 1..degree {
                    rows.push(c.coeffs().get(k).cloned().unwrap_or_else(Rat::zero));
                }
            }
            rows
        };
        let lam_alpha = alpha_rows(lam);

        if irr.is_empty() {
            if lam_alpha.iter().any(|a| !a.is_zero()) {
                return (Membership::NonMember, None);
            }
            return self.rational_cycle_search(lam, &gens, &rat, &[], signed);
        }

        let mat = Matrix::new(
            (0..lam_alpha.len())
                .map(|r| irr.iter().map(|&i| alpha_rows(&gens[i])[r].clone()).collect())
                .collect(),
        );
        match mat.solve(&lam_alpha) {
            None => (Membership::NonMember, None),
            Some(sol) => {
                if mat.kernel_gens().cols() == 0 {
                    let mut mults: Vec<i64> = Vec::with_capacity(sol.len());
                    for s in &sol {
                        if !s.is_integer() || (!signed && s.is_negative()) {
                            return (Membership::NonMember, None);
                        }
                        mults.push(s.to_integer().to_string().parse().unwrap());
                    }
                    let mut residual = lam.clone();
                    for (pos, &gi) in irr.iter().enumerate() {
                        residual =
                            residual.sub(&gens[gi].scale(&Rat::from_integer(mults[pos].into())));
                    }
                    let fixed: Vec<(usize, i64)> =
                        irr.iter().copied().zip(mults.iter().copied()).collect();
                    self.rational_cycle_search(&residual, &gens, &rat, &fixed, signed)
                } else {
                    self.bounded_tuple_search(lam, &gens, bounds, signed)
                }
            }
        }
    }

    fn rational_cycle_search(
        &self,
        target: &Weight,
        gens: &[Weight],
        rat_idx: &[usize],
        fixed: &[(usize, i64)],
        signed: bool,
    ) -> (Membership, Option<Vec<u32>>) {
        if !target.is_rational() {
            return (Membership::NonMember, None);
        }
        // the class of n·g is periodic in n with period lcm of denominators
        let cycles: Vec<i64> = rat_idx
            .iter()
            .map(|&i| {
                let mut d = Int::one();
                for c in gens[i].coords() {
                    d = num_integer::Integer::lcm(&d, c.rat_part().denom());
                }
                d.to_string().parse::<i64>().unwrap_or(i64::MAX).max(1)
            })
            .collect();
        let mut assignment = vec![0i64; rat_idx.len()];
        match self.cycle_rec(target, gens, rat_idx, &cycles, 0, &mut assignment) {
            Some(assign) => {
                if signed || fixed.iter().any(|&(_, n)| n < 0) {
                    // a group witness exists; multiplicities only make
                    // sense for the monoid search
                    return (Membership::Member, None);
                }
                let mut w = vec![0u32; gens.len()];
                for (&i, &n) in rat_idx.iter().zip(&assign) {
                    w[i] = n as u32;
                }
                for &(i, n) in fixed {
                    w[i] = n as u32;
                }
                (Membership::Member, Some(w))
            }
            None => (Membership::NonMember, None),
        }
    }

    #[allow(clippy::too_many_arguments)]
    fn cycle_rec(
        &self,
        target: &Weight,
        gens: &[Weight],
        rat_idx: &[usize],
        cycles: &[i64],
        pos: usize,
        assignment: &mut Vec<i64>,
    ) -> Option<Vec<i64>> {
        if pos == rat_idx.len() {
            let mut acc = target.clone();
            for (k, &i) in rat_idx.iter().enumerate() {
                acc = acc.sub(&gens[i].scale(&Rat::from_integer(assignment[k].into())));
            }
            return acc.is_integral().then(|| assignment.clone());
        }
        for n in 0..cycles[pos] {
            assignment[pos] = n;
            if let Some(a) = self.cycle_rec(target, gens, rat_idx, cycles, pos + 1, assignment) {
                return Some(a);
            }
        }
        None
    }

    fn bounded_tuple_search(
        &self,
        lam: &Weight,
        gens: &[Weight],
        bounds: &Bounds,
        signed: bool,
    ) -> (Membership, Option<Vec<u32>>) {
        // any witness λ' = Σ n_g g in the class satisfies
        // φ(λ') ≤ φ(canon λ) + (shift allowance)
        let canon = lam.frac();
        let allowance: i64 = self
            .monoid
            .positive_functional()
            .coeffs
            .iter()
            .map(|c| c.abs() * bounds.shift_radius)
            .sum();
        let budget =
            self.phi(&canon).add(&WeightFieldElement::from_int(&self.ground, allowance));
        let lo = if signed { -bounds.shift_radius } else { 0 };
        let hi = 4 * bounds.shift_radius;
        let mut tuple = vec![0i64; gens.len()];
        if self.tuple_rec(lam, gens, &budget, lo, hi, 0, &mut tuple) {
            let w = tuple.iter().map(|&n| n.unsigned_abs() as u32).collect();
            (Membership::Member, Some(w))
        } else {
            (Membership::Incomplete, None)
        }
    }

    #[allow(clippy::too_many_arguments)]
    fn tuple_rec(
        &self,
        lam: &Weight,
        gens: &[Weight],
        budget: &WeightFieldElement,
        lo: i64,
        hi: i64,
        pos: usize,
        tuple: &mut Vec<i64>,
    ) -> bool {
        if pos == gens.len() {
            let mut acc = lam.clone();
            for (k, g) in gens.iter().enumerate() {
                acc = acc.sub(&g.scale(&Rat::from_integer(tuple[k].into())));
            }
            return acc.is_integral();
        }
        for n in lo..=hi {
            tuple[pos] = n;
            let mut used = WeightFieldElement::zero(&self.ground);
            for (k, g) in gens.iter().enumerate().take(pos + 1) {
                used = used.add(&self.phi(g).scale(&Rat::from_integer(tuple[k].abs().into())));
            }
            if used.sub(budget).sign() > 0 {
                continue;
            }
            if self.tuple_rec(lam, gens, budget, lo, hi, pos + 1, tuple) {
                return true;
            }
        }
        false
    }

    /// Minimal elements of Λ ∩ (λ + P^gp) for the P-order, exact and
    /// finite. Empty when the class is not represented in Λ.
    pub fn minimal_in_class(&self, lam: &Weight, bounds: &Bounds) -> (Vec<Weight>, Membership) {
        let key = lam.frac().to_string();
        if let Some(hit) = self.min_class_cache.lock().unwrap().get(&key) {
            return hit.clone();
        }
        let out = self.minimal_in_class_uncached(&lam.frac(), bounds);
        self.min_class_cache.lock().unwrap().insert(key, out.clone());
        out
    }

    fn minimal_in_class_uncached(&self, lam: &Weight, bounds: &Bounds) -> (Vec<Weight>, Membership) {
        let representable = self.class_witness(lam, bounds).0;
        match representable {
            Membership::NonMember => return (vec![], Membership::Member),
            Membership::Incomplete => return (vec![], Membership::Incomplete),
            Membership::Member => {}
        }
        // a minimal μ has all Carathéodory coefficients < 1, so
        // φ(μ) < Σ φ over the Hilbert basis
        let cap = self.monoid.sum_phi_hilbert();
        let canon = lam.frac();
        let boxes = self.monoid.box_for_phi(cap);
        let canon_floor = canon.floor_ints();
        let ranges: Vec<(i64, i64)> = boxes
            .iter()
            .zip(&canon_floor)
            .map(|(&(lo, hi), &f)| (lo - f - 1, hi - f))
            .collect();
        let mut out: Vec<Weight> = Vec::new();
        for p in monoid_box_points(&ranges) {
            let mu = canon.add_ints(&p);
            if !self.monoid.cone_contains(mu.coords()) {
                continue;
            }
            if self.phi(&mu).sub(&WeightFieldElement::from_int(&self.ground, cap)).sign() > 0 {
                continue;
            }
            if let WeightKind::Fraction(n) = &self.kind {
                if !mu.scale(&Rat::from_integer((*n).into())).is_integral() {
                    continue;
                }
            }
            // minimality: μ − h outside the cone for every Hilbert element
            let minimal = self.monoid.hilbert_basis().iter().all(|h| {
                let neg: Vec<i64> = h.iter().map(|&a| -a).collect();
                let shifted = mu.add_ints(&neg);
                !self.monoid.cone_contains(shifted.coords())
            });
            if minimal {
                out.push(mu);
            }
        }
        out.sort_by(|a, b| self.phi(a).cmp_exact(&self.phi(b)).then(a.cmp_lex(b)));
        (out, Membership::Member)
    }

    /// All p ∈ P^gp with λ − p ∈ Λ, maximal for the P-order. Equals
    /// λ − (minimal elements of Λ in the class of λ).
    pub fn maximal_below(&self, lam: &Weight, bounds: &Bounds) -> (Vec<IVec>, Membership) {
        let (minimals, verdict) = self.minimal_in_class(lam, bounds);
        let out = minimals
            .iter()
            .map(|mu| lam.sub(mu).to_ints().expect("class difference is integral"))
            .collect();
        (out, verdict)
    }

    /// μ ∈ ⟨P⁺⟩, i.e. μ − h ∈ Λ for some Hilbert basis element h.
    pub fn in_positive_ideal(&self, mu: &Weight, bounds: &Bounds) -> bool {
        self.monoid.hilbert_basis().iter().any(|h| {
            let neg: Vec<i64> = h.iter().map(|&a| -a).collect();
            self.member(&mu.add_ints(&neg), bounds).is_member()
        })
    }

    /// Fraction kinds enumerate exactly; saturated kinds stream stage-wise
    /// by total generator multiplicity, each stage sorted by (φ, lex).
    pub fn enumerate_window(&self, phi_bound: i64) -> WindowIter<'_> {
        WindowIter::new(self, phi_bound)
    }

    /// Canonicalizes representatives modulo P^gp and deduplicates classes.
    pub fn fine_system(
        &self,
        reps: &[Weight],
        bounds: &Bounds,
    ) -> Result<FineWeightSystem, WeightError> {
        let mut canon: Vec<Weight> = Vec::new();
        for r in reps {
            match self.in_group(r, bounds) {
                Membership::Member => {}
                Membership::NonMember => {
                    return Err(WeightError::NotInGroup(r.to_string()));
                }
                Membership::Incomplete => {
                    return Err(WeightError::GroupSearchIncomplete(
                        r.to_string(),
                        bounds.shift_radius,
                    ));
                }
            }
            let c = r.frac();
            if !canon.contains(&c) {
                canon.push(c);
            }
        }
        canon.sort_by(|a, b| self.phi(a).cmp_exact(&self.phi(b)).then(a.cmp_lex(b)));
        Ok(FineWeightSystem { lambda: self.clone(), reps: canon })
    }
}

pub(crate) fn monoid_box_points(bounds: &[(i64, i64)]) -> Vec<IVec> {
    let mut out = vec![vec![]];
    for &(lo, hi) in bounds {
        let mut next = Vec::new();
        for p in &out {
            for v in lo..=hi {
                let mut q = p.clone();
                q.push(v);
                next.push(q);
            }
        }
        out = next;
    }
    out
}

/// Finite set of P^gp-orbit representatives inside Λ^gp, canonicalized to
/// the [0,1)^r fundamental domain and sorted by (φ, lex).
#[derive(Clone, Debug)]
pub struct FineWeightSystem {
    lambda: WeightMonoid,
    reps: Vec<Weight>,
}

impl FineWeightSystem {
    pub fn lambda(&self) -> &WeightMonoid {
        &self.lambda
    }

    pub fn reps(&self) -> &[Weight] {
        &self.reps
    }

    pub fn len(&self) -> usize {
        self.reps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.reps.is_empty()
    }

    /// Index of the representative in the class of `w`, if present.
    pub fn class_index(&self, w: &Weight) -> Option<usize> {
        let c = w.frac();
        self.reps.iter().position(|r| *r == c)
    }

    pub fn subsystem_of(&self, other: &FineWeightSystem) -> bool {
        self.reps.iter().all(|r| other.reps.contains(r))
    }
}

/// Lazy stream over Λ ∩ {φ ≤ bound}.
pub struct WindowIter<'a> {
    lambda: &'a WeightMonoid,
    bound: i64,
    buffer: std::collections::VecDeque<Weight>,
    seen_classes: Vec<Weight>,
    stage: u32,
    empty_stages: u32,
    finished: bool,
}

const MAX_EMPTY_STAGES: u32 = 16;

impl<'a> WindowIter<'a> {
    fn new(lambda: &'a WeightMonoid, bound: i64) -> Self {
        let mut it = WindowIter {
            lambda,
            bound,
            buffer: Default::default(),
            seen_classes: Vec::new(),
            stage: 0,
            empty_stages: 0,
            finished: false,
        };
        if let WeightKind::Fraction(n) = lambda.kind() {
            let n = *n;
            let pts = lambda.monoid().cone_points_upto(bound * n as i64);
            let scale = Rat::new(Int::one(), Int::from(n));
            for p in pts {
                it.buffer.push_back(Weight::from_ints(lambda.ground(), &p).scale(&scale));
            }
            it.finished = true;
        }
        it
    }

    fn advance_stage(&mut self) {
        let gens = self.lambda.saturated_generators().to_vec();
        let ground = self.lambda.ground().clone();
        let monoid = self.lambda.monoid().clone();
        let boxes = monoid.box_for_phi(self.bound);
        let mut fresh: Vec<Weight> = Vec::new();
        for combo in compositions(self.stage, gens.len().max(1)) {
            if gens.is_empty() && self.stage > 0 {
                continue;
            }
            let mut base = Weight::zero(&ground, monoid.rank());
            for (g, &n) in gens.iter().zip(&combo) {
                base = base.add(&g.scale(&Rat::from_integer(n.into())));
            }
            // distinct combos in one class enumerate identical elements
            let canon = base.frac();
            if self.seen_classes.contains(&canon) {
                continue;
            }
            self.seen_classes.push(canon.clone());
            let ranges: Vec<(i64, i64)> =
                boxes.iter().map(|&(lo, hi)| (lo - 1, hi)).collect();
            for p in monoid_box_points(&ranges) {
                let w = canon.add_ints(&p);
                if !monoid.cone_contains(w.coords()) {
                    continue;
                }
                let phi = monoid.phi_weight(w.coords());
                if phi.sub(&WeightFieldElement::from_int(&ground, self.bound)).sign() > 0 {
                    continue;
                }
                if !fresh.contains(&w) {
                    fresh.push(w);
                }
            }
        }
        fresh.sort_by(|a, b| {
            let pa = monoid.phi_weight(a.coords());
            let pb = monoid.phi_weight(b.coords());
            pa.cmp_exact(&pb).then(a.cmp_lex(b))
        });
        if fresh.is_empty() {
            self.empty_stages += 1;
            if self.empty_stages >= MAX_EMPTY_STAGES {
                self.finished = true;
            }
        } else {
            self.empty_stages = 0;
        }
        for w in fresh {
            self.buffer.push_back(w);
        }
        self.stage += 1;
    }
}

fn compositions(total: u32, parts: usize) -> Vec<Vec<u32>> {
    if parts == 1 {
        return vec![vec![total]];
    }
    let mut out = Vec::new();
    for first in 0..=total {
        for mut rest in compositions(total - first, parts - 1) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

impl<'a> Iterator for WindowIter<'a> {
    type Item = Weight;

    fn next(&mut self) -> Option<Weight> {
        loop {
            if let Some(w) = self.buffer.pop_front() {
                return Some(w);
            }
            if self.finished {
                return None;
            }
            self.advance_stage();
        }
    }
}
