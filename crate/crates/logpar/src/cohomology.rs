//! Group cohomology of the deck lattice Z(P) ≅ Z^r acting on the stalk of
//! a twisted line bundle over the chart ring.
//!
//! The stalk decomposes as a direct sum over the monomials S^μ (μ in Λ
//! outside the ideal ⟨P⁺⟩) of copies of A[T_1, …, T_r], where the dual
//! basis element g_a acts by the phase e^{2πi g_a(μ−λ)} and the shift
//! T_a ↦ T_a − 2πi. Two methods are implemented and cross-checked:
//!
//! * `Recursion` runs the descending induction over the generators: with
//!   the log variables present, each direction either kills the summand
//!   (nontrivial phase — the twisted shift is bijective) or contracts the
//!   polynomial ring one variable down (trivial phase — surjective with
//!   kernel the subring), so H^{>0} vanishes and H^0 counts the summands
//!   with all phases trivial. Without log variables the Koszul complex of
//!   scalars (phase − 1) gives binomial-coefficient cohomology instead —
//!   the failure of higher vanishing for plain pulled-back coefficients.
//! * `TruncatedKoszul` materializes the T-degree ≤ d slice over the scalar
//!   field Q(ζ_N)(u)(v) and computes honest Koszul cohomology plus the
//!   transition maps H^m(d) → H^m(d+1), whose vanishing for m > 0 is the
//!   stabilization-to-zero of the colimit.

use num_traits::{One, Zero};

use crate::coeff::Chart;
use crate::linalg::Matrix;
use crate::phase::{PhaseClass, ScalarField};
use crate::scalar::LocalScalar;
use crate::weights::{Membership, Weight};
use crate::{Bounds, Sf};

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum CohomologyMethod {
    Recursion,
    TruncatedKoszul,
    Both,
}

#[derive(Debug, thiserror::Error)]
pub enum CohomologyError {
    #[error("weight enumeration inconclusive: {0}")]
    Incomplete(String),
    #[error("phase embedding failed: {0}")]
    Embed(#[from] crate::phase::EmbedError),
    #[error(
        "methods disagree after stabilization (recursion {recursion:?}, koszul vanishing {koszul:?}): implementation bug"
    )]
    MethodDisagreement { recursion: Vec<usize>, koszul: Vec<bool> },
}

/// Cohomology of one slice of the Koszul complex.
#[derive(Clone, Debug, PartialEq, serde::Serialize)]
pub struct KoszulSlice {
    pub truncation: usize,
    pub dims: Vec<usize>,
}

#[derive(Clone, Debug, serde::Serialize)]
pub struct CohomologyReport {
    /// Exact per-degree dimensions from the recursion method (counted in
    /// free A-summands of invariants; degrees 0..=r).
    pub recursion_dims: Option<Vec<usize>>,
    /// Koszul slice data at the two requested truncations.
    pub koszul_slices: Option<(KoszulSlice, KoszulSlice)>,
    /// For m = 1..=r: does the map H^m(d) → H^m(d+1) vanish?
    pub koszul_transitions_vanish: Option<Vec<bool>>,
    /// Monomial summands scanned (φ-window on Λ \ ⟨P⁺⟩).
    pub summands: usize,
    pub phi_window: i64,
    pub with_log_variables: bool,
}

impl CohomologyReport {
    /// The statement under test: H^m = 0 for all m > 0.
    pub fn higher_vanishing(&self) -> bool {
        let rec = self
            .recursion_dims
            .as_ref()
            .map(|d| d.iter().skip(1).all(|&x| x == 0));
        let kos = self
            .koszul_transitions_vanish
            .as_ref()
            .map(|v| v.iter().all(|&b| b));
        match (rec, kos) {
            (Some(a), Some(b)) => a && b,
            (Some(a), None) => a,
            (None, Some(b)) => b,
            (None, None) => false,
        }
    }
}

fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let mut acc = 1usize;
    for i in 0..k {
        acc = acc * (n - i) / (i + 1);
    }
    acc
}

/// How many monomial summands a single cohomology run examines; the stalk
/// decomposes as a direct sum, so each summand is an independent instance
/// of the lemma and a bounded sample is a faithful desk-scale check.
const SUMMAND_CAP: usize = 12;

/// The monomial window: μ ∈ Λ \ ⟨P⁺⟩ with φ(μ) ≤ bound (capped), plus
/// their phases against λ in every dual-basis direction.
fn summand_phases<S: LocalScalar>(
    chart: &Chart<S>,
    lam: &Weight,
    bounds: &Bounds,
) -> Result<Vec<Vec<PhaseClass>>, CohomologyError> {
    let r = chart.rank();
    let mut out = Vec::new();
    for mu in chart.lambda.enumerate_window(bounds.phi_bound as i64).take(192) {
        if chart.lambda.in_positive_ideal(&mu, bounds) {
            continue;
        }
        let diff = mu.sub(lam);
        let mut phases = Vec::with_capacity(r);
        for a in 0..r {
            phases.push(PhaseClass::new(&diff.coords()[a]));
        }
        out.push(phases);
        if out.len() >= SUMMAND_CAP {
            break;
        }
    }
    if out.is_empty() {
        return Err(CohomologyError::Incomplete(
            "no monomial summands in the φ-window".into(),
        ));
    }
    Ok(out)
}

fn recursion_dims(r: usize, phase_sets: &[Vec<PhaseClass>], with_log_vars: bool) -> Vec<usize> {
    let mut dims = vec![0usize; r + 1];
    for phases in phase_sets {
        let trivial = phases.iter().all(|p| p.is_trivial());
        if with_log_vars {
            // each direction with a nontrivial phase kills the summand; a
            // trivial phase contracts the log variable away surjectively
            if trivial {
                dims[0] += 1;
            }
        } else if trivial {
            // Koszul complex of zero maps on a rank-one module
            for (m, d) in dims.iter_mut().enumerate() {
                *d += binomial(r, m);
            }
        }
    }
    dims
}

/// Monomials T^b with |b| ≤ d in r variables, ordered by (total degree, lex).
fn t_monomials(r: usize, d: usize) -> Vec<Vec<usize>> {
    let mut out: Vec<Vec<usize>> = vec![vec![]];
    for _ in 0..r {
        let mut next = Vec::new();
        for m in &out {
            let used: usize = m.iter().sum();
            for k in 0..=(d - used) {
                let mut mm = m.clone();
                mm.push(k);
                next.push(mm);
            }
        }
        out = next;
    }
    out.sort_by_key(|m| (m.iter().sum::<usize>(), m.clone()));
    out
}

/// Matrix of (g_a − 1) on the span of T^b, |b| ≤ d, for a summand with the
/// given phase in direction a: g_a·T^b = c·(T_a − v)^{b_a}·(rest).
fn direction_matrix(
    sf: &ScalarField,
    phase: &PhaseClass,
    a: usize,
    monomials: &[Vec<usize>],
    with_log_vars: bool,
) -> Result<Matrix<Sf>, CohomologyError> {
    let c = sf.embed_phase(phase)?;
    if !with_log_vars {
        return Ok(Matrix::new(vec![vec![c - Sf::one()]]));
    }
    let v = sf.v();
    let n = monomials.len();
    let mut out = Matrix::<Sf>::zero(n, n);
    for (col, b) in monomials.iter().enumerate() {
        // expand c·(T_a − v)^{b_a} over T_a^k
        let ba = b[a];
        let mut coeffs: Vec<Sf> = vec![Sf::zero(); ba + 1];
        for (k, coeff) in coeffs.iter_mut().enumerate() {
            // C(ba, k) (−v)^{ba−k}
            let mut term = Sf::one();
            for _ in 0..(ba - k) {
                term = term * (Sf::zero() - v.clone());
            }
            let binom = binomial(ba, k);
            let mut scal = Sf::zero();
            for _ in 0..binom {
                scal = scal + Sf::one();
            }
            *coeff = term * scal;
        }
        for (k, coeff) in coeffs.iter().enumerate() {
            if coeff.is_zero() {
                continue;
            }
            let mut target = b.clone();
            target[a] = k;
            let row = monomials.iter().position(|m| *m == target).expect("monomial in slice");
            let val = c.clone() * coeff.clone();
            let cur = out.at(row, col).clone();
            out.set(row, col, cur + val);
        }
    }
    // subtract the identity
    for i in 0..n {
        let cur = out.at(i, i).clone();
        out.set(i, i, cur - Sf::one());
    }
    Ok(out)
}

/// Koszul complex of the commuting operators M_1..M_r on V: differential
/// d^m on V ⊗ Λ^m with the usual signs.
struct Koszul {
    r: usize,
    dim: usize,
    mats: Vec<Matrix<Sf>>,
    subsets: Vec<Vec<Vec<usize>>>,
}

impl Koszul {
    fn new(mats: Vec<Matrix<Sf>>) -> Self {
        let r = mats.len();
        let dim = mats[0].rows();
        let mut subsets: Vec<Vec<Vec<usize>>> = Vec::with_capacity(r + 1);
        for m in 0..=r {
            subsets.push(k_subsets(r, m));
        }
        Koszul { r, dim, mats, subsets }
    }

    fn space_dim(&self, m: usize) -> usize {
        self.subsets[m].len() * self.dim
    }

    /// d^m: V ⊗ Λ^m → V ⊗ Λ^{m+1}.
    fn differential(&self, m: usize) -> Matrix<Sf> {
        if m >= self.r {
            return Matrix::zero(0, self.space_dim(m));
        }
        let src = &self.subsets[m];
        let tgt = &self.subsets[m + 1];
        let mut out = Matrix::<Sf>::zero(tgt.len() * self.dim, src.len() * self.dim);
        for (si, subset) in src.iter().enumerate() {
            for a in 0..self.r {
                if subset.contains(&a) {
                    continue;
                }
                let mut merged = subset.clone();
                merged.push(a);
                merged.sort();
                let ti = tgt.iter().position(|s| *s == merged).unwrap();
                let sign = subset.iter().filter(|&&i| i < a).count() % 2 == 1;
                let mat = &self.mats[a];
                for row in 0..self.dim {
                    for col in 0..self.dim {
                        let mut v = mat.at(row, col).clone();
                        if v.is_zero() {
                            continue;
                        }
                        if sign {
                            v = Sf::zero() - v;
                        }
                        let cur = out.at(ti * self.dim + row, si * self.dim + col).clone();
                        out.set(ti * self.dim + row, si * self.dim + col, cur + v);
                    }
                }
            }
        }
        out
    }

    fn cohomology_dims(&self) -> Vec<usize> {
        let mut dims = Vec::with_capacity(self.r + 1);
        let mut prev_rank = 0usize;
        for m in 0..=self.r {
            let d = self.differential(m);
            let rank = if d.rows() == 0 { 0 } else { d.rank_pivots() };
            let ker = self.space_dim(m) - rank;
            dims.push(ker - prev_rank);
            prev_rank = rank;
        }
        dims
    }
}

fn k_subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, k: usize) -> Vec<Vec<usize>> {
        if k == 0 {
            return vec![vec![]];
        }
        let mut out = Vec::new();
        for i in start..n {
            for mut rest in rec(i + 1, n, k - 1) {
                rest.insert(0, i);
                out.push(rest);
            }
        }
        out
    }
    rec(0, n, k)
}

struct KoszulOutcome {
    slices: (KoszulSlice, KoszulSlice),
    transitions_vanish: Vec<bool>,
}

/// Full slice elimination is run for every trivial-phase summand group and
/// for small slices; a summand with some nontrivial phase has a direction
/// operator that is triangular with constant diagonal c − 1 ≠ 0 in the
/// degree-sorted monomial basis, hence invertible, so its Koszul complex is
/// exact at every truncation — that case is taken by the (exact) shortcut
/// after one representative per call is eliminated in full.
fn koszul_method(
    r: usize,
    phase_sets: &[Vec<PhaseClass>],
    d: usize,
    with_log_vars: bool,
) -> Result<KoszulOutcome, CohomologyError> {
    let all: Vec<&PhaseClass> = phase_sets.iter().flatten().collect();
    let sf = ScalarField::for_phases(all);
    // summands with equal phase vectors have identical complexes
    let mut groups: Vec<(Vec<PhaseClass>, usize)> = Vec::new();
    for phases in phase_sets {
        match groups.iter_mut().find(|(p, _)| p == phases) {
            Some((_, mult)) => *mult += 1,
            None => groups.push((phases.clone(), 1)),
        }
    }
    let mut dims_d = vec![0usize; r + 1];
    let mut dims_d1 = vec![0usize; r + 1];
    let mut vanish = vec![true; r];
    let mons_d = if with_log_vars { t_monomials(r, d) } else { vec![vec![0; r]] };
    let mons_d1 = if with_log_vars { t_monomials(r, d + 1) } else { vec![vec![0; r]] };
    let mut nontrivial_full_budget = 1usize;
    for (phases, mult) in &groups {
        let trivial = phases.iter().all(|p| p.is_trivial());
        if !trivial {
            // exactness shortcut, except for one fully-eliminated sample
            // per call; verify the invertibility certificate exactly
            let witness = phases.iter().find(|p| !p.is_trivial()).unwrap();
            let c = sf.embed_phase(witness)?;
            assert!(c != Sf::one(), "phase embedding must separate nontrivial phases");
            if nontrivial_full_budget == 0 || mons_d.len() > 24 {
                continue;
            }
            nontrivial_full_budget -= 1;
        }
        let mats_d: Vec<Matrix<Sf>> = (0..r)
            .map(|a| direction_matrix(&sf, &phases[a], a, &mons_d, with_log_vars))
            .collect::<Result<_, _>>()?;
        let mats_d1: Vec<Matrix<Sf>> = (0..r)
            .map(|a| direction_matrix(&sf, &phases[a], a, &mons_d1, with_log_vars))
            .collect::<Result<_, _>>()?;
        let kos_d = Koszul::new(mats_d);
        let kos_d1 = Koszul::new(mats_d1);
        let cd = kos_d.cohomology_dims();
        let cd1 = kos_d1.cohomology_dims();
        for m in 0..=r {
            dims_d[m] += cd[m] * mult;
            dims_d1[m] += cd1[m] * mult;
        }
        // transition vanishing: ker d^m_(d) ⊆ im d^{m−1}_(d+1) for m ≥ 1
        for m in 1..=r {
            if cd[m] == 0 {
                continue;
            }
            let ker = kos_d.differential(m).kernel_gens();
            // embed slice-d vectors into the slice-(d+1) monomial basis
            let embed = |vec_in: Vec<Sf>| -> Vec<Sf> {
                let mut out = vec![Sf::zero(); kos_d1.space_dim(m)];
                for (si, subset) in kos_d.subsets[m].iter().enumerate() {
                    let ti = kos_d1.subsets[m].iter().position(|s| s == subset).unwrap();
                    for (row, mon) in mons_d.iter().enumerate() {
                        let trow = mons_d1.iter().position(|mm| mm == mon).unwrap();
                        out[ti * kos_d1.dim + trow] =
                            vec_in[si * kos_d.dim + row].clone();
                    }
                }
                out
            };
            let prev = kos_d1.differential(m - 1);
            let prev_rank = prev.rank_pivots();
            let mut stacked_cols: Vec<Vec<Sf>> = (0..prev.cols()).map(|j| prev.col(j)).collect();
            for j in 0..ker.cols() {
                stacked_cols.push(embed(ker.col(j)));
            }
            let stacked = Matrix::from_cols(stacked_cols, kos_d1.space_dim(m));
            if stacked.rank_pivots() != prev_rank {
                vanish[m - 1] = false;
            }
        }
    }
    Ok(KoszulOutcome {
        slices: (
            KoszulSlice { truncation: d, dims: dims_d },
            KoszulSlice { truncation: d + 1, dims: dims_d1 },
        ),
        transitions_vanish: vanish,
    })
}

/// H^*(Z(P), stalk of L_λ) by the requested method(s); `with_log_vars`
/// false models plain pulled-back coefficients (the negative control where
/// higher cohomology survives).
pub fn group_cohomology<S: LocalScalar>(
    chart: &Chart<S>,
    lam: &Weight,
    method: CohomologyMethod,
    truncation: usize,
    with_log_vars: bool,
    bounds: &Bounds,
) -> Result<CohomologyReport, CohomologyError> {
    if let Membership::Incomplete = chart.lambda.in_group(lam, bounds) {
        return Err(CohomologyError::Incomplete(format!("λ = {lam} group membership")));
    }
    let r = chart.rank();
    let phase_sets = summand_phases(chart, lam, bounds)?;
    let mut report = CohomologyReport {
        recursion_dims: None,
        koszul_slices: None,
        koszul_transitions_vanish: None,
        summands: phase_sets.len(),
        phi_window: bounds.phi_bound as i64,
        with_log_variables: with_log_vars,
    };
    if matches!(method, CohomologyMethod::Recursion | CohomologyMethod::Both) {
        report.recursion_dims = Some(recursion_dims(r, &phase_sets, with_log_vars));
    }
    if matches!(method, CohomologyMethod::TruncatedKoszul | CohomologyMethod::Both) {
        let out = koszul_method(r, &phase_sets, truncation, with_log_vars)?;
        report.koszul_slices = Some(out.slices);
        report.koszul_transitions_vanish = Some(out.transitions_vanish);
    }
    if let (Some(rec), Some(van)) =
        (&report.recursion_dims, &report.koszul_transitions_vanish)
    {
        // the recursion says H^m ≠ 0 exactly when the koszul transition
        // H^m(d) → H^m(d+1) fails to vanish
        let consistent = (1..=r).all(|m| (rec[m] == 0) == van[m - 1]);
        // H^0 agrees between the methods slice-by-slice
        let h0_ok = report
            .koszul_slices
            .as_ref()
            .map(|(a, b)| a.dims[0] == rec[0] && b.dims[0] == rec[0])
            .unwrap_or(true);
        if !consistent || !h0_ok {
            return Err(CohomologyError::MethodDisagreement {
                recursion: rec.clone(),
                koszul: van.clone(),
            });
        }
    }
    Ok(report)
}
