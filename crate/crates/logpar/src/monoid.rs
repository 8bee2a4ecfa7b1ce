//! Toric monoids: fine, saturated, sharp submonoids P of a rank-r lattice,
//! presented by generators in an ambient Z^r.
//!
//! The monoid is stored in coordinates with respect to a chosen basis
//! p_1, …, p_r of P^gp (the group generated by the input points), computed
//! as a Hermite normal form. Saturation is taken inside P^gp: the stored
//! monoid is cone(generators) ∩ P^gp, with its Hilbert basis enumerated by
//! φ-level-bounded search and irreducibility filtering. This is adequate at
//! desk scale (rank ≤ 3) and makes no attempt to compete with production
//! Hilbert-basis algorithms.

use num_traits::{One, Signed, Zero};

use crate::algebraic::WeightFieldElement;
use crate::Rat;

pub type IVec = Vec<i64>;

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum MonoidError {
    #[error("generator dimensions differ: expected {0}, found {1}")]
    RankMismatch(usize, usize),
    #[error("the generated cone contains a line, so the monoid is not sharp")]
    NotSharp,
    #[error("generators span a rank-{0} sublattice of Z^{1}; a full-rank chart is required")]
    NotFullRank(usize, usize),
    #[error("at least one nonzero generator is required")]
    Empty,
}

/// Element of the dual lattice Hom(P^gp, Z), an integer covector in the
/// coordinates of the chosen basis of P^gp.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct DualElement {
    pub coeffs: IVec,
}

impl DualElement {
    pub fn pair_int(&self, v: &[i64]) -> i64 {
        self.coeffs.iter().zip(v).map(|(a, b)| a * b).sum()
    }

    pub fn pair_rat(&self, v: &[Rat]) -> Rat {
        let mut acc = Rat::zero();
        for (a, b) in self.coeffs.iter().zip(v) {
            acc += Rat::from_integer((*a).into()) * b.clone();
        }
        acc
    }

    /// Real-linear extension applied to a weight coordinate vector.
    pub fn pair_weight(&self, coords: &[WeightFieldElement]) -> WeightFieldElement {
        let g = coords[0].ground().clone();
        let mut acc = WeightFieldElement::zero(&g);
        for (a, x) in self.coeffs.iter().zip(coords) {
            acc = acc.add(&x.scale(&Rat::from_integer((*a).into())));
        }
        acc
    }
}

/// Fine, saturated, sharp monoid with cached Hilbert basis, facet
/// description, and a strictly positive functional.
#[derive(Clone, Debug)]
pub struct ToricMonoid {
    rank: usize,
    ambient_generators: Vec<IVec>,
    /// Rows are the basis p_1, …, p_r of P^gp, as ambient vectors.
    basis: Vec<IVec>,
    /// Generators in basis coordinates.
    generators: Vec<IVec>,
    /// Hilbert basis of cone ∩ P^gp in basis coordinates, lex-sorted.
    hilbert: Vec<IVec>,
    /// Facet normals of the cone in basis coordinates.
    facets: Vec<IVec>,
    phi: DualElement,
    phi_ambient: IVec,
    points_cache: std::sync::Arc<std::sync::Mutex<std::collections::HashMap<i64, std::sync::Arc<Vec<IVec>>>>>,
}

impl PartialEq for ToricMonoid {
    fn eq(&self, other: &Self) -> bool {
        self.basis == other.basis && self.hilbert == other.hilbert
    }
}

/// Feasibility of {A·x = 0 rows in `eq`, a·x ≥ b for (a, b) in `ge`} over
/// the rationals, by substitution on equalities then Fourier–Motzkin.
fn feasible(mut eq: Vec<(Vec<Rat>, Rat)>, mut ge: Vec<(Vec<Rat>, Rat)>, nvars: usize) -> bool {
    let mut live: Vec<usize> = (0..nvars).collect();
    while let Some(pos) = eq.iter().position(|(a, _)| a.iter().any(|c| !c.is_zero())) {
        let (arow, b) = eq.remove(pos);
        let j = arow.iter().position(|c| !c.is_zero()).unwrap();
        let aj = arow[j].clone();
        // x_j = (b - Σ_{i≠j} a_i x_i) / a_j ; substitute everywhere
        let subst = |(row, rhs): &mut (Vec<Rat>, Rat)| {
            let c = row[j].clone();
            if c.is_zero() {
                return;
            }
            let f = c / aj.clone();
            for (i, a) in arow.iter().enumerate() {
                if i != j {
                    row[i] -= f.clone() * a.clone();
                }
            }
            row[j] = Rat::zero();
            *rhs -= f * b.clone();
        };
        eq.iter_mut().for_each(subst);
        ge.iter_mut().for_each(subst);
        live.retain(|&v| v != j);
    }
    if eq.iter().any(|(_, b)| !b.is_zero()) {
        return false;
    }
    // Fourier–Motzkin on the remaining inequalities
    for &j in &live {
        let (pos, rest): (Vec<_>, Vec<_>) = ge.into_iter().partition(|(a, _)| a[j].is_positive());
        let (neg, zero): (Vec<_>, Vec<_>) = rest.into_iter().partition(|(a, _)| a[j].is_negative());
        let mut next = zero;
        for (pa, pb) in &pos {
            for (na, nb) in &neg {
                let cp = -na[j].clone();
                let cn = pa[j].clone();
                let row: Vec<Rat> = (0..nvars)
                    .map(|i| cp.clone() * pa[i].clone() + cn.clone() * na[i].clone())
                    .collect();
                let rhs = cp.clone() * pb.clone() + cn * nb.clone();
                next.push((row, rhs));
            }
        }
        ge = next;
    }
    ge.iter().all(|(_, b)| !b.is_positive())
}

/// Hermite-style row basis of the lattice spanned by the given integer rows.
fn lattice_basis(rows: &[IVec], dim: usize) -> Vec<IVec> {
    let mut work: Vec<IVec> = rows.to_vec();
    let mut basis: Vec<IVec> = Vec::new();
    for col in 0..dim {
        loop {
            let mut idx: Option<usize> = None;
            for (i, r) in work.iter().enumerate() {
                if r[col] != 0 && idx.map_or(true, |k| work[k][col].abs() > r[col].abs()) {
                    idx = Some(i);
                }
            }
            let Some(p) = idx else { break };
            let pivot = work[p].clone();
            let mut done = true;
            for (i, r) in work.iter_mut().enumerate() {
                if i == p || r[col] == 0 {
                    continue;
                }
                let q = r[col].div_euclid(pivot[col]);
                for (a, b) in r.iter_mut().zip(&pivot) {
                    *a -= q * b;
                }
                if r[col] != 0 {
                    done = false;
                }
            }
            if done {
                let mut piv = work.remove(p);
                if piv[col] < 0 {
                    piv.iter_mut().for_each(|a| *a = -*a);
                }
                basis.push(piv);
                break;
            }
        }
    }
    // reduce entries above each pivot for a canonical form
    for i in (0..basis.len()).rev() {
        let col = (0..dim).find(|&c| basis[i][c] != 0).unwrap();
        let pivot = basis[i].clone();
        for j in 0..i {
            let q = basis[j][col].div_euclid(pivot[col]);
            if q != 0 {
                for (a, b) in basis[j].iter_mut().zip(&pivot) {
                    *a -= q * b;
                }
            }
        }
    }
    work.retain(|r| r.iter().any(|&a| a != 0));
    debug_assert!(work.is_empty());
    basis
}

/// Solve B^T x = v over Q where rows of `basis` are the b_i.
fn coords_in_basis(basis: &[IVec], v: &[i64]) -> Option<IVec> {
    use crate::linalg::Matrix;
    let r = basis.len();
    let m = Matrix::new(
        (0..v.len())
            .map(|i| (0..r).map(|j| Rat::from_integer(basis[j][i].into())).collect())
            .collect(),
    );
    let rhs: Vec<Rat> = v.iter().map(|&a| Rat::from_integer(a.into())).collect();
    let x = m.solve(&rhs)?;
    let mut out = Vec::with_capacity(r);
    for c in x {
        if !c.is_integer() {
            return None;
        }
        out.push(c.to_integer().to_string().parse().ok()?);
    }
    Some(out)
}

fn box_points(bounds: &[(i64, i64)]) -> Vec<IVec> {
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

impl ToricMonoid {
    pub fn new(generators: Vec<IVec>) -> Result<Self, MonoidError> {
        let Some(first) = generators.iter().find(|g| !g.is_empty()) else {
            return Err(MonoidError::Empty);
        };
        let dim = first.len();
        for g in &generators {
            if g.len() != dim {
                return Err(MonoidError::RankMismatch(dim, g.len()));
            }
        }
        let mut gens: Vec<IVec> = generators
            .iter()
            .filter(|g| g.iter().any(|&a| a != 0))
            .cloned()
            .collect();
        gens.sort();
        gens.dedup();
        if gens.is_empty() {
            return Err(MonoidError::Empty);
        }
        // sharpness: no nontrivial nonnegative dependence among generators
        let k = gens.len();
        let mut eq: Vec<(Vec<Rat>, Rat)> = (0..dim)
            .map(|row| {
                (
                    (0..k).map(|j| Rat::from_integer(gens[j][row].into())).collect(),
                    Rat::zero(),
                )
            })
            .collect();
        eq.push(((0..k).map(|_| Rat::one()).collect(), Rat::one()));
        let ge: Vec<(Vec<Rat>, Rat)> = (0..k)
            .map(|j| {
                let mut row = vec![Rat::zero(); k];
                row[j] = Rat::one();
                (row, Rat::zero())
            })
            .collect();
        if feasible(eq, ge, k) {
            return Err(MonoidError::NotSharp);
        }
        let basis = lattice_basis(&gens, dim);
        let rank = basis.len();
        if rank != dim {
            return Err(MonoidError::NotFullRank(rank, dim));
        }
        let gens_basis: Vec<IVec> = gens
            .iter()
            .map(|g| coords_in_basis(&basis, g).expect("generators lie in their own lattice"))
            .collect();
        let facets = facet_normals(&gens_basis, rank).ok_or(MonoidError::NotSharp)?;
        // lexicographically smallest ambient integer covector, growing box
        let phi_ambient = find_positive_functional(&gens).ok_or(MonoidError::NotSharp)?;
        let phi = DualElement {
            coeffs: basis
                .iter()
                .map(|p| p.iter().zip(&phi_ambient).map(|(a, b)| a * b).sum())
                .collect(),
        };
        let hilbert = hilbert_basis(&gens_basis, &facets, &phi);
        Ok(ToricMonoid {
            rank,
            ambient_generators: gens,
            basis,
            generators: gens_basis,
            hilbert,
            facets,
            phi,
            phi_ambient,
            points_cache: Default::default(),
        })
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn basis(&self) -> &[IVec] {
        &self.basis
    }

    pub fn generators_basis(&self) -> &[IVec] {
        &self.generators
    }

    pub fn hilbert_basis(&self) -> &[IVec] {
        &self.hilbert
    }

    pub fn hilbert_basis_ambient(&self) -> Vec<IVec> {
        self.hilbert.iter().map(|h| self.to_ambient(h)).collect()
    }

    pub fn facet_normals(&self) -> &[IVec] {
        &self.facets
    }

    pub fn positive_functional(&self) -> &DualElement {
        &self.phi
    }

    pub fn positive_functional_ambient(&self) -> &IVec {
        &self.phi_ambient
    }

    /// Dual basis element g_i (pairs to δ_ij against the basis of P^gp).
    pub fn dual_basis_element(&self, i: usize) -> DualElement {
        let mut coeffs = vec![0; self.rank];
        coeffs[i] = 1;
        DualElement { coeffs }
    }

    pub fn to_ambient(&self, coords: &[i64]) -> IVec {
        let dim = self.basis[0].len();
        let mut out = vec![0i64; dim];
        for (c, b) in coords.iter().zip(&self.basis) {
            for (o, x) in out.iter_mut().zip(b) {
                *o += c * x;
            }
        }
        out
    }

    /// Basis coordinates of an ambient lattice point, if it lies in P^gp.
    pub fn coords_of_ambient(&self, v: &[i64]) -> Option<IVec> {
        coords_in_basis(&self.basis, v)
    }

    /// Membership of an ambient integer point in the (saturated) monoid.
    pub fn member_ambient(&self, v: &[i64]) -> bool {
        match self.coords_of_ambient(v) {
            None => false,
            Some(c) => self.member(&c),
        }
    }

    /// Membership in basis coordinates: the point is in P iff every facet
    /// pairing is nonnegative (P is saturated, so the cone test is exact).
    pub fn member(&self, coords: &[i64]) -> bool {
        self.facets.iter().all(|f| f.iter().zip(coords).map(|(a, b)| a * b).sum::<i64>() >= 0)
    }

    /// Cone membership for real (weight) coordinate vectors.
    pub fn cone_contains(&self, coords: &[WeightFieldElement]) -> bool {
        self.facets.iter().all(|f| {
            DualElement { coeffs: f.clone() }.pair_weight(coords).sign() >= 0
        })
    }

    pub fn phi_value(&self, coords: &[i64]) -> i64 {
        self.phi.pair_int(coords)
    }

    pub fn phi_weight(&self, coords: &[WeightFieldElement]) -> WeightFieldElement {
        self.phi.pair_weight(coords)
    }

    pub fn max_phi_hilbert(&self) -> i64 {
        self.hilbert.iter().map(|h| self.phi_value(h)).max().unwrap_or(1)
    }

    pub fn sum_phi_hilbert(&self) -> i64 {
        self.hilbert.iter().map(|h| self.phi_value(h)).sum()
    }

    /// Integer points of {x ∈ cone : φ(x) ≤ bound}, sorted by (φ, lex).
    pub fn cone_points_upto(&self, bound: i64) -> Vec<IVec> {
        if let Some(hit) = self.points_cache.lock().unwrap().get(&bound) {
            return hit.as_ref().clone();
        }
        let mut out = Vec::new();
        for p in box_points(&self.box_for_phi(bound)) {
            if self.member(&p) && self.phi_value(&p) <= bound {
                out.push(p);
            }
        }
        out.sort_by_key(|p| (self.phi_value(p), p.clone()));
        self.points_cache
            .lock()
            .unwrap()
            .insert(bound, std::sync::Arc::new(out.clone()));
        out
    }

    /// A coordinate box containing {x ∈ cone : φ(x) ≤ bound}.
    pub fn box_for_phi(&self, bound: i64) -> Vec<(i64, i64)> {
        // the region is conv(0, (bound/φ(v)) v) over generating rays
        let mut bounds = vec![(0i64, 0i64); self.rank];
        for g in &self.generators {
            let pv = self.phi_value(g);
            for (i, &c) in g.iter().enumerate() {
                // |bound * c / pv| rounded out
                let num = bound.abs() * c.abs();
                let ext = num.div_euclid(pv) + if num % pv != 0 { 1 } else { 0 };
                if c >= 0 {
                    bounds[i].1 = bounds[i].1.max(ext);
                } else {
                    bounds[i].0 = bounds[i].0.min(-ext);
                }
            }
        }
        bounds
    }

    /// All decompositions of a monoid element over the Hilbert basis, as
    /// multiplicity vectors. Finite because φ is strictly positive.
    pub fn hilbert_decompositions(&self, coords: &[i64]) -> Vec<Vec<u32>> {
        let mut out = Vec::new();
        let mut current = vec![0u32; self.hilbert.len()];
        self.decomp_rec(coords.to_vec(), 0, &mut current, &mut out);
        out
    }

    fn decomp_rec(&self, rest: IVec, from: usize, current: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if rest.iter().all(|&a| a == 0) {
            out.push(current.clone());
            return;
        }
        for (i, h) in self.hilbert.iter().enumerate().skip(from) {
            let next: IVec = rest.iter().zip(h).map(|(a, b)| a - b).collect();
            if self.phi_value(&next) >= 0 && self.member(&next) {
                current[i] += 1;
                self.decomp_rec(next, i, current, out);
                current[i] -= 1;
            }
        }
    }
}

fn find_positive_functional(ambient_gens: &[IVec]) -> Option<IVec> {
    let dim = ambient_gens[0].len();
    let mut radius = 1i64;
    while radius <= 1 << 20 {
        let bounds: Vec<(i64, i64)> = vec![(-radius, radius); dim];
        for phi in box_points(&bounds) {
            if ambient_gens
                .iter()
                .all(|g| phi.iter().zip(g).map(|(a, b)| a * b).sum::<i64>() > 0)
            {
                return Some(phi);
            }
        }
        radius *= 2;
    }
    None
}

/// Facet normals of the full-dimensional cone spanned by `gens` in Z^r:
/// null covectors of (r−1)-subsets, kept when the whole generator set lies
/// on one side.
fn facet_normals(gens: &[IVec], rank: usize) -> Option<Vec<IVec>> {
    use crate::linalg::Matrix;
    if rank == 1 {
        let s = gens[0][0].signum();
        if gens.iter().any(|g| g[0].signum() != s) {
            return None;
        }
        return Some(vec![vec![s]]);
    }
    let mut normals: Vec<IVec> = Vec::new();
    let idx: Vec<usize> = (0..gens.len()).collect();
    for subset in subsets(&idx, rank - 1) {
        let m = Matrix::new(
            subset
                .iter()
                .map(|&i| gens[i].iter().map(|&a| Rat::from_integer(a.into())).collect())
                .collect(),
        );
        let k = m.kernel_gens();
        if k.cols() != 1 {
            continue;
        }
        let col = k.col(0);
        // scale to a primitive integer covector
        let lcm = col.iter().fold(crate::Int::from(1), |acc, c| {
            num_integer::Integer::lcm(&acc, c.denom())
        });
        let ints: Vec<crate::Int> =
            col.iter().map(|c| (c.clone() * Rat::from_integer(lcm.clone())).to_integer()).collect();
        let gcd = ints.iter().fold(crate::Int::from(0), |acc, c| num_integer::Integer::gcd(&acc, c));
        if gcd.is_zero() {
            continue;
        }
        let mut n: IVec = ints.iter().map(|c| (c / &gcd).to_string().parse().unwrap()).collect();
        let mut pos = false;
        let mut neg = false;
        for g in gens {
            let p: i64 = n.iter().zip(g).map(|(a, b)| a * b).sum();
            if p > 0 {
                pos = true;
            }
            if p < 0 {
                neg = true;
            }
        }
        if pos && neg {
            continue;
        }
        if neg {
            n.iter_mut().for_each(|a| *a = -*a);
        }
        if !normals.contains(&n) {
            normals.push(n);
        }
    }
    normals.sort();
    if normals.is_empty() {
        None
    } else {
        Some(normals)
    }
}

fn subsets(idx: &[usize], k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for (i, &x) in idx.iter().enumerate() {
        for mut rest in subsets(&idx[i + 1..], k - 1) {
            rest.insert(0, x);
            out.push(rest);
        }
    }
    out
}

fn hilbert_basis(gens: &[IVec], facets: &[IVec], phi: &DualElement) -> Vec<IVec> {
    let in_cone =
        |p: &[i64]| facets.iter().all(|f| f.iter().zip(p).map(|(a, b)| a * b).sum::<i64>() >= 0);
    let level_bound: i64 = gens.iter().map(|g| phi.pair_int(g)).sum();
    // box from the polytope conv(0, (L/φ(g))·g)
    let rank = gens[0].len();
    let mut bounds = vec![(0i64, 0i64); rank];
    for g in gens {
        let pv = phi.pair_int(g);
        for (i, &c) in g.iter().enumerate() {
            let num = level_bound * c.abs();
            let ext = num.div_euclid(pv) + if num % pv != 0 { 1 } else { 0 };
            if c >= 0 {
                bounds[i].1 = bounds[i].1.max(ext);
            } else {
                bounds[i].0 = bounds[i].0.min(-ext);
            }
        }
    }
    let mut candidates: Vec<IVec> = box_points(&bounds)
        .into_iter()
        .filter(|p| p.iter().any(|&a| a != 0) && in_cone(p) && phi.pair_int(p) <= level_bound)
        .collect();
    candidates.sort_by_key(|p| (phi.pair_int(p), p.clone()));
    let mut hilbert: Vec<IVec> = Vec::new();
    'outer: for c in &candidates {
        for w in &candidates {
            if phi.pair_int(w) >= phi.pair_int(c) {
                break;
            }
            let diff: IVec = c.iter().zip(w).map(|(a, b)| a - b).collect();
            if in_cone(&diff) {
                continue 'outer;
            }
        }
        hilbert.push(c.clone());
    }
    hilbert.sort();
    hilbert
}
