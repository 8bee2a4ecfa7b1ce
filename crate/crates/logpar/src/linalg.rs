//! Exact linear algebra over a local scalar ring.
//!
//! A Smith-style canonical form drives everything: over a [`LocalScalar`]
//! every nonzero entry is unit·ε^k, so pivoting on the entry of minimal
//! ε-order yields a diagonal of ε-powers with recorded row/column
//! transforms. Kernels, solvability, cokernel invariants and lengths all
//! read off from that decomposition. Fields are the ε = 0 special case, so
//! the same engine does Gaussian elimination over Q and over the
//! equivariance scalar field.

use crate::scalar::LocalScalar;

#[derive(Clone, PartialEq, Debug)]
pub struct Matrix<S> {
    rows: usize,
    cols: usize,
    data: Vec<Vec<S>>,
}

impl<S: LocalScalar> Matrix<S> {
    pub fn new(data: Vec<Vec<S>>) -> Self {
        let rows = data.len();
        let cols = data.first().map_or(0, |r| r.len());
        for r in &data {
            assert_eq!(r.len(), cols, "ragged matrix");
        }
        Matrix { rows, cols, data }
    }

    pub fn zero(rows: usize, cols: usize) -> Self {
        Matrix { rows, cols, data: vec![vec![S::zero(); cols]; rows] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zero(n, n);
        for i in 0..n {
            m.data[i][i] = S::one();
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn at(&self, i: usize, j: usize) -> &S {
        &self.data[i][j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: S) {
        self.data[i][j] = v;
    }

    pub fn row(&self, i: usize) -> &[S] {
        &self.data[i]
    }

    pub fn col(&self, j: usize) -> Vec<S> {
        (0..self.rows).map(|i| self.data[i][j].clone()).collect()
    }

    pub fn is_zero_matrix(&self) -> bool {
        self.data.iter().all(|r| r.iter().all(|a| a.is_zero()))
    }

    pub fn transpose(&self) -> Self {
        let mut out = Self::zero(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.data[j][i] = self.data[i][j].clone();
            }
        }
        out
    }

    pub fn from_cols(cols: Vec<Vec<S>>, rows: usize) -> Self {
        let n = cols.len();
        let mut m = Self::zero(rows, n);
        for (j, c) in cols.into_iter().enumerate() {
            assert_eq!(c.len(), rows);
            for (i, v) in c.into_iter().enumerate() {
                m.data[i][j] = v;
            }
        }
        m
    }

    /// Horizontal concatenation [self | other].
    pub fn hstack(&self, other: &Self) -> Self {
        assert_eq!(self.rows, other.rows);
        let mut data = Vec::with_capacity(self.rows);
        for i in 0..self.rows {
            let mut r = self.data[i].clone();
            r.extend(other.data[i].iter().cloned());
            data.push(r);
        }
        Self::new(data)
    }

    /// Vertical concatenation [self; other].
    pub fn vstack(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.cols);
        let mut data = self.data.clone();
        data.extend(other.data.iter().cloned());
        Self::new(data)
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "dimension mismatch in mul");
        let mut out = Self::zero(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self.data[i][k];
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = &other.data[k][j];
                    if b.is_zero() {
                        continue;
                    }
                    let t = out.data[i][j].clone() + a.clone() * b.clone();
                    out.data[i][j] = t;
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[S]) -> Vec<S> {
        assert_eq!(self.cols, v.len());
        (0..self.rows)
            .map(|i| {
                let mut acc = S::zero();
                for j in 0..self.cols {
                    if !self.data[i][j].is_zero() && !v[j].is_zero() {
                        acc = acc + self.data[i][j].clone() * v[j].clone();
                    }
                }
                acc
            })
            .collect()
    }

    pub fn scale(&self, a: &S) -> Self {
        Self::new(
            self.data
                .iter()
                .map(|r| r.iter().map(|x| x.clone() * a.clone()).collect())
                .collect(),
        )
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Self::new(
            self.data
                .iter()
                .zip(&other.data)
                .map(|(r, s)| r.iter().zip(s).map(|(a, b)| a.clone() + b.clone()).collect())
                .collect(),
        )
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(&(-S::one())))
    }

    /// Smith-style decomposition u·self·v = d with d diagonal of ε-powers,
    /// pivots in non-decreasing ε-order.
    pub fn smith(&self) -> Smith<S> {
        let mut d = self.clone();
        let mut u = Self::identity(self.rows);
        let mut v = Self::identity(self.cols);
        let mut orders = Vec::new();
        let mut t = 0usize;
        let lim = self.rows.min(self.cols);
        while t < lim {
            // entry of minimal ε-order in the remaining block
            let mut best: Option<(usize, usize, usize)> = None;
            for i in t..self.rows {
                for j in t..self.cols {
                    if let Some((_, k)) = d.data[i][j].unit_and_order() {
                        if best.map_or(true, |(_, _, bk)| k < bk) {
                            best = Some((i, j, k));
                        }
                    }
                }
            }
            let Some((pi, pj, k)) = best else { break };
            d.data.swap(t, pi);
            u.data.swap(t, pi);
            for r in d.data.iter_mut() {
                r.swap(t, pj);
            }
            for r in v.data.iter_mut() {
                r.swap(t, pj);
            }
            // normalize pivot to ε^k
            let (unit, _) = d.data[t][t].unit_and_order().unwrap();
            if !unit.is_one() {
                let ui = unit.inv().expect("unit part invertible");
                for j in 0..self.cols {
                    if !d.data[t][j].is_zero() {
                        d.data[t][j] = d.data[t][j].clone() * ui.clone();
                    }
                }
                for j in 0..self.rows {
                    if !u.data[t][j].is_zero() {
                        u.data[t][j] = u.data[t][j].clone() * ui.clone();
                    }
                }
            }
            // clear the pivot column below
            for i in t + 1..self.rows {
                if let Some((w, kk)) = d.data[i][t].unit_and_order() {
                    debug_assert!(kk >= k);
                    let f = w * S::eps_pow(kk - k);
                    for j in 0..self.cols {
                        if d.data[t][j].is_zero() {
                            continue;
                        }
                        let s = d.data[i][j].clone() - f.clone() * d.data[t][j].clone();
                        d.data[i][j] = s;
                    }
                    for j in 0..self.rows {
                        if u.data[t][j].is_zero() {
                            continue;
                        }
                        let s = u.data[i][j].clone() - f.clone() * u.data[t][j].clone();
                        u.data[i][j] = s;
                    }
                }
            }
            // clear the pivot row to the right (pivot column below is zero now)
            for j in t + 1..self.cols {
                if let Some((w, kk)) = d.data[t][j].unit_and_order() {
                    debug_assert!(kk >= k);
                    let f = w * S::eps_pow(kk - k);
                    for i in 0..self.rows {
                        if d.data[i][t].is_zero() {
                            continue;
                        }
                        let s = d.data[i][j].clone() - f.clone() * d.data[i][t].clone();
                        d.data[i][j] = s;
                    }
                    for i in 0..self.cols {
                        if v.data[i][t].is_zero() {
                            continue;
                        }
                        let s = v.data[i][j].clone() - f.clone() * v.data[i][t].clone();
                        v.data[i][j] = s;
                    }
                }
            }
            orders.push(k);
            t += 1;
        }
        Smith { u, v, d, orders }
    }

    /// Pivot ε-orders only, skipping the transform bookkeeping — cheaper
    /// when kernels and solutions are not needed.
    pub fn pivot_orders(&self) -> Vec<usize> {
        let mut d = self.data.clone();
        let rows = self.rows;
        let cols = self.cols;
        let mut orders = Vec::new();
        let mut t = 0usize;
        while t < rows.min(cols) {
            let mut best: Option<(usize, usize, usize)> = None;
            for (i, row) in d.iter().enumerate().take(rows).skip(t) {
                for (j, val) in row.iter().enumerate().take(cols).skip(t) {
                    if let Some((_, k)) = val.unit_and_order() {
                        if best.map_or(true, |(_, _, bk)| k < bk) {
                            best = Some((i, j, k));
                        }
                    }
                }
            }
            let Some((pi, pj, k)) = best else { break };
            d.swap(t, pi);
            for r in d.iter_mut() {
                r.swap(t, pj);
            }
            let (unit, _) = d[t][t].unit_and_order().unwrap();
            if !unit.is_one() {
                let ui = unit.inv().expect("unit part invertible");
                for j in t..cols {
                    if !d[t][j].is_zero() {
                        d[t][j] = d[t][j].clone() * ui.clone();
                    }
                }
            }
            for i in t + 1..rows {
                if let Some((w, kk)) = d[i][t].unit_and_order() {
                    let f = w * S::eps_pow(kk - k);
                    for j in t..cols {
                        if d[t][j].is_zero() {
                            continue;
                        }
                        let s = d[i][j].clone() - f.clone() * d[t][j].clone();
                        d[i][j] = s;
                    }
                }
            }
            for j in t + 1..cols {
                if let Some((w, kk)) = d[t][j].unit_and_order() {
                    let f = w * S::eps_pow(kk - k);
                    for i in t..rows {
                        if d[i][t].is_zero() {
                            continue;
                        }
                        let s = d[i][j].clone() - f.clone() * d[i][t].clone();
                        d[i][j] = s;
                    }
                }
            }
            orders.push(k);
            t += 1;
        }
        orders
    }

    /// Precomputed decomposition reusable across many solves.
    pub fn solver(&self) -> Solver<S> {
        let sm = self.smith();
        Solver { u: sm.u, v: sm.v, orders: sm.orders, cols: self.cols }
    }

    /// Columns generating ker(self: S^cols → S^rows) as a submodule.
    ///
    /// Over a field this is a basis; over Q[ε]/(ε^m) torsion pivots
    /// contribute ε^{m−k}-scaled generators.
    pub fn kernel_gens(&self) -> Matrix<S> {
        let sm = self.smith();
        let m = S::nilpotency();
        let mut cols: Vec<Vec<S>> = Vec::new();
        for (i, k) in sm.orders.iter().enumerate() {
            if *k > 0 {
                // ε^{m−k}·e_i is killed by the pivot
                let mut e = vec![S::zero(); self.cols];
                e[i] = S::eps_pow(m - k);
                cols.push(sm.v.mul_vec(&e));
            }
        }
        for j in sm.orders.len()..self.cols {
            let mut e = vec![S::zero(); self.cols];
            e[j] = S::one();
            cols.push(sm.v.mul_vec(&e));
        }
        Matrix::from_cols(cols, self.cols)
    }

    /// Solve self·x = b.
    pub fn solve(&self, b: &[S]) -> Option<Vec<S>> {
        self.solver().solve(b)
    }

    /// Does the column span of `self` contain every column of `b`?
    pub fn span_contains(&self, b: &Matrix<S>) -> bool {
        assert_eq!(self.rows, b.rows);
        let solver = self.solver();
        (0..b.cols).all(|j| solver.solve(&b.col(j)).is_some())
    }

    /// Invariants of coker(self: S^cols → S^rows): ε-orders of the torsion
    /// pivots (order < m) plus the free rank.
    pub fn coker_shape(&self) -> CokerShape {
        let orders = self.pivot_orders();
        let free = self.rows - orders.len();
        let torsion: Vec<usize> = orders.into_iter().filter(|k| *k > 0).collect();
        CokerShape { torsion, free }
    }

    /// Length over the base field of coker(self), i.e. Σ dim_Q.
    pub fn coker_length(&self) -> usize {
        let sh = self.coker_shape();
        sh.free * S::nilpotency() + sh.torsion.iter().sum::<usize>()
    }

    pub fn rank_pivots(&self) -> usize {
        self.pivot_orders().len()
    }
}

/// Reusable decomposition for solving many systems against one matrix.
pub struct Solver<S> {
    u: Matrix<S>,
    v: Matrix<S>,
    orders: Vec<usize>,
    cols: usize,
}

impl<S: LocalScalar> Solver<S> {
    pub fn solve(&self, b: &[S]) -> Option<Vec<S>> {
        assert_eq!(b.len(), self.u.rows());
        let c = self.u.mul_vec(b);
        let mut y = vec![S::zero(); self.cols];
        for (i, ci) in c.iter().enumerate() {
            if i < self.orders.len() {
                match ci.unit_and_order() {
                    None => {}
                    Some((w, k)) => {
                        let d = self.orders[i];
                        if k < d {
                            return None;
                        }
                        y[i] = w * S::eps_pow(k - d);
                    }
                }
            } else if !ci.is_zero() {
                return None;
            }
        }
        Some(self.v.mul_vec(&y))
    }

    pub fn solvable(&self, b: &[S]) -> bool {
        self.solve(b).is_some()
    }
}

pub struct Smith<S> {
    pub u: Matrix<S>,
    pub v: Matrix<S>,
    pub d: Matrix<S>,
    /// ε-orders of the pivots, non-decreasing.
    pub orders: Vec<usize>,
}

/// Canonical shape of a cokernel: torsion ε-orders plus free rank.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct CokerShape {
    pub torsion: Vec<usize>,
    pub free: usize,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Dual;
    use crate::Rat;

    type E2 = Dual<2>;

    fn rq(n: i64) -> Rat {
        Rat::from_integer(n.into())
    }

    fn rm(rows: Vec<Vec<i64>>) -> Matrix<Rat> {
        Matrix::new(rows.into_iter().map(|r| r.into_iter().map(rq).collect()).collect())
    }

    #[test]
    fn smith_over_q() {
        let a = rm(vec![vec![2, 4], vec![1, 3]]);
        let sm = a.smith();
        assert_eq!(sm.orders, vec![0, 0]);
        assert_eq!(sm.u.mul(&a).mul(&sm.v), sm.d);
        assert_eq!(a.coker_length(), 0);
    }

    #[test]
    fn kernel_over_q() {
        // x + y + z = 0 has a 2-dimensional kernel
        let a = rm(vec![vec![1, 1, 1]]);
        let k = a.kernel_gens();
        assert_eq!(k.cols(), 2);
        assert!(a.mul(&k).is_zero_matrix());
        // brute check: kernel columns are independent
        assert_eq!(k.rank_pivots(), 2);
    }

    #[test]
    fn solve_and_span() {
        let a = rm(vec![vec![1, 0], vec![0, 2], vec![1, 2]]);
        let b = vec![rq(3), rq(4), rq(7)];
        let x = a.solve(&b).unwrap();
        assert_eq!(a.mul_vec(&x), b);
        assert!(a.solve(&[rq(0), rq(0), rq(1)]).is_none());
    }

    #[test]
    fn smith_over_dual() {
        let e = E2::eps();
        let one = <E2 as num_traits::One>::one();
        let a = Matrix::new(vec![vec![e.clone(), one.clone()], vec![e.clone(), e.clone()]]);
        let sm = a.smith();
        assert_eq!(sm.orders, vec![0, 1]);
        assert_eq!(sm.u.mul(&a).mul(&sm.v), sm.d);
        // coker = A/(ε): length 1
        assert_eq!(a.coker_length(), 1);
    }

    #[test]
    fn kernel_over_dual_torsion() {
        // multiplication by ε on A has kernel generated by ε
        let e = E2::eps();
        let a = Matrix::new(vec![vec![e.clone()]]);
        let k = a.kernel_gens();
        assert_eq!(k.cols(), 1);
        assert_eq!(k.at(0, 0), &e);
        assert!(a.mul(&k).is_zero_matrix());
    }

    #[test]
    fn dual_solver_divisibility() {
        let e = E2::eps();
        let a = Matrix::new(vec![vec![e.clone()]]);
        assert!(a.solve(&[e.clone()]).is_some());
        assert!(a.solve(&[<E2 as num_traits::One>::one()]).is_none());
    }
}
