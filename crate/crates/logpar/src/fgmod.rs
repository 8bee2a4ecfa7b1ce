//! Finitely presented modules over a local scalar ring, given by a
//! generator count and a list of relation rows, plus maps between them.
//!
//! Canonical forms, lengths and exactness checks all reduce to the
//! Smith-style decomposition in [`crate::linalg`]; two modules are
//! isomorphic iff their cokernel shapes agree, and a map between modules of
//! equal finite length is an isomorphism iff it is well defined and
//! surjective.

use std::sync::{Arc, Mutex};

use crate::linalg::{CokerShape, Matrix, Solver};
use crate::scalar::LocalScalar;

/// coker( S^rels → S^gens ), relations stored as rows of length `gens`.
///
/// The decomposition of the relation matrix is computed once and shared by
/// all zero-tests against this presentation.
pub struct FgModule<S> {
    gens: usize,
    rels: Vec<Vec<S>>,
    solver: Mutex<Option<Arc<Solver<S>>>>,
    shape: Mutex<Option<CokerShape>>,
}

impl<S: std::fmt::Debug> std::fmt::Debug for FgModule<S> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("FgModule")
            .field("gens", &self.gens)
            .field("rels", &self.rels)
            .finish()
    }
}

impl<S: Clone> Clone for FgModule<S> {
    fn clone(&self) -> Self {
        let cached = self.solver.lock().unwrap().clone();
        let shape = self.shape.lock().unwrap().clone();
        FgModule {
            gens: self.gens,
            rels: self.rels.clone(),
            solver: Mutex::new(cached),
            shape: Mutex::new(shape),
        }
    }
}

impl<S: PartialEq> PartialEq for FgModule<S> {
    fn eq(&self, other: &Self) -> bool {
        self.gens == other.gens && self.rels == other.rels
    }
}

impl<S: LocalScalar> FgModule<S> {
    pub fn new(gens: usize, rels: Vec<Vec<S>>) -> Self {
        for r in &rels {
            assert_eq!(r.len(), gens, "relation row width mismatch");
        }
        FgModule { gens, rels, solver: Mutex::new(None), shape: Mutex::new(None) }
    }

    pub fn free(gens: usize) -> Self {
        Self::new(gens, vec![])
    }

    pub fn zero_module() -> Self {
        Self::new(0, vec![])
    }

    pub fn gens(&self) -> usize {
        self.gens
    }

    pub fn rels(&self) -> &[Vec<S>] {
        &self.rels
    }

    pub fn push_rel(&mut self, row: Vec<S>) {
        assert_eq!(row.len(), self.gens);
        self.rels.push(row);
        *self.solver.lock().unwrap() = None;
        *self.shape.lock().unwrap() = None;
    }

    /// Relations as columns: the presentation map S^rels → S^gens.
    pub fn rel_matrix(&self) -> Matrix<S> {
        Matrix::from_cols(self.rels.clone(), self.gens)
    }

    fn rel_solver(&self) -> Arc<Solver<S>> {
        let mut guard = self.solver.lock().unwrap();
        if let Some(s) = guard.as_ref() {
            return s.clone();
        }
        let s = Arc::new(self.rel_matrix().solver());
        *guard = Some(s.clone());
        s
    }

    pub fn shape(&self) -> CokerShape {
        let mut guard = self.shape.lock().unwrap();
        if let Some(sh) = guard.as_ref() {
            return sh.clone();
        }
        let sh = self.rel_matrix().coker_shape();
        *guard = Some(sh.clone());
        sh
    }

    /// Length over the base field (dim_Q).
    pub fn length(&self) -> usize {
        let sh = self.shape();
        sh.free * S::nilpotency() + sh.torsion.iter().sum::<usize>()
    }

    pub fn is_zero_module(&self) -> bool {
        self.length() == 0
    }

    pub fn isomorphic(&self, other: &Self) -> bool {
        self.shape() == other.shape()
    }

    /// Is the element (as a coefficient vector over the generators) zero in
    /// the module, i.e. in the span of the relations?
    pub fn element_is_zero(&self, v: &[S]) -> bool {
        if self.rels.is_empty() {
            return v.iter().all(|a| a.is_zero());
        }
        self.rel_solver().solvable(v)
    }

    /// Direct sum, keeping generator blocks in order.
    pub fn direct_sum(&self, other: &Self) -> Self {
        let gens = self.gens + other.gens;
        let mut rels = Vec::new();
        for r in &self.rels {
            let mut row = r.clone();
            row.extend(vec![S::zero(); other.gens]);
            rels.push(row);
        }
        for r in &other.rels {
            let mut row = vec![S::zero(); self.gens];
            row.extend(r.clone());
            rels.push(row);
        }
        FgModule::new(gens, rels)
    }
}

/// A map of presented modules, as a matrix on generators
/// (target.gens × source.gens).
#[derive(Clone, Debug)]
pub struct ModuleMap<S> {
    pub source: FgModule<S>,
    pub target: FgModule<S>,
    pub matrix: Matrix<S>,
}

impl<S: LocalScalar> ModuleMap<S> {
    pub fn new(source: FgModule<S>, target: FgModule<S>, matrix: Matrix<S>) -> Self {
        assert_eq!(matrix.rows(), target.gens());
        assert_eq!(matrix.cols(), source.gens());
        ModuleMap { source, target, matrix }
    }

    pub fn identity(m: &FgModule<S>) -> Self {
        ModuleMap::new(m.clone(), m.clone(), Matrix::identity(m.gens()))
    }

    pub fn zero_map(source: &FgModule<S>, target: &FgModule<S>) -> Self {
        ModuleMap::new(source.clone(), target.clone(), Matrix::zero(target.gens(), source.gens()))
    }

    /// Images of source relations must die in the target.
    pub fn is_well_defined(&self) -> bool {
        self.source.rels().iter().all(|r| {
            let img = self.matrix.mul_vec(r);
            self.target.element_is_zero(&img)
        })
    }

    pub fn compose(&self, then: &ModuleMap<S>) -> ModuleMap<S> {
        assert_eq!(self.target.gens(), then.source.gens());
        ModuleMap::new(self.source.clone(), then.target.clone(), then.matrix.mul(&self.matrix))
    }

    /// Equality as maps of presented modules: columns of the difference lie
    /// in the span of the target relations.
    pub fn equals(&self, other: &ModuleMap<S>) -> bool {
        assert_eq!(self.matrix.rows(), other.matrix.rows());
        assert_eq!(self.matrix.cols(), other.matrix.cols());
        let diff = self.matrix.sub(&other.matrix);
        (0..diff.cols()).all(|j| self.target.element_is_zero(&diff.col(j)))
    }

    /// Presentation of coker(self): target generators modulo target
    /// relations and the image columns.
    pub fn coker(&self) -> FgModule<S> {
        let mut rels = self.target.rels().to_vec();
        for j in 0..self.matrix.cols() {
            rels.push(self.matrix.col(j));
        }
        FgModule::new(self.target.gens(), rels)
    }

    pub fn is_surjective(&self) -> bool {
        self.coker().is_zero_module()
    }

    pub fn image_length(&self) -> usize {
        self.target.length() - self.coker().length()
    }

    /// Surjective + equal finite length ⟹ isomorphism (the modules are
    /// artinian of finite length here).
    pub fn is_isomorphism(&self) -> bool {
        self.is_well_defined()
            && self.is_surjective()
            && self.source.length() == self.target.length()
    }

    pub fn is_zero_map(&self) -> bool {
        (0..self.matrix.cols()).all(|j| self.target.element_is_zero(&self.matrix.col(j)))
    }
}

/// Exactness of M' →f M →g M'' at M: the composite vanishes and
/// length(im f) = length(ker g).
pub fn exact_at_middle<S: LocalScalar>(f: &ModuleMap<S>, g: &ModuleMap<S>) -> bool {
    if !f.compose(g).is_zero_map() {
        return false;
    }
    let len_im_f = f.image_length();
    let len_ker_g = f.target.length() - g.image_length();
    len_im_f == len_ker_g
}

/// Exactness of 0 → M' → M → M'' → 0.
pub fn short_exact<S: LocalScalar>(f: &ModuleMap<S>, g: &ModuleMap<S>) -> bool {
    // injective left end: image length equals source length
    f.image_length() == f.source.length() && exact_at_middle(f, g) && g.is_surjective()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Dual;
    use crate::Rat;
    use num_traits::One;

    type E2 = Dual<2>;

    fn rq(n: i64) -> Rat {
        Rat::from_integer(n.into())
    }

    #[test]
    fn shapes_and_lengths() {
        // Q² / (x + y) has length 1
        let m = FgModule::new(2, vec![vec![rq(1), rq(1)]]);
        assert_eq!(m.length(), 1);
        assert!(!m.is_zero_module());
        // A/(ε) over Q[ε]/(ε²) has length 1; A itself length 2
        let a = FgModule::<E2>::free(1);
        assert_eq!(a.length(), 2);
        let aeps = FgModule::new(1, vec![vec![E2::eps()]]);
        assert_eq!(aeps.length(), 1);
        assert!(!a.isomorphic(&aeps));
    }

    #[test]
    fn map_well_definedness() {
        // A/(ε) → A is not defined by 1, but is by ε
        let aeps = FgModule::new(1, vec![vec![E2::eps()]]);
        let a = FgModule::<E2>::free(1);
        let bad = ModuleMap::new(aeps.clone(), a.clone(), Matrix::new(vec![vec![E2::one()]]));
        assert!(!bad.is_well_defined());
        let good = ModuleMap::new(aeps, a, Matrix::new(vec![vec![E2::eps()]]));
        assert!(good.is_well_defined());
    }

    #[test]
    fn short_exact_sequence() {
        // 0 → A/(ε) →·ε A → A/(ε) → 0 over Q[ε]/(ε²)
        let aeps = FgModule::new(1, vec![vec![E2::eps()]]);
        let a = FgModule::<E2>::free(1);
        let f = ModuleMap::new(aeps.clone(), a.clone(), Matrix::new(vec![vec![E2::eps()]]));
        let g = ModuleMap::new(a, aeps, Matrix::new(vec![vec![E2::one()]]));
        assert!(f.is_well_defined() && g.is_well_defined());
        assert!(short_exact(&f, &g));
        // and the non-exact variant with g' = 0 fails
        let g0 = ModuleMap::zero_map(&f.target, &g.target);
        assert!(!short_exact(&f, &g0));
    }

    #[test]
    fn iso_detection() {
        let m = FgModule::new(2, vec![vec![rq(1), rq(2)]]);
        let n = FgModule::new(1, vec![]);
        // m ≅ Q via g1 ↦ 1, g2 ↦ −1/2 (kills the relation g1 + 2g2)
        let map = ModuleMap::new(
            m.clone(),
            n.clone(),
            Matrix::new(vec![vec![rq(1), Rat::new((-1).into(), 2.into())]]),
        );
        assert!(map.is_well_defined());
        assert!(map.is_isomorphism());
        assert!(m.isomorphic(&n));
        // the zero map is well defined but no isomorphism
        let z = ModuleMap::zero_map(&m, &n);
        assert!(z.is_well_defined() && !z.is_isomorphism());
    }
}
