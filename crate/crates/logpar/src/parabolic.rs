//! Finitely presented parabolic sheaves on a chart: weight-indexed diagrams
//! of presented modules with jump-labeled transition maps, their axiom
//! checker, colimit pieces at arbitrary weights, and induction/restriction
//! along inclusions of fine weight systems.
//!
//! On a trivialized chart every line bundle of the log structure is
//! canonically trivial, so the structural isomorphisms of the diagram
//! reduce to identities; what remains to check at runtime is functoriality
//! of the transitions and that every loop of jumps summing to p ∈ P acts as
//! multiplication by f_p.

use crate::coeff::Chart;
use crate::fgmod::{FgModule, ModuleMap};
use crate::linalg::Matrix;
use crate::monoid::IVec;
use crate::scalar::LocalScalar;
use crate::weights::{monoid_box_points, FineWeightSystem, Membership, Weight};
use crate::Bounds;

/// A transition m_{r_from → r_to, δ}: E_from → E_to for a jump δ ∈ Λ with
/// δ ≡ r_to − r_from mod P^gp.
#[derive(Clone, Debug)]
pub struct Transition<S> {
    pub from: usize,
    pub to: usize,
    pub jump: Weight,
    pub matrix: Matrix<S>,
}

#[derive(Clone, Debug)]
pub struct ParabolicSheaf<S> {
    pub system: FineWeightSystem,
    pub pieces: Vec<FgModule<S>>,
    pub transitions: Vec<Transition<S>>,
}

#[derive(Debug, thiserror::Error)]
pub enum SheafError {
    #[error("piece count {0} does not match the weight system size {1}")]
    PieceCount(usize, usize),
    #[error("transition references rep #{0}, but the system has {1} reps")]
    BadIndex(usize, usize),
    #[error("weight search was inconclusive: {0}")]
    Incomplete(String),
    #[error("no stored transition covers the jump {jump} from rep #{from} to rep #{to}")]
    MissingTransition { from: usize, to: usize, jump: String },
}

impl<S: LocalScalar> ParabolicSheaf<S> {
    pub fn new(
        system: FineWeightSystem,
        pieces: Vec<FgModule<S>>,
        transitions: Vec<Transition<S>>,
    ) -> Result<Self, SheafError> {
        if pieces.len() != system.len() {
            return Err(SheafError::PieceCount(pieces.len(), system.len()));
        }
        for t in &transitions {
            if t.from >= system.len() || t.to >= system.len() {
                return Err(SheafError::BadIndex(t.from.max(t.to), system.len()));
            }
        }
        Ok(ParabolicSheaf { system, pieces, transitions })
    }

    pub fn zero(system: FineWeightSystem) -> Self {
        let n = system.len();
        ParabolicSheaf {
            system,
            pieces: vec![FgModule::zero_module(); n],
            transitions: vec![],
        }
    }

    pub fn is_zero(&self) -> bool {
        self.pieces.iter().all(|p| p.is_zero_module())
    }

    /// The transition for an arbitrary jump, derived from the stored
    /// generating set: jumps that exceed a stored one by p ∈ P pick up the
    /// factor f_p; jumps within a single orbit are f_p times the identity.
    pub fn derived_transition(
        &self,
        chart: &Chart<S>,
        from: usize,
        to: usize,
        jump: &Weight,
    ) -> Option<Matrix<S>> {
        if from == to {
            if let Some(p) = jump.to_ints() {
                if chart.lambda.monoid().member(&p) {
                    let f = chart.coeff.f(&p);
                    return Some(Matrix::identity(self.pieces[from].gens()).scale(&f));
                }
            }
        }
        for t in &self.transitions {
            if t.from != from || t.to != to {
                continue;
            }
            let diff = jump.sub(&t.jump);
            if let Some(p) = diff.to_ints() {
                if chart.lambda.monoid().member(&p) {
                    let f = chart.coeff.f(&p);
                    return Some(t.matrix.scale(&f));
                }
            }
        }
        None
    }
}

/// One violated or unverifiable condition from the axiom checker.
#[derive(Clone, Debug)]
pub struct AxiomViolation {
    pub condition: String,
    pub detail: String,
}

#[derive(Clone, Debug, Default)]
pub struct AxiomReport {
    pub violations: Vec<AxiomViolation>,
    /// Squares that could not be closed within the window; inconclusive
    /// rather than failed.
    pub unverified: Vec<String>,
}

impl AxiomReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

fn fmt_matrix<S: LocalScalar>(m: &Matrix<S>) -> String {
    let mut out = String::from("[");
    for i in 0..m.rows() {
        if i > 0 {
            out.push_str("; ");
        }
        for j in 0..m.cols() {
            if j > 0 {
                out.push(' ');
            }
            out.push_str(&m.at(i, j).to_string());
        }
    }
    out.push(']');
    out
}

/// Verifies functoriality of composable jump pairs within the window and
/// that every P-loop acts as f_p (with the identity transitions for jumps
/// inside P included), reporting each broken square with exact matrices.
pub fn check_axioms<S: LocalScalar>(
    chart: &Chart<S>,
    sheaf: &ParabolicSheaf<S>,
    bounds: &Bounds,
) -> AxiomReport {
    let mut report = AxiomReport::default();
    let monoid = chart.lambda.monoid().clone();
    let window = bounds.axiom_window.map_or(2 * monoid.max_phi_hilbert(), |w| w as i64);
    let window_w = crate::algebraic::WeightFieldElement::from_int(
        chart.lambda.ground(),
        window,
    );
    // structural checks
    for (k, t) in sheaf.transitions.iter().enumerate() {
        let rep_diff = sheaf.system.reps()[t.to].sub(&sheaf.system.reps()[t.from]);
        if !t.jump.sub(&rep_diff).is_integral() {
            report.violations.push(AxiomViolation {
                condition: "jump-class".into(),
                detail: format!(
                    "transition #{k}: jump {} is not congruent to r_to − r_from mod P^gp",
                    t.jump
                ),
            });
        }
        match chart.lambda.member(&t.jump, bounds) {
            Membership::Member => {}
            Membership::NonMember => report.violations.push(AxiomViolation {
                condition: "jump-membership".into(),
                detail: format!("transition #{k}: jump {} is not in Λ", t.jump),
            }),
            Membership::Incomplete => report
                .unverified
                .push(format!("transition #{k}: jump membership inconclusive")),
        }
        let map = ModuleMap::new(
            sheaf.pieces[t.from].clone(),
            sheaf.pieces[t.to].clone(),
            t.matrix.clone(),
        );
        if !map.is_well_defined() {
            report.violations.push(AxiomViolation {
                condition: "module-map".into(),
                detail: format!(
                    "transition #{k} does not respect the piece presentations: {}",
                    fmt_matrix(&t.matrix)
                ),
            });
        }
    }
    if !report.violations.is_empty() {
        return report;
    }
    // functoriality incl. condition (a): composable pairs within the window
    for t1 in &sheaf.transitions {
        for t2 in &sheaf.transitions {
            if t2.from != t1.to {
                continue;
            }
            let total = t1.jump.add(&t2.jump);
            if chart.lambda.phi(&total).sub(&window_w).sign() > 0 {
                continue;
            }
            let composite = t2.matrix.mul(&t1.matrix);
            match sheaf.derived_transition(chart, t1.from, t2.to, &total) {
                Some(expected) => {
                    let lhs = ModuleMap::new(
                        sheaf.pieces[t1.from].clone(),
                        sheaf.pieces[t2.to].clone(),
                        composite.clone(),
                    );
                    let rhs = ModuleMap::new(
                        sheaf.pieces[t1.from].clone(),
                        sheaf.pieces[t2.to].clone(),
                        expected.clone(),
                    );
                    if !lhs.equals(&rhs) {
                        report.violations.push(AxiomViolation {
                            condition: "functoriality".into(),
                            detail: format!(
                                "square {} → {} → {} with jumps {} then {}: composite {} ≠ expected {}",
                                t1.from,
                                t1.to,
                                t2.to,
                                t1.jump,
                                t2.jump,
                                fmt_matrix(&composite),
                                fmt_matrix(&expected)
                            ),
                        });
                    }
                }
                None => report.unverified.push(format!(
                    "no derived transition for jump {} from {} to {}",
                    total, t1.from, t2.to
                )),
            }
        }
    }
    report
}

/// Colimit piece of the induced diagram at a weight: generator blocks of
/// the maximal objects (rep, shift) plus identification rows generated by
/// objects within the enumeration window.
#[derive(Clone, Debug)]
pub struct ColimitPiece<S> {
    pub module: FgModule<S>,
    /// Maximal objects (rep index, shift p ∈ P^gp), one generator block each.
    pub objects: Vec<(usize, IVec)>,
    pub offsets: Vec<usize>,
    /// True when no object r + p ≤ λ exists (the zero module is returned).
    pub empty_diagram: bool,
}

/// All objects (rep, shift) with r + p ≤ λ whose class-minimal distance
/// stays within the φ-cap.
fn diagram_objects<S: LocalScalar>(
    chart: &Chart<S>,
    sheaf: &ParabolicSheaf<S>,
    lam: &Weight,
    bounds: &Bounds,
) -> Result<Vec<(usize, IVec, Weight)>, SheafError> {
    let monoid = chart.lambda.monoid().clone();
    let ground = chart.lambda.ground().clone();
    let cap = monoid.sum_phi_hilbert() + monoid.max_phi_hilbert();
    let cap_w = crate::algebraic::WeightFieldElement::from_int(&ground, cap);
    let mut objects = Vec::new();
    for (i, rep) in sheaf.system.reps().iter().enumerate() {
        let target = lam.sub(rep);
        match chart.lambda.class_witness(&target, bounds).0 {
            Membership::NonMember => continue,
            Membership::Incomplete => {
                return Err(SheafError::Incomplete(format!(
                    "class search for {target} exceeded the shift radius {}",
                    bounds.shift_radius
                )))
            }
            Membership::Member => {}
        }
        // μ ranges over Λ ∩ class(target) with φ(μ) ≤ cap
        let canon = target.frac();
        let boxes = monoid.box_for_phi(cap);
        let ranges: Vec<(i64, i64)> = boxes.iter().map(|&(lo, hi)| (lo - 1, hi)).collect();
        for q in monoid_box_points(&ranges) {
            let mu = canon.add_ints(&q);
            if !monoid.cone_contains(mu.coords()) {
                continue;
            }
            if chart.lambda.phi(&mu).sub(&cap_w).sign() > 0 {
                continue;
            }
            if let crate::weights::WeightKind::Fraction(n) = chart.lambda.kind() {
                if !mu.scale(&crate::Rat::from_integer((*n).into())).is_integral() {
                    continue;
                }
            }
            let p = target.sub(&mu).to_ints().expect("integral shift");
            objects.push((i, p, mu));
        }
    }
    objects.sort_by(|a, b| a.0.cmp(&b.0).then(a.1.cmp(&b.1)));
    Ok(objects)
}

/// The colimit over {w ∈ orbits(R) : w ≤ λ} of the induced diagram,
/// computed as a cokernel: one generator block per maximal object,
/// identification rows from the lower objects (only needed when two or
/// more maximal objects coexist).
pub fn piece_at<S: LocalScalar>(
    chart: &Chart<S>,
    sheaf: &ParabolicSheaf<S>,
    lam: &Weight,
    bounds: &Bounds,
) -> Result<ColimitPiece<S>, SheafError> {
    // a diagram-maximal object is in particular minimal within its own
    // class, so the (cached) per-class minimal sets are a complete
    // candidate list
    let mut candidates: Vec<(usize, IVec, Weight)> = Vec::new();
    for (i, rep) in sheaf.system.reps().iter().enumerate() {
        let target = lam.sub(rep);
        let (mins, verdict) = chart.lambda.minimal_in_class(&target, bounds);
        if verdict == Membership::Incomplete {
            return Err(SheafError::Incomplete(format!(
                "class search for {target} exceeded the shift radius {}",
                bounds.shift_radius
            )));
        }
        for mu in mins {
            let p = target.sub(&mu).to_ints().expect("integral shift");
            candidates.push((i, p, mu));
        }
    }
    candidates.sort_by(|a, b| a.0.cmp(&b.0).then(a.1.cmp(&b.1)));
    if candidates.is_empty() {
        return Ok(ColimitPiece {
            module: FgModule::zero_module(),
            objects: vec![],
            offsets: vec![],
            empty_diagram: true,
        });
    }
    let mut maximal: Vec<(usize, IVec, Weight)> = Vec::new();
    for (i, p, mu) in &candidates {
        let mut dominated = false;
        for (_, _, mu2) in &candidates {
            let diff = mu.sub(mu2);
            if diff.is_zero() {
                continue;
            }
            match chart.lambda.member(&diff, bounds) {
                Membership::Member => {
                    dominated = true;
                    break;
                }
                Membership::NonMember => {}
                Membership::Incomplete => {
                    return Err(SheafError::Incomplete(format!(
                        "domination test for {mu} over {mu2} undecided"
                    )))
                }
            }
        }
        if !dominated {
            maximal.push((*i, p.clone(), mu.clone()));
        }
    }
    // identification generators from the deeper window are only relevant
    // with at least two maximal objects
    let objects: Vec<(usize, IVec, Weight)> = if maximal.len() >= 2 {
        diagram_objects(chart, sheaf, lam, bounds)?
    } else {
        maximal.clone()
    };
    let mut offsets = Vec::with_capacity(maximal.len());
    let mut total = 0usize;
    for (i, _, _) in &maximal {
        offsets.push(total);
        total += sheaf.pieces[*i].gens();
    }
    let mut module = FgModule::free(total);
    // block-embedded piece relations
    for (bi, (i, _, _)) in maximal.iter().enumerate() {
        for rel in sheaf.pieces[*i].rels() {
            let mut row = vec![S::zero(); total];
            for (k, v) in rel.iter().enumerate() {
                row[offsets[bi] + k] = v.clone();
            }
            module.push_rel(row);
        }
    }
    // identifications: each object maps into every maximal above it; the
    // images along any two such routes agree in the colimit
    for (oi, op, _) in &objects {
        let w_obj = sheaf.system.reps()[*oi].add_ints(op);
        let mut routes: Vec<(usize, Matrix<S>)> = Vec::new();
        for (bi, (mi, mp, _)) in maximal.iter().enumerate() {
            let w_max = sheaf.system.reps()[*mi].add_ints(mp);
            let jump = w_max.sub(&w_obj);
            match chart.lambda.member(&jump, bounds) {
                Membership::NonMember => continue,
                Membership::Incomplete => {
                    return Err(SheafError::Incomplete(format!(
                        "route membership for jump {jump} undecided"
                    )))
                }
                Membership::Member => {}
            }
            match sheaf.derived_transition(chart, *oi, *mi, &jump) {
                Some(m) => routes.push((bi, m)),
                None => {
                    return Err(SheafError::MissingTransition {
                        from: *oi,
                        to: *mi,
                        jump: jump.to_string(),
                    })
                }
            }
        }
        for pair in routes.windows(2) {
            let (b1, m1) = &pair[0];
            let (b2, m2) = &pair[1];
            for g in 0..sheaf.pieces[*oi].gens() {
                let mut row = vec![S::zero(); total];
                for t in 0..m1.rows() {
                    row[offsets[*b1] + t] = m1.at(t, g).clone();
                }
                for t in 0..m2.rows() {
                    let cur = row[offsets[*b2] + t].clone();
                    row[offsets[*b2] + t] = cur - m2.at(t, g).clone();
                }
                if row.iter().any(|a| !a.is_zero()) && !module.rels().contains(&row) {
                    module.push_rel(row);
                }
            }
        }
    }
    let objects_out = maximal.iter().map(|(i, p, _)| (*i, p.clone())).collect();
    Ok(ColimitPiece { module, objects: objects_out, offsets, empty_diagram: false })
}

/// The universal map piece_at(λ) → piece_at(λ') for λ ≤ λ': the source
/// diagram embeds into the target one, so each maximal source object routes
/// into some maximal target object above it.
pub fn induced_piece_map<S: LocalScalar>(
    chart: &Chart<S>,
    sheaf: &ParabolicSheaf<S>,
    source: &ColimitPiece<S>,
    target: &ColimitPiece<S>,
    bounds: &Bounds,
) -> Result<Matrix<S>, SheafError> {
    let mut out = Matrix::zero(target.module.gens(), source.module.gens());
    for (sb, (si, sp)) in source.objects.iter().enumerate() {
        let w_src = sheaf.system.reps()[*si].add_ints(sp);
        let mut placed = source.module.gens() == 0 || sheaf.pieces[*si].gens() == 0;
        for (tb, (ti, tp)) in target.objects.iter().enumerate() {
            let w_max = sheaf.system.reps()[*ti].add_ints(tp);
            let jump = w_max.sub(&w_src);
            match chart.lambda.member(&jump, bounds) {
                Membership::NonMember => continue,
                Membership::Incomplete => {
                    return Err(SheafError::Incomplete(format!(
                        "route membership for jump {jump} undecided"
                    )))
                }
                Membership::Member => {}
            }
            if let Some(m) = sheaf.derived_transition(chart, *si, *ti, &jump) {
                for g in 0..sheaf.pieces[*si].gens() {
                    for t in 0..m.rows() {
                        out.set(target.offsets[tb] + t, source.offsets[sb] + g, m.at(t, g).clone());
                    }
                }
                placed = true;
                break;
            }
        }
        if !placed {
            return Err(SheafError::MissingTransition {
                from: *si,
                to: usize::MAX,
                jump: format!("route from object at {w_src}"),
            });
        }
    }
    Ok(out)
}

/// Left adjoint of restriction: new pieces are colimits, new transitions
/// the induced maps for the minimal jumps between orbit classes.
pub fn induce<S: LocalScalar>(
    chart: &Chart<S>,
    sheaf: &ParabolicSheaf<S>,
    target: &FineWeightSystem,
    bounds: &Bounds,
) -> Result<ParabolicSheaf<S>, SheafError> {
    assert!(
        sheaf.system.subsystem_of(target),
        "induction requires the source system to embed into the target"
    );
    let mut cols: Vec<ColimitPiece<S>> = Vec::with_capacity(target.len());
    for rep in target.reps() {
        cols.push(piece_at(chart, sheaf, rep, bounds)?);
    }
    let mut transitions = Vec::new();
    for (i, ri) in target.reps().iter().enumerate() {
        for (j, rj) in target.reps().iter().enumerate() {
            if i == j {
                continue;
            }
            let class = rj.sub(ri);
            let (jumps, verdict) = chart.lambda.minimal_in_class(&class, bounds);
            if verdict == Membership::Incomplete {
                return Err(SheafError::Incomplete(format!(
                    "minimal jumps from {ri} to {rj} undecided"
                )));
            }
            for delta in jumps {
                // the diagram at r_i + δ matches piece_at(r_j)
                // object-for-object (a uniform P^gp offset), so the induced
                // map lands in the stored piece for r_j with the same block
                // layout
                let shifted = piece_at(chart, sheaf, &ri.add(&delta), bounds)?;
                let layout_matches = shifted.objects.len() == cols[j].objects.len()
                    && shifted
                        .objects
                        .iter()
                        .zip(&cols[j].objects)
                        .all(|((a, _), (b, _))| a == b);
                if !layout_matches {
                    return Err(SheafError::Incomplete(format!(
                        "colimit windows for {rj} and its shift disagree"
                    )));
                }
                let m = induced_piece_map(chart, sheaf, &cols[i], &shifted, bounds)?;
                transitions.push(Transition { from: i, to: j, jump: delta, matrix: m });
            }
        }
    }
    let pieces = cols.into_iter().map(|c| c.module).collect();
    ParabolicSheaf::new(target.clone(), pieces, transitions)
}

/// Restriction along R ⊆ R': drops pieces and transitions outside R.
pub fn restrict<S: LocalScalar>(
    sheaf: &ParabolicSheaf<S>,
    target: &FineWeightSystem,
) -> Result<ParabolicSheaf<S>, SheafError> {
    assert!(
        target.subsystem_of(&sheaf.system),
        "restriction requires the target system to embed into the source"
    );
    let index_map: Vec<Option<usize>> = sheaf
        .system
        .reps()
        .iter()
        .map(|r| target.reps().iter().position(|t| t == r))
        .collect();
    let mut pieces = vec![FgModule::zero_module(); target.len()];
    for (old, new) in index_map.iter().enumerate() {
        if let Some(n) = new {
            pieces[*n] = sheaf.pieces[old].clone();
        }
    }
    let transitions = sheaf
        .transitions
        .iter()
        .filter_map(|t| match (index_map[t.from], index_map[t.to]) {
            (Some(f), Some(g)) => Some(Transition {
                from: f,
                to: g,
                jump: t.jump.clone(),
                matrix: t.matrix.clone(),
            }),
            _ => None,
        })
        .collect();
    ParabolicSheaf::new(target.clone(), pieces, transitions)
}
