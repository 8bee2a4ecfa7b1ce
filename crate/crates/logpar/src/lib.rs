//! Exact symbolic algebra on a log chart: toric monoids, real weight monoids
//! over Q(α), parabolic sheaf diagrams, equivariant graded modules over the
//! chart's monomial ring, and the functor pair relating the two, together
//! with group-cohomology and root-stack cross-checks.
//!
//! Everything is computed exactly: rationals via `num-rational`, real
//! algebraic scalars by isolating-interval refinement, equivariance scalars
//! in a cyclotomic rational-function field. There is no floating point
//! outside of test oracles.

pub mod scalar;
pub mod poly;
pub mod linalg;
pub mod algebraic;
pub mod phase;
pub mod monoid;
pub mod weights;
pub mod coeff;
pub mod fgmod;
pub mod parabolic;
pub mod knmod;
pub mod cohomology;
pub mod correspondence;
pub mod random;
pub mod instance;
pub mod report;

pub use scalar::{Dual, Field, LocalScalar, Scalar};

/// Exact rational scalar, the coefficient field Q.
pub type Rat = num_rational::BigRational;
/// The local ring Q[ε]/(ε²).
pub type Eps2 = Dual<2>;
/// The local ring Q[ε]/(ε³).
pub type Eps3 = Dual<3>;
/// The local ring Q[ε]/(ε⁴).
pub type Eps4 = Dual<4>;
/// Element of the equivariance scalar field Q(ζ_N)(u)(v).
pub type Sf = poly::RatFunc<poly::RatFunc<poly::Cyclo>>;

pub type Int = num_bigint::BigInt;

/// Search and truncation bounds shared by the window-bounded operations.
/// Every verdict produced under these bounds echoes them back, so an
/// `Incomplete` outcome always names the bound that was hit.
#[derive(Clone, Debug, PartialEq, serde::Serialize)]
pub struct Bounds {
    /// φ-level cap for monomial windows of the weight monoid.
    pub phi_bound: u32,
    /// Coordinate radius for P^gp shifts in saturated-membership searches.
    pub shift_radius: i64,
    /// T-degree truncation for cohomology slices (defaults to rank + 2).
    pub truncation: usize,
    /// φ-window used when composing transitions in axiom checks; `None`
    /// means 2·max φ over the Hilbert basis.
    pub axiom_window: Option<u32>,
}

impl Default for Bounds {
    fn default() -> Self {
        Bounds { phi_bound: 4, shift_radius: 4, truncation: 4, axiom_window: None }
    }
}

impl Bounds {
    /// Default bounds, with the φ-bound overridable by `LOGPAR_BOUND_PHI`.
    pub fn from_env() -> Self {
        let mut b = Bounds::default();
        if let Ok(v) = std::env::var("LOGPAR_BOUND_PHI") {
            if let Ok(n) = v.trim().parse::<u32>() {
                b.phi_bound = n;
            }
        }
        b
    }
}
