//! Radial similarity solutions of Abreu's fourth-order equation.
//!
//! Restricting Abreu's equation to rotationally invariant potentials g(|x|)
//! on R^n reduces it to a second-order ODE for f = g', which this crate
//! integrates, classifies, and cross-checks:
//!
//! * [`model`]: the ODE right-hand side in two independent forms, the
//!   first-integral identity, and closed-form solutions (the exact decaying
//!   solution for lambda = 0 and the full two-log solution for n = 1).
//! * [`series`]: local expansions at the origin, at infinity, and at movable
//!   branch points, plus least-squares identification of origin behaviour.
//! * [`integrate`]: an embedded Dormand-Prince 5(4) integrator with dense
//!   output, event location, and monotonicity (sign-constancy) enforcement.
//! * [`singularity`]: branch-point classification from terminal trajectory
//!   windows, algebraic (r0 - r)^(1/n) versus logarithmic log(r0 - r).
//! * [`classify`]: forward/backward classification of initial data into the
//!   four sign cases and the outcomes each case permits, plus grid scans.
//! * [`geometry`]: the Hessian pair generated by a radial potential, moment
//!   polytope potentials, and finite-difference verification that solutions
//!   satisfy the original PDE sum_jk d_j d_k g^jk = -kappa.
//!
//! Grid-shaped work (scans, shell sweeps) runs on rayon when the default
//! `parallel` feature is enabled and falls back to sequential iteration
//! without it; results are assembled in grid order either way.

// Validation guards are written in the negated form (`!(x > 0.0)`) so that
// NaN input falls into the error path.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod classify;
pub mod geometry;
pub mod integrate;
pub mod model;
pub mod series;
pub mod singularity;

mod linalg;
mod par;

pub use linalg::Mat;

use thiserror::Error;

/// Errors shared across the crate.
#[derive(Debug, Clone, Error)]
pub enum Error {
    /// The ODE is singular at r = 0 for n >= 2 and is never evaluated there.
    #[error("radius {r} out of domain: the equation requires r > 0 for n >= 2")]
    NonPositiveRadius { r: f64 },

    /// The (n-1)/f term is singular at f = 0 for n >= 2.
    #[error("state has f = 0 at r = {r}: the equation is singular there for n >= 2")]
    ZeroF { r: f64 },

    /// Operations that divide by f' (log form, branch fits) reject f' = 0.
    #[error("state has f' = 0 at r = {r}: {context}")]
    ZeroFPrime { r: f64, context: &'static str },

    /// Parameter set rejected at construction.
    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    /// Behaviour/parameter combination with no defined expansion.
    #[error("inconsistent behaviour for these parameters: {0}")]
    InconsistentBehavior(String),

    /// Requested point lies outside a trajectory's dense-output domain.
    #[error("r = {r} outside trajectory domain [{lo}, {hi}]")]
    OutOfDomain { r: f64, lo: f64, hi: f64 },

    /// Initial state rejected by the integrator.
    #[error("invalid initial state: {0}")]
    BadInitialState(String),

    /// Integration aborted without producing a usable trajectory.
    #[error("integration failed: {0}")]
    IntegrationFailure(String),

    /// Terminal window shows neither a clean algebraic nor a clean
    /// logarithmic indicator; both candidate fits are returned for diagnosis.
    #[error(
        "unclassified singular endpoint: algebraic indicator {algebraic_indicator:.6e} \
         (spread {algebraic_spread:.3e}), logarithmic indicator {logarithmic_indicator:.6e} \
         (spread {logarithmic_spread:.3e})"
    )]
    UnclassifiedBranch {
        algebraic_indicator: f64,
        algebraic_spread: f64,
        logarithmic_indicator: f64,
        logarithmic_spread: f64,
    },

    /// No admissible origin expansion fits the sampled data.
    #[error("no origin expansion fits: best normalized residual {best_residual:.3e} ({detail})")]
    UnidentifiedOrigin { best_residual: f64, detail: String },

    /// A trajectory window was too short or otherwise unusable for fitting.
    #[error("unusable fit window: {0}")]
    BadWindow(String),

    /// Classification ended in a state the theorems do not describe.
    #[error("inconclusive classification: {0}")]
    Inconclusive(String),

    /// Matrix inversion hit a zero pivot.
    #[error("singular matrix: no pivot at column {col}")]
    SingularMatrix { col: usize },

    /// Point lies outside the open polytope interior.
    #[error("point outside polytope interior: facet {facet} has l(x) = {value}")]
    OutsidePolytope { facet: usize, value: f64 },
}

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
