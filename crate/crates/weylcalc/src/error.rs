//! Crate-wide error type.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected d={expected}, got d={got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("multi-index length {got} does not match dimension {expected}")]
    BadMultiIndex { expected: usize, got: usize },

    #[error("matrix is not Hermitian: max asymmetry {asym:.3e} exceeds {tol:.3e}")]
    NonHermitian { asym: f64, tol: f64 },

    #[error("matrix shape mismatch: {0}")]
    Shape(String),

    #[error("supremum attained at pmax={pmax}; increase pmax")]
    SupAtPmax { pmax: usize },

    #[error("series did not converge within the term budget ({budget} terms)")]
    TailBudget { budget: usize },

    #[error("series inverse requires y >= 1, got {y}")]
    InverseDomain { y: f64 },

    #[error("ellipticity check failed: min |det| = {min_det:.3e} at |w| = {radius:.3}")]
    Ellipticity { min_det: f64, radius: f64 },

    #[error("symbol is not certified everywhere-positive; construct as 1 + even monomials with positive coefficients or assert positivity explicitly")]
    NotCertifiedPositive,

    #[error("rational symbols have different denominator bases")]
    MixedDenominatorBase,

    #[error("matrix symbol is singular at grid point {point:?}")]
    SingularAtPoint { point: Vec<f64> },

    #[error("quadrature did not converge: levels disagree by {gap:.3e} (limit {limit:.3e})")]
    QuadratureNonConvergence { gap: f64, limit: f64 },

    #[error("operator index did not stabilise across truncations: ind(N)={first}, ind(N+4)={second}")]
    UnstableIndex { first: i64, second: i64 },

    #[error("singular-value threshold is ambiguous: sigma={sigma:.3e} lies within 10x of tau={tau:.3e}")]
    AmbiguousThreshold { sigma: f64, tau: f64 },

    #[error("interior margin {margin} exceeds basis cutoff {max_degree}")]
    MarginTooLarge { margin: usize, max_degree: usize },

    #[error("weight sequence has a nonpositive entry at p={p}")]
    NonpositiveWeight { p: usize },

    #[error("parametrix left-inverse failed: c_{k} is nonzero")]
    LeftInverse { k: usize },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),

    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}
