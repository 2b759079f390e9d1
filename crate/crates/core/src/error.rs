use thiserror::Error;

/// Errors produced by the geometry, map, dynamics and spectrum routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("{what} = {value} lies outside the validity domain")]
    Domain { what: &'static str, value: f64 },

    #[error("quadrature did not reach tolerance: {0}")]
    Quadrature(String),

    #[error("potential is singular at r = {r}")]
    Singularity { r: f64 },

    #[error("two-point fit failed: {0}")]
    Fit(String),

    #[error("index {index} out of range 2..={dim}")]
    Index { index: usize, dim: usize },

    #[error("implicit step failed at t = {t} after {iterations} iterations")]
    StepFailure { t: f64, iterations: usize },

    #[error("trajectory left the domain at t = {t} (|q| = {rho})")]
    DomainExit { t: f64, rho: f64 },

    #[error("degenerate orbit: {0}")]
    DegenerateOrbit(String),

    #[error("degenerate phase point: {0}")]
    DegeneratePoint(String),

    #[error("no circular orbit for angular momentum {l}")]
    NoCircularOrbit { l: f64 },

    #[error("no pair of turning points for E = {energy}, L = {l}")]
    NoTurningPoints { energy: f64, l: f64 },

    #[error("parameter regime not supported: {0}")]
    Regime(String),

    #[error("root finding did not converge: {0}")]
    Convergence(String),

    #[error("grid too coarse: Richardson error estimate {estimate:e} exceeds {tolerance:e}")]
    GridTooCoarse { estimate: f64, tolerance: f64 },

    #[error("level n = {n}: expected degeneracy {expected}, found {found}")]
    DegeneracyMismatch {
        n: usize,
        expected: usize,
        found: usize,
    },

    #[error("level n = {n}: analytic {analytic} vs numeric {numeric}")]
    LevelMismatch {
        n: usize,
        analytic: f64,
        numeric: f64,
    },
}

pub type Result<T> = std::result::Result<T, Error>;
