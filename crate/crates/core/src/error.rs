use num_complex::Complex64;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("bisection for eigenvalue index {index} did not converge within {budget} steps")]
    BisectionBudget { index: usize, budget: usize },

    #[error("eigenvalues {first} and {second} are numerically degenerate at {value}")]
    DegenerateBracket {
        first: usize,
        second: usize,
        value: f64,
    },

    #[error("polynomial coefficients overflow (degree {degree})")]
    CoefficientOverflow { degree: usize },

    #[error("root finder did not converge for polynomial {poly} after {iterations} iterations")]
    RootsNoConvergence { poly: String, iterations: usize },

    #[error("matrix is exactly singular at pivot {pivot}")]
    ExactlySingular { pivot: usize },

    #[error("inverse iteration did not converge after {iterations} iterations (last estimate {estimate})")]
    InverseIteration { iterations: usize, estimate: f64 },

    #[error("contour passes through the spectrum at node {node}")]
    ContourHitsSpectrum { node: Complex64 },

    #[error("contour integral {value} is not within 0.2 of an integer; increase quad_points or move the contour")]
    ContourInaccurate { value: f64 },

    #[error("nonlinear eigenvalue iteration left its basin (last iterate {last}, residual {residual:e})")]
    OutOfBasin { last: Complex64, residual: f64 },

    #[error("nonlinear eigenvalue iteration did not converge (last iterate {last}, residual {residual:e})")]
    RefineNoConvergence { last: Complex64, residual: f64 },

    #[error("amplitude A(x) is not positive on the probe window starting at {left}; move the window right")]
    WindowTooSmall { left: f64 },

    #[error("quasimode grid under-resolved: {needed} points required, limit {limit}")]
    UnderResolved { needed: usize, limit: usize },

    #[error("hypothesis violated: {0}")]
    HypothesisViolated(String),
}

/// Coarse classification used for process exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    Parameter,
    Numerical,
}

impl Error {
    pub fn kind(&self) -> ErrorKind {
        match self {
            Error::Parameter(_) | Error::HypothesisViolated(_) | Error::WindowTooSmall { .. } => {
                ErrorKind::Parameter
            }
            _ => ErrorKind::Numerical,
        }
    }

    /// Stable snake_case tag for machine-readable error records.
    pub fn tag(&self) -> &'static str {
        match self {
            Error::Parameter(_) => "parameter",
            Error::BisectionBudget { .. } => "bisection_budget",
            Error::DegenerateBracket { .. } => "degenerate_bracket",
            Error::CoefficientOverflow { .. } => "coefficient_overflow",
            Error::RootsNoConvergence { .. } => "roots_no_convergence",
            Error::ExactlySingular { .. } => "exact_singular",
            Error::InverseIteration { .. } => "inverse_iteration",
            Error::ContourHitsSpectrum { .. } => "contour_hits_spectrum",
            Error::ContourInaccurate { .. } => "contour_inaccurate",
            Error::OutOfBasin { .. } => "out_of_basin",
            Error::RefineNoConvergence { .. } => "refine_no_convergence",
            Error::WindowTooSmall { .. } => "window_too_small",
            Error::UnderResolved { .. } => "under_resolved",
            Error::HypothesisViolated(_) => "hypothesis_violated",
        }
    }
}

pub(crate) fn param<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Parameter(msg.into()))
}
