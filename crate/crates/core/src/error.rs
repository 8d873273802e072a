use core::fmt;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// Matrix is not square with even dimension.
    Dimension { rows: usize, cols: usize },
    /// An operation restricted to a fixed mode count got another one.
    ModeCount { expected: usize, found: usize },
    NotSymmetric { max_asymmetry: f64 },
    /// Eigenvalues of `ΩΣ` could not be grouped into `±iν` pairs.
    SpectrumPairing { mismatch: f64 },
    /// Input lies outside the domain of the operation.
    Domain(&'static str),
    /// No real correlation coefficients reproduce the requested invariants.
    NoRealSolution { discriminant: f64 },
    SingularMetric { determinant: f64 },
    /// Iterative routine failed to reach its tolerance.
    NoConvergence { what: &'static str, error: f64 },
    NonFiniteIntegrand { rejected: usize, total: usize },
    /// Rejection sampler acceptance fell below the abort threshold.
    LowEfficiency { accepted: usize, proposed: usize },
    InvalidConfig(&'static str),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Dimension { rows, cols } => {
                write!(f, "expected a square matrix of even dimension, got {rows}x{cols}")
            }
            Error::ModeCount { expected, found } => {
                write!(f, "expected a {expected}-mode state, got {found} modes")
            }
            Error::NotSymmetric { max_asymmetry } => {
                write!(f, "matrix is not symmetric (max |S_ij - S_ji| = {max_asymmetry:e})")
            }
            Error::SpectrumPairing { mismatch } => {
                write!(f, "eigenvalues of the symplectic product do not pair (mismatch {mismatch:e})")
            }
            Error::Domain(msg) => write!(f, "outside domain: {msg}"),
            Error::NoRealSolution { discriminant } => {
                write!(f, "no real standard form exists (discriminant {discriminant:e})")
            }
            Error::SingularMetric { determinant } => {
                write!(f, "metric is singular (det = {determinant:e})")
            }
            Error::NoConvergence { what, error } => {
                write!(f, "{what} did not converge (error estimate {error:e})")
            }
            Error::NonFiniteIntegrand { rejected, total } => {
                write!(f, "integrand returned non-finite values at {rejected} of {total} points")
            }
            Error::LowEfficiency { accepted, proposed } => {
                write!(f, "rejection sampler accepted only {accepted} of {proposed} proposals")
            }
            Error::InvalidConfig(msg) => write!(f, "invalid configuration: {msg}"),
        }
    }
}

impl core::error::Error for Error {}
