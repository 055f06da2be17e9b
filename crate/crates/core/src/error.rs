use num_complex::Complex64;
use thiserror::Error;

use crate::graph::{EdgeId, Violation};

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid graph: {}", join_violations(.0))]
    InvalidGraph(Vec<Violation>),

    #[error("unknown vertex {0}")]
    UnknownVertex(String),

    #[error("malformed graph description: {0}")]
    Parse(String),

    #[error("exponential polynomials are defined over different frequency tables")]
    MismatchedTables,

    #[error("operation requires a non-empty exponential polynomial")]
    EmptyPolynomial,

    #[error("symbolic determinant supports at most {max} rows, matrix has {size}")]
    Capacity { size: usize, max: usize },

    #[error("k = {k} is within the pole guard of edge {edge:?} (|sin(k rho)| = {magnitude:e})")]
    Pole {
        edge: EdgeId,
        k: Complex64,
        magnitude: f64,
    },

    #[error("function vanishes on the contour after {retries} jitter retries")]
    BoundaryZero { retries: usize },

    #[error("root refinement did not converge: {0}")]
    NonConvergence(String),

    #[error("continuation lost track of the resonance near c = {c}")]
    LostTrack { c: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

impl Error {
    /// True for errors caused by the caller's input rather than by the
    /// numerics (bad files, bad parameters, invalid graphs).
    pub fn is_input_error(&self) -> bool {
        matches!(
            self,
            Error::InvalidGraph(_)
                | Error::UnknownVertex(_)
                | Error::Parse(_)
                | Error::InvalidParameter(_)
        )
    }
}

fn join_violations(violations: &[Violation]) -> String {
    violations
        .iter()
        .map(ToString::to_string)
        .collect::<Vec<_>>()
        .join("; ")
}
