use std::path::PathBuf;

use crate::linalg::Cx;

/// Errors produced by the solvers, factorizations and problem builders.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("matrix is not positive definite (nonpositive pivot at index {pivot})")]
    NotPositiveDefinite { pivot: usize },

    #[error("QR did not converge after {iterations} iterations ({} eigenvalues found)", found.len())]
    QrNoConvergence { iterations: usize, found: Vec<Cx> },

    #[error("degenerate: {0}")]
    Degenerate(&'static str),

    #[error("preconditioner kind {kind} cannot act on {space}")]
    KindMismatch { kind: &'static str, space: &'static str },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn check_dim(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, found })
    }
}
