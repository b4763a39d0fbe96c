use std::path::PathBuf;

use thiserror::Error;

/// Errors produced by the numerical routines and the file formats.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    Validation(String),

    #[error("singularity breach: argument {value} reached the guard 1 - {guard:e}")]
    SingularityBreach { value: f64, guard: f64 },

    #[error("zero denominator: A Phi'(A V) vanishes identically")]
    ZeroDenominator,

    #[error("no convergence after {iterations} iterations (last step distance {last_distance:e})")]
    NonConvergence { iterations: usize, last_distance: f64 },

    #[error("cone violated at iteration {iteration}: {detail}")]
    ConeViolation { iteration: usize, detail: String },

    #[error("grid too coarse: mu = {mu:e} but h = {h:e} (need mu > 2h)")]
    Resolution { mu: f64, h: f64 },

    #[error("degenerate fit: {0}")]
    Degenerate(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("malformed file {path}: {reason}")]
    Format { path: PathBuf, reason: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Numerical failures (as opposed to bad input).
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::SingularityBreach { .. }
                | Error::ZeroDenominator
                | Error::NonConvergence { .. }
                | Error::ConeViolation { .. }
                | Error::Resolution { .. }
                | Error::Degenerate(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
