use thiserror::Error;

use crate::ensembles::PovmDiagnostic;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("{name} = {value} is outside {range}")]
    OutOfRange {
        name: &'static str,
        value: f64,
        range: &'static str,
    },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("operator is not positive semidefinite (min eigenvalue {min_eigenvalue:e})")]
    NotPsd { min_eigenvalue: f64 },

    #[error("state is not normalized (|norm^2 - 1| = {residual:e})")]
    NotNormalized { residual: f64 },

    #[error("matrix is not unitary (max |U^dag U - I| = {residual:e})")]
    NonUnitary { residual: f64 },

    #[error("invalid POVM: {}", format_diagnostics(.0))]
    InvalidPovm(Vec<PovmDiagnostic>),

    #[error("posterior undefined for outcome {outcome}: p(b) = {probability:e}")]
    UndefinedPosterior { outcome: usize, probability: f64 },

    #[error("ensemble has {size} states, limit is {limit}")]
    TooManyStates { size: usize, limit: usize },

    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
}

fn format_diagnostics(diags: &[PovmDiagnostic]) -> String {
    diags
        .iter()
        .map(ToString::to_string)
        .collect::<Vec<_>>()
        .join("; ")
}

impl From<serde_json::Error> for Error {
    fn from(err: serde_json::Error) -> Self {
        Error::Parse {
            line: err.line(),
            column: err.column(),
            message: err.to_string(),
        }
    }
}
