use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("empty time series: at least one sample is required")]
    EmptySeries,

    #[error("sample {index} has dimension {found}, expected {expected}")]
    RaggedSeries {
        index: usize,
        expected: usize,
        found: usize,
    },

    #[error("dimension mismatch in {context}: expected {expected}, found {found}")]
    DimensionMismatch {
        context: &'static str,
        expected: usize,
        found: usize,
    },

    #[error("horizon too short for {context}: N = {found}, need N >= {required}")]
    HorizonTooShort {
        context: &'static str,
        required: usize,
        found: usize,
    },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("matrix {kind} is singular or ill-conditioned (rank {rank} of {dim}, condition {condition:e})")]
    Singular {
        kind: String,
        rank: usize,
        dim: usize,
        condition: f64,
    },

    #[error("no feasible amplitudes after {iterations} samples: best rank {best_rank} of {dim}, best condition {best_condition:e}")]
    Infeasible {
        iterations: usize,
        best_rank: usize,
        dim: usize,
        best_condition: f64,
    },

    #[error("data not persistently exciting: rank {rank}, need {required}")]
    NotPersistentlyExciting { rank: usize, required: usize },

    #[error("prediction underdetermined: constrained rank {constrained} < dictionary rank {full} (shortfall {})", full - constrained)]
    Underdetermined { constrained: usize, full: usize },

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
