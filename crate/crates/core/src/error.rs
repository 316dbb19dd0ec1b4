use thiserror::Error;

use crate::operators::ActivityPattern;

pub type Result<T> = std::result::Result<T, PqstError>;

#[derive(Debug, Error)]
pub enum PqstError {
    #[error("dimension {0} is not a power of two in 2..=16")]
    InvalidDimension(usize),
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },
    #[error("operator entries must be finite")]
    NonFinite,
    #[error("operator is not unitary (residual {residual:.3e})")]
    NotUnitary { residual: f64 },
    #[error("operator is not Hermitian (residual {residual:.3e})")]
    NotHermitian { residual: f64 },
    #[error("invalid density matrix: {0}")]
    InvalidDensity(String),
    #[error("invalid probability vector: {0}")]
    InvalidProbabilities(String),
    #[error("parse error at position {position}: {message}")]
    Parse { position: usize, message: String },
    #[error("invalid qubit subset: {0}")]
    InvalidSubset(String),
    #[error("ensemble `{0}` has no explicit member list")]
    ImplicitEnsemble(String),
    #[error("unknown ensemble `{0}`")]
    UnknownEnsemble(String),
    #[error("activity patterns not covered: {}", fmt_patterns(.0))]
    UncoveredPatterns(Vec<ActivityPattern>),
    #[error("activity patterns trusted by more than one estimator: {}", fmt_patterns(.0))]
    AmbiguousPatterns(Vec<ActivityPattern>),
    #[error("observable terms not supported by the trusted patterns: {}", .0.join(", "))]
    UnsupportedObservable(Vec<String>),
    #[error("no per-qubit rotation makes every term X-structured")]
    RotationNotFound,
    #[error("unknown fixture `{0}`")]
    UnknownFixture(String),
    #[error("degenerate shot grid: {0}")]
    DegenerateGrid(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

fn fmt_patterns(patterns: &[ActivityPattern]) -> String {
    patterns
        .iter()
        .map(|p| p.to_string())
        .collect::<Vec<_>>()
        .join(", ")
}

impl PqstError {
    /// Usage-class errors map to exit code 2 in the CLI, everything else to 1.
    pub fn is_usage(&self) -> bool {
        matches!(
            self,
            PqstError::Parse { .. }
                | PqstError::InvalidSubset(_)
                | PqstError::UnknownEnsemble(_)
                | PqstError::UnknownFixture(_)
                | PqstError::UncoveredPatterns(_)
                | PqstError::AmbiguousPatterns(_)
                | PqstError::UnsupportedObservable(_)
                | PqstError::RotationNotFound
                | PqstError::InvalidArgument(_)
                | PqstError::ImplicitEnsemble(_)
                | PqstError::DegenerateGrid(_)
        )
    }
}
