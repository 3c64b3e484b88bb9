use thiserror::Error;

/// Errors produced by the analysis, synthesis and verification routines.
#[derive(Debug, Error)]
pub enum Error {
    #[error("{context}: expected {expected}, got {actual}")]
    Dimension {
        context: String,
        expected: String,
        actual: String,
    },
    #[error("{context}: non-finite entry at ({row}, {col})")]
    NonFinite {
        context: String,
        row: usize,
        col: usize,
    },
    #[error("{context}: matrix has rank {rank}, need {required}")]
    NotFullRank {
        context: String,
        rank: usize,
        required: usize,
    },
    #[error("structural inconsistency: {context} (residual {residual:.3e})")]
    StructuralInconsistency { context: String, residual: f64 },
    #[error("pencil is singular: {context}")]
    SingularPencil { context: String },
    #[error("{problem} infeasible: {reason}")]
    Infeasible { problem: String, reason: String },
    #[error("rank target {r} outside achievable range [{lo}, {hi}]")]
    RankTargetOutOfRange { r: usize, lo: usize, hi: usize },
    #[error(
        "ill-conditioned elimination at {context}: smallest singular value \
         {smin:.3e} below threshold {threshold:.3e}"
    )]
    Conditioning {
        context: String,
        smin: f64,
        threshold: f64,
    },
    #[error("certification failed for {problem}: {detail}")]
    CertificationFailed { problem: String, detail: String },
    #[error("condensed form self-check failed: {0}")]
    CondensedFormCheck(String),
    #[error("generator spec inconsistent: {0}")]
    SpecError(String),
    #[error("subspace iteration failed to stabilize: {0}")]
    NonStabilized(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("linear algebra backend error: {0}")]
    Backend(#[from] ndarray_linalg::error::LinalgError),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn dimension(context: &str, expected: impl ToString, actual: impl ToString) -> Self {
        Error::Dimension {
            context: context.to_string(),
            expected: expected.to_string(),
            actual: actual.to_string(),
        }
    }
}
