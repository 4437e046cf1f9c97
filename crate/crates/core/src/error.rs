use std::path::PathBuf;

/// Errors raised by extension, baselines, benchmarks and persistence.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("no training point within radius {epsilon} of the query")]
    EmptyNeighborhood { epsilon: f64 },

    #[error("neighbor {index} coincides with the query; use the training image directly")]
    ZeroDistance { index: usize },

    #[error("precision block {index} is not symmetric positive definite")]
    SingularBlock { index: usize },

    #[error("normal-equation matrix is numerically singular")]
    SingularSystem,

    #[error("eigenvalue {eigenvalue:e} is below the spectrum cutoff {cutoff:e}")]
    SpectrumCutoff { eigenvalue: f64, cutoff: f64 },

    #[error("pivoted QR of the sketch found only {found} of {wanted} independent columns")]
    RankDeficientSketch { found: usize, wanted: usize },

    #[error("sampled basis is ill-conditioned (condition number {condition:e})")]
    IllConditionedBasis { condition: f64 },

    #[error("no convergence after {iterations} iterations; residual {residual:e} > {target:e}")]
    NoConvergence {
        iterations: usize,
        residual: f64,
        target: f64,
    },

    #[error("argument out of range: {0}")]
    OutOfRange(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("dimension mismatch at row {row}: expected {expected} fields, found {found}")]
    DimensionMismatch {
        row: usize,
        expected: usize,
        found: usize,
    },

    #[error("parse failure{}: {message}", location(*.row, *.column))]
    ParseFailure {
        row: Option<usize>,
        column: Option<usize>,
        message: String,
    },

    #[error("model validation failed: {0}")]
    ValidationFailure(String),

    #[error("refusing to serialize non-finite value in {0}")]
    SerializationRejected(&'static str),

    #[error("i/o failure on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

fn location(row: Option<usize>, column: Option<usize>) -> String {
    match (row, column) {
        (Some(r), Some(c)) => format!(" at row {r}, column {c}"),
        (Some(r), None) => format!(" at row {r}"),
        _ => String::new(),
    }
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// True for failures of the numerical machinery rather than of the inputs.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::SingularBlock { .. }
                | Error::SingularSystem
                | Error::SpectrumCutoff { .. }
                | Error::RankDeficientSketch { .. }
                | Error::IllConditionedBasis { .. }
                | Error::NoConvergence { .. }
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
