use thiserror::Error;

/// Errors produced anywhere in the deblurring stack.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: String, actual: String },

    #[error("problem too large: {size} exceeds cap {cap}")]
    TooLarge { size: usize, cap: usize },

    #[error("matrix is not symmetric (max asymmetry {0:e})")]
    Asymmetric(f64),

    #[error("degenerate spectrum: {0}")]
    DegenerateSpectrum(String),

    #[error("solver failure after {iterations} iterations (relative residual {residual:e}): {reason}")]
    SolverFailure {
        reason: String,
        iterations: usize,
        residual: f64,
    },

    #[error("singular system: {0}")]
    SingularSystem(String),

    #[error("degenerate input: {0}")]
    DegenerateInput(String),

    #[error("degenerate kernel: {0}")]
    DegenerateKernel(String),

    #[error("similarity undefined: {0}")]
    UndefinedSimilarity(String),

    #[error("format error: {0}")]
    Format(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("image codec error: {0}")]
    Image(#[from] image::ImageError),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),

    #[error("at scale {scale}: {source}")]
    AtScale {
        scale: usize,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    /// Stable machine-readable category name, used by the CLI.
    pub fn category(&self) -> &'static str {
        match self {
            Error::InvalidParameter(_) => "invalid-parameter",
            Error::InvalidInput(_) => "invalid-input",
            Error::DimensionMismatch { .. } => "dimension-mismatch",
            Error::TooLarge { .. } => "too-large",
            Error::Asymmetric(_) => "asymmetric-input",
            Error::DegenerateSpectrum(_) => "degenerate-spectrum",
            Error::SolverFailure { .. } => "solver-failure",
            Error::SingularSystem(_) => "singular-system",
            Error::DegenerateInput(_) => "degenerate-input",
            Error::DegenerateKernel(_) => "degenerate-kernel",
            Error::UndefinedSimilarity(_) => "undefined-similarity",
            Error::Format(_) => "format",
            Error::Io(_) => "io",
            Error::Image(_) => "image-codec",
            Error::Json(_) => "json",
            Error::AtScale { source, .. } => source.category(),
        }
    }

    /// Process exit code for the CLI; each category maps to a distinct value.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::InvalidParameter(_) => 2,
            Error::InvalidInput(_) => 3,
            Error::DimensionMismatch { .. } => 4,
            Error::TooLarge { .. } => 5,
            Error::Asymmetric(_) => 6,
            Error::DegenerateSpectrum(_) => 7,
            Error::SolverFailure { .. } => 8,
            Error::SingularSystem(_) => 9,
            Error::DegenerateInput(_) => 10,
            Error::DegenerateKernel(_) => 11,
            Error::UndefinedSimilarity(_) => 12,
            Error::Format(_) => 13,
            Error::Io(_) => 14,
            Error::Image(_) => 15,
            Error::Json(_) => 16,
            Error::AtScale { source, .. } => source.exit_code(),
        }
    }

    pub(crate) fn dims(expected: (usize, usize), actual: (usize, usize)) -> Self {
        Error::DimensionMismatch {
            expected: format!("{}x{}", expected.0, expected.1),
            actual: format!("{}x{}", actual.0, actual.1),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
