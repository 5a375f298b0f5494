use thiserror::Error;

/// Errors raised across the workbench.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix is not Hermitian (max |m - m^H| = {deviation:e})")]
    NotHermitian { deviation: f64 },
    #[error("argument out of range: {0}")]
    OutOfRange(String),
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },
    #[error("index {index} out of range for dimension {dim}")]
    IndexOutOfRange { index: usize, dim: usize },
    #[error("conditional pointer branch has zero weight ({weight:e})")]
    ZeroWeightBranch { weight: f64 },
    #[error("{copies} copies is fewer than the {required} measurement settings")]
    InsufficientCopies { copies: u64, required: u64 },
    #[error("reconstruction cannot be normalized: {0}")]
    DegenerateNormalization(String),
    #[error("coupling phi = {0} is outside (0, pi/2)")]
    InvalidCoupling(f64),
    #[error("need at least {required} distinct points, got {got}")]
    InsufficientPoints { required: usize, got: usize },
    #[error("counts record does not match the observable basis: {0}")]
    BasisMismatch(String),
    #[error("no successful rows in group")]
    EmptyGroup,
    #[error("every point is already at the bias floor")]
    NoStatisticalRegime,
    #[error("unknown figure preset `{0}`")]
    UnknownPreset(String),
    #[error("invalid state: {0}")]
    InvalidState(String),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("i/o: {0}")]
    Io(String),
}

impl Error {
    /// Short machine-readable tag, used as the `status` column of failed sweep rows.
    pub fn tag(&self) -> &'static str {
        match self {
            Error::NotHermitian { .. } => "not_hermitian",
            Error::OutOfRange(_) => "out_of_range",
            Error::DimensionMismatch { .. } => "dimension_mismatch",
            Error::IndexOutOfRange { .. } => "index_out_of_range",
            Error::ZeroWeightBranch { .. } => "zero_weight_branch",
            Error::InsufficientCopies { .. } => "insufficient_copies",
            Error::DegenerateNormalization(_) => "degenerate_normalization",
            Error::InvalidCoupling(_) => "invalid_coupling",
            Error::InsufficientPoints { .. } => "insufficient_points",
            Error::BasisMismatch(_) => "basis_mismatch",
            Error::EmptyGroup => "empty_group",
            Error::NoStatisticalRegime => "no_statistical_regime",
            Error::UnknownPreset(_) => "unknown_preset",
            Error::InvalidState(_) => "invalid_state",
            Error::InvalidConfig(_) => "invalid_config",
            Error::Io(_) => "io",
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::InvalidConfig(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
