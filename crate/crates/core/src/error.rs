use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("Lévy measure has an atom at the origin (atom #{index})")]
    AtomAtOrigin { index: usize },

    #[error("Lévy measure fails the integrability test: {0}")]
    NonIntegrableMeasure(String),

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("modulator exceeds one in modulus (|value| = {value})")]
    ModulatorExceedsOne { value: f64 },

    #[error("quadrature did not converge: estimated error {estimate:e} above tolerance {tolerance:e}")]
    QuadratureNotConverged { estimate: f64, tolerance: f64 },

    #[error("modulator cannot be evaluated on the support of the measure: {0}")]
    ModulatorUndefinedOnSupport(String),

    #[error("truncation level eps = {eps} is not below the outer radius {r_max}")]
    EpsTooLarge { eps: f64, r_max: f64 },

    #[error("operation requires a finite atomic Lévy measure")]
    RequiresFiniteMeasure,

    #[error("limit symbol requires A = B")]
    RequiresEqualMatrices,

    #[error("degenerate denominator: Re Ψ(Aᵀξ) = {re_psi} is not negative")]
    DegenerateDenominator { re_psi: f64 },

    #[error("matrix K has operator norm {norm} > 1")]
    KNormExceedsOne { norm: f64 },

    #[error("Aᵀξ vanishes")]
    ZeroFrequencyVector,

    #[error("alpha = {alpha} outside (0, 2)")]
    AlphaOutOfRange { alpha: f64 },

    #[error("coordinate {axis} of ξ is zero")]
    ZeroCoordinate { axis: usize },

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("spatial and spectral pairings disagree: {spatial} vs {spectral}")]
    PairingMismatch {
        spatial: num_complex::Complex64,
        spectral: num_complex::Complex64,
    },

    #[error("martingale traces do not belong together: {0}")]
    TraceMismatch(String),

    #[error("compensator quadrature changed by {change:e} on node doubling")]
    QuadratureNodesInsufficient { change: f64 },

    #[error("Euler step too coarse: halving the step moved the estimate by {change:e} (standard error {std_err:e})")]
    StepTooCoarse { change: f64, std_err: f64 },

    #[error("unsupported dimension: {0}")]
    UnsupportedDimension(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("validation error: {0}")]
    Validation(Box<Error>),

    #[error("bad file format: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    /// Stable numeric code, shared with the C interface.
    pub fn code(&self) -> i32 {
        match self {
            Error::AtomAtOrigin { .. } => 1,
            Error::NonIntegrableMeasure(_) => 2,
            Error::ShapeMismatch(_) => 3,
            Error::ModulatorExceedsOne { .. } => 4,
            Error::QuadratureNotConverged { .. } => 5,
            Error::ModulatorUndefinedOnSupport(_) => 6,
            Error::EpsTooLarge { .. } => 7,
            Error::RequiresFiniteMeasure => 8,
            Error::RequiresEqualMatrices => 9,
            Error::DegenerateDenominator { .. } => 10,
            Error::KNormExceedsOne { .. } => 11,
            Error::ZeroFrequencyVector => 12,
            Error::AlphaOutOfRange { .. } => 13,
            Error::ZeroCoordinate { .. } => 14,
            Error::GridMismatch(_) => 15,
            Error::PairingMismatch { .. } => 16,
            Error::TraceMismatch(_) => 17,
            Error::QuadratureNodesInsufficient { .. } => 18,
            Error::StepTooCoarse { .. } => 19,
            Error::UnsupportedDimension(_) => 20,
            Error::InvalidArgument(_) => 21,
            Error::Parse { .. } => 22,
            Error::Validation(_) => 23,
            Error::Format(_) => 24,
            Error::Io(_) => 25,
            Error::Csv(_) => 26,
        }
    }

    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    pub(crate) fn shape(msg: impl Into<String>) -> Self {
        Error::ShapeMismatch(msg.into())
    }
}
