use thiserror::Error;

/// Errors produced by the spectral core and the diagnostic harness.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("invalid field: {0}")]
    InvalidField(String),

    #[error("multiplier produced a non-finite value at k = ({kx}, {ky})")]
    MultiplierNonFinite { kx: f64, ky: f64 },

    #[error("grid mismatch between operands")]
    GridMismatch,

    #[error("dyadic index {j} outside valid range [{j_min}, {j_max}]")]
    BlockOutOfRange { j: i32, j_min: i32, j_max: i32 },

    #[error("field has empty support after frequency localization")]
    EmptySupport,

    #[error("operation undefined on the zero field")]
    ZeroField,

    #[error("nonzero mean mode with a negative-order multiplier")]
    SingularMode,

    #[error("domain error: {0}")]
    Domain(String),

    #[error("rescaled field exceeds the lattice: {0}")]
    ResolutionExceeded(String),

    #[error("non-monotone observation time: last = {last}, new = {new}")]
    NonMonotoneTime { last: f64, new: f64 },

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("blow-up detected at t = {t} (last finite L2 norm {last_l2})")]
    BlowUp { t: f64, last_l2: f64 },

    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
