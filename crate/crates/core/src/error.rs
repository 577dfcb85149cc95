use thiserror::Error;

/// Errors shared by every module of the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid probability {0}: must lie in [0, 1]")]
    InvalidProbability(String),

    #[error("masses sum to {got}, expected exactly 1")]
    MassSum { got: String },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("map undefined on reachable symbol {0}")]
    UndefinedMap(usize),

    #[error("conditioning symbol {0} has zero mass")]
    ZeroMassCondition(usize),

    #[error("unsupported memory point: M*K = {mk} is not a multiple of N = {n}")]
    UnsupportedMemoryPoint { mk: usize, n: usize },

    #[error("file size {file_bits} bits is not divisible by {parts} subfiles")]
    IndivisibleFile { file_bits: usize, parts: usize },

    #[error("decode failure: {0}")]
    DecodeFailure(String),

    #[error("key size {key} does not match modulus {modulus}")]
    KeyMismatch { key: u64, modulus: u64 },

    #[error("encoding error: {0}")]
    EncodingError(String),

    #[error("not applicable: {0}")]
    NotApplicable(String),

    #[error("size limit exceeded: {0}")]
    SizeLimit(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}
