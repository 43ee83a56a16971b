//! Error type shared by every module.

use alloc::string::String;

/// Everything that can go wrong in the core computations.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    /// A parameter violated its domain (negative β, n = 0, s out of range...).
    #[error("domain error: {0}")]
    Domain(String),

    /// A disorder specification failed validation.
    #[error("invalid disorder spec: {0}")]
    InvalidSpec(String),

    /// A sequence was shorter than the computation requires.
    #[error("size mismatch: need at least {needed}, got {got}")]
    SizeMismatch { needed: usize, got: usize },

    /// Chain length must be even for pinned-endpoint computations.
    #[error("length must be even, got {0}")]
    OddLength(usize),

    /// Cost guard: the exact enumeration / transfer recursion refuses above
    /// its cap.
    #[error("size {got} above cap {cap}")]
    TooLarge { cap: usize, got: usize },

    /// One of the tilt-measure inequalities failed for these parameters.
    #[error("tilt invariant `{check}` violated: value {value:e} vs bound {bound:e}")]
    TiltInvariant {
        check: &'static str,
        value: f64,
        bound: f64,
    },

    /// The requested tail target cannot be met within the supported horizon.
    #[error("truncation insufficient: need horizon of roughly {required}")]
    Truncation { required: u64 },

    /// A normalizing constant came out non-positive.
    #[error("non-positive normalizer for these parameters")]
    NonPositiveNormalizer,

    /// A bracketing root finder was handed an invalid bracket.
    #[error("bisection failed: {0}")]
    Bisection(String),
}
