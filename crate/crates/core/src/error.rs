use thiserror::Error;

/// Errors raised by the numerical modules.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("unknown particle `{name}`; available: {}", available.join(", "))]
    UnknownParticle { name: String, available: Vec<String> },

    #[error("invalid particle `{name}`: mass must be positive and finite, got {mass}")]
    InvalidMass { name: String, mass: f64 },

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("backward evolution requested: t = {t} precedes t0 = {t0}")]
    BackwardEvolution { t: f64, t0: f64 },

    #[error("grid too small: needs half-extent {required:e}, grid has {available:e}")]
    GridTooSmall { required: f64, available: f64 },

    #[error("grid too coarse: {reason}")]
    GridTooCoarse { reason: String },

    #[error(
        "kernel unresolvable: spreading scale {scale:e} is below 3 grid spacings ({min:e})"
    )]
    KernelUnresolved { scale: f64, min: f64 },

    #[error("wave function not normalized: norm = {norm}")]
    NotNormalized { norm: f64 },

    #[error("lattice enumeration would visit {count} points, cap is {cap}")]
    EnumerationCap { count: u128, cap: u64 },
}

pub type Result<T> = std::result::Result<T, Error>;
