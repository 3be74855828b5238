//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// A point was handed to a space, flow, or metric of a different kind.
    #[error("point kind mismatch: expected {expected}, got {found}")]
    KindMismatch { expected: String, found: String },

    /// A symbolic element was applied outside the space its family acts on.
    #[error("element family {family} does not act on {space}")]
    FamilyMismatch { family: String, space: String },

    /// Two sampled maps built over different grids were compared.
    #[error("sampled maps use different grids ({left} vs {right} points)")]
    GridMismatch { left: usize, right: usize },

    /// A scan ran out of its time budget before producing the requested object.
    #[error("horizon {horizon} exhausted: {what} (best margin {best:.3e})")]
    HorizonExhausted {
        what: String,
        horizon: i64,
        best: f64,
    },

    /// |t| exceeded the hard iteration cap.
    #[error("time {t} exceeds the iteration cap {cap}")]
    BeyondCap { t: i64, cap: i64 },

    #[error("unknown theorem id {0:?}")]
    UnknownTheorem(String),

    #[error("bad parameter {key}: {message}")]
    BadParameter { key: String, message: String },

    #[error("config error: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;
