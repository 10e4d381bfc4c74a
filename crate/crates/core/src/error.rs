use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid signal: {0}")]
    InvalidSignal(String),

    #[error("input must be real-valued (max |Im| = {max_imag:e}, tolerance {tolerance:e})")]
    NonRealInput { max_imag: f64, tolerance: f64 },

    #[error("carrier shift of {shift} bins aliases on a grid of {samples} samples")]
    AliasError { shift: i64, samples: usize },

    #[error("radius {0} outside the admissible range")]
    RadiusOutOfRange(f64),

    #[error("signal is numerically zero (sup norm {sup:e} below {floor:e})")]
    ZeroSignal { sup: f64, floor: f64 },

    #[error("detrend order {0} too high (maximum 12)")]
    OrderTooHigh(usize),

    #[error("signal is not holomorphic: |P-F| / |F| = {ratio:e}")]
    NotHolomorphic { ratio: f64 },

    #[error("modulus vanishes (min |B| = {min:e})")]
    VanishingModulus { min: f64 },

    #[error("window too wide: 8 sigma = {span} s exceeds signal duration {duration} s")]
    WindowTooWide { span: f64, duration: f64 },

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("time-frequency grid is empty")]
    EmptyGrid,

    #[error("reference has zero norm")]
    ZeroTruth,

    #[error("phase process not monotone after {attempts} attempts")]
    NonMonotonePhase { attempts: usize },

    #[error("unknown function '{0}'")]
    UnknownFunction(String),

    #[error("invalid IMT specification: {0}")]
    InvalidImt(String),

    #[error("holomorphic projection vanishes at {count} samples")]
    ProjectionVanishes { count: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("{path}: {message}")]
    Parse { path: PathBuf, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
