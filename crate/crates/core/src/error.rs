use thiserror::Error;

use crate::classical::FrameLabel;

/// Errors raised by the classical and quantum layers.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid particle system: {0}")]
    InvalidSystem(String),

    #[error("frame label {index} out of range for {n} particles")]
    FrameOutOfRange { index: usize, n: usize },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("point is off the gauge-fixed constraint surface: |P| = {total_momentum:e}, |q_frame| = {frame_position:e}")]
    ConstraintViolation {
        total_momentum: f64,
        frame_position: f64,
    },

    #[error("source and target frame are both {0}")]
    SameFrame(FrameLabel),

    #[error("state is expressed in frame {actual}, expected {expected}")]
    FrameMismatch {
        expected: FrameLabel,
        actual: FrameLabel,
    },

    #[error("time step must be positive, got {0}")]
    InvalidStep(f64),

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("no axis labelled {0}")]
    UnknownAxis(FrameLabel),

    #[error("axis {0} used as both position and momentum axis")]
    AxisClash(FrameLabel),

    #[error("grids or representations do not match: {0}")]
    GridMismatch(String),

    #[error("observable is not Hermitian: {0}")]
    NonHermitianObservable(String),

    #[error("observable not supported: {0}")]
    UnsupportedObservable(String),

    #[error("dense operator dimension {dim} exceeds the oracle limit {limit}")]
    TooLarge { dim: usize, limit: usize },

    #[error("trivialization shift k = {k} is not an in-range multiple of dp = {dp}")]
    KOutOfRange { k: f64, dp: f64 },

    #[error("invalid density matrix: {0}")]
    InvalidDensityMatrix(String),

    #[error("fixture format: {0}")]
    Fixture(String),
}

pub type Result<T> = std::result::Result<T, Error>;
