use thiserror::Error;

use crate::scalargrad::Activation;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("length mismatch: expected {expected}, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },

    #[error("{0:?} has no learnable slope")]
    NoSlope(Activation),

    #[error("parameter {index} is not finite ({value})")]
    NonFinite { index: usize, value: f64 },

    #[error("quadrant must be in 1..=4, got {0}")]
    InvalidQuadrant(u8),

    #[error("quadrant initialization needs a PReLU neuron")]
    QuadrantNeedsPrelu,

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
}
