//! Error type shared by all modules.

use thiserror::Error;

/// Failure modes for state construction, circuit compilation, and analysis.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("state norm deviates from 1 by {deviation:.3e}")]
    NotNormalized { deviation: f64 },

    #[error("matrix is not unitary (deviation {deviation:.3e})")]
    NotUnitary { deviation: f64 },

    #[error("matrix is not Hermitian (deviation {deviation:.3e})")]
    NotHermitian { deviation: f64 },

    #[error("trace deviates from 1 by {deviation:.3e}")]
    TraceNotOne { deviation: f64 },

    #[error("matrix has negative eigenvalue {eigenvalue:.3e}")]
    NotPositive { eigenvalue: f64 },

    #[error("branch probabilities must sum to 1, got {sum}")]
    ProbabilitySum { sum: f64 },

    #[error("{name} = {value} violates constraint: {constraint}")]
    OutOfRange {
        name: &'static str,
        value: f64,
        constraint: &'static str,
    },

    #[error("circuit port {port} out of range for {modes} modes")]
    PortOutOfRange { port: usize, modes: usize },

    #[error("measurement set is not tomographically complete")]
    SingularBasis,

    #[error("normalization counts sum to zero")]
    ZeroNormalization,

    #[error("zero denominator in {context}")]
    ZeroDenominator { context: &'static str },
}

pub type Result<T> = std::result::Result<T, Error>;
