use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("division by a quaternion of near-zero norm")]
    DivisionByNearZero,
    #[error("Newton transform requires real coefficients (coefficient {index} is not real)")]
    NonRealCoefficients { index: usize },
    #[error("invalid polynomial: {0}")]
    InvalidPolynomial(&'static str),
    #[error("invalid classifier parameters: {0}")]
    InvalidParams(&'static str),
    #[error("invalid region: {0}")]
    InvalidRegion(&'static str),
    #[error("invalid embedding: {0}")]
    InvalidEmbedding(&'static str),
    #[error("invalid camera: {0}")]
    InvalidCamera(&'static str),
    #[error("invalid lighting: {0}")]
    InvalidLighting(&'static str),
    #[error("bisection endpoints share the same fate")]
    InvalidBracket,
    #[error("map coefficients leave the complex plane (coefficient {index})")]
    NotComplex { index: usize },
    #[error("malformed field file: {0}")]
    MalformedField(&'static str),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
