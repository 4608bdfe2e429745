use num_complex::Complex64;
use thiserror::Error;

/// Errors raised by the numerical routines in this crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid functional-equation data: {0}")]
    InvalidSpec(String),

    #[error("modulus {modulus} has no primitive real character with index {index}")]
    NonPrimitiveCharacter { modulus: u64, index: usize },

    #[error("{0} is not a fundamental discriminant")]
    NotFundamental(i64),

    #[error("coefficient table too short: need n = {needed}, table holds {available}")]
    TableTooShort { needed: usize, available: usize },

    #[error("gamma argument {0} lies within 1e-8 of a pole")]
    NearPole(Complex64),

    #[error("t = {t} is below the minimum {min} for this operation")]
    TooSmallT { t: f64, min: f64 },

    #[error("theta jumped by {jump:.3} between t = {from} and t = {to}; step too large")]
    PhaseJump { from: f64, to: f64, jump: f64 },

    #[error("imaginary residual {residual:e} at t = {t} exceeds tolerance (Z = {z:e})")]
    ResidualViolation { t: f64, residual: f64, z: f64 },

    #[error("quadrature missed tolerance {tol:e}: estimate {estimate:e} after {panels} panels")]
    QuadratureBudget { tol: f64, estimate: f64, panels: usize },

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("definition file: {0}")]
    Definition(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
