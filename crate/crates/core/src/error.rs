use num_complex::Complex64;
use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// A truncated series was evaluated on (or within the guard radius of) one of its poles.
    #[error("series pole at λ = {lambda}: denominator for index n = {index} is below the guard radius")]
    PoleAtLambda { lambda: Complex64, index: usize },

    #[error("degenerate solution basis at λ = {lambda} (|W| = {wronskian_abs:.3e})")]
    DegenerateBasis { lambda: Complex64, wronskian_abs: f64 },

    #[error("contour passes through a zero of C12 near λ = {at}")]
    ContourThroughZero { at: Complex64 },

    #[error("Newton iteration from {start} did not converge after {iterations} steps")]
    NonConvergence { start: Complex64, iterations: usize },

    #[error("resolvent denominator vanishes at λ = {lambda} (|W| = {wronskian_abs:.3e})")]
    NearPole { lambda: Complex64, wronskian_abs: f64 },

    #[error("C12 asymptote is not real (imaginary part {imag:.3e})")]
    NonRealAsymptote { imag: f64 },

    #[error("recovered β = {beta} is not positive")]
    NonPositiveBeta { beta: f64 },

    #[error("invalid medium: β = {0} (need β > 0 and β ≠ 1)")]
    InvalidMedium(f64),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("precondition failed: {0}")]
    Precondition(String),
}
