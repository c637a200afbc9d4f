//! Forward and inverse spectral computations for
//! `−y″ + q(x) y = λ² ρ(x) y` on the line, where `q` is a finite sum of
//! positive-frequency harmonics and `ρ` jumps from `β²` to `1` at `x = 0`.

pub mod error;
pub mod extrapolate;
pub mod inverse;
pub mod io;
pub mod quadrature;
pub mod scalar;
pub mod series;
pub mod solutions;
pub mod spectral;
pub mod validation;

pub use error::{Error, Result};
pub use series::{MediumProfile, Potential, TailNorm, VTable};
pub use solutions::{Jet, Order, Sign, SolutionContext};
