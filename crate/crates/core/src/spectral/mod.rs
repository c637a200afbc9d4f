//! Interface coefficients, eigenvalue search, spectral singularities,
//! the derivative identity at eigenvalues, and resolvent kernels.

mod derivative;
mod eigen;
mod resolvent;
mod scattering;
mod singular;

pub use derivative::{c12_derivative_check, DerivativeCheck};
pub use eigen::{
    find_eigenvalues, winding_number, CellCount, Eigenvalue, Region, SearchOptions, SpectrumReport,
    MIN_IM_LAMBDA,
};
pub use resolvent::{
    residue_at_singularity, resolvent_kernel, ResidueEstimate, ResolventKernel, ResolventQuery, Sector,
};
pub use scattering::{c12, c12_with_derivative, scattering_coeffs, ScatteringCoeffs};
pub use singular::{spectral_singularities, Family, Singularity};
