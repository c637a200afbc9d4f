//! Derivative of `C₁₂` at a zero against the overlap integral of the two
//! decaying solutions.

use num_complex::Complex64;

use super::scattering::{c12, scattering_coeffs};
use crate::error::{Error, Result};
use crate::quadrature::integrate;
use crate::solutions::{SolutionContext, WholeLine};

/// `|C₁₂(ζ)|` above which ζ is not accepted as a zero.
const ZERO_THRESHOLD: f64 = 1e-8;
const QUADRATURE_TOL: f64 = 1e-9;
const MAX_PANELS: usize = 4000;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DerivativeCheck {
    pub zeta: Complex64,
    pub c12_abs: f64,
    /// Fourth-order central difference of `C₁₂` at ζ.
    pub c12_slope: Complex64,
    /// Same stencil applied to `combo_b`, the `f₁⁻` weight of `f₂⁺` on `x ≥ 0`.
    pub combo_b_slope: Complex64,
    /// `∫ ρ f₁⁺ f₂⁺ dx` over `[−X, X]`.
    pub overlap: Complex64,
    /// `−i · overlap`.
    pub minus_i_overlap: Complex64,
    /// `|c12_slope − i·overlap| / |c12_slope|`.
    pub c12_gap: f64,
    /// `|combo_b_slope − (−i·overlap)| / |combo_b_slope|`.
    pub combo_b_gap: f64,
    pub half_width: f64,
    /// Integrand magnitude at `±X` over its largest sampled magnitude.
    pub tail_ratio: f64,
    pub quadrature_error: f64,
}

fn stencil(mut f: impl FnMut(Complex64) -> Result<Complex64>, z: Complex64, h: f64) -> Result<Complex64> {
    let d = (f(z - 2.0 * h)? - 8.0 * f(z - h)? + 8.0 * f(z + h)? - f(z + 2.0 * h)?) / (12.0 * h);
    Ok(d)
}

/// Compares the numerical λ-derivative at a zero ζ of `C₁₂` with
/// `∫ ρ f₁⁺ f₂⁺`. Under `W = f g′ − f′ g` the identity reads
/// `C₁₂′(ζ) = i∫ρ f₁⁺f₂⁺`, and `combo_b′(ζ) = −i∫ρ f₁⁺f₂⁺`.
pub fn c12_derivative_check(ctx: &SolutionContext, zeta: Complex64) -> Result<DerivativeCheck> {
    if zeta.im <= 0.0 {
        return Err(Error::Precondition(format!("Im ζ must be positive, got {zeta}")));
    }
    let c12_abs = c12(ctx, zeta)?.norm();
    if c12_abs >= ZERO_THRESHOLD {
        return Err(Error::Precondition(format!(
            "|C12(ζ)| = {c12_abs:.3e} at ζ = {zeta}; not a zero"
        )));
    }
    let h = 1e-5 * (1.0 + zeta.norm());
    let c12_slope = stencil(|z| c12(ctx, z), zeta, h)?;
    let combo_b_slope = stencil(|z| Ok(scattering_coeffs(ctx, z)?.combo_b), zeta, h)?;

    let beta = ctx.beta();
    let half_width = (1e10f64).ln() / (zeta.im * beta.min(1.0));
    let line = WholeLine::new(ctx, zeta)?;
    let integrand = |x: f64| -> Result<Complex64> {
        Ok(ctx.medium().rho(x) * line.f1_plus(x)?.value * line.f2_plus(x)?.value)
    };
    let left = integrate(integrand, -half_width, 0.0, 0.5 * QUADRATURE_TOL, MAX_PANELS)?;
    let right = integrate(integrand, 0.0, half_width, 0.5 * QUADRATURE_TOL, MAX_PANELS)?;
    let overlap = left.value + right.value;

    let peak = (0..=200)
        .map(|k| -half_width + 2.0 * half_width * k as f64 / 200.0)
        .map(|x| integrand(x).map(|v| v.norm()))
        .collect::<Result<Vec<f64>>>()?
        .into_iter()
        .fold(0.0, f64::max);
    let edge = integrand(-half_width)?.norm().max(integrand(half_width)?.norm());

    let minus_i_overlap = -Complex64::i() * overlap;
    Ok(DerivativeCheck {
        zeta,
        c12_abs,
        c12_slope,
        combo_b_slope,
        overlap,
        minus_i_overlap,
        c12_gap: (c12_slope + minus_i_overlap).norm() / c12_slope.norm(),
        combo_b_gap: (combo_b_slope - minus_i_overlap).norm() / combo_b_slope.norm(),
        half_width,
        tail_ratio: if peak > 0.0 { edge / peak } else { 0.0 },
        quadrature_error: left.error_estimate + right.error_estimate,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::{MediumProfile, Potential};

    #[test]
    fn rejects_non_zero_points() {
        let ctx = SolutionContext::new(&Potential::zero(), MediumProfile::new(2.0).unwrap(), 6).unwrap();
        let err = c12_derivative_check(&ctx, Complex64::new(0.3, 0.5)).unwrap_err();
        assert!(matches!(err, Error::Precondition(_)));
        let err = c12_derivative_check(&ctx, Complex64::new(0.3, -0.5)).unwrap_err();
        assert!(matches!(err, Error::Precondition(_)));
    }
}
