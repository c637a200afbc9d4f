use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::solutions::SolutionContext;

/// `|λ|` below which the basis `f₁^±` is treated as degenerate.
pub const MIN_LAMBDA: f64 = 1e-10;

/// Interface coefficients at one `λ`.
///
/// `combo_*` are the matching coefficients
/// `f₂⁺ = combo_a·f₁⁺ + combo_b·f₁⁻` (x ≥ 0) and
/// `f₁⁺ = combo_c·f₂⁺ + combo_d·f₂⁻` (x < 0).
/// `c11`, `c12` are the Wronskian quotients `W[f₂⁺, f₁⁻]/(2iλ)` and
/// `W[f₁⁺, f₂⁺]/(2iλ)`, and `c22 = c11(−λ)/β`, `c21 = −c12/β`.
/// With `W = f g′ − f′ g` these satisfy `c11 = −combo_a`, `c12 = −combo_b`,
/// `c22 = combo_c`, `c21 = combo_d`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScatteringCoeffs {
    pub lambda: Complex64,
    pub c11: Complex64,
    pub c12: Complex64,
    pub c21: Complex64,
    pub c22: Complex64,
    pub combo_a: Complex64,
    pub combo_b: Complex64,
    pub combo_c: Complex64,
    pub combo_d: Complex64,
    /// `W[f₁⁺, f₁⁻]`, equal to `−2iλ` for the exact solutions.
    pub wronskian_f1: Complex64,
    /// `W[f₂⁺, f₂⁻]`, equal to `2iλβ` for the exact solutions.
    pub wronskian_f2: Complex64,
}

fn check_lambda(lambda: Complex64) -> Result<()> {
    if lambda.norm() < MIN_LAMBDA {
        return Err(Error::DegenerateBasis {
            lambda,
            wronskian_abs: 2.0 * lambda.norm(),
        });
    }
    Ok(())
}

pub fn scattering_coeffs(ctx: &SolutionContext, lambda: Complex64) -> Result<ScatteringCoeffs> {
    check_lambda(lambda)?;
    let beta = ctx.beta();
    let b = ctx.basis_at_origin(lambda)?;
    let two_i_lambda = 2.0 * Complex64::i() * lambda;

    let wronskian_f1 = b.f1_plus.wronskian(&b.f1_minus);
    let wronskian_f2 = b.f2_plus.wronskian(&b.f2_minus);
    let combo_a = b.f2_plus.wronskian(&b.f1_minus) / wronskian_f1;
    let combo_b = b.f1_plus.wronskian(&b.f2_plus) / wronskian_f1;
    let combo_c = b.f1_plus.wronskian(&b.f2_minus) / wronskian_f2;
    let combo_d = b.f2_plus.wronskian(&b.f1_plus) / wronskian_f2;

    let c12 = b.f1_plus.wronskian(&b.f2_plus) / two_i_lambda;
    let c11 = b.f2_plus.wronskian(&b.f1_minus) / two_i_lambda;
    // c11 at −λ: the roles f^+ ↔ f^− swap.
    let c11_reflected = b.f2_minus.wronskian(&b.f1_plus) / (-two_i_lambda);

    Ok(ScatteringCoeffs {
        lambda,
        c11,
        c12,
        c21: -c12 / beta,
        c22: c11_reflected / beta,
        combo_a,
        combo_b,
        combo_c,
        combo_d,
        wronskian_f1,
        wronskian_f2,
    })
}

/// `C₁₂(λ) = W[f₁⁺, f₂⁺](0) / (2iλ)`.
pub fn c12(ctx: &SolutionContext, lambda: Complex64) -> Result<Complex64> {
    check_lambda(lambda)?;
    let b = ctx.basis_at_origin(lambda)?;
    Ok(b.f1_plus.wronskian(&b.f2_plus) / (2.0 * Complex64::i() * lambda))
}

/// `C₁₂(λ)` and its analytic λ-derivative.
pub fn c12_with_derivative(ctx: &SolutionContext, lambda: Complex64) -> Result<(Complex64, Complex64)> {
    check_lambda(lambda)?;
    let b = ctx.basis_at_origin(lambda)?;
    let (d1, d2) = ctx.plus_pair_lambda_derivative(lambda)?;
    let (f, g) = (b.f1_plus, b.f2_plus);
    let w = f.wronskian(&g);
    let dw = d1.value * g.slope + f.value * d2.slope - d1.slope * g.value - f.slope * d2.value;
    let two_i = 2.0 * Complex64::i();
    Ok((w / (two_i * lambda), dw / (two_i * lambda) - w / (two_i * lambda * lambda)))
}
