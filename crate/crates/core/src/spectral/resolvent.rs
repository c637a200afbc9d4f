//! Resolvent kernels of `−y″ + q y − λ²ρ y` and their behaviour at the
//! `n/2` singular points.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::extrapolate::neville_at_zero;
use crate::solutions::{SolutionContext, Sign, WholeLine};

/// Denominator magnitude below which the kernel is refused.
pub const NEAR_POLE: f64 = 1e-10;

/// Offsets `δ` of the approach `λ = n/2 + iδ` used by the residue estimate.
pub const RESIDUE_OFFSETS: [f64; 3] = [1e-2, 5e-3, 2.5e-3];

/// `Upper`: `0 < arg λ < π`. `Lower`: `π < arg λ < 2π`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Sector {
    Upper,
    Lower,
}

impl Sector {
    pub fn of(lambda: Complex64) -> Option<Sector> {
        if lambda.im > 0.0 {
            Some(Sector::Upper)
        } else if lambda.im < 0.0 {
            Some(Sector::Lower)
        } else {
            None
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResolventQuery {
    pub x: f64,
    pub t: f64,
    pub lambda: Complex64,
    pub sector: Sector,
}

/// Kernel at a fixed `λ`:
/// `R(x, t) = u(max(x,t)) v(min(x,t)) / W[u, v](0)` with `u = f₁⁺`, `v = f₂⁺`
/// in the upper sector and `u = f₁⁻`, `v = f₂⁻` in the lower one.
/// With `y = ∫ R ρ h`, `−y″ + q y − λ²ρ y = ρ h`.
#[derive(Debug, Clone)]
pub struct ResolventKernel<'a> {
    line: WholeLine<'a>,
    denominator: Complex64,
}

impl<'a> ResolventKernel<'a> {
    pub fn new(ctx: &'a SolutionContext, lambda: Complex64, sector: Sector) -> Result<Self> {
        if Sector::of(lambda) != Some(sector) {
            return Err(Error::Precondition(format!("λ = {lambda} is not in sector {sector:?}")));
        }
        // The lower-sector pair f^− is the upper-sector pair at −λ.
        let base = match sector {
            Sector::Upper => lambda,
            Sector::Lower => -lambda,
        };
        let basis = ctx.basis_at_origin(base)?;
        let denominator = basis.f1_plus.wronskian(&basis.f2_plus);
        if denominator.norm() < NEAR_POLE {
            return Err(Error::NearPole { lambda, wronskian_abs: denominator.norm() });
        }
        Ok(ResolventKernel { line: WholeLine::new(ctx, base)?, denominator })
    }

    pub fn denominator(&self) -> Complex64 {
        self.denominator
    }

    pub fn eval(&self, x: f64, t: f64) -> Result<Complex64> {
        let (hi, lo) = if x >= t { (x, t) } else { (t, x) };
        Ok(self.line.f1_plus(hi)?.value * self.line.f2_plus(lo)?.value / self.denominator)
    }

    /// `∂R/∂x` at `x ≠ t`.
    pub fn eval_dx(&self, x: f64, t: f64) -> Result<Complex64> {
        let v = if x > t {
            self.line.f1_plus(x)?.slope * self.line.f2_plus(t)?.value
        } else {
            self.line.f1_plus(t)?.value * self.line.f2_plus(x)?.slope
        };
        Ok(v / self.denominator)
    }
}

pub fn resolvent_kernel(ctx: &SolutionContext, query: ResolventQuery) -> Result<Complex64> {
    ResolventKernel::new(ctx, query.lambda, query.sector)?.eval(query.x, query.t)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ResidueEstimate {
    pub n: usize,
    /// Extrapolated `lim (n − 2λ) R(x, t, λ)` as `λ → n/2` from above.
    pub limit_est: Complex64,
    /// `(2/(in)) V[n,n] f₁⁺(x, n/2) f₁⁺(t, n/2)`.
    pub formula: Complex64,
    /// `(δ, (n − 2λ)R)` samples behind the extrapolation.
    pub samples: Vec<(f64, Complex64)>,
}

impl ResidueEstimate {
    pub fn relative_gap(&self) -> f64 {
        let diff = (self.limit_est - self.formula).norm();
        let scale = self.formula.norm();
        if scale == 0.0 {
            diff
        } else {
            diff / scale
        }
    }
}

pub fn residue_at_singularity(ctx: &SolutionContext, n: usize, x: f64, t: f64) -> Result<ResidueEstimate> {
    if n == 0 || n > ctx.order() {
        return Err(Error::InvalidInput(format!("index {n} outside 1..={}", ctx.order())));
    }
    let centre = n as f64 / 2.0;
    let mut samples = Vec::with_capacity(RESIDUE_OFFSETS.len());
    for &delta in &RESIDUE_OFFSETS {
        let lambda = Complex64::new(centre, delta);
        let r = ResolventKernel::new(ctx, lambda, Sector::Upper)?.eval(x, t)?;
        samples.push((delta, (n as f64 - 2.0 * lambda) * r));
    }
    let deltas: Vec<f64> = samples.iter().map(|s| s.0).collect();
    let values: Vec<Complex64> = samples.iter().map(|s| s.1).collect();
    let limit_est = neville_at_zero(&deltas, &values);

    let at = Complex64::new(centre, 0.0);
    let vnn = ctx.table().value(n, n);
    let fx = ctx.eval_f1(x, at, Sign::Plus, crate::solutions::Order::Value)?;
    let ft = ctx.eval_f1(t, at, Sign::Plus, crate::solutions::Order::Value)?;
    let formula = 2.0 / (Complex64::i() * n as f64) * vnn * fx * ft;
    Ok(ResidueEstimate { n, limit_est, formula, samples })
}
