//! Fundamental solutions of `−y″ + q y = λ²ρ y`.
//!
//! All four solutions share one series. With `g_n(x) = Σ_{α≥n} V[n,α] e^{iαx}`,
//!
//! ```text
//! u(x; μ) = e^{iμx} (1 + Σ_n g_n(x) / (n + 2μ))
//! ```
//!
//! solves `−y″ + q y = μ² y`, and
//! `f₁⁺ = u(·; λ)`, `f₁⁻ = u(·; −λ)`, `f₂⁺ = u(·; −βλ)`, `f₂⁻ = u(·; βλ)`.
//! The `f₁` pair is the natural basis on `x ≥ 0`, the `f₂` pair on `x < 0`.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::series::{build_vtable, q_from_vtable, MediumProfile, Potential, VTable};
use crate::spectral::ScatteringCoeffs;

/// Distance from a series pole `n + 2μ = 0` below which evaluation is refused.
pub const POLE_GUARD: f64 = 1e-12;

/// Basis Wronskian magnitude below which a half-line extension is refused.
pub const DEGENERATE_WRONSKIAN: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Sign {
    Plus,
    Minus,
}

/// Which x-derivative to return.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Order {
    Value,
    Slope,
}

/// Value and x-derivative of a solution at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jet {
    pub value: Complex64,
    pub slope: Complex64,
}

impl Jet {
    pub fn new(value: Complex64, slope: Complex64) -> Self {
        Jet { value, slope }
    }

    pub fn pick(&self, order: Order) -> Complex64 {
        match order {
            Order::Value => self.value,
            Order::Slope => self.slope,
        }
    }

    /// `W[self, other]` at the common point.
    pub fn wronskian(&self, other: &Jet) -> Complex64 {
        wronskian(self.value, self.slope, other.value, other.slope)
    }

    pub fn scale(&self, k: Complex64) -> Jet {
        Jet::new(self.value * k, self.slope * k)
    }

    pub fn combine(&self, a: Complex64, other: &Jet, b: Complex64) -> Jet {
        Jet::new(a * self.value + b * other.value, a * self.slope + b * other.slope)
    }
}

/// `W[f, g] = f·g′ − f′·g`.
pub fn wronskian(f: Complex64, f_slope: Complex64, g: Complex64, g_slope: Complex64) -> Complex64 {
    f * g_slope - f_slope * g
}

/// The four fundamental solutions at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Basis {
    pub f1_plus: Jet,
    pub f1_minus: Jet,
    pub f2_plus: Jet,
    pub f2_minus: Jet,
}

/// Which Lemma-style extension to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Extension {
    /// `f₁⁺` continued to `x < 0` in the `f₂^±` basis.
    F1PlusLeft,
    /// `f₂⁺` continued to `x ≥ 0` in the `f₁^±` basis.
    F2PlusRight,
}

/// Row sums `g_n(x)` and `g_n′(x)`; rows of `V` that vanish identically
/// are dropped, so their poles are not poles of the truncated series.
#[derive(Debug, Clone)]
struct Rows {
    index: Vec<usize>,
    values: Vec<Complex64>,
    slopes: Vec<Complex64>,
}

/// Solution evaluator for one `(V, β)` instance.
#[derive(Debug, Clone)]
pub struct SolutionContext {
    table: VTable,
    medium: MediumProfile,
    potential: Potential,
    live: Vec<usize>,
    origin: Rows,
}

impl SolutionContext {
    /// Builds the table for `potential` at truncation `order`.
    pub fn new(potential: &Potential, medium: MediumProfile, order: usize) -> Result<Self> {
        let table = build_vtable(potential, order)?;
        let mut potential = potential.clone();
        if potential.order() > order {
            potential = Potential::new(potential.harmonics()[..order].to_vec())?;
        }
        Ok(Self::assemble(table, medium, potential))
    }

    /// Uses a given table; the potential is read back from its column sums.
    pub fn from_table(table: VTable, medium: MediumProfile) -> Self {
        let potential = q_from_vtable(&table);
        Self::assemble(table, medium, potential)
    }

    fn assemble(table: VTable, medium: MediumProfile, potential: Potential) -> Self {
        let mut ctx = SolutionContext {
            table,
            medium,
            potential,
            live: vec![],
            origin: Rows {
                index: vec![],
                values: vec![],
                slopes: vec![],
            },
        };
        ctx.live = ctx.live_rows();
        ctx.origin = ctx.rows(Complex64::new(0.0, 0.0));
        ctx
    }

    pub fn table(&self) -> &VTable {
        &self.table
    }

    pub fn medium(&self) -> MediumProfile {
        self.medium
    }

    pub fn beta(&self) -> f64 {
        self.medium.beta()
    }

    pub fn potential(&self) -> &Potential {
        &self.potential
    }

    pub fn order(&self) -> usize {
        self.table.order()
    }

    fn live_rows(&self) -> Vec<usize> {
        let mut live = vec![false; self.order()];
        for (n, _, v) in self.table.iter() {
            if *v != Complex64::new(0.0, 0.0) {
                live[n - 1] = true;
            }
        }
        (1..=self.order()).filter(|n| live[n - 1]).collect()
    }

    fn rows(&self, x: Complex64) -> Rows {
        let order = self.table.order();
        let step = (Complex64::i() * x).exp();
        let mut powers = Vec::with_capacity(order + 1);
        let mut w = Complex64::new(1.0, 0.0);
        for _ in 0..=order {
            powers.push(w);
            w *= step;
        }
        let index = self.live.clone();
        let mut values = Vec::with_capacity(index.len());
        let mut slopes = Vec::with_capacity(index.len());
        for &n in &index {
            let (mut g, mut gp) = (Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0));
            for alpha in n..=order {
                let term = self.table.value(n, alpha) * powers[alpha];
                g += term;
                gp += Complex64::new(0.0, alpha as f64) * term;
            }
            values.push(g);
            slopes.push(gp);
        }
        Rows { index, values, slopes }
    }

    fn check_poles(&self, mu: Complex64, lambda: Complex64) -> Result<()> {
        for &n in &self.live {
            if (n as f64 + 2.0 * mu).norm() < POLE_GUARD {
                return Err(Error::PoleAtLambda { lambda, index: n });
            }
        }
        Ok(())
    }

    fn jet_from_rows(rows: &Rows, x: Complex64, mu: Complex64) -> Jet {
        let (mut s, mut t) = (Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0));
        for ((n, g), gp) in rows.index.iter().zip(&rows.values).zip(&rows.slopes) {
            let d = *n as f64 + 2.0 * mu;
            s += g / d;
            t += gp / d;
        }
        let e = (Complex64::i() * mu * x).exp();
        Jet::new(e * s, e * (Complex64::i() * mu * s + t))
    }

    /// `∂/∂μ` of the value and slope of `u(x; μ)`.
    fn mu_derivative_from_rows(rows: &Rows, x: Complex64, mu: Complex64) -> Jet {
        let i = Complex64::i();
        let (mut s, mut t) = (Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0));
        let (mut ds, mut dt) = (Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0));
        for ((n, g), gp) in rows.index.iter().zip(&rows.values).zip(&rows.slopes) {
            let d = *n as f64 + 2.0 * mu;
            s += g / d;
            t += gp / d;
            ds -= 2.0 * g / (d * d);
            dt -= 2.0 * gp / (d * d);
        }
        let e = (i * mu * x).exp();
        let value = e * (i * x * s + ds);
        let slope = e * (i * x * (i * mu * s + t) + i * s + i * mu * ds + dt);
        Jet::new(value, slope)
    }

    /// `u(x; μ)` at complex `x`. `lambda` is only used to label pole errors.
    pub fn series_jet(&self, x: Complex64, mu: Complex64, lambda: Complex64) -> Result<Jet> {
        self.check_poles(mu, lambda)?;
        if x == Complex64::new(0.0, 0.0) {
            return Ok(Self::jet_from_rows(&self.origin, x, mu));
        }
        Ok(Self::jet_from_rows(&self.rows(x), x, mu))
    }

    fn mu_f1(lambda: Complex64, sign: Sign) -> Complex64 {
        match sign {
            Sign::Plus => lambda,
            Sign::Minus => -lambda,
        }
    }

    fn mu_f2(&self, lambda: Complex64, sign: Sign) -> Complex64 {
        match sign {
            Sign::Plus => -self.beta() * lambda,
            Sign::Minus => self.beta() * lambda,
        }
    }

    pub fn f1_jet(&self, x: Complex64, lambda: Complex64, sign: Sign) -> Result<Jet> {
        self.series_jet(x, Self::mu_f1(lambda, sign), lambda)
    }

    pub fn f2_jet(&self, x: Complex64, lambda: Complex64, sign: Sign) -> Result<Jet> {
        self.series_jet(x, self.mu_f2(lambda, sign), lambda)
    }

    /// Truncated `f₁^±(x, λ)` or its x-derivative.
    pub fn eval_f1(&self, x: f64, lambda: Complex64, sign: Sign, order: Order) -> Result<Complex64> {
        Ok(self.f1_jet(Complex64::new(x, 0.0), lambda, sign)?.pick(order))
    }

    /// Truncated `f₂^±(x, λ)` or its x-derivative.
    pub fn eval_f2(&self, x: f64, lambda: Complex64, sign: Sign, order: Order) -> Result<Complex64> {
        Ok(self.f2_jet(Complex64::new(x, 0.0), lambda, sign)?.pick(order))
    }

    /// Renormalized solution `e^{−inx/2} g_n(x)`, the finite limit of
    /// `(n ± 2λ) f₁^±` at `λ = ∓n/2`. Both signs give the same function.
    pub fn eval_fn(&self, n: usize, x: f64, _sign: Sign) -> Result<Complex64> {
        if n == 0 || n > self.order() {
            return Err(Error::InvalidInput(format!(
                "renormalized index {n} outside 1..={}",
                self.order()
            )));
        }
        let mut g = Complex64::new(0.0, 0.0);
        for alpha in n..=self.order() {
            g += self.table.value(n, alpha) * Complex64::new(0.0, alpha as f64 * x).exp();
        }
        Ok(g * Complex64::new(0.0, -(n as f64) * x / 2.0).exp())
    }

    /// All four solutions at `x = 0`, from cached rows.
    pub fn basis_at_origin(&self, lambda: Complex64) -> Result<Basis> {
        self.basis_at(Complex64::new(0.0, 0.0), lambda)
    }

    pub fn basis_at(&self, x: Complex64, lambda: Complex64) -> Result<Basis> {
        let beta = self.beta();
        for mu in [lambda, -lambda, -beta * lambda, beta * lambda] {
            self.check_poles(mu, lambda)?;
        }
        let local;
        let rows = if x == Complex64::new(0.0, 0.0) {
            &self.origin
        } else {
            local = self.rows(x);
            &local
        };
        Ok(Basis {
            f1_plus: Self::jet_from_rows(rows, x, lambda),
            f1_minus: Self::jet_from_rows(rows, x, -lambda),
            f2_plus: Self::jet_from_rows(rows, x, -beta * lambda),
            f2_minus: Self::jet_from_rows(rows, x, beta * lambda),
        })
    }

    /// `d/dλ` of `f₁⁺` and `f₂⁺` (value and slope) at `x = 0`.
    pub fn plus_pair_lambda_derivative(&self, lambda: Complex64) -> Result<(Jet, Jet)> {
        let beta = self.beta();
        self.check_poles(lambda, lambda)?;
        self.check_poles(-beta * lambda, lambda)?;
        let zero = Complex64::new(0.0, 0.0);
        let d1 = Self::mu_derivative_from_rows(&self.origin, zero, lambda);
        let d2 = Self::mu_derivative_from_rows(&self.origin, zero, -beta * lambda)
            .scale(Complex64::new(-beta, 0.0));
        Ok((d1, d2))
    }
}

/// Evaluates the half-line continuation of `f₁⁺` (left) or `f₂⁺` (right)
/// using the interface coefficients in `coeffs`.
pub fn extend_solution(
    ctx: &SolutionContext,
    coeffs: &ScatteringCoeffs,
    which: Extension,
    x: f64,
) -> Result<Jet> {
    let lambda = coeffs.lambda;
    let xc = Complex64::new(x, 0.0);
    match which {
        Extension::F1PlusLeft => {
            if coeffs.wronskian_f2.norm() < DEGENERATE_WRONSKIAN {
                return Err(Error::DegenerateBasis {
                    lambda,
                    wronskian_abs: coeffs.wronskian_f2.norm(),
                });
            }
            let plus = ctx.f2_jet(xc, lambda, Sign::Plus)?;
            let minus = ctx.f2_jet(xc, lambda, Sign::Minus)?;
            Ok(plus.combine(coeffs.combo_c, &minus, coeffs.combo_d))
        }
        Extension::F2PlusRight => {
            if coeffs.wronskian_f1.norm() < DEGENERATE_WRONSKIAN {
                return Err(Error::DegenerateBasis {
                    lambda,
                    wronskian_abs: coeffs.wronskian_f1.norm(),
                });
            }
            let plus = ctx.f1_jet(xc, lambda, Sign::Plus)?;
            let minus = ctx.f1_jet(xc, lambda, Sign::Minus)?;
            Ok(plus.combine(coeffs.combo_a, &minus, coeffs.combo_b))
        }
    }
}

/// `f₁⁺` and `f₂⁺` on the whole line at one `λ`, each continued across
/// the interface by the matching conditions.
#[derive(Debug, Clone)]
pub struct WholeLine<'a> {
    ctx: &'a SolutionContext,
    coeffs: ScatteringCoeffs,
}

impl<'a> WholeLine<'a> {
    pub fn new(ctx: &'a SolutionContext, lambda: Complex64) -> Result<Self> {
        let coeffs = crate::spectral::scattering_coeffs(ctx, lambda)?;
        Ok(WholeLine { ctx, coeffs })
    }

    pub fn coeffs(&self) -> &ScatteringCoeffs {
        &self.coeffs
    }

    pub fn f1_plus(&self, x: f64) -> Result<Jet> {
        if x >= 0.0 {
            self.ctx
                .f1_jet(Complex64::new(x, 0.0), self.coeffs.lambda, Sign::Plus)
        } else {
            extend_solution(self.ctx, &self.coeffs, Extension::F1PlusLeft, x)
        }
    }

    pub fn f2_plus(&self, x: f64) -> Result<Jet> {
        if x < 0.0 {
            self.ctx
                .f2_jet(Complex64::new(x, 0.0), self.coeffs.lambda, Sign::Plus)
        } else {
            extend_solution(self.ctx, &self.coeffs, Extension::F2PlusRight, x)
        }
    }
}
