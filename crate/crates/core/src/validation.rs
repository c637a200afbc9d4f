//! Seeded self-checks of the whole pipeline, rendered as a fixed-format
//! pass/fail table.

use std::fmt::Write as _;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::Result;
use crate::inverse::{round_trip, RoundTripReport};
use crate::quadrature::integrate;
use crate::series::{tail_norm, MediumProfile, Potential};
use crate::solutions::{Order, Sign, SolutionContext};
use crate::spectral::{
    c12, c12_derivative_check, find_eigenvalues, residue_at_singularity, spectral_singularities, Family,
    Region, ResolventKernel, SearchOptions, Sector,
};

pub const BETAS: [f64; 3] = [0.5, 2.0, 3.0];

#[derive(Debug, Clone, PartialEq)]
pub struct SuiteRow {
    pub name: &'static str,
    pub passed: bool,
    pub metric: f64,
    pub threshold: f64,
    pub detail: String,
}

impl SuiteRow {
    fn at_most(name: &'static str, metric: f64, threshold: f64, detail: String) -> Self {
        SuiteRow { name, passed: metric <= threshold, metric, threshold, detail }
    }

    fn failed(name: &'static str, threshold: f64, detail: String) -> Self {
        SuiteRow { name, passed: false, metric: f64::NAN, threshold, detail }
    }

    fn from_result(name: &'static str, threshold: f64, r: Result<SuiteRow>) -> Self {
        r.unwrap_or_else(|e| SuiteRow::failed(name, threshold, format!("error: {e}")))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ValidationReport {
    pub header: Vec<(String, String)>,
    pub rows: Vec<SuiteRow>,
}

impl ValidationReport {
    pub fn all_passed(&self) -> bool {
        self.rows.iter().all(|r| r.passed)
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        for (k, v) in &self.header {
            writeln!(out, "{k}: {v}").unwrap();
        }
        writeln!(out).unwrap();
        writeln!(out, "{:<22} {:<6} {:>11} {:>11}  detail", "suite", "status", "metric", "threshold").unwrap();
        for r in &self.rows {
            writeln!(
                out,
                "{:<22} {:<6} {:>11.3e} {:>11.3e}  {}",
                r.name,
                if r.passed { "PASS" } else { "FAIL" },
                r.metric,
                r.threshold,
                r.detail
            )
            .unwrap();
        }
        let failed = self.rows.iter().filter(|r| !r.passed).count();
        writeln!(out).unwrap();
        writeln!(out, "summary: {} PASS, {} FAIL", self.rows.len() - failed, failed).unwrap();
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ValidateConfig {
    pub seed: u64,
    /// Truncation for every instance; `None` uses each potential's default.
    pub truncation: Option<usize>,
    pub instances: usize,
}

impl Default for ValidateConfig {
    fn default() -> Self {
        ValidateConfig { seed: 0, truncation: None, instances: 5 }
    }
}

/// Random potential with `1 ≤ N ≤ max_harmonics`, `|q_n| ≤ 1`, and `β` from [`BETAS`].
pub fn random_instance(rng: &mut impl Rng, max_harmonics: usize) -> (Potential, MediumProfile) {
    let n = rng.gen_range(1..=max_harmonics);
    let harmonics = (0..n)
        .map(|_| Complex64::from_polar(rng.gen_range(0.0..1.0), rng.gen_range(0.0..std::f64::consts::TAU)))
        .collect();
    let beta = BETAS[rng.gen_range(0..BETAS.len())];
    (
        Potential::new(harmonics).expect("finite harmonics"),
        MediumProfile::new(beta).expect("admissible β"),
    )
}

fn random_lambda(rng: &mut impl Rng) -> Complex64 {
    Complex64::new(rng.gen_range(-0.6..0.6), rng.gen_range(0.1..0.6))
}

struct Instance {
    potential: Potential,
    ctx: SolutionContext,
}

/// Worst `|−D²f + (q − λ²ρ) f| / (1e−5 (1+|λ|²) max|f|)` over `count`
/// random points, `f ∈ {f₁⁺ on x ≥ 0, f₂⁺ on x < 0}`, `D²` the 3-point
/// second difference with `h = 1e−3`.
pub fn ode_residual_ratio(ctx: &SolutionContext, rng: &mut impl Rng, count: usize) -> Result<f64> {
    let h = 1e-3;
    let mut worst: f64 = 0.0;
    for _ in 0..count {
        let lambda = random_lambda(rng);
        let x = rng.gen_range(0.01..3.0);
        for (pos, rho, f2) in [(x, 1.0, false), (-x, ctx.beta().powi(2), true)] {
            let eval = |y: f64| {
                if f2 {
                    ctx.eval_f2(y, lambda, Sign::Plus, Order::Value)
                } else {
                    ctx.eval_f1(y, lambda, Sign::Plus, Order::Value)
                }
            };
            let (l, m, r) = (eval(pos - h)?, eval(pos)?, eval(pos + h)?);
            let d2 = (l - 2.0 * m + r) / (h * h);
            let residual = (-d2 + (ctx.potential().eval(Complex64::new(pos, 0.0)) - lambda * lambda * rho) * m).norm();
            let scale = l.norm().max(m.norm()).max(r.norm());
            let bound = 1e-5 * (1.0 + lambda.norm_sqr()) * scale;
            worst = worst.max(residual / bound);
        }
    }
    Ok(worst)
}

/// Relative spread of `W[f₁⁺, f₁⁻](x)` on `[0, 3]` and of `W[f₂⁺, f₂⁻](x)` on `[−3, 0]`.
pub fn wronskian_spread(ctx: &SolutionContext, lambda: Complex64) -> Result<f64> {
    let mut worst: f64 = 0.0;
    let w1 = |x: f64| -> Result<Complex64> {
        let z = Complex64::new(x, 0.0);
        Ok(ctx.f1_jet(z, lambda, Sign::Plus)?.wronskian(&ctx.f1_jet(z, lambda, Sign::Minus)?))
    };
    let w2 = |x: f64| -> Result<Complex64> {
        let z = Complex64::new(x, 0.0);
        Ok(ctx.f2_jet(z, lambda, Sign::Plus)?.wronskian(&ctx.f2_jet(z, lambda, Sign::Minus)?))
    };
    let (a, b) = (w1(0.0)?, w2(0.0)?);
    for k in 1..=6 {
        let x = 0.5 * k as f64;
        worst = worst.max((w1(x)? - a).norm() / a.norm());
        worst = worst.max((w2(-x)? - b).norm() / b.norm());
    }
    Ok(worst)
}

/// Worst `|f_n(x) − V[n,n] f₁⁺(x, n/2)| / (1 + |f_n(x)|)` for
/// `n ≤ min(A/2, 10)` and `x ∈ {0, 0.5, …, 3}`.
pub fn proportionality_gap(ctx: &SolutionContext) -> Result<f64> {
    let top = (ctx.order() / 2).min(10);
    let mut worst: f64 = 0.0;
    for n in 1..=top {
        let vnn = ctx.table().value(n, n);
        for k in 0..=6 {
            let x = 0.5 * k as f64;
            let lhs = ctx.eval_fn(n, x, Sign::Plus)?;
            let rhs = vnn * ctx.eval_f1(x, Complex64::new(n as f64 / 2.0, 0.0), Sign::Plus, Order::Value)?;
            worst = worst.max((lhs - rhs).norm() / (1.0 + lhs.norm()));
        }
    }
    Ok(worst)
}

/// Gaps `|C₁₂(it) + (β+1)/2|` at the given heights.
pub fn asymptote_gaps(ctx: &SolutionContext, heights: &[f64]) -> Result<Vec<f64>> {
    let limit = -(ctx.beta() + 1.0) / 2.0;
    heights
        .iter()
        .map(|&t| Ok((c12(ctx, Complex64::new(0.0, t))? - limit).norm()))
        .collect()
}

/// Whether the gaps decrease and `t·gap` varies by at most a factor of 2.
pub fn asymptote_ok(heights: &[f64], gaps: &[f64]) -> (bool, f64) {
    if gaps.iter().all(|g| *g < 1e-14) {
        return (true, 1.0);
    }
    let decreasing = gaps.windows(2).all(|w| w[1] < w[0]);
    let k: Vec<f64> = heights.iter().zip(gaps).map(|(t, g)| t * g).collect();
    let hi = k.iter().cloned().fold(f64::MIN, f64::max);
    let lo = k.iter().cloned().fold(f64::MAX, f64::min);
    let spread = hi / lo;
    (decreasing && spread <= 2.0, spread)
}

/// `C^∞` bump supported on `(a, b)`.
pub fn bump(a: f64, b: f64) -> impl Fn(f64) -> f64 {
    move |t: f64| {
        let s = (2.0 * t - a - b) / (b - a);
        if s.abs() >= 1.0 {
            0.0
        } else {
            (-1.0 / (1.0 - s * s)).exp()
        }
    }
}

/// `y(x) = ∫ R(x, t) ρ(t) f(t) dt` for a source supported in `[a, b]`.
pub fn apply_resolvent(
    kernel: &ResolventKernel<'_>,
    medium: MediumProfile,
    source: &impl Fn(f64) -> f64,
    support: (f64, f64),
    x: f64,
) -> Result<Complex64> {
    let (a, b) = support;
    let integrand = |t: f64| -> Result<Complex64> { Ok(kernel.eval(x, t)? * medium.rho(t) * source(t)) };
    let mut total = Complex64::new(0.0, 0.0);
    let mut cuts = vec![a];
    for c in [x, 0.0] {
        if c > a && c < b {
            cuts.push(c);
        }
    }
    cuts.push(b);
    cuts.sort_by(f64::total_cmp);
    for w in cuts.windows(2) {
        total += integrate(integrand, w[0], w[1], 1e-14, 4000)?.value;
    }
    Ok(total)
}

/// Largest `|−y″ + q y − λ²ρ y − g|` over `checks`, with `g = f` when `literal`
/// and `g = ρ f` otherwise; `y″` by the 5-point stencil with `h = 10⁻²`.
pub fn resolvent_residual(
    ctx: &SolutionContext,
    lambda: Complex64,
    support: (f64, f64),
    checks: &[f64],
    literal: bool,
) -> Result<f64> {
    let kernel = ResolventKernel::new(ctx, lambda, Sector::Upper)?;
    let medium = ctx.medium();
    let source = bump(support.0, support.1);
    let y = |x: f64| apply_resolvent(&kernel, medium, &source, support, x);
    let h = 1e-2;
    let mut worst: f64 = 0.0;
    for &x in checks {
        let v = [y(x - 2.0 * h)?, y(x - h)?, y(x)?, y(x + h)?, y(x + 2.0 * h)?];
        let d2 = (-v[0] + 16.0 * v[1] - 30.0 * v[2] + 16.0 * v[3] - v[4]) / (12.0 * h * h);
        let rho = medium.rho(x);
        let lhs = -d2 + (ctx.potential().eval(Complex64::new(x, 0.0)) - lambda * lambda * rho) * v[2];
        let rhs = if literal { source(x) } else { rho * source(x) };
        worst = worst.max((lhs - rhs).norm());
    }
    Ok(worst)
}

/// Fixed instance with located eigenvalues: `q₁ = −4`, `β = 2`.
pub fn eigen_instance(truncation: usize) -> Result<SolutionContext> {
    let p = Potential::new(vec![Complex64::new(-4.0, 0.0)])?;
    SolutionContext::new(&p, MediumProfile::new(2.0)?, truncation)
}

pub fn eigen_instance_region() -> Region {
    Region { re_min: -3.0, re_max: 3.0, im_min: 0.05, im_max: 3.0 }
}

fn truncation_for(cfg: &ValidateConfig, potential: &Potential) -> usize {
    cfg.truncation.unwrap_or_else(|| potential.default_truncation())
}

pub fn run_validation(cfg: &ValidateConfig) -> ValidationReport {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut instances = Vec::new();
    let mut build_error = None;
    for _ in 0..cfg.instances {
        let (potential, medium) = random_instance(&mut rng, 4);
        match SolutionContext::new(&potential, medium, truncation_for(cfg, &potential)) {
            Ok(ctx) => instances.push(Instance { potential, ctx }),
            Err(e) => build_error = Some(e.to_string()),
        }
    }

    let mut rows = Vec::new();
    if let Some(e) = build_error {
        rows.push(SuiteRow::failed("setup", 0.0, e));
    }

    let worst_tail = instances
        .iter()
        .map(|i| {
            let t = tail_norm(i.ctx.table());
            if t.total > 0.0 { t.last_column / t.total } else { 0.0 }
        })
        .fold(0.0, f64::max);
    rows.push(SuiteRow::at_most(
        "truncation",
        worst_tail,
        crate::series::TRUNCATION_WARN_RATIO,
        "last-column share of the tail norm".into(),
    ));

    rows.push(SuiteRow::from_result("ode_residual", 1.0, (|| {
        let mut worst: f64 = 0.0;
        for inst in &instances {
            worst = worst.max(ode_residual_ratio(&inst.ctx, &mut rng, 20)?);
        }
        Ok(SuiteRow::at_most("ode_residual", worst, 1.0, "residual / 1e-5(1+|λ|²)max|f|, 20 points per instance".into()))
    })()));

    rows.push(SuiteRow::from_result("wronskian", 1e-10, (|| {
        let mut worst: f64 = 0.0;
        let mut magnitude: f64 = 0.0;
        for inst in &instances {
            worst = worst.max(wronskian_spread(&inst.ctx, random_lambda(&mut rng))?);
            let big = Complex64::new(0.0, 50.0);
            let b = inst.ctx.basis_at_origin(big)?;
            let w1 = b.f1_plus.wronskian(&b.f1_minus).norm() / (2.0 * big.norm());
            let w2 = b.f2_plus.wronskian(&b.f2_minus).norm() / (2.0 * big.norm() * inst.ctx.beta());
            magnitude = magnitude.max((w1 - 1.0).abs()).max((w2 - 1.0).abs());
        }
        let mut row = SuiteRow::at_most("wronskian", worst, 1e-10, format!("x-spread; ||W|/|2λβ|-1| at λ=50i: {magnitude:.1e}"));
        row.passed &= magnitude <= 1e-2;
        Ok(row)
    })()));

    rows.push(SuiteRow::from_result("proportionality", 1e-9, (|| {
        let mut worst: f64 = 0.0;
        for inst in &instances {
            worst = worst.max(proportionality_gap(&inst.ctx)?);
        }
        Ok(SuiteRow::at_most("proportionality", worst, 1e-9, "f_n vs V_nn f1+(x, n/2)".into()))
    })()));

    rows.push(SuiteRow::from_result("asymptote", 2.0, (|| {
        let heights = [10.0, 100.0, 1000.0];
        let mut ok = true;
        let mut worst: f64 = 1.0;
        for inst in &instances {
            let gaps = asymptote_gaps(&inst.ctx, &heights)?;
            let (good, spread) = asymptote_ok(&heights, &gaps);
            ok &= good;
            worst = worst.max(spread);
        }
        let mut row = SuiteRow::at_most("asymptote", worst, 2.0, "spread of t|C12(it)+(β+1)/2|, t = 10, 100, 1000".into());
        row.passed &= ok;
        Ok(row)
    })()));

    rows.push(SuiteRow::from_result("closed_forms", 1e-14, (|| {
        let mut worst: f64 = 0.0;
        let mut found = 0;
        for beta in BETAS {
            let medium = MediumProfile::new(beta)?;
            let ctx = SolutionContext::new(&Potential::zero(), medium, cfg.truncation.unwrap_or(24))?;
            for lambda in [Complex64::new(0.3, 0.2), Complex64::new(-2.0, 1.5), Complex64::new(0.0, 7.0)] {
                worst = worst.max((c12(&ctx, lambda)? + (beta + 1.0) / 2.0).norm());
            }
            found += find_eigenvalues(&ctx, Region::default_for(&ctx), 4, SearchOptions::default())?
                .eigenvalues
                .len();
            let s = spectral_singularities(medium, 4)?;
            let ok = s.len() == 8
                && s.iter().all(|e| match e.family {
                    Family::Half => e.value == e.n as f64 / 2.0,
                    Family::Scaled => e.value == e.n as f64 / (2.0 * beta),
                });
            if !ok {
                return Ok(SuiteRow::failed("closed_forms", 1e-14, "singularity list mismatch".into()));
            }
        }
        let mut row = SuiteRow::at_most("closed_forms", worst, 1e-14, format!("zero potential: |C12+(β+1)/2|, {found} eigenvalues"));
        row.passed &= found == 0;
        Ok(row)
    })()));

    rows.push(SuiteRow::from_result("derivative_identity", 1e-4, (|| {
        let ctx = eigen_instance(cfg.truncation.unwrap_or(40))?;
        let report = find_eigenvalues(&ctx, eigen_instance_region(), 2, SearchOptions::default())?;
        let mut worst: f64 = 0.0;
        let mut printed: f64 = f64::INFINITY;
        let mut count = 0;
        for e in report.upper() {
            let check = c12_derivative_check(&ctx, e.lambda)?;
            worst = worst.max(check.c12_gap).max(check.combo_b_gap);
            let printed_gap = (check.c12_slope - check.minus_i_overlap).norm() / check.c12_slope.norm();
            printed = printed.min(printed_gap);
            count += 1;
        }
        if count == 0 {
            return Ok(SuiteRow::failed("derivative_identity", 1e-4, "no eigenvalue located".into()));
        }
        Ok(SuiteRow::at_most(
            "derivative_identity",
            worst,
            1e-4,
            format!("{count} zeros of q1=-4, β=2; C12' vs +i∫ρf1f2 and combo_b' vs -i∫; C12' vs -i∫ off by {printed:.2e}"),
        ))
    })()));

    rows.push(SuiteRow::from_result("residue", 1e-3, (|| {
        let p = Potential::new(vec![Complex64::new(1.0, 0.0)])?;
        let ctx = SolutionContext::new(&p, MediumProfile::new(2.0)?, cfg.truncation.unwrap_or(24))?;
        let est = residue_at_singularity(&ctx, 1, 0.0, 0.0)?;
        Ok(SuiteRow::at_most(
            "residue",
            est.relative_gap(),
            1e-3,
            format!(
                "q1=1, β=2, n=1, x=t=0: limit {:.6e}{:+.6e}i vs formula {:.6e}{:+.6e}i",
                est.limit_est.re, est.limit_est.im, est.formula.re, est.formula.im
            ),
        ))
    })()));

    rows.push(SuiteRow::from_result("resolvent", 1e-4, (|| {
        let p = Potential::new(vec![Complex64::new(0.5, 0.3), Complex64::new(-0.2, 0.1)])?;
        let ctx = SolutionContext::new(&p, MediumProfile::new(2.0)?, cfg.truncation.unwrap_or(24))?;
        let lambda = Complex64::new(0.7, 0.5);
        let right = resolvent_residual(&ctx, lambda, (0.5, 2.5), &[0.8, 1.3, 1.9, 2.2, 3.0, -0.7], true)?;
        let straddle = resolvent_residual(&ctx, lambda, (-1.5, 1.0), &[-1.2, -0.6, -0.3, 0.3, 0.7], false)?;
        Ok(SuiteRow::at_most(
            "resolvent",
            right.max(straddle),
            1e-4,
            format!("source in x>0: {right:.1e}; straddling source vs ρf: {straddle:.1e}"),
        ))
    })()));

    let mut trips: Vec<RoundTripReport> = instances
        .iter()
        .map(|i| round_trip(&i.potential, i.ctx.medium(), i.ctx.order()))
        .collect();
    let unit = Potential::new(vec![Complex64::new(1.0, 0.0)]).expect("finite");
    trips.push(round_trip(&unit, MediumProfile::new(2.0).expect("β = 2"), cfg.truncation.unwrap_or(24)));
    rows.extend(round_trip_rows(&trips));

    let truncation = match cfg.truncation {
        Some(a) => a.to_string(),
        None => "default".into(),
    };
    ValidationReport {
        header: vec![
            ("wavespec validation".into(), "forward/inverse self-checks".into()),
            ("seed".into(), cfg.seed.to_string()),
            ("truncation".into(), truncation),
            ("random instances".into(), cfg.instances.to_string()),
        ],
        rows,
    }
}

/// `roundtrip_q` and `roundtrip_beta` rows over a batch of round trips.
pub fn round_trip_rows(trips: &[RoundTripReport]) -> Vec<SuiteRow> {
    let failure = trips.iter().find_map(|t| t.failure.clone());
    let q = trips.iter().map(|t| t.q_error).fold(0.0, f64::max);
    let beta = trips.iter().map(|t| t.beta_error).fold(0.0, f64::max);
    let table = trips.iter().map(|t| t.vtable_abs_error).fold(0.0, f64::max);
    let mut q_row = SuiteRow::at_most(
        "roundtrip_q",
        q,
        RoundTripReport::Q_TOL,
        format!("{} instances; max |ΔV| {table:.1e}", trips.len()),
    );
    let mut b_row = SuiteRow::at_most("roundtrip_beta", beta, RoundTripReport::BETA_TOL, "1/t extrapolation at t = 50, 100, 200".into());
    if let Some(f) = failure {
        q_row.passed = false;
        b_row.passed = false;
        q_row.detail = format!("error: {f}");
    }
    vec![q_row, b_row]
}

/// Round trip of one problem plus its truncation diagnostic.
pub fn run_round_trip(potential: &Potential, medium: MediumProfile, truncation: usize) -> ValidationReport {
    let report = round_trip(potential, medium, truncation);
    let mut rows = Vec::new();
    match SolutionContext::new(potential, medium, truncation) {
        Ok(ctx) => {
            let t = tail_norm(ctx.table());
            let share = if t.total > 0.0 { t.last_column / t.total } else { 0.0 };
            rows.push(SuiteRow::at_most("truncation", share, crate::series::TRUNCATION_WARN_RATIO, "last-column share of the tail norm".into()));
        }
        Err(e) => rows.push(SuiteRow::failed("truncation", crate::series::TRUNCATION_WARN_RATIO, format!("error: {e}"))),
    }
    rows.extend(round_trip_rows(std::slice::from_ref(&report)));
    let recovered = report.beta_recovered.map_or("none".to_string(), |b| format!("{b:.12}"));
    ValidationReport {
        header: vec![
            ("wavespec round trip".into(), format!("β = {}, N = {}", medium.beta(), potential.order())),
            ("truncation".into(), truncation.to_string()),
            ("recovered beta".into(), recovered),
        ],
        rows,
    }
}
