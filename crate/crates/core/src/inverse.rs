//! Recovery of `(β, q)` from the diagonal of `V` and the large-`λ`
//! behaviour of `C₁₂`, and the forward-then-inverse round trip.

use log::warn;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::extrapolate::{linear_fit, neville_at_zero};
use crate::series::{
    build_vtable, q_from_vtable, reconstruct_vtable, tail_norm, MediumProfile, Potential, TailNorm, VTable,
};
use crate::solutions::SolutionContext;
use crate::spectral::c12;

/// Imaginary part above which an asymptote is rejected.
pub const ASYMPTOTE_IMAG_TOL: f64 = 1e-8;

/// Sample heights used by the round trip.
pub const ROUND_TRIP_HEIGHTS: [f64; 3] = [50.0, 100.0, 200.0];

const CORRECTION_STEPS: usize = 30;
const CORRECTION_TOL: f64 = 1e-14;

#[derive(Debug, Clone, PartialEq)]
pub enum C12Data {
    /// `lim C₁₂(λ)` as `Im λ → ∞`.
    Asymptote(Complex64),
    /// `(λ, C₁₂(λ))` on the positive imaginary axis, `Im λ` increasing.
    Samples(Vec<(Complex64, Complex64)>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpectralData {
    normalizing_numbers: Vec<Complex64>,
    c12: C12Data,
}

impl SpectralData {
    pub fn new(normalizing_numbers: Vec<Complex64>, c12: C12Data) -> Result<Self> {
        if normalizing_numbers.is_empty() {
            return Err(Error::InvalidInput("at least one normalizing number is required".into()));
        }
        if let C12Data::Samples(samples) = &c12 {
            if samples.len() < 3 {
                return Err(Error::InvalidInput("at least 3 C12 samples are required".into()));
            }
            if samples.iter().any(|(l, _)| l.re != 0.0 || l.im <= 0.0) {
                return Err(Error::InvalidInput(
                    "C12 samples must lie on the positive imaginary axis".into(),
                ));
            }
            if samples.windows(2).any(|w| w[1].0.im <= w[0].0.im) {
                return Err(Error::InvalidInput(
                    "C12 samples must have strictly increasing Im λ".into(),
                ));
            }
        }
        Ok(SpectralData { normalizing_numbers, c12 })
    }

    pub fn normalizing_numbers(&self) -> &[Complex64] {
        &self.normalizing_numbers
    }

    pub fn c12(&self) -> &C12Data {
        &self.c12
    }

    pub fn order(&self) -> usize {
        self.normalizing_numbers.len()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BetaEstimate {
    pub beta: f64,
    /// Limit of `C₁₂` used for `β = −2 Re(limit) − 1`.
    pub limit: Complex64,
    /// Estimate from the bare `c∞ + c₁/t` fit (samples only).
    pub plain_beta: Option<f64>,
    /// Largest residual of the `c∞ + c₁/t` fit (samples only).
    pub fit_residual: f64,
    /// Fixed-point steps of the remainder correction (0 for an asymptote).
    pub correction_steps: usize,
}

fn beta_from_limit(limit: Complex64) -> Result<f64> {
    let beta = -2.0 * limit.re - 1.0;
    if !(beta > 0.0) {
        return Err(Error::NonPositiveBeta { beta });
    }
    Ok(beta)
}

/// `C₁₂(it) + (β+1)/2` for the model built from `table` at the given `β`.
fn model_remainder(table: &VTable, beta: f64, heights: &[f64]) -> Result<Vec<Complex64>> {
    let ctx = SolutionContext::from_table(table.clone(), MediumProfile::relaxed(beta)?);
    heights
        .iter()
        .map(|&t| Ok(c12(&ctx, Complex64::new(0.0, t))? + (beta + 1.0) / 2.0))
        .collect()
}

/// `β` from the spectral data.
///
/// With samples, the last three are first fitted by `c∞ + c₁/t`. The
/// remaining bias from higher powers of `1/t` is then removed by subtracting
/// the remainder `C₁₂(it) + (β+1)/2` of the model determined by the
/// normalizing numbers at the current `β`, and re-extrapolating, until `β`
/// stops changing.
pub fn recover_beta(data: &SpectralData) -> Result<BetaEstimate> {
    match data.c12() {
        C12Data::Asymptote(limit) => {
            if limit.im.abs() >= ASYMPTOTE_IMAG_TOL {
                return Err(Error::NonRealAsymptote { imag: limit.im });
            }
            Ok(BetaEstimate {
                beta: beta_from_limit(*limit)?,
                limit: *limit,
                plain_beta: None,
                fit_residual: 0.0,
                correction_steps: 0,
            })
        }
        C12Data::Samples(samples) => {
            let tail = &samples[samples.len() - 3..];
            let heights: Vec<f64> = tail.iter().map(|(l, _)| l.im).collect();
            let inverse: Vec<f64> = heights.iter().map(|t| 1.0 / t).collect();
            let values: Vec<Complex64> = tail.iter().map(|(_, v)| *v).collect();
            let (intercept, _, fit_residual) = linear_fit(&inverse, &values);
            let plain_beta = beta_from_limit(intercept)?;

            let table = reconstruct_vtable(data.normalizing_numbers(), data.order())?;
            let mut beta = plain_beta;
            let mut limit = intercept;
            let mut steps = 0;
            for step in 1..=CORRECTION_STEPS {
                steps = step;
                let remainder = model_remainder(&table, beta, &heights)?;
                let corrected: Vec<Complex64> =
                    values.iter().zip(&remainder).map(|(v, r)| v - r).collect();
                limit = neville_at_zero(&inverse, &corrected);
                let next = beta_from_limit(limit)?;
                let change = (next - beta).abs();
                beta = next;
                if change <= CORRECTION_TOL * (1.0 + beta) {
                    break;
                }
            }
            if limit.im.abs() >= 1e-6 {
                warn!("extrapolated C12 limit has imaginary part {:.3e}", limit.im);
            }
            Ok(BetaEstimate {
                beta,
                limit,
                plain_beta: Some(plain_beta),
                fit_residual,
                correction_steps: steps,
            })
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct InverseResult {
    pub beta: f64,
    pub potential: Potential,
    pub vtable: VTable,
    pub estimate: BetaEstimate,
    pub tail_norm: TailNorm,
}

/// Step 1 rebuilds `V` from its diagonal, step 3 reads `q` from the column
/// sums, step 4 recovers `β`.
pub fn solve_inverse(data: &SpectralData) -> Result<InverseResult> {
    let vtable = reconstruct_vtable(data.normalizing_numbers(), data.order())?;
    if let Some(n) = data.normalizing_numbers().iter().position(|v| *v == Complex64::new(0.0, 0.0)) {
        warn!("normalizing number V[{0},{0}] is zero; row {0} of the table vanishes", n + 1);
    }
    let potential = q_from_vtable(&vtable);
    let estimate = recover_beta(data)?;
    if (estimate.beta - 1.0).abs() < 1e-6 {
        warn!("recovered β = {} is indistinguishable from a continuous medium", estimate.beta);
    }
    Ok(InverseResult {
        beta: estimate.beta,
        tail_norm: tail_norm(&vtable),
        potential,
        vtable,
        estimate,
    })
}

/// Forward data for `(q, β)` at truncation `order`: the diagonal of `V`
/// and `C₁₂` sampled at `λ = it`.
pub fn forward_data(potential: &Potential, medium: MediumProfile, order: usize, heights: &[f64]) -> Result<SpectralData> {
    let ctx = SolutionContext::new(potential, medium, order)?;
    let samples = heights
        .iter()
        .map(|&t| {
            let lambda = Complex64::new(0.0, t);
            Ok((lambda, c12(&ctx, lambda)?))
        })
        .collect::<Result<Vec<_>>>()?;
    SpectralData::new(ctx.table().diagonal(), C12Data::Samples(samples))
}

/// Largest error of `recovered` against `truth`: relative per harmonic for
/// nonzero `q_n`, and relative to `max|q|` where `q_n = 0`.
pub fn potential_error(truth: &Potential, recovered: &Potential) -> f64 {
    let top = truth.order().max(recovered.order());
    let scale = truth.max_abs();
    (1..=top)
        .map(|n| {
            let (a, b) = (truth.coefficient(n), recovered.coefficient(n));
            let diff = (a - b).norm();
            if a.norm() > 0.0 {
                diff / a.norm()
            } else if scale > 0.0 {
                diff / scale
            } else {
                diff
            }
        })
        .fold(0.0, f64::max)
}

#[derive(Debug, Clone, PartialEq)]
pub struct RoundTripReport {
    pub order: usize,
    pub beta_true: f64,
    pub beta_recovered: Option<f64>,
    pub beta_plain: Option<f64>,
    pub q_error: f64,
    pub beta_error: f64,
    /// Largest `|ΔV[n, α]|` between reconstructed and forward tables.
    pub vtable_abs_error: f64,
    pub vtable_normwise_error: f64,
    pub failure: Option<String>,
}

impl RoundTripReport {
    pub const Q_TOL: f64 = 1e-8;
    pub const BETA_TOL: f64 = 1e-6;

    pub fn passed(&self) -> bool {
        self.failure.is_none() && self.q_error <= Self::Q_TOL && self.beta_error <= Self::BETA_TOL
    }
}

pub fn round_trip(potential: &Potential, medium: MediumProfile, order: usize) -> RoundTripReport {
    let mut report = RoundTripReport {
        order,
        beta_true: medium.beta(),
        beta_recovered: None,
        beta_plain: None,
        q_error: f64::INFINITY,
        beta_error: f64::INFINITY,
        vtable_abs_error: f64::INFINITY,
        vtable_normwise_error: f64::INFINITY,
        failure: None,
    };
    let outcome = (|| -> Result<(VTable, InverseResult)> {
        let forward = build_vtable(potential, order)?;
        let data = forward_data(potential, medium, order, &ROUND_TRIP_HEIGHTS)?;
        Ok((forward, solve_inverse(&data)?))
    })();
    match outcome {
        Ok((forward, result)) => {
            report.beta_recovered = Some(result.beta);
            report.beta_plain = result.estimate.plain_beta;
            report.beta_error = (result.beta - medium.beta()).abs();
            report.q_error = potential_error(potential, &result.potential);
            report.vtable_abs_error = forward
                .iter()
                .map(|(n, a, v)| (result.vtable.value(n, a) - v).norm())
                .fold(0.0, f64::max);
            report.vtable_normwise_error = result.vtable.normwise_gap(&forward);
        }
        Err(e) => report.failure = Some(e.to_string()),
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn with_asymptote(diag: Vec<Complex64>, limit: Complex64) -> SpectralData {
        SpectralData::new(diag, C12Data::Asymptote(limit)).unwrap()
    }

    #[test]
    fn beta_from_exact_asymptote() {
        let d = with_asymptote(vec![c(0.0, 0.0)], c(-1.5, 0.0));
        assert_eq!(recover_beta(&d).unwrap().beta, 2.0);
        let d = with_asymptote(vec![c(0.0, 0.0)], c(-0.75, 0.0));
        assert_eq!(recover_beta(&d).unwrap().beta, 0.5);
    }

    #[test]
    fn beta_rejections() {
        let d = with_asymptote(vec![c(0.0, 0.0)], c(1.0, 0.0));
        assert_eq!(recover_beta(&d).unwrap_err(), Error::NonPositiveBeta { beta: -3.0 });
        let d = with_asymptote(vec![c(0.0, 0.0)], c(-1.5, 1e-3));
        assert!(matches!(recover_beta(&d), Err(Error::NonRealAsymptote { .. })));
    }

    #[test]
    fn data_validation() {
        assert!(SpectralData::new(vec![], C12Data::Asymptote(c(-1.5, 0.0))).is_err());
        let two = vec![(c(0.0, 1.0), c(-1.5, 0.0)), (c(0.0, 2.0), c(-1.5, 0.0))];
        assert!(SpectralData::new(vec![c(0.0, 0.0)], C12Data::Samples(two.clone())).is_err());
        let mut bad = two.clone();
        bad.push((c(0.0, 1.5), c(-1.5, 0.0)));
        assert!(SpectralData::new(vec![c(0.0, 0.0)], C12Data::Samples(bad)).is_err());
        let mut good = two;
        good.push((c(0.0, 3.0), c(-1.5, 0.0)));
        assert!(SpectralData::new(vec![c(0.0, 0.0)], C12Data::Samples(good)).is_ok());
    }

    #[test]
    fn hand_inverse() {
        let d = with_asymptote(vec![c(-1.0, 0.0), c(-0.5, 0.0), c(-1.0 / 12.0, 0.0)], c(-1.5, 0.0));
        let r = solve_inverse(&d).unwrap();
        assert_eq!(r.beta, 2.0);
        assert!((r.potential.coefficient(1) - c(1.0, 0.0)).norm() < 1e-15);
        assert!(r.potential.coefficient(2).norm() < 1e-15);
        assert!(r.potential.coefficient(3).norm() < 1e-15);
    }

    #[test]
    fn zero_data_gives_zero_potential() {
        let d = with_asymptote(vec![c(0.0, 0.0); 5], c(-2.0, 0.0));
        let r = solve_inverse(&d).unwrap();
        assert_eq!(r.beta, 3.0);
        assert!(r.potential.harmonics().iter().all(|q| q.norm() == 0.0));
    }

    #[test]
    fn unit_first_harmonic_round_trip() {
        let p = Potential::new(vec![c(1.0, 0.0)]).unwrap();
        let r = round_trip(&p, MediumProfile::new(2.0).unwrap(), 24);
        assert!(r.passed(), "{r:?}");
        assert!(r.q_error < 1e-10);
    }

    #[test]
    fn zero_potential_round_trip_is_exact() {
        let r = round_trip(&Potential::zero(), MediumProfile::new(0.5).unwrap(), 24);
        assert!(r.beta_error < 1e-13, "{r:?}");
        assert_eq!(r.q_error, 0.0);
    }
}
