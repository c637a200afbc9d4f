//! Zeros of `C₁₂` in the upper half-plane by argument-principle subdivision
//! and Newton refinement.

use std::f64::consts::{FRAC_PI_2, PI};

use log::{debug, warn};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::scattering::{c12, c12_with_derivative};
use super::singular::{spectral_singularities, Singularity};
use super::resolvent::Sector;
use crate::error::{Error, Result};
use crate::series::{tail_norm, TailNorm};
use crate::solutions::SolutionContext;

/// Lower edge of any search region; the strip below holds no eigenvalues
/// and contains the real-axis series poles.
pub const MIN_IM_LAMBDA: f64 = 1e-3;

/// `|C₁₂|` on a contour sample below which the contour is rejected.
const CONTOUR_ZERO: f64 = 1e-13;
const MIN_EDGE_SAMPLES: usize = 16;
const MAX_EDGE_DEPTH: usize = 48;
const NEWTON_STEPS: usize = 50;
const SIMPLE_ROOT_DERIVATIVE: f64 = 1e-8;
const JITTER_ATTEMPTS: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Region {
    pub re_min: f64,
    pub re_max: f64,
    pub im_min: f64,
    pub im_max: f64,
}

impl Region {
    pub fn new(re_min: f64, re_max: f64, im_min: f64, im_max: f64) -> Result<Self> {
        let r = Region { re_min, re_max, im_min, im_max };
        r.validate()?;
        Ok(r)
    }

    /// `|Re λ| ≤ (A+2)/2`, `10⁻³ ≤ Im λ ≤ 10(1 + max|q_n|)`.
    pub fn default_for(ctx: &SolutionContext) -> Self {
        let half = (ctx.order() as f64 + 2.0) / 2.0;
        Region {
            re_min: -half,
            re_max: half,
            im_min: MIN_IM_LAMBDA,
            im_max: 10.0 * (1.0 + ctx.potential().max_abs()),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let finite = [self.re_min, self.re_max, self.im_min, self.im_max]
            .iter()
            .all(|v| v.is_finite());
        if !finite || self.re_min >= self.re_max || self.im_min >= self.im_max {
            return Err(Error::InvalidInput(format!("malformed region {self:?}")));
        }
        if self.im_min < MIN_IM_LAMBDA {
            return Err(Error::Precondition(format!(
                "search region must satisfy Im λ ≥ {MIN_IM_LAMBDA}"
            )));
        }
        Ok(())
    }

    pub fn contains(&self, z: Complex64, slack: f64) -> bool {
        z.re >= self.re_min - slack
            && z.re <= self.re_max + slack
            && z.im >= self.im_min - slack
            && z.im <= self.im_max + slack
    }

    pub fn center(&self) -> Complex64 {
        Complex64::new(
            0.5 * (self.re_min + self.re_max),
            0.5 * (self.im_min + self.im_max),
        )
    }

    fn diameter(&self) -> f64 {
        (self.re_max - self.re_min).hypot(self.im_max - self.im_min)
    }

    fn corners(&self) -> [Complex64; 4] {
        [
            Complex64::new(self.re_min, self.im_min),
            Complex64::new(self.re_max, self.im_min),
            Complex64::new(self.re_max, self.im_max),
            Complex64::new(self.re_min, self.im_max),
        ]
    }

    /// Four children split at the fractional point `(fx, fy)`.
    fn split(&self, fx: f64, fy: f64) -> [Region; 4] {
        let xm = self.re_min + fx * (self.re_max - self.re_min);
        let ym = self.im_min + fy * (self.im_max - self.im_min);
        [
            Region { re_min: self.re_min, re_max: xm, im_min: self.im_min, im_max: ym },
            Region { re_min: xm, re_max: self.re_max, im_min: self.im_min, im_max: ym },
            Region { re_min: xm, re_max: self.re_max, im_min: ym, im_max: self.im_max },
            Region { re_min: self.re_min, re_max: xm, im_min: ym, im_max: self.im_max },
        ]
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SearchOptions {
    pub tol_root: f64,
    /// Subdivision depth at which a cell is handed to Newton regardless.
    pub max_depth: usize,
    /// Seed for the deterministic split jitter.
    pub jitter_seed: u64,
}

impl Default for SearchOptions {
    fn default() -> Self {
        SearchOptions {
            tol_root: 1e-10,
            max_depth: 14,
            jitter_seed: 0x5eed,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Eigenvalue {
    pub lambda: Complex64,
    pub sector: Sector,
    /// `|C₁₂(λ)|` for the upper sector, `|C₁₂(−λ)|` for the lower one.
    pub c12_abs: f64,
    pub derivative_abs: f64,
    pub multiplicity: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CellCount {
    pub region: Region,
    pub depth: usize,
    pub winding: i64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumReport {
    /// Zeros found in the region, followed by their negatives (lower sector).
    pub eigenvalues: Vec<Eigenvalue>,
    pub singularities: Vec<Singularity>,
    pub region: Region,
    pub counts: Vec<CellCount>,
    pub order: usize,
    pub tail_norm: TailNorm,
}

impl SpectrumReport {
    pub fn upper(&self) -> impl Iterator<Item = &Eigenvalue> {
        self.eigenvalues.iter().filter(|e| e.sector == Sector::Upper)
    }

    /// Winding number of the whole search region.
    pub fn total_winding(&self) -> i64 {
        self.counts.first().map_or(0, |c| c.winding)
    }
}

struct Sampler<'a> {
    ctx: &'a SolutionContext,
}

impl Sampler<'_> {
    fn eval(&self, z: Complex64) -> Result<Complex64> {
        let v = c12(self.ctx, z)?;
        if v.norm() < CONTOUR_ZERO {
            return Err(Error::ContourThroughZero { at: z });
        }
        Ok(v)
    }

    fn segment_phase(
        &self,
        a: Complex64,
        fa: Complex64,
        b: Complex64,
        fb: Complex64,
        depth: usize,
    ) -> Result<f64> {
        let step = (fb / fa).arg();
        let ratio = fb.norm() / fa.norm();
        let smooth = step.abs() < FRAC_PI_2 && (0.25..=4.0).contains(&ratio);
        if smooth || depth >= MAX_EDGE_DEPTH {
            if !smooth {
                warn!("phase increment unresolved near λ = {a} after {depth} bisections");
            }
            return Ok(step);
        }
        let m = 0.5 * (a + b);
        let fm = self.eval(m)?;
        Ok(self.segment_phase(a, fa, m, fm, depth + 1)? + self.segment_phase(m, fm, b, fb, depth + 1)?)
    }

    fn edge_phase(&self, from: Complex64, to: Complex64) -> Result<f64> {
        let mut total = 0.0;
        let mut prev = from;
        let mut fprev = self.eval(from)?;
        for k in 1..=MIN_EDGE_SAMPLES {
            let z = from + (to - from) * (k as f64 / MIN_EDGE_SAMPLES as f64);
            let fz = self.eval(z)?;
            total += self.segment_phase(prev, fprev, z, fz, 0)?;
            prev = z;
            fprev = fz;
        }
        Ok(total)
    }

    fn winding(&self, region: &Region) -> Result<i64> {
        let c = region.corners();
        let mut total = 0.0;
        for k in 0..4 {
            total += self.edge_phase(c[k], c[(k + 1) % 4])?;
        }
        let turns = total / (2.0 * PI);
        if (turns - turns.round()).abs() > 0.25 {
            warn!("winding {turns:.3} is far from an integer on {region:?}");
        }
        Ok(turns.round() as i64)
    }
}

/// Argument-principle count of zeros minus poles of `C₁₂` inside `region`.
pub fn winding_number(ctx: &SolutionContext, region: &Region) -> Result<i64> {
    Sampler { ctx }.winding(region)
}

fn newton(ctx: &SolutionContext, start: Complex64, tol_root: f64) -> Result<(Complex64, Complex64, Complex64)> {
    let mut z = start;
    for _ in 0..NEWTON_STEPS {
        let (value, slope) = c12_with_derivative(ctx, z)?;
        if value.norm() < tol_root {
            return Ok((z, value, slope));
        }
        if slope.norm() == 0.0 || !slope.norm().is_finite() {
            break;
        }
        let step = value / slope;
        z -= step;
        if !z.re.is_finite() || !z.im.is_finite() || z.im <= 0.0 {
            break;
        }
    }
    Err(Error::NonConvergence { start, iterations: NEWTON_STEPS })
}

/// Deterministic split fractions in `[0.45, 0.55]`.
fn jitter(seed: u64, attempt: usize) -> (f64, f64) {
    if attempt == 0 {
        return (0.5, 0.5);
    }
    let mut s = seed ^ (attempt as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15);
    let mut next = || {
        s ^= s << 13;
        s ^= s >> 7;
        s ^= s << 17;
        (s >> 11) as f64 / (1u64 << 53) as f64
    };
    (0.45 + 0.1 * next(), 0.45 + 0.1 * next())
}

struct Search<'a> {
    ctx: &'a SolutionContext,
    sampler: Sampler<'a>,
    options: SearchOptions,
    counts: Vec<CellCount>,
    roots: Vec<Eigenvalue>,
}

impl Search<'_> {
    fn accept(&mut self, z: Complex64, value: Complex64, slope: Complex64, multiplicity: usize) {
        if self.roots.iter().any(|r| (r.lambda - z).norm() < 1e-8) {
            return;
        }
        if slope.norm() <= SIMPLE_ROOT_DERIVATIVE {
            warn!("zero at λ = {z} is not simple (|C₁₂′| = {:.3e})", slope.norm());
        }
        self.roots.push(Eigenvalue {
            lambda: z,
            sector: Sector::Upper,
            c12_abs: value.norm(),
            derivative_abs: slope.norm(),
            multiplicity,
        });
    }

    fn children(&mut self, cell: &Region, winding: i64) -> Result<Vec<(Region, i64)>> {
        let mut last_err = None;
        for attempt in 0..JITTER_ATTEMPTS {
            let (fx, fy) = jitter(self.options.jitter_seed, attempt);
            let kids = cell.split(fx, fy);
            let counts: Result<Vec<i64>> = kids.iter().map(|k| self.sampler.winding(k)).collect();
            match counts {
                Ok(c) if c.iter().sum::<i64>() == winding => {
                    return Ok(kids.into_iter().zip(c).collect());
                }
                Ok(c) => {
                    debug!("child windings {c:?} do not sum to {winding}; re-splitting");
                    last_err = Some(Error::ContourThroughZero { at: cell.center() });
                }
                Err(e @ Error::ContourThroughZero { .. }) => last_err = Some(e),
                Err(e) => return Err(e),
            }
        }
        Err(last_err.expect("at least one attempt"))
    }

    fn descend(&mut self, cell: Region, winding: i64, depth: usize) -> Result<()> {
        self.counts.push(CellCount { region: cell, depth, winding });
        if winding <= 0 {
            if winding < 0 {
                warn!("negative winding {winding} on {cell:?}: poles inside the region");
            }
            return Ok(());
        }
        if winding == 1 || depth >= self.options.max_depth {
            let slack = 1e-9 * (1.0 + cell.diameter());
            match newton(self.ctx, cell.center(), self.options.tol_root) {
                Ok((z, value, slope)) if cell.contains(z, slack) => {
                    self.accept(z, value, slope, winding as usize);
                    return Ok(());
                }
                Ok(_) | Err(Error::NonConvergence { .. }) | Err(Error::PoleAtLambda { .. })
                    if depth < self.options.max_depth => {}
                Ok(_) => return Err(Error::NonConvergence { start: cell.center(), iterations: NEWTON_STEPS }),
                Err(e) => return Err(e),
            }
        }
        for (kid, w) in self.children(&cell, winding)? {
            self.descend(kid, w, depth + 1)?;
        }
        Ok(())
    }
}

/// Locates the zeros of `C₁₂` in `region` (upper sector) and reports them
/// together with their negatives, which are the lower-sector eigenvalues.
pub fn find_eigenvalues(
    ctx: &SolutionContext,
    region: Region,
    cutoff: usize,
    options: SearchOptions,
) -> Result<SpectrumReport> {
    region.validate()?;
    let mut search = Search {
        ctx,
        sampler: Sampler { ctx },
        options,
        counts: vec![],
        roots: vec![],
    };
    let mut outer = region;
    let mut total = None;
    for attempt in 0..JITTER_ATTEMPTS {
        match search.sampler.winding(&outer) {
            Ok(w) => {
                total = Some(w);
                break;
            }
            Err(Error::ContourThroughZero { at }) => {
                debug!("region boundary passes through a zero near {at}; enlarging");
                let pad = 1e-7 * (attempt as f64 + 1.0) * (1.0 + region.diameter());
                outer = Region {
                    re_min: region.re_min - pad,
                    re_max: region.re_max + pad,
                    im_min: region.im_min,
                    im_max: region.im_max + pad,
                };
            }
            Err(e) => return Err(e),
        }
    }
    let total = total.ok_or(Error::ContourThroughZero { at: region.center() })?;
    search.descend(outer, total, 0)?;

    let mut upper = search.roots;
    upper.sort_by(|a, b| a.lambda.re.total_cmp(&b.lambda.re).then(a.lambda.im.total_cmp(&b.lambda.im)));
    let lower: Vec<Eigenvalue> = upper
        .iter()
        .map(|e| Eigenvalue { lambda: -e.lambda, sector: Sector::Lower, ..*e })
        .collect();
    let mut eigenvalues = upper;
    eigenvalues.extend(lower);

    Ok(SpectrumReport {
        eigenvalues,
        singularities: spectral_singularities(ctx.medium(), cutoff)?,
        region: outer,
        counts: search.counts,
        order: ctx.order(),
        tail_norm: tail_norm(ctx.table()),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::{MediumProfile, Potential};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn ctx(q: Vec<Complex64>, beta: f64, order: usize) -> SolutionContext {
        SolutionContext::new(&Potential::new(q).unwrap(), MediumProfile::new(beta).unwrap(), order).unwrap()
    }

    #[test]
    fn zero_potential_has_no_eigenvalues() {
        let z = ctx(vec![], 2.0, 8);
        let report = find_eigenvalues(&z, Region::default_for(&z), 2, SearchOptions::default()).unwrap();
        assert!(report.eigenvalues.is_empty());
        assert_eq!(report.total_winding(), 0);
        assert_eq!(report.singularities.len(), 4);
    }

    #[test]
    fn region_preconditions() {
        assert!(Region::new(-1.0, 1.0, 0.0, 1.0).is_err());
        assert!(Region::new(1.0, -1.0, 0.1, 1.0).is_err());
        assert!(Region::new(-1.0, 1.0, 1e-3, 1.0).is_ok());
    }

    #[test]
    fn negative_first_harmonic_has_zeros() {
        let s = ctx(vec![c(-4.0, 0.0)], 2.0, 40);
        let region = Region::new(-3.0, 3.0, 0.05, 3.0).unwrap();
        let report = find_eigenvalues(&s, region, 2, SearchOptions::default()).unwrap();
        let upper: Vec<_> = report.upper().collect();
        assert_eq!(upper.len() as i64, report.total_winding());
        assert!(upper.iter().any(|e| (e.lambda - c(-0.990973, 1.064489)).norm() < 1e-5));
        for e in &upper {
            assert!(e.c12_abs < 1e-10);
            assert!(e.derivative_abs > 1e-8);
        }
        assert_eq!(report.eigenvalues.len(), 2 * upper.len());
    }

    #[test]
    fn child_windings_sum_to_parent() {
        let s = ctx(vec![c(-4.0, 0.0)], 2.0, 40);
        let region = Region::new(-3.0, 3.0, 0.05, 3.0).unwrap();
        let parent = winding_number(&s, &region).unwrap();
        let kids: i64 = region.split(0.5, 0.5).iter().map(|k| winding_number(&s, k).unwrap()).sum();
        assert_eq!(parent, kids);
    }
}
