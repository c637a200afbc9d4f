//! JSON documents and CSV output.

use std::fmt::Write as _;

use log::warn;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::inverse::{C12Data, InverseResult, SpectralData};
use crate::series::{MediumProfile, Potential, TailNorm, VTable};
use crate::solutions::SolutionContext;
use crate::spectral::{c12, Region, Sector, Singularity, SpectrumReport};

/// Complex number as `{ "re": …, "im": … }`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ComplexDoc {
    pub re: f64,
    pub im: f64,
}

impl From<Complex64> for ComplexDoc {
    fn from(z: Complex64) -> Self {
        ComplexDoc { re: z.re, im: z.im }
    }
}

impl From<ComplexDoc> for Complex64 {
    fn from(z: ComplexDoc) -> Self {
        Complex64::new(z.re, z.im)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IndexedComplex {
    pub n: usize,
    pub re: f64,
    pub im: f64,
}

fn dense_from_indexed(entries: &[IndexedComplex], what: &str) -> Result<Vec<Complex64>> {
    let top = entries.iter().map(|e| e.n).max().unwrap_or(0);
    let mut out = vec![Complex64::new(0.0, 0.0); top];
    let mut seen = vec![false; top];
    for e in entries {
        if e.n == 0 {
            return Err(Error::InvalidInput(format!("{what} index must be at least 1")));
        }
        if std::mem::replace(&mut seen[e.n - 1], true) {
            return Err(Error::InvalidInput(format!("duplicate {what} n = {}", e.n)));
        }
        out[e.n - 1] = Complex64::new(e.re, e.im);
    }
    Ok(out)
}

/// `{ "beta": β, "harmonics": [{ "n", "re", "im" }, …] }`
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProblemDoc {
    pub beta: f64,
    #[serde(default)]
    pub harmonics: Vec<IndexedComplex>,
}

impl ProblemDoc {
    pub fn parse(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::InvalidInput(e.to_string()))
    }

    pub fn potential(&self) -> Result<Potential> {
        Potential::new(dense_from_indexed(&self.harmonics, "harmonic")?)
    }

    pub fn medium(&self) -> Result<MediumProfile> {
        MediumProfile::new(self.beta)
    }

    pub fn from_parts(potential: &Potential, beta: f64) -> Self {
        ProblemDoc {
            beta,
            harmonics: potential
                .harmonics()
                .iter()
                .enumerate()
                .map(|(k, q)| IndexedComplex { n: k + 1, re: q.re, im: q.im })
                .collect(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SampleDoc {
    pub im_lambda: f64,
    pub re: f64,
    pub im: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum C12Doc {
    Asymptote(ComplexDoc),
    Samples(Vec<SampleDoc>),
}

/// `{ "normalizing_numbers": [{ n, re, im }], "c12": { "asymptote": … } | { "samples": … } }`
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralDataDoc {
    pub normalizing_numbers: Vec<IndexedComplex>,
    pub c12: C12Doc,
}

impl SpectralDataDoc {
    pub fn parse(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::InvalidInput(e.to_string()))
    }

    pub fn to_data(&self) -> Result<SpectralData> {
        let diag = dense_from_indexed(&self.normalizing_numbers, "normalizing number")?;
        let c12 = match &self.c12 {
            C12Doc::Asymptote(z) => C12Data::Asymptote((*z).into()),
            C12Doc::Samples(s) => C12Data::Samples(
                s.iter()
                    .map(|s| (Complex64::new(0.0, s.im_lambda), Complex64::new(s.re, s.im)))
                    .collect(),
            ),
        };
        SpectralData::new(diag, c12)
    }

    pub fn from_data(data: &SpectralData) -> Self {
        let normalizing_numbers = data
            .normalizing_numbers()
            .iter()
            .enumerate()
            .map(|(k, v)| IndexedComplex { n: k + 1, re: v.re, im: v.im })
            .collect();
        let c12 = match data.c12() {
            C12Data::Asymptote(z) => C12Doc::Asymptote((*z).into()),
            C12Data::Samples(s) => C12Doc::Samples(
                s.iter()
                    .map(|(l, v)| SampleDoc { im_lambda: l.im, re: v.re, im: v.im })
                    .collect(),
            ),
        };
        SpectralDataDoc { normalizing_numbers, c12 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InverseDiagnostics {
    pub truncation: usize,
    pub c12_limit: ComplexDoc,
    pub plain_fit_beta: Option<f64>,
    pub fit_residual: f64,
    pub correction_steps: usize,
    pub tail_norm: f64,
    pub tail_last_column: f64,
}

/// The problem document of the recovered `(β, q)` plus diagnostics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InverseDoc {
    #[serde(flatten)]
    pub problem: ProblemDoc,
    pub diagnostics: InverseDiagnostics,
}

impl From<&InverseResult> for InverseDoc {
    fn from(r: &InverseResult) -> Self {
        InverseDoc {
            problem: ProblemDoc::from_parts(&r.potential, r.beta),
            diagnostics: InverseDiagnostics {
                truncation: r.vtable.order(),
                c12_limit: r.estimate.limit.into(),
                plain_fit_beta: r.estimate.plain_beta,
                fit_residual: r.estimate.fit_residual,
                correction_steps: r.estimate.correction_steps,
                tail_norm: r.tail_norm.total,
                tail_last_column: r.tail_norm.last_column,
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EigenvalueDoc {
    pub re: f64,
    pub im: f64,
    pub c12_abs: f64,
    pub derivative_abs: f64,
    pub multiplicity: usize,
    pub sector: Sector,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TailNormDoc {
    pub total: f64,
    pub last_column: f64,
    pub resolved: bool,
}

impl From<TailNorm> for TailNormDoc {
    fn from(t: TailNorm) -> Self {
        TailNormDoc { total: t.total, last_column: t.last_column, resolved: t.is_resolved() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WindingDoc {
    pub region: Region,
    pub depth: usize,
    pub winding: i64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumDoc {
    pub eigenvalues: Vec<EigenvalueDoc>,
    pub singularities: Vec<Singularity>,
    pub region: Region,
    #[serde(rename = "A")]
    pub truncation: usize,
    pub tail_norm: TailNormDoc,
    pub windings: Vec<WindingDoc>,
}

impl From<&SpectrumReport> for SpectrumDoc {
    fn from(r: &SpectrumReport) -> Self {
        SpectrumDoc {
            eigenvalues: r
                .eigenvalues
                .iter()
                .map(|e| EigenvalueDoc {
                    re: e.lambda.re,
                    im: e.lambda.im,
                    c12_abs: e.c12_abs,
                    derivative_abs: e.derivative_abs,
                    multiplicity: e.multiplicity,
                    sector: e.sector,
                })
                .collect(),
            singularities: r.singularities.clone(),
            region: r.region,
            truncation: r.order,
            tail_norm: r.tail_norm.into(),
            windings: r
                .counts
                .iter()
                .map(|c| WindingDoc { region: c.region, depth: c.depth, winding: c.winding })
                .collect(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TableEntryDoc {
    pub n: usize,
    pub alpha: usize,
    pub re: f64,
    pub im: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VTableDoc {
    #[serde(rename = "A")]
    pub truncation: usize,
    pub entries: Vec<TableEntryDoc>,
}

impl From<&VTable> for VTableDoc {
    fn from(t: &VTable) -> Self {
        VTableDoc {
            truncation: t.order(),
            entries: t
                .iter()
                .map(|(n, alpha, v)| TableEntryDoc { n, alpha, re: v.re, im: v.im })
                .collect(),
        }
    }
}

/// Rectangular λ-grid with `nx × ny` nodes, corners included.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub region: Region,
    pub nx: usize,
    pub ny: usize,
}

impl GridSpec {
    pub fn new(re_min: f64, re_max: f64, im_min: f64, im_max: f64, nx: usize, ny: usize) -> Result<Self> {
        if nx < 2 || ny < 2 {
            return Err(Error::InvalidInput("grid needs at least 2 steps per axis".into()));
        }
        let finite = [re_min, re_max, im_min, im_max].iter().all(|v| v.is_finite());
        if !finite || re_min >= re_max || im_min >= im_max {
            return Err(Error::InvalidInput("malformed grid bounds".into()));
        }
        Ok(GridSpec { region: Region { re_min, re_max, im_min, im_max }, nx, ny })
    }

    pub fn points(&self) -> impl Iterator<Item = Complex64> + '_ {
        let r = self.region;
        (0..self.ny).flat_map(move |j| {
            let im = r.im_min + (r.im_max - r.im_min) * j as f64 / (self.ny - 1) as f64;
            (0..self.nx).map(move |i| {
                let re = r.re_min + (r.re_max - r.re_min) * i as f64 / (self.nx - 1) as f64;
                Complex64::new(re, im)
            })
        })
    }
}

/// CSV of `C₁₂` over the grid; points where it is undefined are written as `NaN`.
pub fn c12_grid_csv(ctx: &SolutionContext, grid: &GridSpec) -> String {
    let mut out = String::from("re_lambda,im_lambda,re_c12,im_c12\n");
    for z in grid.points() {
        let v = c12(ctx, z).unwrap_or_else(|e| {
            warn!("C12 undefined at {z}: {e}");
            Complex64::new(f64::NAN, f64::NAN)
        });
        writeln!(out, "{:?},{:?},{:?},{:?}", z.re, z.im, v.re, v.im).expect("write to String");
    }
    out
}

pub fn to_json<T: Serialize>(doc: &T) -> String {
    let mut s = serde_json::to_string_pretty(doc).expect("documents serialize");
    s.push('\n');
    s
}
