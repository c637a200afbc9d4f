use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::series::MediumProfile;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Family {
    /// `n / (2β)`
    #[serde(rename = "n/(2beta)")]
    Scaled,
    /// `n / 2`
    #[serde(rename = "n/2")]
    Half,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Singularity {
    pub value: f64,
    pub family: Family,
    pub n: usize,
}

/// `{n/2} ∪ {n/(2β)}` for `n = 1..=cutoff`, ascending. Equal abscissae from
/// the two families are both kept, the `n/(2β)` entry first.
pub fn spectral_singularities(medium: MediumProfile, cutoff: usize) -> Result<Vec<Singularity>> {
    if cutoff == 0 {
        return Err(Error::InvalidInput("cutoff must be at least 1".into()));
    }
    let beta = medium.beta();
    let mut out: Vec<Singularity> = (1..=cutoff)
        .flat_map(|n| {
            [
                Singularity { value: n as f64 / 2.0, family: Family::Half, n },
                Singularity { value: n as f64 / (2.0 * beta), family: Family::Scaled, n },
            ]
        })
        .collect();
    out.sort_by(|a, b| a.value.total_cmp(&b.value).then(a.family.cmp(&b.family)));
    Ok(out)
}
