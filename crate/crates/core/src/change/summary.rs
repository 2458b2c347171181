use super::ChangeMap;
use crate::error::{Error, Result};
use crate::numeric::CompensatedSum;
use crate::raster::NODATA;
use serde::{Deserialize, Serialize};

/// Count of cells with Δz in `[lower, upper)`; a missing bound is infinite.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BandCount {
    pub lower_m: Option<f64>,
    pub upper_m: Option<f64>,
    pub count: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChangeSummary {
    pub mean_m: f64,
    pub rms_m: f64,
    pub max_abs_m: f64,
    /// Share of valid cells with |Δz| ≤ `tolerance_m`.
    pub fraction_within: f64,
    pub tolerance_m: f64,
    pub valid_cells: usize,
    /// Open-ended tails first and last, so counts sum to `valid_cells`.
    pub bands: Vec<BandCount>,
}

/// Statistics over the valid cells of a change map.
pub fn summarize(map: &ChangeMap, tolerance: f64, thresholds: &[f64]) -> Result<ChangeSummary> {
    if !(tolerance >= 0.0) {
        return Err(Error::InvalidArgument(format!(
            "tolerance must be ≥ 0, got {tolerance}"
        )));
    }
    if thresholds.iter().any(|t| !t.is_finite()) || thresholds.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidArgument(
            "band thresholds must be finite and strictly increasing".into(),
        ));
    }
    let valid: Vec<f64> = map
        .grid
        .values()
        .iter()
        .copied()
        .filter(|&v| v != NODATA)
        .collect();
    if valid.is_empty() {
        return Err(Error::NoValidCells("change map has no valid cells".into()));
    }
    let n = valid.len() as f64;
    let mean = valid.iter().copied().collect::<CompensatedSum>().value() / n;
    let mean_sq = valid.iter().map(|v| v * v).collect::<CompensatedSum>().value() / n;
    let max_abs = valid.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let within = valid.iter().filter(|v| v.abs() <= tolerance).count();

    let mut bands: Vec<BandCount> = Vec::with_capacity(thresholds.len() + 1);
    let mut lower = None;
    for &t in thresholds.iter().chain(std::iter::once(&f64::INFINITY)) {
        let upper = t.is_finite().then_some(t);
        let count = valid
            .iter()
            .filter(|&&v| lower.map_or(true, |l| v >= l) && upper.map_or(true, |u| v < u))
            .count();
        bands.push(BandCount {
            lower_m: lower,
            upper_m: upper,
            count,
        });
        lower = upper;
    }

    Ok(ChangeSummary {
        mean_m: mean,
        rms_m: mean_sq.sqrt(),
        max_abs_m: max_abs,
        fraction_within: within as f64 / n,
        tolerance_m: tolerance,
        valid_cells: valid.len(),
        bands,
    })
}
