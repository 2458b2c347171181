//! Two-epoch deformation monitoring by DSM differencing.

mod heatmap;
mod ramp;
mod summary;

pub use heatmap::{export_heatmap, legend_path, read_ppm, PpmImage};
pub use ramp::{ramps, BlueWhiteRed, ColorRamp, Grayscale, NODATA_COLOR};
pub use summary::{summarize, BandCount, ChangeSummary};

use crate::cloud::PointCloud;
use crate::error::{Error, Result};
use crate::raster::{rasterize_onto, GridSpec, Mean, RasterGrid, NODATA};

/// Default differencing cell, metres.
pub const DEFAULT_CELL: f64 = 0.05;
/// Default heatmap half-range, metres.
pub const DEFAULT_RANGE: f64 = 0.02;
/// Default ramp name.
pub const DEFAULT_RAMP: &str = "blue-white-red";

/// Per-cell `Δz = epoch_b − epoch_a`, nodata where either epoch is empty.
#[derive(Debug, Clone, PartialEq)]
pub struct ChangeMap {
    pub grid: RasterGrid,
    pub epoch_a_id: String,
    pub epoch_b_id: String,
}

fn epoch_id(cloud: &PointCloud, fallback: &str) -> String {
    if cloud.source.is_empty() {
        fallback.to_string()
    } else {
        cloud.source.clone()
    }
}

/// Rasterises both epochs (cell mean) onto one grid spanning the overlap
/// of their xy bounding boxes and differences them.
///
/// Both clouds must already be registered into the same frame.
pub fn vertical_distance(
    epoch_a: &PointCloud,
    epoch_b: &PointCloud,
    cell: f64,
) -> Result<ChangeMap> {
    if !(cell > 0.0) {
        return Err(Error::InvalidArgument(format!("cell size must be > 0, got {cell}")));
    }
    if epoch_a.frame != epoch_b.frame {
        return Err(Error::InvalidArgument(format!(
            "epochs are in different frames ({} vs {}); register them first",
            epoch_a.frame, epoch_b.frame
        )));
    }
    let (lo_a, hi_a) = epoch_a
        .bounds()
        .ok_or_else(|| Error::InsufficientPoints("epoch A is empty".into()))?;
    let (lo_b, hi_b) = epoch_b
        .bounds()
        .ok_or_else(|| Error::InsufficientPoints("epoch B is empty".into()))?;
    let lo = lo_a.sup(&lo_b);
    let hi = hi_a.inf(&hi_b);
    if lo.x > hi.x || lo.y > hi.y {
        return Err(Error::NoOverlap);
    }
    let spec = GridSpec::covering(lo.x, lo.y, hi.x, hi.y, cell);
    let a = rasterize_onto(epoch_a, &spec, &Mean)?;
    let b = rasterize_onto(epoch_b, &spec, &Mean)?;
    let delta = a
        .values()
        .iter()
        .zip(b.values())
        .map(|(&za, &zb)| {
            if za == NODATA || zb == NODATA {
                NODATA
            } else {
                zb - za
            }
        })
        .collect();
    Ok(ChangeMap {
        grid: RasterGrid::new(spec, delta)?,
        epoch_a_id: epoch_id(epoch_a, "epoch_a"),
        epoch_b_id: epoch_id(epoch_b, "epoch_b"),
    })
}
