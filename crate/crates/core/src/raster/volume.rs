use super::grid::{RasterGrid, NODATA};
use crate::error::{Error, Result};
use crate::numeric::CompensatedSum;
use std::str::FromStr;

/// Reference surface the stockpile stands on.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BaseHeight {
    /// Lowest filled cell of the grid.
    Lowest,
    /// Operator-given height, metres.
    Explicit(f64),
}

impl FromStr for BaseHeight {
    type Err = Error;

    fn from_str(s: &str) -> Result<BaseHeight> {
        if s.eq_ignore_ascii_case("lowest") {
            return Ok(BaseHeight::Lowest);
        }
        s.parse::<f64>()
            .ok()
            .filter(|h| h.is_finite())
            .map(BaseHeight::Explicit)
            .ok_or_else(|| {
                Error::InvalidArgument(format!("base must be 'lowest' or a height, got '{s}'"))
            })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VolumeResult {
    /// Cubic metres above the base.
    pub volume: f64,
    /// Planimetric footprint of cells above the base, square metres.
    pub area: f64,
    pub base_height: f64,
    pub filled_cells: usize,
    pub interpolated_cells: usize,
}

/// Sums one cuboid per filled cell: footprint `cell²`, height
/// `max(value − base, 0)`.
///
/// Summation runs row-major with compensation, so the result does not
/// depend on thread count.
pub fn volume_area(grid: &RasterGrid, base: BaseHeight) -> Result<VolumeResult> {
    let filled = || grid.values().iter().copied().filter(|&v| v != NODATA);
    let filled_cells = filled().count();
    if filled_cells == 0 {
        return Err(Error::NoValidCells(
            "volume needs at least one filled cell; grid is all nodata".into(),
        ));
    }
    let base_height = match base {
        BaseHeight::Lowest => filled().fold(f64::INFINITY, f64::min),
        BaseHeight::Explicit(h) => h,
    };
    let mut heights = CompensatedSum::new();
    let mut above = 0usize;
    for v in filled() {
        let h = v - base_height;
        if h > 0.0 {
            heights.add(h);
            above += 1;
        }
    }
    let cell_area = grid.cell() * grid.cell();
    Ok(VolumeResult {
        volume: heights.value() * cell_area,
        area: above as f64 * cell_area,
        base_height,
        filled_cells,
        interpolated_cells: grid.interpolated_count(),
    })
}
