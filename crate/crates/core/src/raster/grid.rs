use super::aggregate::Aggregator;
use crate::cloud::PointCloud;
use crate::error::{Error, Result};
use rayon::prelude::*;

/// Sentinel stored in cells without a measurement.
pub const NODATA: f64 = -9999.0;

/// Placement of a regular grid. Cell `(r, c)` covers
/// `x ∈ [x0 + c·cell, x0 + (c+1)·cell)`, `y ∈ [y0 + r·cell, y0 + (r+1)·cell)`;
/// row 0 is the southernmost.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub origin_x: f64,
    pub origin_y: f64,
    pub cell: f64,
    pub ncols: usize,
    pub nrows: usize,
}

impl GridSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.cell > 0.0) || !self.cell.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "cell size must be > 0, got {}",
                self.cell
            )));
        }
        if self.ncols == 0 || self.nrows == 0 {
            return Err(Error::InvalidArgument("grid needs ≥ 1 row and column".into()));
        }
        if !self.origin_x.is_finite() || !self.origin_y.is_finite() {
            return Err(Error::InvalidArgument("grid origin is not finite".into()));
        }
        Ok(())
    }

    /// Grid whose lower-left corner is `(min_x, min_y)` and which covers
    /// `max` with whole cells.
    pub fn covering(min_x: f64, min_y: f64, max_x: f64, max_y: f64, cell: f64) -> GridSpec {
        GridSpec {
            origin_x: min_x,
            origin_y: min_y,
            cell,
            ncols: ((max_x - min_x) / cell).floor() as usize + 1,
            nrows: ((max_y - min_y) / cell).floor() as usize + 1,
        }
    }

    pub fn len(&self) -> usize {
        self.ncols * self.nrows
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Row-major cell index of `(x, y)`, `None` outside the grid.
    pub fn cell_of(&self, x: f64, y: f64) -> Option<usize> {
        let c = ((x - self.origin_x) / self.cell).floor();
        let r = ((y - self.origin_y) / self.cell).floor();
        if c < 0.0 || r < 0.0 || c >= self.ncols as f64 || r >= self.nrows as f64 {
            return None;
        }
        Some(r as usize * self.ncols + c as usize)
    }

    pub fn cell_center(&self, row: usize, col: usize) -> (f64, f64) {
        (
            self.origin_x + (col as f64 + 0.5) * self.cell,
            self.origin_y + (row as f64 + 0.5) * self.cell,
        )
    }
}

/// A height grid with a nodata sentinel.
///
/// Cells filled by interpolation are flagged so later passes never treat
/// them as measurements.
#[derive(Debug, Clone, PartialEq)]
pub struct RasterGrid {
    spec: GridSpec,
    values: Vec<f64>,
    interpolated: Vec<bool>,
}

impl RasterGrid {
    /// Builds a grid from row-major values (row 0 south).
    pub fn new(spec: GridSpec, values: Vec<f64>) -> Result<RasterGrid> {
        spec.validate()?;
        if values.len() != spec.len() {
            return Err(Error::InvalidArgument(format!(
                "grid of {}×{} needs {} values, got {}",
                spec.nrows,
                spec.ncols,
                spec.len(),
                values.len()
            )));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "grid value at index {i} is not finite"
            )));
        }
        Ok(RasterGrid {
            interpolated: vec![false; values.len()],
            spec,
            values,
        })
    }

    pub fn filled(spec: GridSpec, value: f64) -> Result<RasterGrid> {
        RasterGrid::new(spec, vec![value; spec.len()])
    }

    pub(crate) fn with_interpolated(mut self, interpolated: Vec<bool>) -> RasterGrid {
        debug_assert_eq!(interpolated.len(), self.values.len());
        self.interpolated = interpolated;
        self
    }

    pub fn spec(&self) -> &GridSpec {
        &self.spec
    }

    pub fn ncols(&self) -> usize {
        self.spec.ncols
    }

    pub fn nrows(&self) -> usize {
        self.spec.nrows
    }

    pub fn cell(&self) -> f64 {
        self.spec.cell
    }

    /// Raw row-major values, nodata included.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn raw(&self, row: usize, col: usize) -> f64 {
        self.values[row * self.spec.ncols + col]
    }

    /// Cell value, `None` for nodata.
    pub fn get(&self, row: usize, col: usize) -> Option<f64> {
        let v = self.raw(row, col);
        (v != NODATA).then_some(v)
    }

    pub fn is_interpolated(&self, row: usize, col: usize) -> bool {
        self.interpolated[row * self.spec.ncols + col]
    }

    pub(crate) fn interpolated_mask(&self) -> &[bool] {
        &self.interpolated
    }

    pub fn filled_count(&self) -> usize {
        self.values.iter().filter(|&&v| v != NODATA).count()
    }

    pub fn nodata_count(&self) -> usize {
        self.values.len() - self.filled_count()
    }

    pub fn interpolated_count(&self) -> usize {
        self.interpolated.iter().filter(|&&b| b).count()
    }

    /// Cellwise map over valid cells; nodata stays nodata.
    pub fn map_valid(&self, f: impl Fn(f64) -> f64) -> RasterGrid {
        RasterGrid {
            spec: self.spec,
            values: self
                .values
                .iter()
                .map(|&v| if v == NODATA { NODATA } else { f(v) })
                .collect(),
            interpolated: self.interpolated.clone(),
        }
    }
}

/// Bins `cloud` onto `spec` and reduces each cell with `aggregator`.
/// Points outside the grid are ignored; empty cells are nodata.
pub fn rasterize_onto(
    cloud: &PointCloud,
    spec: &GridSpec,
    aggregator: &dyn Aggregator,
) -> Result<RasterGrid> {
    spec.validate()?;
    let cells: Vec<Option<usize>> = cloud
        .points
        .par_iter()
        .map(|p| spec.cell_of(p.x, p.y))
        .collect();

    // counting sort keeps input order inside every cell
    let mut start = vec![0usize; spec.len() + 1];
    for c in cells.iter().flatten() {
        start[c + 1] += 1;
    }
    for i in 0..spec.len() {
        start[i + 1] += start[i];
    }
    let mut cursor = start.clone();
    let mut heights = vec![0.0; start[spec.len()]];
    for (p, c) in cloud.points.iter().zip(&cells) {
        if let Some(c) = *c {
            heights[cursor[c]] = p.z;
            cursor[c] += 1;
        }
    }

    let values: Vec<f64> = (0..spec.len())
        .into_par_iter()
        .map(|c| {
            let zs = &heights[start[c]..start[c + 1]];
            if zs.is_empty() {
                NODATA
            } else {
                aggregator.reduce(zs)
            }
        })
        .collect();
    RasterGrid::new(*spec, values)
}

/// DSM over the xy bounding box of `cloud`, expanded to whole cells.
pub fn rasterize_dsm(
    cloud: &PointCloud,
    cell: f64,
    aggregator: &dyn Aggregator,
) -> Result<RasterGrid> {
    let (lo, hi) = cloud.bounds().ok_or_else(|| {
        Error::InsufficientPoints("cannot rasterise an empty cloud".into())
    })?;
    if !(cell > 0.0) {
        return Err(Error::InvalidArgument(format!("cell size must be > 0, got {cell}")));
    }
    rasterize_onto(cloud, &GridSpec::covering(lo.x, lo.y, hi.x, hi.y, cell), aggregator)
}
