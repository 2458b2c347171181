//! Digital surface models: rasterisation, hole filling and cuboid
//! volumetrics.

mod aggregate;
mod asc;
mod fill;
mod grid;
mod volume;

pub use aggregate::{aggregators, Aggregator, Max, Mean, Min};
pub use asc::{read_asc, write_asc};
pub use fill::fill_holes;
pub use grid::{rasterize_dsm, rasterize_onto, GridSpec, RasterGrid, NODATA};
pub use volume::{volume_area, BaseHeight, VolumeResult};

/// Default DSM cell edge, metres.
pub const DEFAULT_CELL: f64 = 0.05;
/// Default number of square rings searched when filling holes.
pub const DEFAULT_MAX_RING: usize = 3;
/// Default aggregator name.
pub const DEFAULT_AGGREGATOR: &str = "mean";
