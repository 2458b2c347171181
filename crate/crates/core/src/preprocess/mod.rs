//! Pre-modelling chain: clean, cut, label and align clouds before any
//! surface is derived from them.

mod crop;
mod dedup;
mod ground;
mod icp;
mod outlier;
mod rigid;

pub use crop::{crop, Region};
pub use dedup::deduplicate;
pub use ground::classify_ground;
pub use icp::{icp_refine, IcpParams};
pub use outlier::{neighbor_mean_distances, remove_outliers, OutlierSplit};
pub use rigid::{
    estimate_rigid, georeference, kabsch, read_pairs, CorrespondencePair, PairResidual,
    RegistrationResult,
};

/// Default deduplication cell edge, metres.
pub const DEFAULT_DEDUP_TOLERANCE: f64 = 0.001;
/// Default neighbour count for statistical outlier removal.
pub const DEFAULT_OUTLIER_K: usize = 8;
/// Default standard-deviation multiplier for outlier removal.
pub const DEFAULT_OUTLIER_ALPHA: f64 = 3.0;
/// Default ground-classification cell, metres.
pub const DEFAULT_GROUND_CELL: f64 = 0.5;
/// Default height band above the cell minimum counted as ground, metres.
pub const DEFAULT_GROUND_HEIGHT: f64 = 0.15;
