//! Terrestrial laser-scan survey toolkit.
//!
//! The crate is organised by workflow:
//!
//! - [`cloud`]: point-cloud model, rigid transforms, spatial index, file I/O
//! - [`preprocess`]: deduplication, outlier removal, cropping, ground
//!   classification, rigid registration, georeferencing and ICP
//! - [`raster`]: DSM rasterisation, hole filling, stockpile volume and area
//! - [`change`]: two-epoch vertical-distance maps, statistics and heatmaps
//! - [`tin`]: 2.5D Delaunay triangulation, interpolation and OBJ export
//! - [`targets`]: sphere-target fitting and repeated-distance accuracy reports
//!
//! Interchangeable strategies (DSM aggregators, colour ramps) live in
//! name-keyed [`registry::Registry`] instances so front ends can select them
//! at runtime.

pub mod change;
pub mod cloud;
pub mod error;
pub mod numeric;
pub mod preprocess;
pub mod raster;
pub mod registry;
pub mod targets;
pub mod tin;

pub use cloud::{Classification, Frame, Point3, PointCloud, RigidTransform};
pub use error::{Error, Result};
