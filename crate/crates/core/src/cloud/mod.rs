//! Point-cloud data model shared by every workflow.

mod index;
mod io;
mod transform;

pub use index::{KdTree, Neighbor};
pub use io::{read_cloud, write_cloud, CloudFormat};
pub use transform::{apply_transform, RigidTransform};

use crate::error::{Error, Result};
use crate::numeric;
use nalgebra::Vector3;
use rayon::prelude::*;
use std::fmt;

/// Per-point class codes, LAS-compatible.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, PartialOrd, Ord)]
pub enum Classification {
    #[default]
    Unassigned,
    NonGround,
    Ground,
    Target,
    Noise,
}

impl Classification {
    pub fn code(self) -> u8 {
        match self {
            Classification::Unassigned => 0,
            Classification::NonGround => 1,
            Classification::Ground => 2,
            Classification::Target => 64,
            Classification::Noise => 65,
        }
    }

    pub fn from_code(code: u8) -> Option<Classification> {
        match code {
            0 => Some(Classification::Unassigned),
            1 => Some(Classification::NonGround),
            2 => Some(Classification::Ground),
            64 => Some(Classification::Target),
            65 => Some(Classification::Noise),
            _ => None,
        }
    }
}

/// A single laser return.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Point3 {
    pub x: f64,
    pub y: f64,
    pub z: f64,
    /// Normalised return strength in `[0, 1]`.
    pub intensity: Option<f32>,
    pub color: Option<[u8; 3]>,
    pub class: Classification,
}

impl Point3 {
    pub fn new(x: f64, y: f64, z: f64) -> Point3 {
        Point3 {
            x,
            y,
            z,
            ..Point3::default()
        }
    }

    pub fn position(&self) -> Vector3<f64> {
        Vector3::new(self.x, self.y, self.z)
    }

    /// Copy of this point moved to `p`, keeping its attributes.
    pub fn with_position(&self, p: &Vector3<f64>) -> Point3 {
        Point3 {
            x: p.x,
            y: p.y,
            z: p.z,
            ..*self
        }
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }

    pub fn distance_squared(&self, other: &Point3) -> f64 {
        let dx = self.x - other.x;
        let dy = self.y - other.y;
        let dz = self.z - other.z;
        dx * dx + dy * dy + dz * dz
    }

    pub fn distance(&self, other: &Point3) -> f64 {
        self.distance_squared(other).sqrt()
    }
}

impl From<Vector3<f64>> for Point3 {
    fn from(v: Vector3<f64>) -> Point3 {
        Point3::new(v.x, v.y, v.z)
    }
}

/// Coordinate frame a cloud is expressed in.
///
/// Frames are labels only; nothing is reprojected.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Frame {
    /// Scanner-own frame of one setup.
    Local(String),
    /// An earth-fixed frame identified by CRS name.
    Georeferenced(String),
}

impl Frame {
    /// Compact tag form, `local:<id>` or `geo:<crs>`.
    pub fn tag(&self) -> String {
        match self {
            Frame::Local(id) => format!("local:{id}"),
            Frame::Georeferenced(crs) => format!("geo:{crs}"),
        }
    }

    pub fn from_tag(tag: &str) -> Option<Frame> {
        if let Some(id) = tag.strip_prefix("local:") {
            Some(Frame::Local(id.to_string()))
        } else {
            tag.strip_prefix("geo:")
                .map(|crs| Frame::Georeferenced(crs.to_string()))
        }
    }
}

impl Default for Frame {
    fn default() -> Frame {
        Frame::Local("scan".to_string())
    }
}

impl fmt::Display for Frame {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.tag())
    }
}

/// An ordered set of points sharing one frame.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct PointCloud {
    pub points: Vec<Point3>,
    pub frame: Frame,
    /// Acquisition time, Unix seconds UTC.
    pub epoch: Option<i64>,
    pub source: String,
}

impl PointCloud {
    pub fn new(points: Vec<Point3>) -> PointCloud {
        PointCloud {
            points,
            ..PointCloud::default()
        }
    }

    pub fn from_xyz(coords: impl IntoIterator<Item = (f64, f64, f64)>) -> PointCloud {
        PointCloud::new(
            coords
                .into_iter()
                .map(|(x, y, z)| Point3::new(x, y, z))
                .collect(),
        )
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Same metadata, different points.
    pub fn with_points(&self, points: Vec<Point3>) -> PointCloud {
        PointCloud {
            points,
            frame: self.frame.clone(),
            epoch: self.epoch,
            source: self.source.clone(),
        }
    }

    /// Axis-aligned bounds as `(min, max)`, `None` for an empty cloud.
    pub fn bounds(&self) -> Option<(Vector3<f64>, Vector3<f64>)> {
        let first = self.points.first()?.position();
        Some(self.points.iter().fold((first, first), |(lo, hi), p| {
            let v = p.position();
            (lo.inf(&v), hi.sup(&v))
        }))
    }

    pub fn positions(&self) -> Vec<Vector3<f64>> {
        self.points.iter().map(Point3::position).collect()
    }
}

/// Mean distance from each point to its nearest other point.
pub fn mean_nn_spacing(cloud: &PointCloud) -> Result<f64> {
    if cloud.len() < 2 {
        return Err(Error::InsufficientPoints(format!(
            "mean spacing needs at least 2 points, cloud has {}",
            cloud.len()
        )));
    }
    let tree = KdTree::build(cloud);
    let nearest: Vec<f64> = (0..cloud.len())
        .into_par_iter()
        .map(|i| {
            tree.knn(&cloud.points[i], 2)
                .into_iter()
                .find(|n| n.index != i)
                .map(|n| n.distance)
                .expect("cloud has at least two points")
        })
        .collect();
    Ok(numeric::sum(nearest) / cloud.len() as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn class_codes_round_trip() {
        for code in 0..=255u8 {
            if let Some(c) = Classification::from_code(code) {
                assert_eq!(c.code(), code);
            }
        }
        assert_eq!(Classification::from_code(2), Some(Classification::Ground));
        assert_eq!(Classification::from_code(3), None);
    }

    #[test]
    fn frame_tags() {
        let f = Frame::Georeferenced("EPSG:28356".into());
        assert_eq!(f.tag(), "geo:EPSG:28356");
        assert_eq!(Frame::from_tag(&f.tag()), Some(f));
        assert_eq!(Frame::from_tag("bogus"), None);
    }

    #[test]
    fn spacing_of_two_points() {
        let c = PointCloud::from_xyz([(0.0, 0.0, 0.0), (1.0, 0.0, 0.0)]);
        assert_eq!(mean_nn_spacing(&c).unwrap(), 1.0);
    }

    #[test]
    fn spacing_of_4mm_grid() {
        let s = 0.004;
        let c = PointCloud::from_xyz(
            (0..50).flat_map(|i| (0..50).map(move |j| (i as f64 * s, j as f64 * s, 0.0))),
        );
        assert!((mean_nn_spacing(&c).unwrap() - s).abs() < 1e-12);
    }

    #[test]
    fn spacing_needs_two_points() {
        let c = PointCloud::from_xyz([(0.0, 0.0, 0.0)]);
        let err = mean_nn_spacing(&c).unwrap_err();
        assert!(err.to_string().contains("insufficient points"));
    }

    #[test]
    fn bounds_of_empty_cloud() {
        assert!(PointCloud::default().bounds().is_none());
    }
}
