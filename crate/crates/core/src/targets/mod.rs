//! Spherical target extraction and the repeated-scan accuracy protocol.

mod report;
mod sphere;

pub use report::{
    accuracy_report_json, distance_stats, distance_stats_from_table, read_accuracy_report,
    read_distances, read_observations, report_to_json, AccuracyReport, PairDistance, Verdict,
};
pub use sphere::{fit_sphere, SphereFit};

use crate::cloud::{KdTree, PointCloud};
use crate::error::{Error, Result};
use nalgebra::Vector3;

/// Minimum points inside the search sphere for a target to be fitted.
pub const MIN_TARGET_POINTS: usize = 10;
/// Default verdict threshold, millimetres.
pub const DEFAULT_TOLERANCE_MM: f64 = 4.0;

/// Centre of one target as seen from one scan.
#[derive(Debug, Clone, PartialEq)]
pub struct TargetObservation {
    pub target_id: String,
    pub scan_id: String,
    pub center: Vector3<f64>,
    pub fit_rms: f64,
    /// Zero when the centre was supplied rather than fitted.
    pub point_count: usize,
}

impl TargetObservation {
    pub fn new(scan_id: &str, target_id: &str, center: Vector3<f64>) -> TargetObservation {
        TargetObservation {
            target_id: target_id.to_string(),
            scan_id: scan_id.to_string(),
            center,
            fit_rms: 0.0,
            point_count: 0,
        }
    }
}

/// Fits a sphere of known radius to the points within `search_radius`
/// of `approx_center`. The scan id is the cloud's `source`.
pub fn extract_target(
    cloud: &PointCloud,
    target_id: &str,
    approx_center: Vector3<f64>,
    search_radius: f64,
    sphere_radius: f64,
) -> Result<TargetObservation> {
    if !(sphere_radius > 0.0 && search_radius > sphere_radius) {
        return Err(Error::InvalidArgument(format!(
            "search radius ({search_radius}) must exceed sphere radius ({sphere_radius}) > 0"
        )));
    }
    let tree = KdTree::build(cloud);
    let hits = tree.radius_query(&approx_center, search_radius);
    if hits.len() < MIN_TARGET_POINTS {
        return Err(Error::TargetNotFound(format!(
            "{target_id}: {} points within {search_radius} m of ({}, {}, {}), need ≥ {MIN_TARGET_POINTS}",
            hits.len(),
            approx_center.x,
            approx_center.y,
            approx_center.z
        )));
    }
    let pts: Vec<Vector3<f64>> = hits.iter().map(|h| cloud.points[h.index].position()).collect();
    let fit = fit_sphere(&pts, Some(sphere_radius))?;
    Ok(TargetObservation {
        target_id: target_id.to_string(),
        scan_id: cloud.source.clone(),
        center: fit.center,
        fit_rms: fit.fit_rms,
        point_count: pts.len(),
    })
}
