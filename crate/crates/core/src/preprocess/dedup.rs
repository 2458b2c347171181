use crate::cloud::PointCloud;
use crate::error::{Error, Result};
use std::collections::HashSet;

/// Drops points sharing a `tolerance`-sized grid cell with an earlier point.
///
/// The grid is anchored at the coordinate origin. Within each occupied cell
/// the first point in input order survives. Returns the kept cloud and the
/// number of removed points.
pub fn deduplicate(cloud: &PointCloud, tolerance: f64) -> Result<(PointCloud, usize)> {
    if !(tolerance > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "deduplication tolerance must be > 0, got {tolerance}"
        )));
    }
    let mut seen = HashSet::with_capacity(cloud.len());
    let kept: Vec<_> = cloud
        .points
        .iter()
        .filter(|p| {
            seen.insert((
                (p.x / tolerance).floor() as i64,
                (p.y / tolerance).floor() as i64,
                (p.z / tolerance).floor() as i64,
            ))
        })
        .copied()
        .collect();
    let removed = cloud.len() - kept.len();
    Ok((cloud.with_points(kept), removed))
}
