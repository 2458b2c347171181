use crate::cloud::{Classification, PointCloud};
use crate::error::{Error, Result};
use std::collections::HashMap;

/// Two-class ground labelling by per-cell minimum.
///
/// Points within `height` above the lowest point of their `cell`×`cell`
/// xy column are ground, everything else is non-ground. Order and
/// coordinates are untouched.
pub fn classify_ground(cloud: &PointCloud, cell: f64, height: f64) -> Result<PointCloud> {
    if !(cell > 0.0) || !(height > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "ground classification needs cell > 0 and h_thresh > 0 (got {cell}, {height})"
        )));
    }
    let Some((lo, _)) = cloud.bounds() else {
        return Ok(cloud.clone());
    };
    let key = |x: f64, y: f64| {
        (
            ((x - lo.x) / cell).floor() as i64,
            ((y - lo.y) / cell).floor() as i64,
        )
    };
    let mut floor: HashMap<(i64, i64), f64> = HashMap::new();
    for p in &cloud.points {
        floor
            .entry(key(p.x, p.y))
            .and_modify(|z| *z = z.min(p.z))
            .or_insert(p.z);
    }
    let points = cloud
        .points
        .iter()
        .map(|p| {
            let mut q = *p;
            q.class = if p.z - floor[&key(p.x, p.y)] <= height {
                Classification::Ground
            } else {
                Classification::NonGround
            };
            q
        })
        .collect();
    Ok(cloud.with_points(points))
}
