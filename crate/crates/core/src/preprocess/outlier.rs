use crate::cloud::{KdTree, PointCloud};
use crate::error::{Error, Result};
use crate::numeric;
use rayon::prelude::*;

/// Result of statistical outlier removal.
#[derive(Debug, Clone)]
pub struct OutlierSplit {
    pub kept: PointCloud,
    pub removed: PointCloud,
    /// Input indices of the removed points, ascending.
    pub removed_indices: Vec<usize>,
    /// Mean neighbour distance above which a point was removed.
    pub threshold: f64,
}

/// Mean distance from every point to its `k` nearest other points.
pub fn neighbor_mean_distances(cloud: &PointCloud, k: usize) -> Result<Vec<f64>> {
    if k == 0 {
        return Err(Error::InvalidArgument("neighbour count k must be ≥ 1".into()));
    }
    if cloud.len() <= k {
        return Err(Error::InsufficientPoints(format!(
            "insufficient points for k-neighborhood: {} points, k = {k}",
            cloud.len()
        )));
    }
    let tree = KdTree::build(cloud);
    Ok((0..cloud.len())
        .into_par_iter()
        .map(|i| {
            let mut hits = tree.knn(&cloud.points[i], k + 1);
            match hits.iter().position(|h| h.index == i) {
                Some(at) => {
                    hits.remove(at);
                }
                None => {
                    hits.pop();
                }
            }
            hits.iter().map(|h| h.distance).sum::<f64>() / k as f64
        })
        .collect())
}

/// Removes points whose mean `k`-neighbour distance exceeds
/// `mean + alpha · std` of that statistic over the whole cloud.
///
/// The standard deviation is the population one. Kept and removed points
/// keep their input order.
pub fn remove_outliers(cloud: &PointCloud, k: usize, alpha: f64) -> Result<OutlierSplit> {
    if !(alpha > 0.0) {
        return Err(Error::InvalidArgument(format!("alpha must be > 0, got {alpha}")));
    }
    let d = neighbor_mean_distances(cloud, k)?;
    let n = d.len() as f64;
    let mean = numeric::sum(d.iter().copied()) / n;
    let var = numeric::sum(d.iter().map(|v| (v - mean) * (v - mean))) / n;
    let threshold = mean + alpha * var.sqrt();

    let mut kept = Vec::with_capacity(cloud.len());
    let mut removed = Vec::new();
    let mut removed_indices = Vec::new();
    for (i, (p, di)) in cloud.points.iter().zip(&d).enumerate() {
        if *di > threshold {
            removed.push(*p);
            removed_indices.push(i);
        } else {
            kept.push(*p);
        }
    }
    Ok(OutlierSplit {
        kept: cloud.with_points(kept),
        removed: cloud.with_points(removed),
        removed_indices,
        threshold,
    })
}
