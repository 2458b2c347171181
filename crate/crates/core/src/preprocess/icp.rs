use super::rigid::{kabsch, RegistrationResult};
use crate::cloud::{mean_nn_spacing, KdTree, PointCloud, RigidTransform};
use crate::error::{Error, Result};
use nalgebra::Vector3;
use rayon::prelude::*;

#[derive(Debug, Clone, PartialEq)]
pub struct IcpParams {
    pub max_iterations: usize,
    /// Stop once an iteration lowers the RMS by less than this, metres.
    pub convergence_tolerance: f64,
    /// Correspondences longer than this are ignored. `None` keeps all.
    pub max_correspondence_distance: Option<f64>,
}

impl Default for IcpParams {
    fn default() -> IcpParams {
        IcpParams {
            max_iterations: 50,
            convergence_tolerance: 1e-6,
            max_correspondence_distance: None,
        }
    }
}

impl IcpParams {
    /// Defaults with the correspondence cut-off at five times the
    /// destination's mean point spacing.
    pub fn for_destination(destination: &PointCloud) -> Result<IcpParams> {
        Ok(IcpParams {
            max_correspondence_distance: Some(5.0 * mean_nn_spacing(destination)?),
            ..IcpParams::default()
        })
    }
}

struct Matches {
    src: Vec<Vector3<f64>>,
    dst: Vec<Vector3<f64>>,
    /// RMS over accepted matches, or over all matches when none pass the cut-off.
    rms: f64,
}

fn correspond(
    source: &[Vector3<f64>],
    tree: &KdTree,
    destination: &[Vector3<f64>],
    t: &RigidTransform,
    cutoff: Option<f64>,
) -> Matches {
    let nearest: Vec<(Vector3<f64>, usize, f64)> = source
        .par_iter()
        .map(|s| {
            let moved = t.apply(s);
            let hit = tree.knn(&moved, 1)[0];
            (moved, hit.index, hit.distance)
        })
        .collect();
    let mut src = Vec::with_capacity(nearest.len());
    let mut dst = Vec::with_capacity(nearest.len());
    let mut sq = 0.0;
    let mut all_sq = 0.0;
    for (moved, idx, d) in &nearest {
        all_sq += d * d;
        if cutoff.map_or(true, |c| *d <= c) {
            src.push(*moved);
            dst.push(destination[*idx]);
            sq += d * d;
        }
    }
    let rms = if src.is_empty() {
        (all_sq / nearest.len() as f64).sqrt()
    } else {
        (sq / src.len() as f64).sqrt()
    };
    Matches { src, dst, rms }
}

/// Point-to-point ICP starting from `initial`.
///
/// Each iteration matches every transformed source point to its nearest
/// destination point, solves the closed-form rigid update, and keeps it
/// only if the RMS does not grow. The reported RMS is therefore never
/// above the starting one and the history is non-increasing.
pub fn icp_refine(
    source: &PointCloud,
    destination: &PointCloud,
    initial: &RigidTransform,
    params: &IcpParams,
) -> Result<RegistrationResult> {
    if source.is_empty() || destination.is_empty() {
        return Err(Error::InsufficientPoints(
            "ICP needs non-empty source and destination clouds".into(),
        ));
    }
    let tree = KdTree::build(destination);
    let src = source.positions();
    let dst = destination.positions();
    let cutoff = params.max_correspondence_distance;

    let mut current = *initial;
    let mut matches = correspond(&src, &tree, &dst, &current, cutoff);
    let mut history = vec![matches.rms];
    let mut iterations = 0;
    let mut converged = false;

    while iterations < params.max_iterations {
        if matches.src.len() < 3 {
            break;
        }
        let step = match kabsch(&matches.src, &matches.dst) {
            Ok(step) => step,
            Err(_) => break,
        };
        let candidate = step.compose(&current);
        let next = correspond(&src, &tree, &dst, &candidate, cutoff);
        iterations += 1;
        if next.rms > matches.rms {
            // update would make things worse: stay put
            converged = true;
            break;
        }
        let gain = matches.rms - next.rms;
        current = candidate;
        matches = next;
        history.push(matches.rms);
        if gain < params.convergence_tolerance {
            converged = true;
            break;
        }
    }

    Ok(RegistrationResult {
        transform: current,
        rms_residual: matches.rms,
        per_pair_residuals: Vec::new(),
        iterations,
        converged,
        rms_history: history,
    })
}
