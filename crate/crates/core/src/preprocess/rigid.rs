use crate::cloud::{apply_transform, Frame, PointCloud, RigidTransform};
use crate::error::{Error, Result};
use nalgebra::{Matrix3, Vector3};
use std::collections::HashSet;
use std::fs;
use std::path::Path;

/// Minimum spread of the source set across its main axis, metres.
/// Below this the configuration is treated as collinear.
const MIN_EXTENT: f64 = 1e-6;

/// A target seen in the scanner frame and known in the reference frame.
#[derive(Debug, Clone, PartialEq)]
pub struct CorrespondencePair {
    pub id: String,
    pub source: Vector3<f64>,
    pub destination: Vector3<f64>,
}

impl CorrespondencePair {
    pub fn new(id: impl Into<String>, source: Vector3<f64>, destination: Vector3<f64>) -> Self {
        CorrespondencePair {
            id: id.into(),
            source,
            destination,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PairResidual {
    pub id: String,
    /// ‖R·s + t − d‖, metres.
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RegistrationResult {
    pub transform: RigidTransform,
    pub rms_residual: f64,
    /// Per-pair residuals; empty for ICP, whose correspondences are anonymous.
    pub per_pair_residuals: Vec<PairResidual>,
    /// 1 for the closed-form solution.
    pub iterations: usize,
    pub converged: bool,
    /// RMS before the first update and after each accepted one (ICP only).
    pub rms_history: Vec<f64>,
}

/// Least-squares rotation and translation taking `source[i]` to
/// `destination[i]`, with the reflection case folded back to det = +1.
///
/// Callers are responsible for rejecting degenerate inputs.
pub fn kabsch(source: &[Vector3<f64>], destination: &[Vector3<f64>]) -> Result<RigidTransform> {
    debug_assert_eq!(source.len(), destination.len());
    let n = source.len() as f64;
    let sc = source.iter().sum::<Vector3<f64>>() / n;
    let dc = destination.iter().sum::<Vector3<f64>>() / n;
    let h: Matrix3<f64> = source
        .iter()
        .zip(destination)
        .map(|(s, d)| (s - sc) * (d - dc).transpose())
        .sum();
    let svd = h.svd(true, true);
    let u = svd.u.expect("requested U");
    let v = svd.v_t.expect("requested Vᵀ").transpose();
    let mut correction = Matrix3::identity();
    if (v * u.transpose()).determinant() < 0.0 {
        let weakest = svd
            .singular_values
            .iter()
            .enumerate()
            .min_by(|a, b| a.1.total_cmp(b.1))
            .map(|(i, _)| i)
            .unwrap();
        correction[(weakest, weakest)] = -1.0;
    }
    let rotation = v * correction * u.transpose();
    RigidTransform::new(rotation, dc - rotation * sc)
}

/// Spread of a point set along its second principal axis.
///
/// Zero for collinear sets; any three non-collinear points give a
/// positive value.
fn planar_extent(points: &[Vector3<f64>]) -> f64 {
    let n = points.len() as f64;
    let c = points.iter().sum::<Vector3<f64>>() / n;
    let cov: Matrix3<f64> = points
        .iter()
        .map(|p| (p - c) * (p - c).transpose())
        .sum::<Matrix3<f64>>()
        / n;
    let mut eig: Vec<f64> = cov.symmetric_eigenvalues().iter().copied().collect();
    eig.sort_by(|a, b| b.total_cmp(a));
    eig[1].max(0.0).sqrt()
}

/// Closed-form rigid registration from id-matched correspondences.
pub fn estimate_rigid(pairs: &[CorrespondencePair]) -> Result<RegistrationResult> {
    if pairs.len() < 3 {
        return Err(Error::InsufficientPoints(format!(
            "rigid registration needs ≥ 3 correspondence pairs, got {}",
            pairs.len()
        )));
    }
    let mut ids = HashSet::new();
    for p in pairs {
        if !ids.insert(p.id.as_str()) {
            return Err(Error::InvalidArgument(format!(
                "duplicate correspondence id '{}'",
                p.id
            )));
        }
        if !p.source.iter().chain(p.destination.iter()).all(|v| v.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "correspondence '{}' has non-finite coordinates",
                p.id
            )));
        }
    }
    let src: Vec<_> = pairs.iter().map(|p| p.source).collect();
    let dst: Vec<_> = pairs.iter().map(|p| p.destination).collect();
    let extent = planar_extent(&src);
    if !(extent > MIN_EXTENT) {
        return Err(Error::Degenerate(format!(
            "configuration: source points are collinear (secondary extent {extent:.3e} m)"
        )));
    }
    let transform = kabsch(&src, &dst)?;
    let per_pair_residuals: Vec<_> = pairs
        .iter()
        .map(|p| PairResidual {
            id: p.id.clone(),
            residual: (transform.apply(&p.source) - p.destination).norm(),
        })
        .collect();
    let rms = (per_pair_residuals
        .iter()
        .map(|r| r.residual * r.residual)
        .sum::<f64>()
        / pairs.len() as f64)
        .sqrt();
    Ok(RegistrationResult {
        transform,
        rms_residual: rms,
        per_pair_residuals,
        iterations: 1,
        converged: true,
        rms_history: vec![rms],
    })
}

/// Moves a scanner-frame cloud into an earth-fixed frame through control
/// points. Scale stays 1.
pub fn georeference(
    cloud: &PointCloud,
    control: &[CorrespondencePair],
    crs: &str,
) -> Result<(PointCloud, RegistrationResult)> {
    let reg = estimate_rigid(control)?;
    let out = apply_transform(
        cloud,
        &reg.transform,
        Some(Frame::Georeferenced(crs.to_string())),
    );
    Ok((out, reg))
}

/// Reads `id sx sy sz dx dy dz` lines; `#` starts a comment line.
pub fn read_pairs(path: impl AsRef<Path>) -> Result<Vec<CorrespondencePair>> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut pairs = Vec::new();
    let mut ids = HashSet::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let f: Vec<&str> = line.split_whitespace().collect();
        if f.len() != 7 {
            return Err(Error::parse(
                path,
                "line",
                i + 1,
                format!("expected 'id sx sy sz dx dy dz', found {} fields", f.len()),
            ));
        }
        let mut v = [0.0; 6];
        for (slot, s) in v.iter_mut().zip(&f[1..]) {
            *slot = s
                .parse::<f64>()
                .ok()
                .filter(|x| x.is_finite())
                .ok_or_else(|| Error::parse(path, "line", i + 1, format!("bad coordinate '{s}'")))?;
        }
        if !ids.insert(f[0].to_string()) {
            return Err(Error::parse(
                path,
                "line",
                i + 1,
                format!("duplicate id '{}'", f[0]),
            ));
        }
        pairs.push(CorrespondencePair::new(
            f[0],
            Vector3::new(v[0], v[1], v[2]),
            Vector3::new(v[3], v[4], v[5]),
        ));
    }
    Ok(pairs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn pairs_from(t: &RigidTransform, src: &[Vector3<f64>]) -> Vec<CorrespondencePair> {
        src.iter()
            .enumerate()
            .map(|(i, s)| CorrespondencePair::new(format!("t{i}"), *s, t.apply(s)))
            .collect()
    }

    #[test]
    fn exact_pairs_recover_the_transform() {
        let t = RigidTransform::from_axis_angle(
            Vector3::new(0.3, -1.0, 0.2),
            1.1,
            Vector3::new(5.0e5, 6.9e6, 30.0),
        );
        let src = [
            Vector3::new(0.0, 0.0, 0.0),
            Vector3::new(10.0, 0.5, 0.2),
            Vector3::new(3.0, 8.0, -0.4),
            Vector3::new(-6.0, 2.0, 1.5),
        ];
        let reg = estimate_rigid(&pairs_from(&t, &src)).unwrap();
        assert!(reg.transform.max_abs_diff(&t) < 1e-9);
        assert!(reg.rms_residual < 1e-9);
        assert_eq!(reg.iterations, 1);
    }

    #[test]
    fn half_turn_right_triangle_keeps_a_proper_rotation() {
        let t = RigidTransform::from_axis_angle(Vector3::z(), PI, Vector3::zeros());
        let src = [
            Vector3::new(0.0, 0.0, 0.0),
            Vector3::new(4.0, 0.0, 0.0),
            Vector3::new(0.0, 3.0, 0.0),
        ];
        let reg = estimate_rigid(&pairs_from(&t, &src)).unwrap();
        assert!((reg.transform.rotation().determinant() - 1.0).abs() < 1e-12);
        assert!(reg.transform.max_abs_diff(&t) < 1e-9);
        assert!(reg.rms_residual < 1e-9);
    }

    #[test]
    fn too_few_pairs() {
        let p = vec![CorrespondencePair::new("a", Vector3::zeros(), Vector3::zeros()); 2];
        assert!(matches!(estimate_rigid(&p), Err(Error::InsufficientPoints(_))));
    }

    #[test]
    fn collinear_source_is_degenerate() {
        let src: Vec<_> = (0..5).map(|i| Vector3::new(i as f64, 2.0 * i as f64, 0.0)).collect();
        let pairs = pairs_from(&RigidTransform::identity(), &src);
        let err = estimate_rigid(&pairs).unwrap_err();
        assert!(err.to_string().contains("degenerate configuration"), "{err}");
    }

    #[test]
    fn duplicate_ids_are_rejected() {
        let src = [Vector3::zeros(), Vector3::x(), Vector3::y()];
        let mut pairs = pairs_from(&RigidTransform::identity(), &src);
        pairs[2].id = pairs[0].id.clone();
        assert!(estimate_rigid(&pairs).is_err());
    }

    #[test]
    fn georeference_by_pure_translation() {
        let offset = Vector3::new(500_000.0, 6_900_000.0, 25.0);
        let t = RigidTransform::from_translation(offset);
        let src = [Vector3::zeros(), Vector3::x() * 5.0, Vector3::y() * 7.0, Vector3::z()];
        let cloud = PointCloud::from_xyz([(1.0, 2.0, 3.0), (-4.0, 0.5, 0.0)]);
        let (out, reg) = georeference(&cloud, &pairs_from(&t, &src), "EPSG:7856").unwrap();
        assert_eq!(out.frame, Frame::Georeferenced("EPSG:7856".into()));
        for (a, b) in out.points.iter().zip(&cloud.points) {
            assert!((a.position() - (b.position() + offset)).amax() < 1e-9);
        }
        assert!(reg.per_pair_residuals.iter().all(|r| r.residual < 1e-9));
    }

    #[test]
    fn pair_file_parsing() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("pairs.txt");
        fs::write(&p, "# id sx sy sz dx dy dz\nA 0 0 0 1 1 1\nB 1 0 0 2 1 1\n").unwrap();
        let pairs = read_pairs(&p).unwrap();
        assert_eq!(pairs.len(), 2);
        assert_eq!(pairs[1].destination, Vector3::new(2.0, 1.0, 1.0));
        fs::write(&p, "A 0 0 0 1 1\n").unwrap();
        assert!(matches!(read_pairs(&p), Err(Error::Parse { index: 1, .. })));
    }
}
