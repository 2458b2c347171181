use super::{Frame, PointCloud};
use crate::error::{Error, Result};
use nalgebra::{Matrix3, Rotation3, Unit, Vector3};
use serde::{Deserialize, Serialize};

/// Orthonormality tolerance per entry of `RᵀR − I`.
const ORTHONORMAL_TOL: f64 = 1e-9;

/// Proper rigid motion `p ↦ R·p + t`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "TransformRepr", into = "TransformRepr")]
pub struct RigidTransform {
    rotation: Matrix3<f64>,
    translation: Vector3<f64>,
}

impl RigidTransform {
    pub fn new(rotation: Matrix3<f64>, translation: Vector3<f64>) -> Result<RigidTransform> {
        if !rotation.iter().chain(translation.iter()).all(|v| v.is_finite()) {
            return Err(Error::InvalidArgument(
                "rigid transform has non-finite entries".into(),
            ));
        }
        let defect = rotation.transpose() * rotation - Matrix3::identity();
        if defect.iter().any(|v| v.abs() > ORTHONORMAL_TOL) {
            return Err(Error::InvalidArgument(
                "rotation is not orthonormal (RᵀR − I exceeds 1e-9)".into(),
            ));
        }
        if rotation.determinant() <= 0.0 {
            return Err(Error::InvalidArgument(
                "rotation has determinant ≤ 0 (reflection)".into(),
            ));
        }
        Ok(RigidTransform {
            rotation,
            translation,
        })
    }

    pub fn identity() -> RigidTransform {
        RigidTransform {
            rotation: Matrix3::identity(),
            translation: Vector3::zeros(),
        }
    }

    pub fn from_translation(t: Vector3<f64>) -> RigidTransform {
        RigidTransform {
            rotation: Matrix3::identity(),
            translation: t,
        }
    }

    /// Rotation by `angle` radians about `axis`, then translation.
    pub fn from_axis_angle(axis: Vector3<f64>, angle: f64, t: Vector3<f64>) -> RigidTransform {
        let rotation = Rotation3::from_axis_angle(&Unit::new_normalize(axis), angle);
        RigidTransform {
            rotation: *rotation.matrix(),
            translation: t,
        }
    }

    pub fn rotation(&self) -> &Matrix3<f64> {
        &self.rotation
    }

    pub fn translation(&self) -> &Vector3<f64> {
        &self.translation
    }

    pub fn apply(&self, p: &Vector3<f64>) -> Vector3<f64> {
        self.rotation * p + self.translation
    }

    /// `self ∘ other`: applies `other` first.
    pub fn compose(&self, other: &RigidTransform) -> RigidTransform {
        RigidTransform {
            rotation: self.rotation * other.rotation,
            translation: self.rotation * other.translation + self.translation,
        }
    }

    pub fn inverse(&self) -> RigidTransform {
        let rt = self.rotation.transpose();
        RigidTransform {
            rotation: rt,
            translation: -(rt * self.translation),
        }
    }

    /// Largest absolute entry difference to `other`.
    pub fn max_abs_diff(&self, other: &RigidTransform) -> f64 {
        let r = (self.rotation - other.rotation).amax();
        let t = (self.translation - other.translation).amax();
        r.max(t)
    }
}

impl Default for RigidTransform {
    fn default() -> RigidTransform {
        RigidTransform::identity()
    }
}

#[derive(Serialize, Deserialize)]
struct TransformRepr {
    rotation: [[f64; 3]; 3],
    translation: [f64; 3],
}

impl From<RigidTransform> for TransformRepr {
    fn from(t: RigidTransform) -> TransformRepr {
        let r = t.rotation;
        TransformRepr {
            rotation: [
                [r[(0, 0)], r[(0, 1)], r[(0, 2)]],
                [r[(1, 0)], r[(1, 1)], r[(1, 2)]],
                [r[(2, 0)], r[(2, 1)], r[(2, 2)]],
            ],
            translation: [t.translation.x, t.translation.y, t.translation.z],
        }
    }
}

impl TryFrom<TransformRepr> for RigidTransform {
    type Error = Error;

    fn try_from(r: TransformRepr) -> Result<RigidTransform> {
        let m = r.rotation;
        RigidTransform::new(
            Matrix3::new(
                m[0][0], m[0][1], m[0][2], m[1][0], m[1][1], m[1][2], m[2][0], m[2][1], m[2][2],
            ),
            Vector3::from(r.translation),
        )
    }
}

/// Maps every point through `t`, keeping attributes.
///
/// The output carries `frame` when given, otherwise the input frame.
pub fn apply_transform(
    cloud: &PointCloud,
    t: &RigidTransform,
    frame: Option<Frame>,
) -> PointCloud {
    let points = cloud
        .points
        .iter()
        .map(|p| p.with_position(&t.apply(&p.position())))
        .collect();
    let mut out = cloud.with_points(points);
    if let Some(frame) = frame {
        out.frame = frame;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cloud::Point3;
    use std::f64::consts::FRAC_PI_2;

    #[test]
    fn identity_leaves_cloud_unchanged() {
        let c = PointCloud::from_xyz([(1.0, 2.0, 3.0), (-4.0, 5.5, 0.25)]);
        assert_eq!(apply_transform(&c, &RigidTransform::identity(), None), c);
    }

    #[test]
    fn pure_translation() {
        let c = PointCloud::from_xyz([(0.0, 0.0, 0.0)]);
        let t = RigidTransform::from_translation(Vector3::new(1.0, 2.0, 3.0));
        let out = apply_transform(&c, &t, None);
        assert_eq!(out.points[0].position(), Vector3::new(1.0, 2.0, 3.0));
    }

    #[test]
    fn quarter_turn_about_z() {
        let t = RigidTransform::from_axis_angle(Vector3::z(), FRAC_PI_2, Vector3::zeros());
        let p = t.apply(&Vector3::new(1.0, 0.0, 0.0));
        assert!((p - Vector3::new(0.0, 1.0, 0.0)).amax() < 1e-12);
    }

    #[test]
    fn attributes_and_frame() {
        let mut p = Point3::new(1.0, 0.0, 0.0);
        p.intensity = Some(0.5);
        p.color = Some([1, 2, 3]);
        p.class = crate::cloud::Classification::Ground;
        let c = PointCloud::new(vec![p]);
        let t = RigidTransform::from_translation(Vector3::new(0.0, 0.0, 1.0));
        let out = apply_transform(&c, &t, Some(Frame::Georeferenced("X".into())));
        assert_eq!(out.points[0].intensity, Some(0.5));
        assert_eq!(out.points[0].color, Some([1, 2, 3]));
        assert_eq!(out.points[0].class, crate::cloud::Classification::Ground);
        assert_eq!(out.frame, Frame::Georeferenced("X".into()));
    }

    #[test]
    fn compose_with_identity_and_inverse() {
        let t = RigidTransform::from_axis_angle(
            Vector3::new(1.0, -2.0, 0.5),
            0.7,
            Vector3::new(10.0, -3.0, 2.0),
        );
        assert!(t.compose(&RigidTransform::identity()).max_abs_diff(&t) < 1e-15);
        assert!(
            t.compose(&t.inverse())
                .max_abs_diff(&RigidTransform::identity())
                < 1e-9
        );
    }

    #[test]
    fn rejects_reflection_and_shear() {
        let reflect = Matrix3::from_diagonal(&Vector3::new(1.0, 1.0, -1.0));
        assert!(RigidTransform::new(reflect, Vector3::zeros()).is_err());
        let mut shear = Matrix3::identity();
        shear[(0, 1)] = 1e-6;
        assert!(RigidTransform::new(shear, Vector3::zeros()).is_err());
    }

    #[test]
    fn json_round_trip() {
        let t = RigidTransform::from_axis_angle(Vector3::y(), 0.3, Vector3::new(1.0, 2.0, 3.0));
        let s = serde_json::to_string(&t).unwrap();
        let back: RigidTransform = serde_json::from_str(&s).unwrap();
        assert_eq!(back, t);
    }
}
