//! Simulated pose sources and pose prediction.

pub mod predict;
pub mod source;
pub mod trajectory;

pub use predict::{predict, Prediction, DEFAULT_HORIZON_S, MAX_HORIZON_S};
pub use source::{
    sample, write_samples_csv, NoiseModel, PoseSample, SourceKind, Tracker, TrackingSpec,
    SLAM_MIN_LUX,
};
pub use trajectory::{Keyframe, Segment, Trajectory};

use nalgebra::{Rotation3, UnitQuaternion, Vector3};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum TrackingError {
    #[error("out of range: {0}")]
    Range(String),
    #[error("tracking lost")]
    TrackingLost,
    #[error("need at least two samples with distinct timestamps")]
    InsufficientHistory,
}

/// World-from-head rigid transform.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(from = "PoseRepr", into = "PoseRepr")]
pub struct Pose {
    pub position: Vector3<f64>,
    pub orientation: UnitQuaternion<f64>,
}

impl Default for Pose {
    fn default() -> Self {
        Pose::identity()
    }
}

impl Pose {
    pub fn identity() -> Self {
        Pose {
            position: Vector3::zeros(),
            orientation: UnitQuaternion::identity(),
        }
    }

    pub fn new(position: Vector3<f64>, orientation: UnitQuaternion<f64>) -> Self {
        Pose {
            position,
            orientation,
        }
    }

    /// Orientation from yaw (about +Y, positive turns right), pitch (about +X,
    /// positive tips the nose down) and roll (about +Z), applied in that order.
    pub fn from_euler_deg(position: Vector3<f64>, yaw: f64, pitch: f64, roll: f64) -> Self {
        Pose {
            position,
            orientation: euler_deg(yaw, pitch, roll),
        }
    }

    pub fn transform_point(&self, p: &Vector3<f64>) -> Vector3<f64> {
        self.orientation * p + self.position
    }

    pub fn inverse_transform_point(&self, p: &Vector3<f64>) -> Vector3<f64> {
        self.orientation.inverse() * (p - self.position)
    }
}

pub fn euler_deg(yaw: f64, pitch: f64, roll: f64) -> UnitQuaternion<f64> {
    let ry = Rotation3::from_axis_angle(&Vector3::y_axis(), yaw.to_radians());
    let rx = Rotation3::from_axis_angle(&Vector3::x_axis(), pitch.to_radians());
    let rz = Rotation3::from_axis_angle(&Vector3::z_axis(), roll.to_radians());
    UnitQuaternion::from_rotation_matrix(&(ry * rx * rz))
}

/// Renormalizes away accumulated floating-point drift.
pub(crate) fn renormalize(q: UnitQuaternion<f64>) -> UnitQuaternion<f64> {
    UnitQuaternion::new_normalize(q.into_inner())
}

/// JSON form: `position` plus either `orientation` as `[w, x, y, z]` or Euler degrees.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(default)]
struct PoseRepr {
    position: [f64; 3],
    #[serde(skip_serializing_if = "Option::is_none")]
    orientation: Option<[f64; 4]>,
    #[serde(skip_serializing_if = "is_zero")]
    yaw: f64,
    #[serde(skip_serializing_if = "is_zero")]
    pitch: f64,
    #[serde(skip_serializing_if = "is_zero")]
    roll: f64,
}

fn is_zero(v: &f64) -> bool {
    *v == 0.0
}

impl From<PoseRepr> for Pose {
    fn from(r: PoseRepr) -> Self {
        let position = Vector3::from(r.position);
        let euler = euler_deg(r.yaw, r.pitch, r.roll);
        let orientation = match r.orientation {
            Some([w, x, y, z]) => {
                UnitQuaternion::new_normalize(nalgebra::Quaternion::new(w, x, y, z)) * euler
            }
            None => euler,
        };
        Pose {
            position,
            orientation,
        }
    }
}

impl From<Pose> for PoseRepr {
    fn from(p: Pose) -> Self {
        let q = p.orientation.quaternion();
        PoseRepr {
            position: p.position.into(),
            orientation: Some([q.w, q.i, q.j, q.k]),
            ..PoseRepr::default()
        }
    }
}

/// Angle in degrees between two orientations.
pub fn orientation_error_deg(a: &UnitQuaternion<f64>, b: &UnitQuaternion<f64>) -> f64 {
    a.angle_to(b).to_degrees()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn euler_conventions() {
        let fwd = Vector3::z();
        let yawed = euler_deg(90.0, 0.0, 0.0) * fwd;
        assert_relative_eq!(yawed, Vector3::x(), epsilon = 1e-12);
        let pitched = euler_deg(0.0, 30.0, 0.0) * fwd;
        assert!(pitched.y < 0.0, "positive pitch tips the nose down");
        let rolled = euler_deg(0.0, 0.0, 90.0) * Vector3::y();
        assert_relative_eq!(rolled, -Vector3::x(), epsilon = 1e-12);
    }

    #[test]
    fn pose_json_round_trip() {
        let p = Pose::from_euler_deg(Vector3::new(0.1, 0.2, 0.3), 20.0, -5.0, 3.0);
        let text = serde_json::to_string(&p).unwrap();
        let back: Pose = serde_json::from_str(&text).unwrap();
        assert_relative_eq!(back.position, p.position);
        assert!(orientation_error_deg(&back.orientation, &p.orientation) < 1e-9);
    }

    #[test]
    fn pose_json_accepts_euler() {
        let p: Pose = serde_json::from_str(r#"{"position":[0,1,0],"roll":10}"#).unwrap();
        assert!(orientation_error_deg(&p.orientation, &euler_deg(0.0, 0.0, 10.0)) < 1e-9);
        let id: Pose = serde_json::from_str("{}").unwrap();
        assert_eq!(id, Pose::identity());
    }

    #[test]
    fn transform_round_trip() {
        let p = Pose::from_euler_deg(Vector3::new(1.0, -2.0, 0.5), 33.0, 12.0, -7.0);
        let x = Vector3::new(0.3, 0.4, -0.2);
        assert_relative_eq!(p.inverse_transform_point(&p.transform_point(&x)), x, epsilon = 1e-12);
    }
}
