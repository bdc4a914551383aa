//! Piecewise ground-truth head and object motion.

use nalgebra::{UnitQuaternion, Vector3};
use serde::{Deserialize, Serialize};

use super::{euler_deg, Pose, TrackingError};

const DOMAIN_EPS: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Keyframe {
    pub t: f64,
    pub pose: Pose,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Segment {
    /// Linear position, spherical orientation interpolation.
    Keyframes { keys: Vec<Keyframe> },
    Hold { t0: f64, t1: f64, pose: Pose },
    /// `angular_velocity_deg` is a world-frame rotation vector in degrees per second.
    ConstantVelocity {
        t0: f64,
        t1: f64,
        start: Pose,
        #[serde(default = "Vector3::zeros")]
        velocity: Vector3<f64>,
        #[serde(default = "Vector3::zeros")]
        angular_velocity_deg: Vector3<f64>,
    },
    /// Sinusoidal yaw/pitch/roll and translation about `center`.
    Sway {
        t0: f64,
        t1: f64,
        center: Pose,
        /// Yaw, pitch, roll amplitudes in degrees.
        #[serde(default = "Vector3::zeros")]
        amplitude_deg: Vector3<f64>,
        #[serde(default = "Vector3::zeros")]
        amplitude_m: Vector3<f64>,
        frequency_hz: f64,
    },
}

impl Segment {
    pub fn domain(&self) -> (f64, f64) {
        match self {
            Segment::Keyframes { keys } => (
                keys.first().map_or(0.0, |k| k.t),
                keys.last().map_or(0.0, |k| k.t),
            ),
            Segment::Hold { t0, t1, .. }
            | Segment::ConstantVelocity { t0, t1, .. }
            | Segment::Sway { t0, t1, .. } => (*t0, *t1),
        }
    }

    fn validate(&self, index: usize) -> Result<(), TrackingError> {
        let (t0, t1) = self.domain();
        if !(t0.is_finite() && t1.is_finite() && t1 > t0) {
            return Err(TrackingError::Range(format!(
                "segment {index}: domain [{t0}, {t1}] is empty"
            )));
        }
        if let Segment::Keyframes { keys } = self {
            if keys.windows(2).any(|w| !(w[1].t > w[0].t)) {
                return Err(TrackingError::Range(format!(
                    "segment {index}: keyframe times must be strictly increasing"
                )));
            }
        }
        if let Segment::Sway { frequency_hz, .. } = self {
            if !(*frequency_hz >= 0.0) {
                return Err(TrackingError::Range(format!("segment {index}: negative frequency")));
            }
        }
        Ok(())
    }

    fn eval(&self, t: f64) -> Pose {
        match self {
            Segment::Keyframes { keys } => {
                let i = keys
                    .windows(2)
                    .position(|w| t <= w[1].t)
                    .unwrap_or(keys.len() - 2);
                let (a, b) = (&keys[i], &keys[i + 1]);
                let s = ((t - a.t) / (b.t - a.t)).clamp(0.0, 1.0);
                Pose::new(
                    a.pose.position.lerp(&b.pose.position, s),
                    slerp_shortest(&a.pose.orientation, &b.pose.orientation, s),
                )
            }
            Segment::Hold { pose, .. } => *pose,
            Segment::ConstantVelocity {
                t0,
                start,
                velocity,
                angular_velocity_deg,
                ..
            } => {
                let dt = t - t0;
                let w = angular_velocity_deg.map(f64::to_radians);
                Pose::new(
                    start.position + velocity * dt,
                    UnitQuaternion::from_scaled_axis(w * dt) * start.orientation,
                )
            }
            Segment::Sway {
                t0,
                center,
                amplitude_deg,
                amplitude_m,
                frequency_hz,
                ..
            } => {
                let s = (std::f64::consts::TAU * frequency_hz * (t - t0)).sin();
                let a = amplitude_deg * s;
                Pose::new(
                    center.position + amplitude_m * s,
                    center.orientation * euler_deg(a.x, a.y, a.z),
                )
            }
        }
    }
}

/// Interpolates along the shorter of the two arcs joining `a` and `b`.
pub fn slerp_shortest(a: &UnitQuaternion<f64>, b: &UnitQuaternion<f64>, s: f64) -> UnitQuaternion<f64> {
    // `powf` works on the rotation angle in [0, pi], so the double cover is handled.
    a * (a.inverse() * b).powf(s)
}

/// Contiguous sequence of segments.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Segment>", into = "Vec<Segment>")]
pub struct Trajectory {
    segments: Vec<Segment>,
}

impl TryFrom<Vec<Segment>> for Trajectory {
    type Error = TrackingError;
    fn try_from(segments: Vec<Segment>) -> Result<Self, Self::Error> {
        Trajectory::new(segments)
    }
}

impl From<Trajectory> for Vec<Segment> {
    fn from(t: Trajectory) -> Self {
        t.segments
    }
}

impl Trajectory {
    pub fn new(segments: Vec<Segment>) -> Result<Self, TrackingError> {
        if segments.is_empty() {
            return Err(TrackingError::Range("trajectory has no segments".into()));
        }
        for (i, s) in segments.iter().enumerate() {
            s.validate(i)?;
        }
        for (i, w) in segments.windows(2).enumerate() {
            let (_, end) = w[0].domain();
            let (start, _) = w[1].domain();
            if (start - end).abs() > DOMAIN_EPS {
                return Err(TrackingError::Range(format!(
                    "segment {} starts at {start}, previous ends at {end}",
                    i + 1
                )));
            }
        }
        Ok(Trajectory { segments })
    }

    pub fn hold(pose: Pose, duration: f64) -> Self {
        Trajectory {
            segments: vec![Segment::Hold {
                t0: 0.0,
                t1: duration.max(DOMAIN_EPS),
                pose,
            }],
        }
    }

    pub fn constant_velocity(
        start: Pose,
        velocity: Vector3<f64>,
        angular_velocity_deg: Vector3<f64>,
        duration: f64,
    ) -> Self {
        Trajectory {
            segments: vec![Segment::ConstantVelocity {
                t0: 0.0,
                t1: duration,
                start,
                velocity,
                angular_velocity_deg,
            }],
        }
    }

    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }

    pub fn domain(&self) -> (f64, f64) {
        (
            self.segments[0].domain().0,
            self.segments[self.segments.len() - 1].domain().1,
        )
    }

    pub fn contains(&self, t: f64) -> bool {
        let (a, b) = self.domain();
        t >= a - DOMAIN_EPS && t <= b + DOMAIN_EPS
    }

    /// Ground-truth pose at `t`.
    pub fn pose_at(&self, t: f64) -> Result<Pose, TrackingError> {
        if !self.contains(t) {
            let (a, b) = self.domain();
            return Err(TrackingError::Range(format!("t = {t} outside [{a}, {b}]")));
        }
        let seg = self
            .segments
            .iter()
            .find(|s| t <= s.domain().1 + DOMAIN_EPS)
            .unwrap_or(&self.segments[self.segments.len() - 1]);
        let (a, b) = seg.domain();
        Ok(seg.eval(t.clamp(a, b)))
    }

    /// Like [`pose_at`](Self::pose_at) but holds the end poses outside the domain.
    pub fn pose_at_clamped(&self, t: f64) -> Pose {
        let (a, b) = self.domain();
        self.pose_at(t.clamp(a, b)).unwrap_or_default()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tracking::orientation_error_deg;
    use approx::assert_relative_eq;

    #[test]
    fn keyframe_interpolation() {
        let traj = Trajectory::new(vec![Segment::Keyframes {
            keys: vec![
                Keyframe { t: 0.0, pose: Pose::identity() },
                Keyframe {
                    t: 2.0,
                    pose: Pose::from_euler_deg(Vector3::new(2.0, 0.0, 0.0), 90.0, 0.0, 0.0),
                },
            ],
        }])
        .unwrap();
        let mid = traj.pose_at(1.0).unwrap();
        assert_relative_eq!(mid.position.x, 1.0, epsilon = 1e-12);
        assert!(orientation_error_deg(&mid.orientation, &euler_deg(45.0, 0.0, 0.0)) < 1e-9);
    }

    #[test]
    fn slerp_takes_the_short_way() {
        let a = euler_deg(170.0, 0.0, 0.0);
        let b = euler_deg(-170.0, 0.0, 0.0);
        let m = slerp_shortest(&a, &b, 0.5);
        assert!(orientation_error_deg(&m, &euler_deg(180.0, 0.0, 0.0)) < 1e-9);
        // Negated quaternion represents the same rotation.
        let neg = UnitQuaternion::new_unchecked(-b.into_inner());
        let m2 = slerp_shortest(&a, &neg, 0.5);
        assert!(orientation_error_deg(&m2, &m) < 1e-9);
    }

    #[test]
    fn domain_checks() {
        let traj = Trajectory::hold(Pose::identity(), 1.0);
        assert!(traj.pose_at(1.0).is_ok());
        assert!(matches!(traj.pose_at(1.5), Err(TrackingError::Range(_))));
        assert!(traj.pose_at(-0.1).is_err());
        let gap = Trajectory::new(vec![
            Segment::Hold { t0: 0.0, t1: 1.0, pose: Pose::identity() },
            Segment::Hold { t0: 1.5, t1: 2.0, pose: Pose::identity() },
        ]);
        assert!(gap.is_err());
        let backwards = Trajectory::new(vec![Segment::Keyframes {
            keys: vec![
                Keyframe { t: 1.0, pose: Pose::identity() },
                Keyframe { t: 0.5, pose: Pose::identity() },
            ],
        }]);
        assert!(backwards.is_err());
    }

    #[test]
    fn chained_segments_are_continuous() {
        let traj = Trajectory::new(vec![
            Segment::ConstantVelocity {
                t0: 0.0,
                t1: 1.0,
                start: Pose::identity(),
                velocity: Vector3::new(1.0, 0.0, 0.0),
                angular_velocity_deg: Vector3::new(0.0, 90.0, 0.0),
            },
            Segment::Hold {
                t0: 1.0,
                t1: 2.0,
                pose: Pose::from_euler_deg(Vector3::new(1.0, 0.0, 0.0), 90.0, 0.0, 0.0),
            },
        ])
        .unwrap();
        let before = traj.pose_at(1.0 - 1e-12).unwrap();
        let after = traj.pose_at(1.5).unwrap();
        assert_relative_eq!(before.position, after.position, epsilon = 1e-9);
        assert!(orientation_error_deg(&before.orientation, &after.orientation) < 1e-6);
    }

    #[test]
    fn sway_oscillates_about_center() {
        let traj = Trajectory::new(vec![Segment::Sway {
            t0: 0.0,
            t1: 2.0,
            center: Pose::identity(),
            amplitude_deg: Vector3::new(0.0, 0.0, 10.0),
            amplitude_m: Vector3::zeros(),
            frequency_hz: 1.0,
        }])
        .unwrap();
        let quarter = traj.pose_at(0.25).unwrap();
        assert!(orientation_error_deg(&quarter.orientation, &euler_deg(0.0, 0.0, 10.0)) < 1e-9);
        let full = traj.pose_at(1.0).unwrap();
        assert!(orientation_error_deg(&full.orientation, &UnitQuaternion::identity()) < 1e-9);
    }

    #[test]
    fn json_round_trip() {
        let text = r#"[{"type":"hold","t0":0,"t1":1,"pose":{"yaw":30}},
                       {"type":"constant_velocity","t0":1,"t1":2,"start":{},"velocity":[1,0,0]}]"#;
        let traj: Trajectory = serde_json::from_str(text).unwrap();
        assert_eq!(traj.domain(), (0.0, 2.0));
        let again: Trajectory = serde_json::from_str(&serde_json::to_string(&traj).unwrap()).unwrap();
        assert_eq!(again.segments().len(), 2);
        let bad = r#"[{"type":"hold","t0":1,"t1":0,"pose":{}}]"#;
        assert!(serde_json::from_str::<Trajectory>(bad).is_err());
    }
}
