//! Head and frame models.

use nalgebra::Vector3;
use serde::{Deserialize, Serialize};

use super::ConfigError;

/// Distance from the cyclopean eye to the front of the head ellipsoid.
const EYE_TO_HEAD_FRONT_MM: f64 = 17.5;

/// Wearer model. Millimeters throughout; the head frame origin is the cyclopean eye.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct HeadModel {
    pub ipd_mm: f64,
    /// Cyclopean eye relative to the frame's front-center (front inner plane, arm axis height).
    pub eye_offset_mm: Vector3<f64>,
    pub forward: Vector3<f64>,
    pub up: Vector3<f64>,
    pub breadth_mm: f64,
    pub length_mm: f64,
    pub height_mm: f64,
}

impl Default for HeadModel {
    fn default() -> Self {
        HeadModel {
            ipd_mm: 63.0,
            eye_offset_mm: Vector3::new(0.0, -10.0, -35.0),
            forward: Vector3::z(),
            up: Vector3::y(),
            breadth_mm: 152.0,
            length_mm: 195.0,
            height_mm: 230.0,
        }
    }
}

impl HeadModel {
    pub fn validate(&self) -> Result<(), ConfigError> {
        if !(50.0..=80.0).contains(&self.ipd_mm) {
            return Err(ConfigError::invalid(
                "head.ipd_mm",
                format!("{} outside [50, 80]", self.ipd_mm),
            ));
        }
        for (name, v) in [("head.forward", &self.forward), ("head.up", &self.up)] {
            if (v.norm() - 1.0).abs() > 1e-9 {
                return Err(ConfigError::invalid(name, "must be unit length"));
            }
        }
        if self.forward.dot(&self.up).abs() > 1e-9 {
            return Err(ConfigError::invalid("head.up", "must be perpendicular to forward"));
        }
        for (name, v) in [
            ("head.breadth_mm", self.breadth_mm),
            ("head.length_mm", self.length_mm),
            ("head.height_mm", self.height_mm),
        ] {
            if !(v > 0.0) {
                return Err(ConfigError::invalid(name, "must be positive"));
            }
        }
        Ok(())
    }

    /// Wearer's right axis in head coordinates.
    pub fn right(&self) -> Vector3<f64> {
        self.up.cross(&self.forward)
    }

    /// Cyclopean eye position in meters (the head frame origin).
    pub fn cyclopean_eye(&self) -> Vector3<f64> {
        Vector3::zeros()
    }

    pub fn left_eye(&self) -> Vector3<f64> {
        -self.right() * (self.ipd_mm * 0.5e-3)
    }

    pub fn right_eye(&self) -> Vector3<f64> {
        self.right() * (self.ipd_mm * 0.5e-3)
    }

    /// Frame front-center in meters, head coordinates.
    pub fn frame_front_center(&self) -> Vector3<f64> {
        -self.eye_offset_mm * 1e-3
    }

    pub fn ellipsoid(&self) -> Ellipsoid {
        let semi = Vector3::new(self.breadth_mm, self.height_mm, self.length_mm) * 0.5e-3;
        Ellipsoid {
            center: Vector3::new(0.0, 0.0, EYE_TO_HEAD_FRONT_MM * 1e-3 - semi.z),
            semi_axes: semi,
        }
    }
}

/// Axis-aligned ellipsoid in head coordinates (meters).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Ellipsoid {
    pub center: Vector3<f64>,
    pub semi_axes: Vector3<f64>,
}

impl Ellipsoid {
    fn to_unit(&self, p: &Vector3<f64>) -> Vector3<f64> {
        (p - self.center).component_div(&self.semi_axes)
    }

    pub fn contains(&self, p: &Vector3<f64>) -> bool {
        self.to_unit(p).norm_squared() < 1.0
    }

    /// True when any point of the rectangle spanned by `origin + s*u + t*v`
    /// (s, t in [0, 1]) lies strictly inside the ellipsoid.
    pub fn intersects_parallelogram(
        &self,
        origin: &Vector3<f64>,
        u: &Vector3<f64>,
        v: &Vector3<f64>,
    ) -> bool {
        // The affine map to unit-sphere space keeps parallelograms parallelograms,
        // so the question becomes: is the closest point to the origin within 1?
        let o = self.to_unit(origin);
        let u = u.component_div(&self.semi_axes);
        let v = v.component_div(&self.semi_axes);
        closest_distance_to_parallelogram(&o, &u, &v) < 1.0
    }
}

fn closest_distance_to_segment(a: &Vector3<f64>, d: &Vector3<f64>) -> f64 {
    let len2 = d.norm_squared();
    let t = if len2 > 0.0 {
        (-a.dot(d) / len2).clamp(0.0, 1.0)
    } else {
        0.0
    };
    (a + d * t).norm()
}

/// Distance from the origin to the parallelogram `o + s*u + t*v`, s, t in [0, 1].
fn closest_distance_to_parallelogram(o: &Vector3<f64>, u: &Vector3<f64>, v: &Vector3<f64>) -> f64 {
    let uu = u.dot(u);
    let uv = u.dot(v);
    let vv = v.dot(v);
    let det = uu * vv - uv * uv;
    if det > 1e-30 {
        let bu = -o.dot(u);
        let bv = -o.dot(v);
        let s = (bu * vv - bv * uv) / det;
        let t = (bv * uu - bu * uv) / det;
        if (0.0..=1.0).contains(&s) && (0.0..=1.0).contains(&t) {
            return (o + u * s + v * t).norm();
        }
    }
    [
        closest_distance_to_segment(o, u),
        closest_distance_to_segment(&(o + v), u),
        closest_distance_to_segment(o, v),
        closest_distance_to_segment(&(o + u), v),
    ]
    .into_iter()
    .fold(f64::INFINITY, f64::min)
}

/// U-shaped base frame.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FrameSpec {
    pub outer_width_mm: f64,
    pub inner_width_mm: f64,
    pub hole_pitch_mm: f64,
    pub holes_per_side: u32,
    pub arm_length_mm: f64,
}

impl FrameSpec {
    /// The two frame sizes that exist: 250 mm and 300 mm outer width.
    pub fn standard(outer_width_mm: u32) -> Result<Self, ConfigError> {
        let (holes_per_side, arm_length_mm) = match outer_width_mm {
            250 => (12, 140.0),
            300 => (16, 180.0),
            other => {
                return Err(ConfigError::invalid(
                    "frame",
                    format!("frame width {other} mm is not available (250 or 300)"),
                ))
            }
        };
        let outer = outer_width_mm as f64;
        Ok(FrameSpec {
            outer_width_mm: outer,
            inner_width_mm: outer - 40.0,
            hole_pitch_mm: 10.0,
            holes_per_side,
            arm_length_mm,
        })
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.outer_width_mm != 250.0 && self.outer_width_mm != 300.0 {
            return Err(ConfigError::invalid("frame", "outer width must be 250 or 300 mm"));
        }
        if (self.inner_width_mm - (self.outer_width_mm - 40.0)).abs() > 1e-9 {
            return Err(ConfigError::invalid("frame", "inner width must be outer width - 40 mm"));
        }
        if self.hole_pitch_mm != 10.0 {
            return Err(ConfigError::invalid("frame", "hole pitch must be 10 mm"));
        }
        if self.holes_per_side as f64 * self.hole_pitch_mm > self.arm_length_mm {
            return Err(ConfigError::invalid("frame", "holes do not fit on the arm"));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn standard_frames() {
        let small = FrameSpec::standard(250).unwrap();
        assert_eq!(small.inner_width_mm, 210.0);
        assert_eq!(small.holes_per_side, 12);
        small.validate().unwrap();
        let large = FrameSpec::standard(300).unwrap();
        assert_eq!(large.inner_width_mm, 260.0);
        assert_eq!(large.holes_per_side, 16);
        large.validate().unwrap();
        assert!(FrameSpec::standard(275).is_err());
    }

    #[test]
    fn head_validation() {
        HeadModel::default().validate().unwrap();
        let narrow = HeadModel {
            ipd_mm: 45.0,
            ..HeadModel::default()
        };
        assert!(narrow.validate().is_err());
        let skew = HeadModel {
            up: Vector3::new(0.0, 1.0, 0.1).normalize(),
            ..HeadModel::default()
        };
        assert!(skew.validate().is_err());
    }

    #[test]
    fn eyes_straddle_origin() {
        let head = HeadModel::default();
        assert!((head.right_eye().x - 0.0315).abs() < 1e-12);
        assert!((head.left_eye().x + 0.0315).abs() < 1e-12);
        assert_eq!(head.right(), Vector3::x());
    }

    #[test]
    fn ellipsoid_quad_intersection() {
        let e = HeadModel::default().ellipsoid();
        assert!(e.contains(&Vector3::new(0.0, 0.0, -0.05)));
        // Plate straight through the head center.
        let origin = Vector3::new(-0.2, -0.05, -0.08);
        assert!(e.intersects_parallelogram(
            &origin,
            &Vector3::new(0.4, 0.0, 0.0),
            &Vector3::new(0.0, 0.1, 0.0)
        ));
        // Plate well off to the side.
        let origin = Vector3::new(0.11, -0.033, -0.1);
        assert!(!e.intersects_parallelogram(
            &origin,
            &Vector3::new(0.0, 0.0, 0.066),
            &Vector3::new(0.0, 0.066, 0.0)
        ));
        // Plate whose interior (not corners) grazes the head side.
        let origin = Vector3::new(0.07, -0.5, -0.5);
        assert!(e.intersects_parallelogram(
            &origin,
            &Vector3::new(0.0, 0.0, 1.0),
            &Vector3::new(0.0, 1.0, 0.0)
        ));
    }
}
