//! Visual-field measures: eccentricity, visual angle, angular pixel density.

use nalgebra::Vector3;

use super::mount::DisplayPlacement;
use super::GeometryError;

/// Angle between two vectors in degrees, stable near 0 and 180.
pub(crate) fn angle_between(a: &Vector3<f64>, b: &Vector3<f64>) -> f64 {
    a.cross(b).norm().atan2(a.dot(b)).to_degrees()
}

fn direction(from: &Vector3<f64>, to: &Vector3<f64>) -> Result<Vector3<f64>, GeometryError> {
    let d = to - from;
    if d.norm() <= f64::EPSILON || !d.iter().all(|c| c.is_finite()) {
        return Err(GeometryError::DegenerateInput);
    }
    Ok(d)
}

/// Angle in degrees between `forward` and the ray from `eye` to `point`.
pub fn eccentricity(
    eye: &Vector3<f64>,
    point: &Vector3<f64>,
    forward: &Vector3<f64>,
) -> Result<f64, GeometryError> {
    let d = direction(eye, point)?;
    if forward.norm() <= f64::EPSILON {
        return Err(GeometryError::DegenerateInput);
    }
    Ok(angle_between(forward, &d))
}

/// Angle in degrees subtended at `eye` by `p1` and `p2`.
pub fn visual_angle(
    eye: &Vector3<f64>,
    p1: &Vector3<f64>,
    p2: &Vector3<f64>,
) -> Result<f64, GeometryError> {
    let a = direction(eye, p1)?;
    let b = direction(eye, p2)?;
    Ok(angle_between(&a, &b))
}

/// Local horizontal angular density (pixels per degree) at continuous pixel
/// coordinates `pixel`, from a centered one-pixel step along the display row.
pub fn pixels_per_degree(
    placement: &DisplayPlacement,
    pixel: [f64; 2],
    eye: &Vector3<f64>,
) -> Result<f64, GeometryError> {
    let [u, v] = pixel;
    let (w, h) = (placement.res_x as f64, placement.res_y as f64);
    if !(0.0..=w).contains(&u) || !(0.0..=h).contains(&v) {
        return Err(GeometryError::Range(format!(
            "pixel ({u}, {v}) outside {}x{}",
            placement.res_x, placement.res_y
        )));
    }
    let a = placement.point_at_pixel(u - 0.5, v);
    let b = placement.point_at_pixel(u + 0.5, v);
    let deg = visual_angle(eye, &a, &b)?;
    if deg <= 0.0 {
        return Err(GeometryError::DegenerateInput);
    }
    Ok(1.0 / deg)
}

/// Linear cortical-magnification scaling: `base * (1 + ecc / e2)`.
pub fn magnified_size(base_size: f64, eccentricity: f64, e2: f64) -> Result<f64, GeometryError> {
    if !(base_size > 0.0) {
        return Err(GeometryError::Range(format!("base size {base_size} must be positive")));
    }
    if !(e2 > 0.0) {
        return Err(GeometryError::Range(format!("e2 {e2} must be positive")));
    }
    if !(0.0..=180.0).contains(&eccentricity) {
        return Err(GeometryError::Range(format!("eccentricity {eccentricity} outside [0, 180]")));
    }
    Ok(base_size * (1.0 + eccentricity / e2))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::DisplayKind;
    use approx::assert_relative_eq;
    use nalgebra::Rotation3;
    use proptest::prelude::*;

    fn origin() -> Vector3<f64> {
        Vector3::zeros()
    }

    #[test]
    fn eccentricity_examples() {
        let f = Vector3::z();
        assert_relative_eq!(eccentricity(&origin(), &Vector3::new(0.0, 0.0, 2.0), &f).unwrap(), 0.0);
        assert_relative_eq!(
            eccentricity(&origin(), &Vector3::new(1.0, 0.0, 0.0), &f).unwrap(),
            90.0,
            epsilon = 1e-12
        );
        assert_relative_eq!(
            eccentricity(&origin(), &Vector3::new(1.0, 0.0, 1.0), &f).unwrap(),
            45.0,
            epsilon = 1e-12
        );
        assert_eq!(
            eccentricity(&origin(), &origin(), &f),
            Err(GeometryError::DegenerateInput)
        );
    }

    #[test]
    fn visual_angle_examples() {
        let p = Vector3::new(0.3, 0.2, 1.0);
        assert_eq!(visual_angle(&origin(), &p, &p).unwrap(), 0.0);
        assert_relative_eq!(
            visual_angle(&origin(), &Vector3::new(-1.0, 0.0, 1.0), &Vector3::new(1.0, 0.0, 1.0))
                .unwrap(),
            90.0,
            epsilon = 1e-12
        );
        assert!(visual_angle(&origin(), &origin(), &p).is_err());
    }

    /// A flat display one meter ahead, 2 m wide: a 90 degree horizontal field.
    fn ninety_degree_display() -> DisplayPlacement {
        DisplayPlacement {
            corners: [
                Vector3::new(-1.0, 1.0, 1.0),
                Vector3::new(1.0, 1.0, 1.0),
                Vector3::new(1.0, -1.0, 1.0),
                Vector3::new(-1.0, -1.0, 1.0),
            ],
            res_x: 720,
            res_y: 720,
            kind: DisplayKind::Lcd31,
        }
    }

    #[test]
    fn ppd_matches_analytic_pinhole() {
        // dx/dtheta = (W/2) / tan(FOV/2) pixels per radian.
        let analytic = 360.0 / 45f64.to_radians().tan() * std::f64::consts::PI / 180.0;
        assert_relative_eq!(analytic, 6.283185307179586, epsilon = 1e-12);
        let ppd = pixels_per_degree(&ninety_degree_display(), [360.0, 360.0], &origin()).unwrap();
        assert!((ppd - analytic).abs() / analytic < 0.01, "{ppd}");
    }

    #[test]
    fn ppd_grows_toward_the_edge() {
        let d = ninety_degree_display();
        let sweep: Vec<f64> = (0..=360)
            .map(|u| pixels_per_degree(&d, [360.0 + u as f64, 360.0], &origin()).unwrap())
            .collect();
        assert!(sweep.windows(2).all(|w| w[1] > w[0]));
        assert!(sweep[360] > sweep[0]);
    }

    #[test]
    fn ppd_rejects_out_of_bounds() {
        let d = ninety_degree_display();
        assert!(matches!(
            pixels_per_degree(&d, [721.0, 3.0], &origin()),
            Err(GeometryError::Range(_))
        ));
        assert!(pixels_per_degree(&d, [-0.1, 3.0], &origin()).is_err());
    }

    #[test]
    fn magnification_examples() {
        assert_eq!(magnified_size(0.5, 0.0, 2.0).unwrap(), 0.5);
        assert_eq!(magnified_size(0.7, 3.0, 3.0).unwrap(), 1.4);
        // 0.5 * (1 + 50 / 2) = 13
        assert_relative_eq!(magnified_size(0.5, 50.0, 2.0).unwrap(), 13.0, epsilon = 1e-12);
        assert!(magnified_size(0.0, 1.0, 2.0).is_err());
        assert!(magnified_size(1.0, 1.0, 0.0).is_err());
        assert!(magnified_size(1.0, -1.0, 2.0).is_err());
    }

    fn vec3() -> impl Strategy<Value = Vector3<f64>> {
        (-5.0..5.0f64, -5.0..5.0f64, -5.0..5.0f64).prop_map(|(x, y, z)| Vector3::new(x, y, z))
    }

    proptest! {
        #[test]
        fn visual_angle_symmetric_and_scale_invariant(
            eye in vec3(), a in vec3(), b in vec3(), s in 0.1..10.0f64, t in 0.1..10.0f64
        ) {
            prop_assume!((a - eye).norm() > 1e-3 && (b - eye).norm() > 1e-3);
            let ab = visual_angle(&eye, &a, &b).unwrap();
            let ba = visual_angle(&eye, &b, &a).unwrap();
            prop_assert_eq!(ab, ba);
            let scaled = visual_angle(&eye, &(eye + (a - eye) * s), &(eye + (b - eye) * t)).unwrap();
            prop_assert!((scaled - ab).abs() < 1e-9);
            prop_assert!((0.0..=180.0).contains(&ab));
        }

        #[test]
        fn eccentricity_rotation_invariant(
            p in vec3(), f in vec3(), axis in vec3(), angle in -3.0..3.0f64
        ) {
            prop_assume!(p.norm() > 1e-3 && f.norm() > 1e-3 && axis.norm() > 1e-3);
            let r = Rotation3::from_axis_angle(&nalgebra::Unit::new_normalize(axis), angle);
            let e0 = eccentricity(&origin(), &p, &f).unwrap();
            let e1 = eccentricity(&origin(), &(r * p), &(r * f)).unwrap();
            prop_assert!((e0 - e1).abs() < 1e-9);
        }

        #[test]
        fn ppd_consistent_with_one_pixel_visual_angle(u in 1.0..719.0f64, v in 1.0..719.0f64) {
            let d = ninety_degree_display();
            let eye = Vector3::new(0.1, -0.2, 0.0);
            let ppd = pixels_per_degree(&d, [u, v], &eye).unwrap();
            // One-pixel-wide bar whose edges straddle the sample point.
            let bar = visual_angle(&eye, &d.point_at_pixel(u - 0.5, v), &d.point_at_pixel(u + 0.5, v)).unwrap();
            prop_assert!((ppd * bar - 1.0).abs() < 0.05);
        }
    }
}
