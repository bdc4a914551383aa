//! Off-axis perspective cameras bound to physical display rectangles.

use nalgebra::{Matrix4, UnitQuaternion, Vector3, Vector4};

use super::RenderError;
use crate::geometry::angles::angle_between;
use crate::geometry::DisplayPlacement;
use crate::tracking::Pose;

pub const FAR_PLANE_M: f64 = 100.0;
const PLANE_EPS: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Projection {
    InFront { pixel: [f64; 2], depth: f64 },
    /// On the eye side of the near plane.
    Behind,
}

impl Projection {
    pub fn pixel(self) -> Option<[f64; 2]> {
        match self {
            Projection::InFront { pixel, .. } => Some(pixel),
            Projection::Behind => None,
        }
    }
}

/// Generalized perspective camera whose image plane is a world-space rectangle.
///
/// Screen axes: `vr` to the right, `vu` up, `vn` toward the eye. Extents
/// `l, r, b, t` are measured on the screen plane, at distance `dist` from the eye.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OffAxisCamera {
    pub eye: Vector3<f64>,
    pub screen_corners: [Vector3<f64>; 4],
    pub near: f64,
    pub far: f64,
    pub res_x: u32,
    pub res_y: u32,
    vr: Vector3<f64>,
    vu: Vector3<f64>,
    vn: Vector3<f64>,
    dist: f64,
    l: f64,
    r: f64,
    b: f64,
    t: f64,
}

impl OffAxisCamera {
    /// Builds a camera from world-space corners (TL, TR, BR, BL).
    pub fn from_corners(
        eye: Vector3<f64>,
        corners: [Vector3<f64>; 4],
        res_x: u32,
        res_y: u32,
    ) -> Result<Self, RenderError> {
        let [tl, tr, _br, bl] = corners;
        let across = tr - tl;
        let up = tl - bl;
        if across.norm() <= PLANE_EPS || up.norm() <= PLANE_EPS || res_x == 0 || res_y == 0 {
            return Err(RenderError::DegenerateCamera);
        }
        let vr = across.normalize();
        let vu = up.normalize();
        let vn = vu.cross(&vr).normalize();
        let va = bl - eye;
        let dist = -va.dot(&vn);
        if !(dist > PLANE_EPS) {
            return Err(RenderError::DegenerateCamera);
        }
        Ok(OffAxisCamera {
            eye,
            screen_corners: corners,
            near: dist,
            far: FAR_PLANE_M,
            res_x,
            res_y,
            vr,
            vu,
            vn,
            dist,
            l: vr.dot(&va),
            r: vr.dot(&(corners[2] - eye)),
            b: vu.dot(&va),
            t: vu.dot(&(tl - eye)),
        })
    }

    /// Symmetric camera looking along `orientation * +Z`, its image plane at `near`.
    pub fn perspective(
        eye: Vector3<f64>,
        orientation: UnitQuaternion<f64>,
        hfov_deg: f64,
        res_x: u32,
        res_y: u32,
        near: f64,
    ) -> Result<Self, RenderError> {
        if !(hfov_deg > 0.0 && hfov_deg < 180.0 && near > 0.0) {
            return Err(RenderError::DegenerateCamera);
        }
        let hw = near * (hfov_deg.to_radians() * 0.5).tan();
        let hh = hw * res_y as f64 / res_x.max(1) as f64;
        let c = |x: f64, y: f64| eye + orientation * Vector3::new(x, y, near);
        Self::from_corners(eye, [c(-hw, hh), c(hw, hh), c(hw, -hh), c(-hw, -hh)], res_x, res_y)
    }

    pub fn right(&self) -> Vector3<f64> {
        self.vr
    }

    pub fn up(&self) -> Vector3<f64> {
        self.vu
    }

    /// Unit normal pointing from the screen toward the eye.
    pub fn normal(&self) -> Vector3<f64> {
        self.vn
    }

    /// Eye-to-screen-plane distance.
    pub fn plane_distance(&self) -> f64 {
        self.dist
    }

    /// Camera-space coordinates: screen right, screen up, depth in front of the eye.
    pub fn to_camera(&self, p: &Vector3<f64>) -> Vector3<f64> {
        let rel = p - self.eye;
        Vector3::new(self.vr.dot(&rel), self.vu.dot(&rel), -self.vn.dot(&rel))
    }

    /// Pixel position of a camera-space point with positive depth.
    pub fn camera_to_pixel(&self, c: &Vector3<f64>) -> [f64; 2] {
        let xs = c.x * self.dist / c.z;
        let ys = c.y * self.dist / c.z;
        [
            (xs - self.l) / (self.r - self.l) * self.res_x as f64,
            (self.t - ys) / (self.t - self.b) * self.res_y as f64,
        ]
    }

    pub fn project(&self, p: &Vector3<f64>) -> Projection {
        let c = self.to_camera(p);
        if !(c.z >= self.near - PLANE_EPS) {
            return Projection::Behind;
        }
        Projection::InFront {
            pixel: self.camera_to_pixel(&c),
            depth: c.z,
        }
    }

    /// World point at camera depth `depth` seen through continuous pixel `pixel`.
    pub fn unproject(&self, pixel: [f64; 2], depth: f64) -> Vector3<f64> {
        let xs = self.l + pixel[0] / self.res_x as f64 * (self.r - self.l);
        let ys = self.t - pixel[1] / self.res_y as f64 * (self.t - self.b);
        let on_plane = self.vr * xs + self.vu * ys - self.vn * self.dist;
        self.eye + on_plane * (depth / self.dist)
    }

    /// World-space ray direction through a continuous pixel.
    pub fn ray(&self, pixel: [f64; 2]) -> Vector3<f64> {
        self.unproject(pixel, self.dist) - self.eye
    }

    /// Horizontal angular density at a continuous pixel, as seen from the eye.
    pub fn ppd_at(&self, pixel: [f64; 2]) -> f64 {
        let a = self.ray([pixel[0] - 0.5, pixel[1]]);
        let b = self.ray([pixel[0] + 0.5, pixel[1]]);
        1.0 / angle_between(&a, &b)
    }

    /// Horizontal focal length in pixels.
    pub fn focal_px(&self) -> f64 {
        self.res_x as f64 / (self.r - self.l) * self.dist
    }

    pub fn center_ppd(&self) -> f64 {
        self.ppd_at([self.res_x as f64 * 0.5, self.res_y as f64 * 0.5])
    }

    /// Projection-view matrix in the OpenGL clip convention (camera looks down `-vn`).
    pub fn matrix(&self) -> Matrix4<f64> {
        let (n, f) = (self.near, self.far);
        let s = n / self.dist;
        let (l, r, b, t) = (self.l * s, self.r * s, self.b * s, self.t * s);
        #[rustfmt::skip]
        let proj = Matrix4::new(
            2.0 * n / (r - l), 0.0, (r + l) / (r - l), 0.0,
            0.0, 2.0 * n / (t - b), (t + b) / (t - b), 0.0,
            0.0, 0.0, -(f + n) / (f - n), -2.0 * f * n / (f - n),
            0.0, 0.0, -1.0, 0.0,
        );
        let (vr, vu, vn) = (self.vr, self.vu, self.vn);
        #[rustfmt::skip]
        let rot = Matrix4::new(
            vr.x, vr.y, vr.z, 0.0,
            vu.x, vu.y, vu.z, 0.0,
            vn.x, vn.y, vn.z, 0.0,
            0.0, 0.0, 0.0, 1.0,
        );
        let trans = Matrix4::new_translation(&-self.eye);
        proj * rot * trans
    }

    /// Pixel coordinates via [`matrix`](Self::matrix); `None` when clipped by w.
    pub fn project_with_matrix(&self, p: &Vector3<f64>) -> Option<[f64; 2]> {
        let clip = self.matrix() * Vector4::new(p.x, p.y, p.z, 1.0);
        if clip.w <= 0.0 {
            return None;
        }
        let nx = clip.x / clip.w;
        let ny = clip.y / clip.w;
        Some([
            (nx + 1.0) * 0.5 * self.res_x as f64,
            (1.0 - ny) * 0.5 * self.res_y as f64,
        ])
    }
}

/// Camera for a display, with `eye` given in head coordinates and the display
/// carried along by `head_pose`.
pub fn camera_from_placement(
    placement: &DisplayPlacement,
    eye: &Vector3<f64>,
    head_pose: &Pose,
) -> Result<OffAxisCamera, RenderError> {
    let corners = placement.corners.map(|c| head_pose.transform_point(&c));
    OffAxisCamera::from_corners(
        head_pose.transform_point(eye),
        corners,
        placement.res_x,
        placement.res_y,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{preset, resolve_placements, DisplayKind};
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn front_quad() -> DisplayPlacement {
        DisplayPlacement {
            corners: [
                Vector3::new(-0.1, 0.1, 0.2),
                Vector3::new(0.1, 0.1, 0.2),
                Vector3::new(0.1, -0.1, 0.2),
                Vector3::new(-0.1, -0.1, 0.2),
            ],
            res_x: 400,
            res_y: 400,
            kind: DisplayKind::Lcd31,
        }
    }

    fn angled_cameras() -> Vec<OffAxisCamera> {
        let cfg = preset("angled-52").unwrap();
        let pose = Pose::from_euler_deg(Vector3::new(0.3, 1.7, -0.4), 25.0, 8.0, -6.0);
        resolve_placements(&cfg)
            .unwrap()
            .iter()
            .map(|p| camera_from_placement(p, &Vector3::zeros(), &pose).unwrap())
            .collect()
    }

    #[test]
    fn symmetric_quad_gives_symmetric_frustum() {
        let cam = camera_from_placement(&front_quad(), &Vector3::zeros(), &Pose::identity()).unwrap();
        assert_relative_eq!(cam.l, -cam.r, epsilon = 1e-15);
        assert_relative_eq!(cam.b, -cam.t, epsilon = 1e-15);
        assert_relative_eq!(cam.near, 0.2, epsilon = 1e-15);
        // Same as a 2*atan(0.5) = 53.13 deg symmetric camera.
        let sym = OffAxisCamera::perspective(
            Vector3::zeros(),
            UnitQuaternion::identity(),
            2.0 * 0.5f64.atan().to_degrees(),
            400,
            400,
            0.2,
        )
        .unwrap();
        let p = Vector3::new(0.3, -0.2, 1.5);
        let (a, b) = (cam.project(&p).pixel().unwrap(), sym.project(&p).pixel().unwrap());
        assert_relative_eq!(a[0], b[0], epsilon = 1e-9);
        assert_relative_eq!(a[1], b[1], epsilon = 1e-9);
    }

    #[test]
    fn corners_land_on_framebuffer_corners() {
        for cam in angled_cameras() {
            let expect = [[0.0, 0.0], [720.0, 0.0], [720.0, 720.0], [0.0, 720.0]];
            for (c, e) in cam.screen_corners.iter().zip(expect) {
                let px = cam.project(c).pixel().unwrap();
                assert!((px[0] - e[0]).abs() < 1e-6 && (px[1] - e[1]).abs() < 1e-6, "{px:?}");
            }
        }
    }

    #[test]
    fn center_projects_to_center_and_behind_is_behind() {
        for cam in angled_cameras() {
            let [tl, _, br, _] = cam.screen_corners;
            let px = cam.project(&((tl + br) * 0.5)).pixel().unwrap();
            assert!((px[0] - 360.0).abs() < 0.5 && (px[1] - 360.0).abs() < 0.5);
            let behind = cam.eye + cam.normal() * 0.5;
            assert_eq!(cam.project(&behind), Projection::Behind);
        }
    }

    #[test]
    fn eye_on_plane_is_degenerate() {
        let q = front_quad();
        let on_plane = Vector3::new(0.0, 0.0, 0.2);
        assert_eq!(
            camera_from_placement(&q, &on_plane, &Pose::identity()),
            Err(RenderError::DegenerateCamera)
        );
        let past = Vector3::new(0.0, 0.0, 0.3);
        assert!(camera_from_placement(&q, &past, &Pose::identity()).is_err());
    }

    #[test]
    fn matrix_agrees_with_project() {
        for cam in angled_cameras() {
            for px in [[10.0, 20.0], [360.0, 360.0], [700.0, 5.0]] {
                let p = cam.unproject(px, 3.0);
                let a = cam.project(&p).pixel().unwrap();
                let b = cam.project_with_matrix(&p).unwrap();
                assert!((a[0] - b[0]).abs() < 1e-6 && (a[1] - b[1]).abs() < 1e-6);
            }
        }
    }

    #[test]
    fn ppd_matches_placement_measure() {
        let cfg = preset("angled-52").unwrap();
        let p = resolve_placements(&cfg).unwrap()[1];
        let cam = camera_from_placement(&p, &Vector3::zeros(), &Pose::identity()).unwrap();
        let direct =
            crate::geometry::pixels_per_degree(&p, [360.0, 360.0], &Vector3::zeros()).unwrap();
        assert_relative_eq!(cam.center_ppd(), direct, epsilon = 1e-9);
    }

    /// Brute-force ray/plane oracle: intersect eye->point with the quad plane and
    /// read off the pixel from the quad's bilinear parameterization.
    fn ray_plane_pixel(cam: &OffAxisCamera, point: &Vector3<f64>) -> [f64; 2] {
        let [tl, tr, _, bl] = cam.screen_corners;
        let n = (tr - tl).cross(&(bl - tl));
        let dir = point - cam.eye;
        let s = (tl - cam.eye).dot(&n) / dir.dot(&n);
        let hit = cam.eye + dir * s;
        let u = (hit - tl).dot(&(tr - tl)) / (tr - tl).norm_squared();
        let v = (hit - tl).dot(&(bl - tl)) / (bl - tl).norm_squared();
        [u * cam.res_x as f64, v * cam.res_y as f64]
    }

    proptest! {
        #[test]
        fn interior_points_match_ray_cast(u in 0.0..1.0f64, v in 0.0..1.0f64, k in 1.0..50.0f64) {
            for cam in angled_cameras() {
                let [tl, tr, _, bl] = cam.screen_corners;
                let on_quad = tl + (tr - tl) * u + (bl - tl) * v;
                // Same ray, pushed past the screen.
                let p = cam.eye + (on_quad - cam.eye) * k;
                let a = cam.project(&p).pixel().unwrap();
                let b = ray_plane_pixel(&cam, &p);
                prop_assert!((a[0] - b[0]).abs() < 0.5 && (a[1] - b[1]).abs() < 0.5);
            }
        }

        #[test]
        fn unproject_round_trip(x in 0.0..720.0f64, y in 0.0..720.0f64, d in 0.1..50.0f64) {
            for cam in angled_cameras() {
                let p = cam.unproject([x, y], d);
                let Projection::InFront { pixel, depth } = cam.project(&p) else {
                    return Err(TestCaseError::fail("behind"));
                };
                prop_assert!((pixel[0] - x).abs() < 1e-3 && (pixel[1] - y).abs() < 1e-3);
                prop_assert!((depth - d).abs() < 1e-9);
            }
        }

        #[test]
        fn lines_stay_lines(
            ax in -3.0..3.0f64, ay in -3.0..3.0f64, bx in -3.0..3.0f64, by in -3.0..3.0f64,
            s in 0.1..0.9f64,
        ) {
            for cam in angled_cameras() {
                let a = cam.unproject([360.0, 360.0], 2.0) + Vector3::new(ax, ay, 0.0);
                let b = cam.unproject([360.0, 360.0], 4.0) + Vector3::new(bx, by, 0.0);
                let m = a + (b - a) * s;
                let (Some(pa), Some(pb), Some(pm)) = (
                    cam.project(&a).pixel(), cam.project(&b).pixel(), cam.project(&m).pixel()
                ) else { continue };
                let (dx, dy) = (pb[0] - pa[0], pb[1] - pa[1]);
                let len = dx.hypot(dy);
                prop_assume!(len > 1.0 && len < 1e5);
                let resid = ((pm[0] - pa[0]) * dy - (pm[1] - pa[1]) * dx).abs() / len;
                prop_assert!(resid < 0.5, "{}", resid);
            }
        }
    }
}
