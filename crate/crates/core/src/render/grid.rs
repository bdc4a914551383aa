//! World-anchored grid of horizontal and vertical bars.

use nalgebra::{Rotation3, Vector3};
use serde::{Deserialize, Serialize};

use super::camera::OffAxisCamera;
use super::draw::{execute, DrawOp};
use super::framebuffer::{Framebuffer, BLACK, WHITE};
use crate::exec::Exec;
use crate::tracking::Pose;

/// Bars lie on the four walls of a gravity-aligned box of half-size `extent`
/// centered on the anchor and turned by the anchor's yaw only.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GridSpec {
    pub spacing: f64,
    /// Bar thickness in degrees at the display center.
    pub bar_angular_thickness: f64,
    pub extent: f64,
    pub anchor: Pose,
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec {
            spacing: 0.5,
            bar_angular_thickness: 0.45,
            extent: 10.0,
            anchor: Pose::identity(),
        }
    }
}

impl GridSpec {
    pub fn validate(&self) -> Result<(), String> {
        if !(self.spacing > 0.0) {
            return Err(format!("grid spacing {} must be > 0", self.spacing));
        }
        if !(self.bar_angular_thickness > 0.0 && self.bar_angular_thickness <= 5.0) {
            return Err(format!(
                "bar thickness {} outside (0, 5]",
                self.bar_angular_thickness
            ));
        }
        if !(self.extent > 0.0 && self.extent.is_finite()) {
            return Err(format!("grid extent {} must be > 0", self.extent));
        }
        Ok(())
    }

    /// Heading of the anchor about the vertical axis, radians.
    pub fn anchor_yaw(&self) -> f64 {
        let f = self.anchor.orientation * Vector3::z();
        f.x.atan2(f.z)
    }

    /// World-space bar segments.
    pub fn segments(&self) -> Vec<[Vector3<f64>; 2]> {
        let e = self.extent;
        let n = (e / self.spacing + 1e-9).floor() as i64;
        let rot = Rotation3::from_axis_angle(&Vector3::y_axis(), self.anchor_yaw());
        let c = self.anchor.position;
        let mut out = Vec::with_capacity(16 * (n as usize + 1));
        let mut push = |a: Vector3<f64>, b: Vector3<f64>| out.push([c + rot * a, c + rot * b]);
        for wall in [-e, e] {
            for k in -n..=n {
                let s = k as f64 * self.spacing;
                // Walls x = +-e.
                push(Vector3::new(wall, -e, s), Vector3::new(wall, e, s));
                push(Vector3::new(wall, s, -e), Vector3::new(wall, s, e));
                // Walls z = +-e.
                push(Vector3::new(s, -e, wall), Vector3::new(s, e, wall));
                push(Vector3::new(-e, s, wall), Vector3::new(e, s, wall));
            }
        }
        out
    }
}

/// Clips a camera-space segment to depth >= `near`.
fn clip_near(mut a: Vector3<f64>, mut b: Vector3<f64>, near: f64) -> Option<(Vector3<f64>, Vector3<f64>)> {
    if a.z < near && b.z < near {
        return None;
    }
    if a.z < near {
        a = a + (b - a) * ((near - a.z) / (b.z - a.z));
    } else if b.z < near {
        b = b + (a - b) * ((near - b.z) / (a.z - b.z));
    }
    Some((a, b))
}

/// Draw ops for the grid as seen by `camera`: black background, white bars of
/// constant pixel width equal to the angular thickness at the display center.
pub fn grid_ops(grid: &GridSpec, camera: &OffAxisCamera) -> Vec<DrawOp> {
    let width = grid.bar_angular_thickness * camera.center_ppd();
    let near = camera.near * (1.0 + 1e-9);
    let (w, h) = (camera.res_x as f64, camera.res_y as f64);
    let margin = width + 1.0;
    let mut ops = vec![DrawOp::Clear { color: BLACK }];
    for [a, b] in grid.segments() {
        let Some((ca, cb)) = clip_near(camera.to_camera(&a), camera.to_camera(&b), near) else {
            continue;
        };
        let pa = camera.camera_to_pixel(&ca);
        let pb = camera.camera_to_pixel(&cb);
        let off = (pa[0] < -margin && pb[0] < -margin)
            || (pa[0] > w + margin && pb[0] > w + margin)
            || (pa[1] < -margin && pb[1] < -margin)
            || (pa[1] > h + margin && pb[1] > h + margin);
        if off {
            continue;
        }
        ops.push(DrawOp::Segment {
            a: pa,
            b: pb,
            width,
            color: WHITE,
        });
    }
    ops
}

pub fn render_grid(fb: &mut Framebuffer, grid: &GridSpec, camera: &OffAxisCamera, exec: Exec) {
    execute(fb, &grid_ops(grid, camera), exec);
}
