//! Out-of-view awareness: a sphere proxy seen through wide side cameras, and
//! a moving LED dot that points toward the object.

use nalgebra::{UnitQuaternion, Vector3};
use serde::{Deserialize, Serialize};

use super::{display_side, AppError};
use crate::device::command::{DeviceCommand, Horizontal};
use crate::device::{Emulator, ModuleKind};
use crate::geometry::{DisplayPlacement, Side};
use crate::render::{DrawList, DrawOp, OffAxisCamera, Projection, Rgb, Shape, BLACK, WHITE};
use crate::tracking::Pose;

pub const MIN_DISTANCE_M: f64 = 0.3;
pub const MAX_DISTANCE_M: f64 = 10.0;
/// Full sweeps of the LED dot per second.
pub const LED_SWEEP_HZ: f64 = 2.0;
const CAMERA_NEAR_M: f64 = 0.05;
const EDGE_EPS: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ProxySpec {
    /// Sphere radius when the object is `d0` away.
    pub base_radius: f64,
    pub d0: f64,
    pub placement_radius: f64,
    pub color: Rgb,
    pub camera_yaw_deg: f64,
    pub camera_hfov_deg: f64,
}

impl Default for ProxySpec {
    fn default() -> Self {
        ProxySpec {
            base_radius: 0.1,
            d0: 1.0,
            placement_radius: 0.5,
            color: WHITE,
            camera_yaw_deg: 90.0,
            camera_hfov_deg: 160.0,
        }
    }
}

impl ProxySpec {
    pub fn validate(&self) -> Result<(), String> {
        for (name, v) in [
            ("base_radius", self.base_radius),
            ("d0", self.d0),
            ("placement_radius", self.placement_radius),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(format!("{name} {v} must be > 0"));
            }
        }
        if !(self.camera_hfov_deg > 0.0 && self.camera_hfov_deg < 180.0) {
            return Err(format!("camera_hfov_deg {} outside (0, 180)", self.camera_hfov_deg));
        }
        Ok(())
    }

    /// Screen radius in pixels for an object `distance` away, seen through a
    /// camera of focal length `focal_px`.
    pub fn radius_px(&self, distance: f64, focal_px: f64) -> f64 {
        let d = distance.clamp(MIN_DISTANCE_M, MAX_DISTANCE_M);
        focal_px * self.base_radius / self.placement_radius * self.d0 / d
    }
}

/// Virtual cameras at the head, yawed toward each display's side.
pub fn oov_cameras(
    placements: &[DisplayPlacement],
    eye: &Vector3<f64>,
    head_pose: &Pose,
    proxy: &ProxySpec,
) -> Result<Vec<OffAxisCamera>, AppError> {
    placements
        .iter()
        .map(|p| {
            let yaw = match display_side(p) {
                Side::Right => proxy.camera_yaw_deg,
                Side::Left => -proxy.camera_yaw_deg,
                Side::Front => 0.0,
            };
            let q = head_pose.orientation
                * UnitQuaternion::from_axis_angle(&Vector3::y_axis(), yaw.to_radians());
            Ok(OffAxisCamera::perspective(
                head_pose.transform_point(eye),
                q,
                proxy.camera_hfov_deg,
                p.res_x,
                p.res_y,
                CAMERA_NEAR_M,
            )?)
        })
        .collect()
}

/// Head-relative bearing of `object`, degrees; positive to the right.
pub fn bearing_deg(head_pose: &Pose, eye: &Vector3<f64>, object: &Vector3<f64>) -> f64 {
    let rel = head_pose.inverse_transform_point(object) - eye;
    rel.x.atan2(rel.z).to_degrees()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ProxyDraw {
    pub center: [f64; 2],
    pub radius: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OovFrame {
    pub bearing_deg: f64,
    pub distance: f64,
    pub lists: Vec<DrawList>,
    /// Proxy as drawn on each display, if it lands there.
    pub proxies: Vec<Option<ProxyDraw>>,
}

pub fn oov_update(
    head_pose: &Pose,
    eye: &Vector3<f64>,
    object: &Vector3<f64>,
    proxy: &ProxySpec,
    cameras: &[OffAxisCamera],
) -> Result<OovFrame, AppError> {
    let rel = head_pose.inverse_transform_point(object) - eye;
    let distance = rel.norm();
    if distance < 1e-9 {
        return Err(AppError::CoincidentObject);
    }
    let placed = head_pose.transform_point(&(eye + rel / distance * proxy.placement_radius));
    let mut lists = Vec::with_capacity(cameras.len());
    let mut proxies = Vec::with_capacity(cameras.len());
    for cam in cameras {
        let mut ops = vec![DrawOp::Clear { color: BLACK }];
        let drawn = match cam.project(&placed) {
            Projection::InFront { pixel, .. }
                if (-EDGE_EPS..=cam.res_x as f64 + EDGE_EPS).contains(&pixel[0])
                    && (-EDGE_EPS..=cam.res_y as f64 + EDGE_EPS).contains(&pixel[1]) =>
            {
                let radius = proxy.radius_px(distance, cam.focal_px());
                ops.push(DrawOp::Shape {
                    shape: Shape::FilledCircle,
                    center: pixel,
                    size: 2.0 * radius,
                    color: proxy.color,
                    rotation: 0.0,
                });
                Some(ProxyDraw { center: pixel, radius })
            }
            _ => None,
        };
        lists.push(ops);
        proxies.push(drawn);
    }
    Ok(OovFrame {
        bearing_deg: rel.x.atan2(rel.z).to_degrees(),
        distance,
        lists,
        proxies,
    })
}

/// Device commands for the (left, right) modules. Bearing 0 clears both; a
/// bearing of exactly 180 counts as right.
pub fn oov_led_commands(bearing_deg: f64, kind: ModuleKind) -> [Vec<DeviceCommand>; 2] {
    let clear = DeviceCommand::Clear(kind.clear_target());
    let rate = (LED_SWEEP_HZ * kind.dot_positions() as f64).round() as u32;
    let b = if bearing_deg <= -180.0 { 180.0 } else { bearing_deg };
    if b.abs() < 1e-9 {
        return [vec![clear.clone()], vec![clear]];
    }
    if b > 0.0 {
        let dot = DeviceCommand::AnimDot { dir: Horizontal::Right, steps_per_s: rate };
        [vec![clear.clone()], vec![clear, dot]]
    } else {
        let dot = DeviceCommand::AnimDot { dir: Horizontal::Left, steps_per_s: rate };
        [vec![clear.clone(), dot], vec![clear]]
    }
}

/// Frames the (left, right) modules show `t` seconds after the guidance started.
pub fn oov_led_pattern(bearing_deg: f64, t: f64, kind: ModuleKind) -> [Vec<Rgb>; 2] {
    oov_led_commands(bearing_deg, kind).map(|cmds| {
        let mut emu = Emulator::new(kind, false);
        for cmd in &cmds {
            emu.submit(cmd, 0.0);
        }
        emu.step(t)
    })
}
