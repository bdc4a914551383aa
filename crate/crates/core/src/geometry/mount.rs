//! Module mounts and their resolution into display quads.

use nalgebra::{Rotation3, Vector3};
use serde::{Deserialize, Serialize};

use super::display::{DisplayKind, DisplaySpec};
use super::head::{FrameSpec, HeadModel};
use super::ConfigError;

/// Bracket thickness between a side arm and a parallel display.
pub const DEFAULT_STANDOFF_MM: f64 = 5.0;
/// Front-bar depth plus bracket: front displays sit this far ahead of the front inner plane.
pub const FRONT_OFFSET_MM: f64 = 10.0;
pub const MAX_SPACER_YAW_DEG: f64 = 90.0;
pub const MAX_RAIL_OFFSET_MM: f64 = 60.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Left,
    Right,
    Front,
}

impl std::fmt::Display for Side {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Side::Left => "left",
            Side::Right => "right",
            Side::Front => "front",
        })
    }
}

/// One display module attached to the frame.
///
/// Positive `spacer_yaw_deg` rotates +Z toward +X about the vertical axis through the hole.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ModuleMount {
    pub side: Side,
    pub hole_index: u32,
    pub spacer_yaw_deg: f64,
    pub rail_offset_mm: f64,
    pub display: DisplaySpec,
}

impl ModuleMount {
    pub fn direct(side: Side, hole_index: u32, kind: DisplayKind) -> Self {
        ModuleMount {
            side,
            hole_index,
            spacer_yaw_deg: 0.0,
            rail_offset_mm: 0.0,
            display: DisplaySpec::of(kind),
        }
    }

    fn validate(&self, index: usize, frame: &FrameSpec) -> Result<(), ConfigError> {
        if self.hole_index >= frame.holes_per_side {
            return Err(ConfigError::invalid(
                format!("mounts[{index}].hole_index"),
                format!("{} >= {} holes", self.hole_index, frame.holes_per_side),
            ));
        }
        if !(self.spacer_yaw_deg.abs() <= MAX_SPACER_YAW_DEG) {
            return Err(ConfigError::invalid(
                format!("mounts[{index}].spacer_yaw"),
                format!("{} outside [-90, 90]", self.spacer_yaw_deg),
            ));
        }
        if !(0.0..=MAX_RAIL_OFFSET_MM).contains(&self.rail_offset_mm) {
            return Err(ConfigError::invalid(
                format!("mounts[{index}].rail_offset"),
                format!("{} outside [0, 60]", self.rail_offset_mm),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HeadsetConfig {
    pub frame: FrameSpec,
    pub mounts: Vec<ModuleMount>,
    pub head: HeadModel,
}

impl HeadsetConfig {
    pub fn new(frame: FrameSpec, mounts: Vec<ModuleMount>) -> Self {
        HeadsetConfig {
            frame,
            mounts,
            head: HeadModel::default(),
        }
    }

    /// Checks everything that does not need the resolved quads.
    pub fn validate(&self) -> Result<(), ConfigError> {
        self.frame.validate()?;
        self.head.validate()?;
        for (i, m) in self.mounts.iter().enumerate() {
            m.validate(i, &self.frame)?;
        }
        for (i, a) in self.mounts.iter().enumerate() {
            for (j, b) in self.mounts.iter().enumerate().skip(i + 1) {
                if a.side == b.side && a.hole_index == b.hole_index {
                    return Err(ConfigError::DuplicateMount {
                        first: i,
                        second: j,
                        side: a.side,
                        hole: a.hole_index,
                    });
                }
            }
        }
        Ok(())
    }
}

/// A display resolved to a rectangle in head coordinates (meters).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DisplayPlacement {
    /// Top-left, top-right, bottom-right, bottom-left as seen by the wearer.
    pub corners: [Vector3<f64>; 4],
    pub res_x: u32,
    pub res_y: u32,
    pub kind: DisplayKind,
}

impl DisplayPlacement {
    pub fn top_left(&self) -> Vector3<f64> {
        self.corners[0]
    }

    pub fn center(&self) -> Vector3<f64> {
        (self.corners[0] + self.corners[2]) * 0.5
    }

    /// Top-left to top-right.
    pub fn across(&self) -> Vector3<f64> {
        self.corners[1] - self.corners[0]
    }

    /// Top-left to bottom-left.
    pub fn down(&self) -> Vector3<f64> {
        self.corners[3] - self.corners[0]
    }

    pub fn width_m(&self) -> f64 {
        self.across().norm()
    }

    pub fn height_m(&self) -> f64 {
        self.down().norm()
    }

    /// Unit normal pointing toward the wearer.
    pub fn normal(&self) -> Vector3<f64> {
        (-self.down()).cross(&self.across()).normalize()
    }

    /// Point on the display plane for continuous pixel coordinates, (0, 0) being the
    /// top-left corner of the top-left pixel.
    pub fn point_at_pixel(&self, u: f64, v: f64) -> Vector3<f64> {
        self.top_left()
            + self.across() * (u / self.res_x as f64)
            + self.down() * (v / self.res_y as f64)
    }

    pub fn edge_midpoints(&self) -> [Vector3<f64>; 4] {
        let [tl, tr, br, bl] = self.corners;
        [(tl + bl) * 0.5, (tr + br) * 0.5, (tl + tr) * 0.5, (bl + br) * 0.5]
    }
}

/// Resolves every mount of `config` into a display quad.
pub fn resolve_placements(config: &HeadsetConfig) -> Result<Vec<DisplayPlacement>, ConfigError> {
    config.validate()?;
    let head = &config.head;
    let frame = &config.frame;
    let ellipsoid = head.ellipsoid();
    let front_center = head.frame_front_center();
    let pitch = frame.hole_pitch_mm * 1e-3;
    let half_inner = frame.inner_width_mm * 0.5e-3;
    let standoff = DEFAULT_STANDOFF_MM * 1e-3;

    let mut placements = Vec::with_capacity(config.mounts.len());
    for (index, mount) in config.mounts.iter().enumerate() {
        let rail = mount.rail_offset_mm * 1e-3;
        let hole = mount.hole_index as f64;
        let (pivot, offset, across_dir) = match mount.side {
            Side::Right => (
                Vector3::new(front_center.x + half_inner, 0.0, front_center.z - hole * pitch - rail),
                Vector3::new(standoff, 0.0, 0.0),
                -Vector3::z(),
            ),
            Side::Left => (
                Vector3::new(front_center.x - half_inner, 0.0, front_center.z - hole * pitch - rail),
                Vector3::new(-standoff, 0.0, 0.0),
                Vector3::z(),
            ),
            Side::Front => {
                let centered = hole - (frame.holes_per_side as f64 - 1.0) * 0.5;
                (
                    Vector3::new(front_center.x + centered * pitch, 0.0, front_center.z - rail),
                    Vector3::new(0.0, 0.0, FRONT_OFFSET_MM * 1e-3),
                    Vector3::x(),
                )
            }
        };
        let rot = Rotation3::from_axis_angle(&Vector3::y_axis(), mount.spacer_yaw_deg.to_radians());
        let center = pivot + rot * offset;
        let half_across = rot * across_dir * (mount.display.width_m() * 0.5);
        let half_up = Vector3::y() * (mount.display.height_m() * 0.5);
        let placement = DisplayPlacement {
            corners: [
                center - half_across + half_up,
                center + half_across + half_up,
                center + half_across - half_up,
                center - half_across - half_up,
            ],
            res_x: mount.display.res_x,
            res_y: mount.display.res_y,
            kind: mount.display.kind,
        };
        if ellipsoid.intersects_parallelogram(
            &placement.top_left(),
            &placement.across(),
            &placement.down(),
        ) {
            return Err(ConfigError::HeadIntersection {
                index,
                side: mount.side,
                hole: mount.hole_index,
            });
        }
        placements.push(placement);
    }
    Ok(placements)
}
