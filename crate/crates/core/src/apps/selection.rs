//! Three-option selection by moving a tracked controller into boxes.

use nalgebra::{Matrix3, Vector3};
use serde::{Deserialize, Serialize};

use crate::geometry::ConfigError;
use crate::render::{DrawList, DrawOp, Rgb, Shape, BLACK};
use crate::tracking::euler_deg;

/// Circle diameter in degrees of visual angle.
pub const CIRCLE_SIZE_DEG: f64 = 3.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Hand {
    Left,
    Right,
}

impl Hand {
    pub fn name(self) -> &'static str {
        match self {
            Hand::Left => "left",
            Hand::Right => "right",
        }
    }
}

/// An oriented box in head coordinates (meters). `rotation_deg` is yaw, pitch, roll.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SelectionVolume {
    pub id: u8,
    pub side: Hand,
    pub center: Vector3<f64>,
    pub half_extents: Vector3<f64>,
    #[serde(default)]
    pub rotation_deg: [f64; 3],
}

impl SelectionVolume {
    fn axes(&self) -> Matrix3<f64> {
        let [y, p, r] = self.rotation_deg;
        euler_deg(y, p, r).to_rotation_matrix().into_inner()
    }

    pub fn contains(&self, point: &Vector3<f64>) -> bool {
        let local = self.axes().transpose() * (point - self.center);
        (0..3).all(|i| local[i].abs() <= self.half_extents[i] + 1e-12)
    }

    /// True when the interiors intersect; touching faces do not count.
    pub fn overlaps(&self, other: &SelectionVolume) -> bool {
        let a = self.axes();
        let b = other.axes();
        let mut axes: Vec<Vector3<f64>> = Vec::with_capacity(15);
        for i in 0..3 {
            axes.push(a.column(i).into_owned());
            axes.push(b.column(i).into_owned());
            for j in 0..3 {
                let c = a.column(i).cross(&b.column(j));
                if c.norm() > 1e-9 {
                    axes.push(c.normalize());
                }
            }
        }
        let d = other.center - self.center;
        let radius = |m: &Matrix3<f64>, h: &Vector3<f64>, n: &Vector3<f64>| {
            (0..3).map(|i| (m.column(i).dot(n) * h[i]).abs()).sum::<f64>()
        };
        axes.iter().all(|n| {
            let gap = d.dot(n).abs() - radius(&a, &self.half_extents, n) - radius(&b, &other.half_extents, n);
            gap < -1e-9
        })
    }
}

/// Validated set of volumes.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SelectionLayout {
    volumes: Vec<SelectionVolume>,
}

impl Default for SelectionLayout {
    /// Three 0.25 m cubes per side, option 1 frontmost.
    fn default() -> Self {
        let mut volumes = Vec::new();
        for (side, x) in [(Hand::Left, -0.45), (Hand::Right, 0.45)] {
            for (i, z) in [0.25, 0.0, -0.25].into_iter().enumerate() {
                volumes.push(SelectionVolume {
                    id: i as u8 + 1,
                    side,
                    center: Vector3::new(x, -0.30, z),
                    half_extents: Vector3::repeat(0.125),
                    rotation_deg: [0.0; 3],
                });
            }
        }
        SelectionLayout { volumes }
    }
}

impl SelectionLayout {
    pub fn new(volumes: Vec<SelectionVolume>) -> Result<Self, ConfigError> {
        for (i, v) in volumes.iter().enumerate() {
            let path = format!("selection.volumes[{i}]");
            if !(1..=3).contains(&v.id) {
                return Err(ConfigError::invalid(path, format!("id {} outside 1..3", v.id)));
            }
            if !v.half_extents.iter().all(|h| *h > 0.0 && h.is_finite()) {
                return Err(ConfigError::invalid(path, "half extents must be > 0"));
            }
            for (j, w) in volumes[..i].iter().enumerate() {
                if w.side == v.side && w.id == v.id {
                    return Err(ConfigError::invalid(
                        path,
                        format!("duplicate id {} on the {} side (also volumes[{j}])", v.id, v.side.name()),
                    ));
                }
                if w.side == v.side && w.overlaps(v) {
                    return Err(ConfigError::invalid(path, format!("overlaps volumes[{j}]")));
                }
            }
        }
        Ok(SelectionLayout { volumes })
    }

    pub fn volumes(&self) -> &[SelectionVolume] {
        &self.volumes
    }

    /// Option containing `point`; on a shared face the lower id wins.
    pub fn select(&self, side: Hand, point: &Vector3<f64>) -> Option<u8> {
        self.volumes
            .iter()
            .filter(|v| v.side == side && v.contains(point))
            .map(|v| v.id)
            .min()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HapticEvent {
    pub t: f64,
    pub side: Hand,
    pub option: Option<u8>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize)]
pub struct SelectionState {
    pub left: Option<u8>,
    pub right: Option<u8>,
    /// Events emitted by the step that produced this state.
    pub haptic_events: Vec<HapticEvent>,
}

impl SelectionState {
    pub fn selected(&self, side: Hand) -> Option<u8> {
        match side {
            Hand::Left => self.left,
            Hand::Right => self.right,
        }
    }
}

/// Controllers are in head coordinates; a missing controller selects nothing.
pub fn selection_update(
    left: Option<&Vector3<f64>>,
    right: Option<&Vector3<f64>>,
    layout: &SelectionLayout,
    prev: &SelectionState,
    t: f64,
) -> SelectionState {
    let mut next = SelectionState {
        left: left.and_then(|p| layout.select(Hand::Left, p)),
        right: right.and_then(|p| layout.select(Hand::Right, p)),
        haptic_events: Vec::new(),
    };
    for side in [Hand::Left, Hand::Right] {
        let option = next.selected(side);
        if option != prev.selected(side) {
            next.haptic_events.push(HapticEvent { t, side, option });
        }
    }
    next
}

/// Three circles across the display at quarter widths, the selected one filled.
pub fn selection_ops(selected: Option<u8>, res_x: u32, res_y: u32, ppd: f64, color: Rgb) -> DrawList {
    let (w, h) = (res_x as f64, res_y as f64);
    let mut ops = vec![DrawOp::Clear { color: BLACK }];
    for id in 1..=3u8 {
        ops.push(DrawOp::Shape {
            shape: if selected == Some(id) {
                Shape::FilledCircle
            } else {
                Shape::Circle
            },
            center: [w * id as f64 / 4.0, h * 0.5],
            size: CIRCLE_SIZE_DEG * ppd,
            color,
            rotation: 0.0,
        });
    }
    ops
}
