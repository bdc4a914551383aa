//! Notification cues and their time-driven animations.

use nalgebra::Vector3;
use serde::{Deserialize, Serialize};

use super::draw::{execute, DrawOp};
use super::framebuffer::{Framebuffer, Rgb};
use super::raster::Shape;
use crate::exec::Exec;
use crate::geometry::{pixels_per_degree, DisplayPlacement};

pub const FLASH_S: f64 = 0.2;
pub const POP_S: f64 = 0.3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NamedColor {
    Red,
    Green,
    Blue,
    White,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Color {
    Named(NamedColor),
    Rgb(Rgb),
}

impl Color {
    pub const WHITE: Color = Color::Named(NamedColor::White);

    pub fn rgb(self) -> Rgb {
        match self {
            Color::Named(NamedColor::Red) => [255, 0, 0],
            Color::Named(NamedColor::Green) => [0, 255, 0],
            Color::Named(NamedColor::Blue) => [0, 0, 255],
            Color::Named(NamedColor::White) => [255, 255, 255],
            Color::Rgb(c) => c,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Animation {
    None,
    MoveUp,
    MoveDown,
    MoveLeft,
    MoveRight,
    Rotate,
    GrowShrink,
    PopFromSide,
    Flash,
    Blink,
}

impl Animation {
    pub const ALL: [Animation; 10] = [
        Animation::None,
        Animation::MoveUp,
        Animation::MoveDown,
        Animation::MoveLeft,
        Animation::MoveRight,
        Animation::Rotate,
        Animation::GrowShrink,
        Animation::PopFromSide,
        Animation::Flash,
        Animation::Blink,
    ];

    pub fn is_move(self) -> bool {
        matches!(
            self,
            Animation::MoveUp | Animation::MoveDown | Animation::MoveLeft | Animation::MoveRight
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CueSide {
    Left,
    Right,
    Both,
}

/// A notification cue drawn at the display center.
///
/// `size` is in degrees of visual angle. `speed` is degrees per second for
/// `Move*` and `Rotate`, Hz for `Blink` and `GrowShrink`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct CueSpec {
    pub shape: Shape,
    pub color: Color,
    pub animation: Animation,
    pub size: f64,
    pub speed: f64,
    pub side: CueSide,
}

impl Default for CueSpec {
    fn default() -> Self {
        CueSpec {
            shape: Shape::FilledCircle,
            color: Color::WHITE,
            animation: Animation::None,
            size: 2.0,
            speed: 1.0,
            side: CueSide::Both,
        }
    }
}

impl CueSpec {
    pub fn validate(&self) -> Result<(), String> {
        if !(self.size > 0.0 && self.size.is_finite()) {
            return Err(format!("cue size {} must be > 0", self.size));
        }
        if !(self.speed >= 0.0 && self.speed.is_finite()) {
            return Err(format!("cue speed {} must be >= 0", self.speed));
        }
        Ok(())
    }
}

/// Base rotation that points an arrow along its motion.
fn heading_deg(animation: Animation) -> f64 {
    match animation {
        Animation::MoveDown => 180.0,
        Animation::MoveLeft => 90.0,
        Animation::MoveRight => -90.0,
        _ => 0.0,
    }
}

/// Draw ops for `cue` at time `t` on a `res_x` x `res_y` display with angular
/// density `ppd` at its center. Pure in `t`.
pub fn cue_ops(cue: &CueSpec, res_x: u32, res_y: u32, ppd: f64, t: f64) -> Vec<DrawOp> {
    let (w, h) = (res_x as f64, res_y as f64);
    let mut center = [w * 0.5, h * 0.5];
    let mut size = cue.size * ppd;
    let mut rotation = if cue.shape == Shape::Arrow {
        heading_deg(cue.animation)
    } else {
        0.0
    };
    let t = t.max(0.0);
    match cue.animation {
        Animation::None => {}
        Animation::Blink => {
            if (t * cue.speed).fract() >= 0.5 {
                return Vec::new();
            }
        }
        Animation::Flash => {
            if t >= FLASH_S {
                return Vec::new();
            }
        }
        Animation::MoveUp | Animation::MoveDown | Animation::MoveLeft | Animation::MoveRight => {
            let off = cue.speed * t * ppd;
            match cue.animation {
                Animation::MoveUp => center[1] = (center[1] - off).rem_euclid(h),
                Animation::MoveDown => center[1] = (center[1] + off).rem_euclid(h),
                Animation::MoveLeft => center[0] = (center[0] - off).rem_euclid(w),
                _ => center[0] = (center[0] + off).rem_euclid(w),
            }
        }
        Animation::Rotate => rotation += cue.speed * t,
        Animation::GrowShrink => {
            size *= 1.0 + 0.5 * (std::f64::consts::TAU * cue.speed * t).sin();
        }
        Animation::PopFromSide => {
            let p = (t / POP_S).min(1.0);
            let e = p * p;
            let start = match cue.side {
                CueSide::Left => [-size * 0.5, center[1]],
                CueSide::Right => [w + size * 0.5, center[1]],
                CueSide::Both => [center[0], h + size * 0.5],
            };
            center = [
                start[0] + (center[0] - start[0]) * e,
                start[1] + (center[1] - start[1]) * e,
            ];
        }
    }
    vec![DrawOp::Shape {
        shape: cue.shape,
        center,
        size,
        color: cue.color.rgb(),
        rotation,
    }]
}

/// Composites `cue` over `fb`, sized with the angular density at the display center.
pub fn render_cue(
    fb: &mut Framebuffer,
    cue: &CueSpec,
    placement: &DisplayPlacement,
    eye: &Vector3<f64>,
    t: f64,
    exec: Exec,
) {
    let center = [placement.res_x as f64 * 0.5, placement.res_y as f64 * 0.5];
    let ppd = pixels_per_degree(placement, center, eye).unwrap_or(1.0);
    execute(fb, &cue_ops(cue, placement.res_x, placement.res_y, ppd, t), exec);
}
