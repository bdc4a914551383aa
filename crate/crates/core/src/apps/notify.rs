//! General-purpose notification routing to LCDs and LED/OLED modules.

use serde::{Deserialize, Serialize};

use super::AppError;
use crate::device::command::{BlinkShape, DeviceCommand, Horizontal, Vertical, MAX_RATE};
use crate::device::ModuleKind;
use crate::render::{cue_ops, Animation, CueSpec, DrawList, Shape};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum NotifyTarget {
    Lcd { res_x: u32, res_y: u32, ppd: f64 },
    LedStick { leds: u32 },
    LedMatrix,
    Oled,
}

impl NotifyTarget {
    pub fn name(self) -> &'static str {
        match self {
            NotifyTarget::Lcd { .. } => "lcd",
            NotifyTarget::LedStick { .. } => "led-stick",
            NotifyTarget::LedMatrix => "led-matrix",
            NotifyTarget::Oled => "oled",
        }
    }

    pub fn module(self) -> Option<ModuleKind> {
        match self {
            NotifyTarget::Lcd { .. } => None,
            NotifyTarget::LedStick { leds } => Some(ModuleKind::Stick { leds }),
            NotifyTarget::LedMatrix => Some(ModuleKind::Matrix),
            NotifyTarget::Oled => Some(ModuleKind::Oled),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum NotifyOutput {
    Draw(DrawList),
    Commands(Vec<DeviceCommand>),
}

/// Device-side rate from a cue speed, as whole steps (or Hz) per second.
fn rate(speed: f64) -> u32 {
    speed.round().clamp(1.0, MAX_RATE as f64) as u32
}

/// LCD targets get draw ops for time `t`. LED and OLED targets get the command
/// sequence that starts an equivalent device-side animation.
pub fn notify(cue: &CueSpec, target: NotifyTarget, t: f64) -> Result<NotifyOutput, AppError> {
    let unsupported = |reason: String| AppError::UnsupportedCue {
        target: target.name(),
        reason,
    };
    cue.validate().map_err(unsupported)?;
    let Some(kind) = target.module() else {
        let NotifyTarget::Lcd { res_x, res_y, ppd } = target else {
            unreachable!()
        };
        return Ok(NotifyOutput::Draw(cue_ops(cue, res_x, res_y, ppd, t)));
    };
    let is_matrix = kind == ModuleKind::Matrix;
    let anim = match (cue.animation, cue.shape) {
        (Animation::Blink, Shape::Dot) => DeviceCommand::AnimBlink {
            shape: BlinkShape::Dot,
            hz: rate(cue.speed),
        },
        (Animation::Blink, Shape::Bar) => DeviceCommand::AnimBlink {
            shape: BlinkShape::Bar,
            hz: rate(cue.speed),
        },
        (Animation::Blink, Shape::Arrow) if is_matrix => DeviceCommand::AnimBlink {
            shape: BlinkShape::Arrow,
            hz: rate(cue.speed),
        },
        (Animation::MoveLeft | Animation::MoveRight, Shape::Dot) => DeviceCommand::AnimDot {
            dir: if cue.animation == Animation::MoveLeft {
                Horizontal::Left
            } else {
                Horizontal::Right
            },
            steps_per_s: rate(cue.speed),
        },
        (Animation::MoveUp | Animation::MoveDown, Shape::Arrow) if is_matrix => {
            DeviceCommand::AnimArrow {
                dir: if cue.animation == Animation::MoveUp {
                    Vertical::Up
                } else {
                    Vertical::Down
                },
                speed: rate(cue.speed),
            }
        }
        (animation, shape) => {
            return Err(unsupported(format!(
                "{} with {} animation",
                serde_json::to_string(&shape).unwrap_or_default().trim_matches('"'),
                serde_json::to_string(&animation).unwrap_or_default().trim_matches('"'),
            )))
        }
    };
    Ok(NotifyOutput::Commands(vec![
        DeviceCommand::Clear(kind.clear_target()),
        anim,
    ]))
}
