//! Deviation of a measured value from its target, shown as moving arrows.

use serde::{Deserialize, Serialize};

use crate::render::{Animation, Color, CueSide, CueSpec, Shape};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct FeedbackState {
    pub current: f64,
    pub target: f64,
    pub dead_zone: f64,
}

impl Default for FeedbackState {
    fn default() -> Self {
        FeedbackState {
            current: 150.0,
            target: 150.0,
            dead_zone: 5.0,
        }
    }
}

/// Arrow speed is `gain * |deviation|` degrees per second, at most `max_speed`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct FeedbackParams {
    pub gain: f64,
    pub max_speed: f64,
    pub arrow_size_deg: f64,
    pub color: Color,
}

impl Default for FeedbackParams {
    fn default() -> Self {
        FeedbackParams {
            gain: 1.0,
            max_speed: 40.0,
            arrow_size_deg: 3.0,
            color: Color::WHITE,
        }
    }
}

impl FeedbackParams {
    pub fn validate(&self) -> Result<(), String> {
        if !(self.gain >= 0.0 && self.max_speed >= 0.0 && self.arrow_size_deg > 0.0) {
            return Err("feedback gain and max_speed must be >= 0, arrow size > 0".into());
        }
        Ok(())
    }
}

/// One arrow cue per side; empty inside the dead zone. High values point up.
pub fn feedback_update(state: &FeedbackState, params: &FeedbackParams) -> Vec<CueSpec> {
    let deviation = state.current - state.target;
    if deviation.abs() <= state.dead_zone.max(0.0) {
        return Vec::new();
    }
    let animation = if deviation > 0.0 {
        Animation::MoveUp
    } else {
        Animation::MoveDown
    };
    let speed = (params.gain * deviation.abs()).min(params.max_speed);
    [CueSide::Left, CueSide::Right]
        .into_iter()
        .map(|side| CueSpec {
            shape: Shape::Arrow,
            color: params.color,
            animation,
            size: params.arrow_size_deg,
            speed,
            side,
        })
        .collect()
}
