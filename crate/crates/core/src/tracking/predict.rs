//! Constant-velocity pose extrapolation.

use nalgebra::UnitQuaternion;

use super::source::PoseSample;
use super::{renormalize, Pose, TrackingError};

pub const DEFAULT_HORIZON_S: f64 = 0.030;
pub const MAX_HORIZON_S: f64 = 0.1;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Prediction {
    pub pose: Pose,
    /// Set when the requested horizon exceeded [`MAX_HORIZON_S`].
    pub clamped: bool,
}

/// Extrapolates the newest sample by `horizon` seconds using the velocity between
/// it and the most recent earlier sample.
pub fn predict(history: &[PoseSample], horizon: f64) -> Result<Prediction, TrackingError> {
    if !(horizon >= 0.0) {
        return Err(TrackingError::Range(format!("horizon {horizon} must be >= 0")));
    }
    let clamped = horizon > MAX_HORIZON_S;
    let h = horizon.min(MAX_HORIZON_S);

    let (last, rest) = history.split_last().ok_or(TrackingError::InsufficientHistory)?;
    let prev = rest
        .iter()
        .rev()
        .find(|s| s.t < last.t)
        .ok_or(TrackingError::InsufficientHistory)?;
    if h == 0.0 {
        return Ok(Prediction {
            pose: last.pose,
            clamped,
        });
    }
    let dt = last.t - prev.t;
    let v = (last.pose.position - prev.pose.position) / dt;
    // World-frame angular velocity; scaled_axis() yields the rotation of angle <= pi.
    let w = (last.pose.orientation * prev.pose.orientation.inverse()).scaled_axis() / dt;
    let orientation = renormalize(UnitQuaternion::from_scaled_axis(w * h) * last.pose.orientation);
    Ok(Prediction {
        pose: Pose::new(last.pose.position + v * h, orientation),
        clamped,
    })
}
