//! Scene controllers for the demonstration applications.
//!
//! Each controller is a pure function of its inputs: it turns poses, scenario
//! values and time into draw lists or device commands.

pub mod balance;
pub mod feedback;
pub mod notify;
pub mod oov;
pub mod selection;

pub use balance::balance_update;
pub use feedback::{feedback_update, FeedbackParams, FeedbackState};
pub use notify::{notify, NotifyOutput, NotifyTarget};
pub use oov::{
    bearing_deg, oov_cameras, oov_led_commands, oov_led_pattern, oov_update, OovFrame, ProxyDraw,
    ProxySpec,
};
pub use selection::{
    selection_ops, selection_update, Hand, HapticEvent, SelectionLayout, SelectionState,
    SelectionVolume,
};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::{DisplayPlacement, Side};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AppKind {
    Oov,
    Balance,
    Selection,
    Feedback,
    Notify,
}

impl AppKind {
    pub const ALL: [AppKind; 5] = [
        AppKind::Oov,
        AppKind::Balance,
        AppKind::Selection,
        AppKind::Feedback,
        AppKind::Notify,
    ];

    pub fn name(self) -> &'static str {
        match self {
            AppKind::Oov => "oov",
            AppKind::Balance => "balance",
            AppKind::Selection => "selection",
            AppKind::Feedback => "feedback",
            AppKind::Notify => "notify",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AppError {
    #[error("object coincides with the head position")]
    CoincidentObject,
    #[error("cue cannot be shown on {target}: {reason}")]
    UnsupportedCue { target: &'static str, reason: String },
    #[error("render: {0}")]
    Render(#[from] crate::render::RenderError),
}

/// Which side of the head a display serves. Displays straddling the midline are `Front`.
pub fn display_side(placement: &DisplayPlacement) -> Side {
    let x = placement.center().x;
    if x.abs() < 0.5 * placement.width_m() {
        Side::Front
    } else if x > 0.0 {
        Side::Right
    } else {
        Side::Left
    }
}
