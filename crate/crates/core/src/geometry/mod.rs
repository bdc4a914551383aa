//! Headset geometry and visual-field measures.

pub mod angles;
pub mod coverage;
pub mod display;
pub mod head;
pub mod mount;
pub mod presets;

pub use angles::{eccentricity, magnified_size, pixels_per_degree, visual_angle};
pub use coverage::{coverage_report, CoverageReport, DisplayCoverage};
pub use display::{DisplayKind, DisplaySpec, DEFAULT_STICK_LEDS};
pub use head::{Ellipsoid, FrameSpec, HeadModel};
pub use mount::{resolve_placements, DisplayPlacement, HeadsetConfig, ModuleMount, Side};
pub use presets::{preset, PRESET_NAMES};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConfigError {
    #[error("{path}: {message}")]
    Invalid { path: String, message: String },
    #[error("mounts[{first}] and mounts[{second}] both occupy {side} hole {hole}")]
    DuplicateMount {
        first: usize,
        second: usize,
        side: Side,
        hole: u32,
    },
    #[error("mounts[{index}] ({side} hole {hole}) intersects the head")]
    HeadIntersection { index: usize, side: Side, hole: u32 },
    #[error("unknown preset {0:?}")]
    UnknownPreset(String),
}

impl ConfigError {
    pub fn invalid(path: impl Into<String>, message: impl Into<String>) -> Self {
        ConfigError::Invalid {
            path: path.into(),
            message: message.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeometryError {
    #[error("degenerate input: zero-length or non-finite direction")]
    DegenerateInput,
    #[error("out of range: {0}")]
    Range(String),
}
