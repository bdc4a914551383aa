//! Deterministic software rendering of per-display framebuffers.

pub mod camera;
pub mod cue;
pub mod draw;
pub mod framebuffer;
pub mod grid;
pub mod raster;

pub use camera::{camera_from_placement, OffAxisCamera, Projection};
pub use cue::{cue_ops, render_cue, Animation, Color, CueSide, CueSpec, NamedColor};
pub use draw::{execute, render_list, DrawList, DrawOp};
pub use framebuffer::{Framebuffer, Rgb, BLACK, WHITE};
pub use grid::{grid_ops, render_grid, GridSpec};
pub use raster::{draw_primitive, draw_segment, fill_polygon, Shape};

use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum RenderError {
    #[error("eye lies on or behind the display plane")]
    DegenerateCamera,
}
