//! Draw lists: the per-display output of app controllers.

use serde::{Deserialize, Serialize};

use super::framebuffer::{Framebuffer, Rgb};
use super::raster::{draw_primitive, draw_segment, Point, Shape};
use crate::exec::Exec;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "snake_case")]
pub enum DrawOp {
    Clear {
        color: Rgb,
    },
    Shape {
        shape: Shape,
        center: Point,
        size: f64,
        color: Rgb,
        rotation: f64,
    },
    Segment {
        a: Point,
        b: Point,
        width: f64,
        color: Rgb,
    },
}

pub type DrawList = Vec<DrawOp>;

/// Executes `ops` in order; later ops overwrite earlier ones.
pub fn execute(fb: &mut Framebuffer, ops: &[DrawOp], exec: Exec) {
    for op in ops {
        match *op {
            DrawOp::Clear { color } => fb.fill(color),
            DrawOp::Shape {
                shape,
                center,
                size,
                color,
                rotation,
            } => draw_primitive(fb, shape, center, size, color, rotation, exec),
            DrawOp::Segment { a, b, width, color } => draw_segment(fb, a, b, width, color, exec),
        }
    }
}

/// Renders a draw list into a fresh black framebuffer.
pub fn render_list(width: u32, height: u32, ops: &[DrawOp], exec: Exec) -> Framebuffer {
    let mut fb = Framebuffer::new(width, height);
    execute(&mut fb, ops, exec);
    fb
}
