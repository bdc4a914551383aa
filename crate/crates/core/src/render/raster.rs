//! Scanline rasterization of 2D primitives.
//!
//! Pixels are sampled at their centers, `(x + 0.5, y + 0.5)`. Polygons use the
//! even-odd rule with half-open edges, so shared edges are never filled twice
//! and results are exact regardless of how rows are scheduled.

use serde::{Deserialize, Serialize};

use super::framebuffer::{Framebuffer, Rgb};
use crate::exec::Exec;

pub type Point = [f64; 2];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Shape {
    /// One-pixel ring.
    Circle,
    FilledCircle,
    /// One-pixel outline.
    Square,
    Triangle,
    Bar,
    Arrow,
    Dot,
}

impl Shape {
    pub const ALL: [Shape; 7] = [
        Shape::Circle,
        Shape::FilledCircle,
        Shape::Square,
        Shape::Triangle,
        Shape::Bar,
        Shape::Arrow,
        Shape::Dot,
    ];
}

/// Even-odd crossings of all `rings` with the horizontal line `y = ys`, sorted.
fn crossings(rings: &[Vec<Point>], ys: f64, out: &mut Vec<f64>) {
    out.clear();
    for ring in rings {
        let n = ring.len();
        for i in 0..n {
            let [x0, y0] = ring[i];
            let [x1, y1] = ring[(i + 1) % n];
            if (y0 <= ys) != (y1 <= ys) {
                out.push(x0 + (ys - y0) * (x1 - x0) / (y1 - y0));
            }
        }
    }
    out.sort_by(f64::total_cmp);
}

fn fill_span(row: &mut [u8], width: u32, xa: f64, xb: f64, color: Rgb) {
    // Pixel x is inside when xa <= x + 0.5 < xb.
    let start = (xa - 0.5).ceil().max(0.0);
    let end = (xb - 0.5).ceil().min(width as f64);
    if !(start < end) {
        return;
    }
    for x in start as usize..end as usize {
        row[x * 3..x * 3 + 3].copy_from_slice(&color);
    }
}

/// Runs `f(y, row)` over the rows `[y0, y1)` that exist in `fb`.
fn for_rows<F>(fb: &mut Framebuffer, y0: f64, y1: f64, exec: Exec, f: F)
where
    F: Fn(u32, &mut [u8]) + Sync + Send,
{
    let h = fb.height() as f64;
    let first = y0.floor().max(0.0);
    let last = y1.ceil().min(h);
    if !(first < last) || fb.width() == 0 {
        return;
    }
    let (first, last) = (first as usize, last as usize);
    let stride = fb.row_stride();
    let band = &mut fb.pixels_mut()[first * stride..last * stride];
    exec.for_each_chunk(band, stride, |i, row| f((first + i) as u32, row));
}

/// Fills the even-odd interior of one or more closed rings.
pub fn fill_rings(fb: &mut Framebuffer, rings: &[Vec<Point>], color: Rgb, exec: Exec) {
    let pts = rings.iter().flatten();
    let (mut ymin, mut ymax) = (f64::INFINITY, f64::NEG_INFINITY);
    for p in pts {
        if !p[0].is_finite() || !p[1].is_finite() {
            return;
        }
        ymin = ymin.min(p[1]);
        ymax = ymax.max(p[1]);
    }
    let width = fb.width();
    for_rows(fb, ymin - 0.5, ymax + 0.5, exec, |y, row| {
        let mut xs = Vec::new();
        crossings(rings, y as f64 + 0.5, &mut xs);
        for pair in xs.chunks_exact(2) {
            fill_span(row, width, pair[0], pair[1], color);
        }
    });
}

pub fn fill_polygon(fb: &mut Framebuffer, points: &[Point], color: Rgb, exec: Exec) {
    if points.len() >= 3 {
        fill_rings(fb, &[points.to_vec()], color, exec);
    }
}

/// Pixels whose center lies at squared distance in `(inner², outer²]` from `center`.
fn fill_annulus(
    fb: &mut Framebuffer,
    center: Point,
    inner: Option<f64>,
    outer: f64,
    color: Rgb,
    exec: Exec,
) {
    if !(outer > 0.0) || !center[0].is_finite() || !center[1].is_finite() {
        return;
    }
    let [cx, cy] = center;
    let outer2 = outer * outer;
    let inner2 = inner.map(|r| if r > 0.0 { r * r } else { -1.0 });
    let width = fb.width();
    for_rows(fb, cy - outer - 1.0, cy + outer + 1.0, exec, |y, row| {
        let dy = y as f64 + 0.5 - cy;
        let x0 = (cx - outer - 1.0).floor().max(0.0) as i64;
        let x1 = ((cx + outer + 1.0).ceil() as i64).min(width as i64);
        for x in x0..x1 {
            let dx = x as f64 + 0.5 - cx;
            let d2 = dx * dx + dy * dy;
            let inside = d2 <= outer2 && inner2.is_none_or(|i2| d2 > i2);
            if inside {
                let i = x as usize * 3;
                row[i..i + 3].copy_from_slice(&color);
            }
        }
    });
}

pub fn fill_circle(fb: &mut Framebuffer, center: Point, radius: f64, color: Rgb, exec: Exec) {
    fill_annulus(fb, center, None, radius, color, exec);
}

/// One-pixel ring: `(r - 1)² < d² <= r²`.
pub fn circle_outline(fb: &mut Framebuffer, center: Point, radius: f64, color: Rgb, exec: Exec) {
    fill_annulus(fb, center, Some(radius - 1.0), radius, color, exec);
}

/// Rotates image-space offsets counter-clockwise as seen on screen (y points down).
fn rotate(p: Point, deg: f64) -> Point {
    let (s, c) = deg.to_radians().sin_cos();
    [p[0] * c + p[1] * s, -p[0] * s + p[1] * c]
}

fn place(points: &[Point], center: Point, rotation_deg: f64) -> Vec<Point> {
    points
        .iter()
        .map(|&p| {
            let r = rotate(p, rotation_deg);
            [center[0] + r[0], center[1] + r[1]]
        })
        .collect()
}

/// Unrotated outline of a polygonal shape of nominal size `s`, centered at the origin.
pub fn shape_outline(shape: Shape, s: f64) -> Vec<Point> {
    let h = s * 0.5;
    match shape {
        Shape::Square => vec![[-h, -h], [h, -h], [h, h], [-h, h]],
        Shape::Triangle => vec![[0.0, -h], [h, h], [-h, h]],
        Shape::Bar => {
            let q = (s * 0.125).max(0.5);
            vec![[-h, -q], [h, -q], [h, q], [-h, q]]
        }
        Shape::Arrow => {
            let stem = s * 0.2;
            vec![
                [0.0, -h],
                [h, 0.0],
                [stem, 0.0],
                [stem, h],
                [-stem, h],
                [-stem, 0.0],
                [-h, 0.0],
            ]
        }
        Shape::Circle | Shape::FilledCircle | Shape::Dot => Vec::new(),
    }
}

/// Draws `shape` of nominal size `size` px (diameter or side) at `center`.
/// `rotation` is in degrees, counter-clockwise on screen; circles ignore it.
pub fn draw_primitive(
    fb: &mut Framebuffer,
    shape: Shape,
    center: Point,
    size: f64,
    color: Rgb,
    rotation: f64,
    exec: Exec,
) {
    if !(size > 0.0) {
        return;
    }
    match shape {
        Shape::FilledCircle => fill_circle(fb, center, size * 0.5, color, exec),
        Shape::Circle => circle_outline(fb, center, size * 0.5, color, exec),
        Shape::Dot => fill_circle(fb, center, (size * 0.25).max(0.5), color, exec),
        Shape::Square => {
            let outer = place(&shape_outline(Shape::Square, size), center, rotation);
            if size <= 2.0 {
                fill_polygon(fb, &outer, color, exec);
            } else {
                let inner = place(&shape_outline(Shape::Square, size - 2.0), center, rotation);
                fill_rings(fb, &[outer, inner], color, exec);
            }
        }
        Shape::Triangle | Shape::Bar | Shape::Arrow => {
            let pts = place(&shape_outline(shape, size), center, rotation);
            fill_polygon(fb, &pts, color, exec);
        }
    }
}

/// Segment `a`-`b` drawn as a rectangle `width` px wide.
pub fn draw_segment(fb: &mut Framebuffer, a: Point, b: Point, width: f64, color: Rgb, exec: Exec) {
    let (dx, dy) = (b[0] - a[0], b[1] - a[1]);
    let len = dx.hypot(dy);
    if !(len > 0.0) || !(width > 0.0) {
        return;
    }
    let (nx, ny) = (-dy / len * width * 0.5, dx / len * width * 0.5);
    let quad = [
        [a[0] + nx, a[1] + ny],
        [b[0] + nx, b[1] + ny],
        [b[0] - nx, b[1] - ny],
        [a[0] - nx, a[1] - ny],
    ];
    fill_polygon(fb, &quad, color, exec);
}
