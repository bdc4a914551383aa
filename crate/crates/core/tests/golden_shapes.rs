use pvsim_core::render::raster::shape_outline;
use pvsim_core::render::{draw_primitive, Framebuffer, Shape, WHITE};
use pvsim_core::Exec;

const W: u32 = 48;
const CENTER: [f64; 2] = [24.3, 23.7];
const SIZE: f64 = 33.0;
const ROTATION: f64 = 20.0;

fn render(shape: Shape, exec: Exec) -> Framebuffer {
    let mut fb = Framebuffer::new(W, W);
    draw_primitive(&mut fb, shape, CENTER, SIZE, WHITE, ROTATION, exec);
    fb
}

fn placed(shape: Shape, size: f64) -> Vec<[f64; 2]> {
    let (s, c) = ROTATION.to_radians().sin_cos();
    shape_outline(shape, size)
        .into_iter()
        .map(|[x, y]| [CENTER[0] + x * c + y * s, CENTER[1] - x * s + y * c])
        .collect()
}

/// Odd number of ring crossings at or left of the sample point.
fn inside(rings: &[Vec<[f64; 2]>], px: f64, py: f64) -> bool {
    let mut n = 0;
    for ring in rings {
        for i in 0..ring.len() {
            let [x0, y0] = ring[i];
            let [x1, y1] = ring[(i + 1) % ring.len()];
            if (y0 <= py) != (y1 <= py) && x0 + (py - y0) * (x1 - x0) / (y1 - y0) <= px {
                n += 1;
            }
        }
    }
    n % 2 == 1
}

fn oracle(shape: Shape) -> Framebuffer {
    let mut fb = Framebuffer::new(W, W);
    for y in 0..W {
        for x in 0..W {
            let (px, py) = (x as f64 + 0.5, y as f64 + 0.5);
            let d2 = (px - CENTER[0]).powi(2) + (py - CENTER[1]).powi(2);
            let r = SIZE / 2.0;
            let on = match shape {
                Shape::FilledCircle => d2 <= r * r,
                Shape::Circle => d2 <= r * r && d2 > (r - 1.0) * (r - 1.0),
                Shape::Dot => d2 <= (SIZE / 4.0).powi(2),
                Shape::Square => inside(&[placed(shape, SIZE), placed(shape, SIZE - 2.0)], px, py),
                _ => inside(&[placed(shape, SIZE)], px, py),
            };
            if on {
                fb.set(x, y, WHITE);
            }
        }
    }
    fb
}

#[test]
fn shapes_match_pixel_oracle() {
    for shape in Shape::ALL {
        let got = render(shape, Exec::Sequential);
        assert!(!got.is_blank(), "{shape:?}");
        assert_eq!(got, oracle(shape), "{shape:?}");
        assert_eq!(got, render(shape, Exec::Parallel), "{shape:?}");
    }
}

#[test]
fn frozen_shape_hashes() {
    let golden = [
        (Shape::Circle, "4b485fd8e54eccb31b31018016adc1af4755abbe41b07054aab23255a752d6e4"),
        (Shape::FilledCircle, "5429ba7223253176b60ee889ac450f028e6cbe4416684801f9cdfafdf0878e7b"),
        (Shape::Square, "084189993e9d3150a20edc32431a601d8ebaede87db369ceb6d74c7b64b62ebb"),
        (Shape::Triangle, "b155ad4fb3b65906aeb55a8d970711338372abb2fa483cc460050b6bc0399d8b"),
        (Shape::Bar, "e987b7edf38bd94f4a7175f34a0978a4050d6dda124992ea8dc30e2ebacd6f6d"),
        (Shape::Arrow, "0a82647fc2db2bb04462090673f59ffcd7aaab5e98aeca5423cf0c97e13ef956"),
        (Shape::Dot, "6f808f3485614a25bf1018372d0f86947d98bc1c27876ab7d81c5192d1e2bd61"),
    ];
    for (shape, hash) in golden {
        let got = render(shape, Exec::Sequential).sha256();
        assert_eq!(got, hash, "{shape:?}");
    }
}
