//! Visual-field coverage of a headset configuration.

use std::fmt;

use nalgebra::Vector3;
use serde::Serialize;

use super::angles::{eccentricity, pixels_per_degree, visual_angle};
use super::display::DisplayKind;
use super::head::HeadModel;
use super::mount::{resolve_placements, DisplayPlacement, HeadsetConfig, Side};
use super::ConfigError;

/// Coverage of one display, seen from the cyclopean eye.
///
/// Horizontal eccentricity is the unsigned azimuth of a point about the head's
/// up axis; vertical eccentricity is the unsigned elevation above or below the
/// horizontal plane. Extrema are taken over the four corners and the center.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DisplayCoverage {
    pub index: usize,
    pub side: Side,
    pub hole: u32,
    pub kind: DisplayKind,
    pub horizontal_min: f64,
    pub horizontal_max: f64,
    pub vertical_min: f64,
    pub vertical_max: f64,
    pub elevation_min: f64,
    pub elevation_max: f64,
    /// Visual angle between the midpoints of the left and right edges.
    pub horizontal_coverage: f64,
    /// Visual angle between the midpoints of the top and bottom edges.
    pub vertical_coverage: f64,
    pub center_eccentricity: f64,
    pub center_ppd: f64,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize)]
pub struct CoverageReport {
    pub displays: Vec<DisplayCoverage>,
    pub max_horizontal_eccentricity: f64,
    pub max_vertical_eccentricity: f64,
    /// Highest minus lowest elevation over all displays.
    pub vertical_span: f64,
}

/// Azimuth and elevation in degrees of `p` in the head's (right, up, forward) basis.
pub fn azimuth_elevation(head: &HeadModel, eye: &Vector3<f64>, p: &Vector3<f64>) -> (f64, f64) {
    let d = p - eye;
    let (x, y, z) = (d.dot(&head.right()), d.dot(&head.up), d.dot(&head.forward));
    (x.atan2(z).to_degrees(), y.atan2(x.hypot(z)).to_degrees())
}

fn display_coverage(
    index: usize,
    side: Side,
    hole: u32,
    placement: &DisplayPlacement,
    head: &HeadModel,
) -> DisplayCoverage {
    let eye = head.cyclopean_eye();
    let mut points = placement.corners.to_vec();
    points.push(placement.center());

    let mut cov = DisplayCoverage {
        index,
        side,
        hole,
        kind: placement.kind,
        horizontal_min: f64::INFINITY,
        horizontal_max: 0.0,
        vertical_min: f64::INFINITY,
        vertical_max: 0.0,
        elevation_min: f64::INFINITY,
        elevation_max: f64::NEG_INFINITY,
        horizontal_coverage: 0.0,
        vertical_coverage: 0.0,
        center_eccentricity: 0.0,
        center_ppd: 0.0,
    };
    for p in &points {
        let (az, el) = azimuth_elevation(head, &eye, p);
        cov.horizontal_min = cov.horizontal_min.min(az.abs());
        cov.horizontal_max = cov.horizontal_max.max(az.abs());
        cov.vertical_min = cov.vertical_min.min(el.abs());
        cov.vertical_max = cov.vertical_max.max(el.abs());
        cov.elevation_min = cov.elevation_min.min(el);
        cov.elevation_max = cov.elevation_max.max(el);
    }
    let [left, right, top, bottom] = placement.edge_midpoints();
    // Resolved quads never contain the eye, so these cannot fail.
    cov.horizontal_coverage = visual_angle(&eye, &left, &right).unwrap_or(0.0);
    cov.vertical_coverage = visual_angle(&eye, &top, &bottom).unwrap_or(0.0);
    cov.center_eccentricity = eccentricity(&eye, &placement.center(), &head.forward).unwrap_or(0.0);
    let center_px = [placement.res_x as f64 * 0.5, placement.res_y as f64 * 0.5];
    cov.center_ppd = pixels_per_degree(placement, center_px, &eye).unwrap_or(0.0);
    cov
}

pub fn coverage_report(config: &HeadsetConfig) -> Result<CoverageReport, ConfigError> {
    let placements = resolve_placements(config)?;
    let displays: Vec<DisplayCoverage> = placements
        .iter()
        .zip(&config.mounts)
        .enumerate()
        .map(|(i, (p, m))| display_coverage(i, m.side, m.hole_index, p, &config.head))
        .collect();
    let mut report = CoverageReport {
        max_horizontal_eccentricity: displays.iter().map(|d| d.horizontal_max).fold(0.0, f64::max),
        max_vertical_eccentricity: displays.iter().map(|d| d.vertical_max).fold(0.0, f64::max),
        vertical_span: 0.0,
        displays,
    };
    if !report.displays.is_empty() {
        let top = report.displays.iter().map(|d| d.elevation_max).fold(f64::NEG_INFINITY, f64::max);
        let bottom = report.displays.iter().map(|d| d.elevation_min).fold(f64::INFINITY, f64::min);
        report.vertical_span = top - bottom;
    }
    Ok(report)
}

impl fmt::Display for CoverageReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for d in &self.displays {
            writeln!(f, "display {} ({} hole {}, {}):", d.index, d.side, d.hole, d.kind.name())?;
            writeln!(
                f,
                "  horizontal eccentricity {:.1}..{:.1} deg, vertical {:.1}..{:.1} deg",
                d.horizontal_min, d.horizontal_max, d.vertical_min, d.vertical_max
            )?;
            writeln!(
                f,
                "  coverage {:.1} x {:.1} deg, center eccentricity {:.2} deg, center {:.2} ppd",
                d.horizontal_coverage, d.vertical_coverage, d.center_eccentricity, d.center_ppd
            )?;
        }
        writeln!(f, "max horizontal eccentricity: {:.1} deg", self.max_horizontal_eccentricity)?;
        writeln!(f, "max vertical eccentricity: {:.1} deg", self.max_vertical_eccentricity)?;
        write!(f, "vertical span: {:.1} deg", self.vertical_span)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{FrameSpec, ModuleMount};
    use proptest::prelude::*;

    #[test]
    fn empty_config_gives_empty_report() {
        let cfg = HeadsetConfig::new(FrameSpec::standard(250).unwrap(), vec![]);
        let r = coverage_report(&cfg).unwrap();
        assert!(r.displays.is_empty());
        assert_eq!(r.max_horizontal_eccentricity, 0.0);
        assert_eq!(r.max_vertical_eccentricity, 0.0);
        assert_eq!(r.vertical_span, 0.0);
    }

    #[test]
    fn azimuth_and_elevation_signs() {
        let head = HeadModel::default();
        let o = Vector3::zeros();
        let (az, el) = azimuth_elevation(&head, &o, &Vector3::new(1.0, 1.0, 0.0));
        assert!((az - 90.0).abs() < 1e-12 && (el - 45.0).abs() < 1e-12);
        let (az, el) = azimuth_elevation(&head, &o, &Vector3::new(-1.0, -1.0, -1.0));
        assert!((az + 135.0).abs() < 1e-12 && el < 0.0);
    }

    #[test]
    fn text_report_mentions_every_display() {
        let cfg = HeadsetConfig::new(
            FrameSpec::standard(250).unwrap(),
            vec![
                ModuleMount::direct(Side::Left, 2, DisplayKind::Lcd31),
                ModuleMount::direct(Side::Right, 2, DisplayKind::Lcd31),
            ],
        );
        let text = coverage_report(&cfg).unwrap().to_string();
        assert!(text.contains("display 0 (left hole 2"));
        assert!(text.contains("display 1 (right hole 2"));
        assert!(text.contains("vertical span"));
    }

    proptest! {
        #[test]
        fn report_extrema_cover_points_and_global_is_max(
            left_hole in 0u32..12, right_hole in 0u32..12,
            left_yaw in -60.0..60.0f64, right_yaw in -60.0..60.0f64,
            rail in 0.0..60.0f64,
        ) {
            let cfg = HeadsetConfig::new(
                FrameSpec::standard(250).unwrap(),
                vec![
                    ModuleMount { spacer_yaw_deg: left_yaw, rail_offset_mm: rail,
                        ..ModuleMount::direct(Side::Left, left_hole, DisplayKind::Lcd31) },
                    ModuleMount { spacer_yaw_deg: right_yaw,
                        ..ModuleMount::direct(Side::Right, right_hole, DisplayKind::LedMatrix13x9) },
                ],
            );
            let Ok(report) = coverage_report(&cfg) else { return Ok(()); };
            let placements = resolve_placements(&cfg).unwrap();
            for (d, p) in report.displays.iter().zip(&placements) {
                let mut pts = p.corners.to_vec();
                pts.push(p.center());
                let max_h = pts.iter()
                    .map(|q| azimuth_elevation(&cfg.head, &Vector3::zeros(), q).0.abs())
                    .fold(0.0, f64::max);
                prop_assert_eq!(max_h, d.horizontal_max);
                for v in [d.horizontal_min, d.horizontal_max, d.vertical_min, d.vertical_max,
                          d.center_eccentricity, d.horizontal_coverage, d.vertical_coverage] {
                    prop_assert!((0.0..=180.0).contains(&v));
                }
            }
            let gmax = report.displays.iter().map(|d| d.horizontal_max).fold(0.0, f64::max);
            prop_assert_eq!(gmax, report.max_horizontal_eccentricity);
            let vmax = report.displays.iter().map(|d| d.vertical_max).fold(0.0, f64::max);
            prop_assert_eq!(vmax, report.max_vertical_eccentricity);
        }
    }
}
