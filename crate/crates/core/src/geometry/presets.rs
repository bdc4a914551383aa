//! Named headset configurations.

use super::angles::eccentricity;
use super::display::{DisplayKind, DEFAULT_STICK_LEDS};
use super::head::FrameSpec;
use super::mount::{resolve_placements, HeadsetConfig, ModuleMount, Side, MAX_RAIL_OFFSET_MM};
use super::ConfigError;

pub const PRESET_NAMES: [&str; 5] = ["parallel-lcd", "angled-52", "led-stick", "led-matrix", "see-through"];

/// Display-center eccentricity targeted by `angled-52`.
pub const ANGLED_TARGET_DEG: f64 = 52.0;
const ANGLED_SPACER_YAW_DEG: f64 = 5.0;

pub fn preset(name: &str) -> Result<HeadsetConfig, ConfigError> {
    let frame = FrameSpec::standard(250)?;
    let pair = |hole: u32, kind: DisplayKind| {
        vec![
            ModuleMount::direct(Side::Left, hole, kind),
            ModuleMount::direct(Side::Right, hole, kind),
        ]
    };
    let mounts = match name {
        "parallel-lcd" => pair(8, DisplayKind::Lcd31),
        "angled-52" => return Ok(angled(frame, ANGLED_TARGET_DEG)),
        "led-stick" => {
            let mut m = pair(4, DisplayKind::LedStick { leds: DEFAULT_STICK_LEDS });
            m.push(ModuleMount::direct(Side::Front, 6, DisplayKind::Oled128x64));
            m
        }
        "led-matrix" => pair(3, DisplayKind::LedMatrix13x9),
        "see-through" => pair(6, DisplayKind::LcdSeeThrough29),
        other => return Err(ConfigError::UnknownPreset(other.to_string())),
    };
    Ok(HeadsetConfig::new(frame, mounts))
}

fn angled_mounts(frame: &FrameSpec, rail_mm: f64) -> Vec<ModuleMount> {
    let outer_hole = frame.holes_per_side - 1;
    vec![
        ModuleMount {
            spacer_yaw_deg: ANGLED_SPACER_YAW_DEG,
            rail_offset_mm: rail_mm,
            ..ModuleMount::direct(Side::Front, 0, DisplayKind::Lcd31)
        },
        ModuleMount {
            spacer_yaw_deg: -ANGLED_SPACER_YAW_DEG,
            rail_offset_mm: rail_mm,
            ..ModuleMount::direct(Side::Front, outer_hole, DisplayKind::Lcd31)
        },
    ]
}

/// Outermost front-bar holes, slightly yawed, pulled back on the rail until the
/// display centers sit at `target_deg` from forward.
fn angled(frame: FrameSpec, target_deg: f64) -> HeadsetConfig {
    let center_ecc = |rail: f64| -> f64 {
        let cfg = HeadsetConfig::new(frame, angled_mounts(&frame, rail));
        match resolve_placements(&cfg) {
            Ok(p) => eccentricity(&cfg.head.cyclopean_eye(), &p[1].center(), &cfg.head.forward)
                .unwrap_or(f64::NAN),
            Err(_) => f64::NAN,
        }
    };
    // Center eccentricity grows monotonically as the rail moves the displays back.
    let (mut lo, mut hi) = (0.0, MAX_RAIL_OFFSET_MM);
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if center_ecc(mid) < target_deg {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    HeadsetConfig::new(frame, angled_mounts(&frame, 0.5 * (lo + hi)))
}
