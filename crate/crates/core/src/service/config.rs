//! Headset configuration files.
//!
//! ```json
//! { "schema": 1, "frame_width_mm": 250,
//!   "mounts": [ { "side": "left", "hole_index": 8, "display": "lcd31" } ] }
//! ```
//! or `{ "schema": 1, "preset": "angled-52" }`.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::geometry::{
    preset, resolve_placements, ConfigError, DisplayKind, DisplaySpec, FrameSpec, HeadModel,
    HeadsetConfig, ModuleMount, Side,
};

pub const SCHEMA_VERSION: u32 = 1;
pub const PRESET_PREFIX: &str = "preset:";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MountFile {
    pub side: Side,
    pub hole_index: u32,
    #[serde(default)]
    pub spacer_yaw: f64,
    #[serde(default)]
    pub rail_offset: f64,
    pub display: DisplayKind,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub schema: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub preset: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub frame_width_mm: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mounts: Option<Vec<MountFile>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub head: Option<HeadModel>,
}

impl ConfigFile {
    pub fn from_config(config: &HeadsetConfig) -> Self {
        ConfigFile {
            schema: SCHEMA_VERSION,
            preset: None,
            frame_width_mm: Some(config.frame.outer_width_mm as u32),
            mounts: Some(
                config
                    .mounts
                    .iter()
                    .map(|m| MountFile {
                        side: m.side,
                        hole_index: m.hole_index,
                        spacer_yaw: m.spacer_yaw_deg,
                        rail_offset: m.rail_offset_mm,
                        display: m.display.kind,
                    })
                    .collect(),
            ),
            head: Some(config.head.clone()),
        }
    }

    /// Expands presets and checks every geometry invariant.
    pub fn resolve(&self) -> Result<HeadsetConfig, ConfigError> {
        if self.schema != SCHEMA_VERSION {
            return Err(ConfigError::invalid(
                "schema",
                format!("unsupported schema {} (expected {SCHEMA_VERSION})", self.schema),
            ));
        }
        let mut config = match (&self.preset, &self.mounts) {
            (Some(_), Some(_)) => {
                return Err(ConfigError::invalid("preset", "give either a preset or mounts, not both"))
            }
            (None, None) => return Err(ConfigError::invalid("mounts", "missing (or give a preset)")),
            (Some(name), None) => {
                if self.frame_width_mm.is_some() {
                    return Err(ConfigError::invalid("frame_width_mm", "not allowed with a preset"));
                }
                preset(name)?
            }
            (None, Some(mounts)) => {
                let frame = FrameSpec::standard(self.frame_width_mm.unwrap_or(250))
                    .map_err(|e| relabel(e, "frame_width_mm"))?;
                let mounts = mounts
                    .iter()
                    .map(|m| ModuleMount {
                        side: m.side,
                        hole_index: m.hole_index,
                        spacer_yaw_deg: m.spacer_yaw,
                        rail_offset_mm: m.rail_offset,
                        display: DisplaySpec::of(m.display),
                    })
                    .collect();
                HeadsetConfig::new(frame, mounts)
            }
        };
        if let Some(head) = &self.head {
            config.head = head.clone();
        }
        config.validate()?;
        resolve_placements(&config)?;
        Ok(config)
    }
}

fn relabel(e: ConfigError, path: &str) -> ConfigError {
    match e {
        ConfigError::Invalid { message, .. } => ConfigError::invalid(path, message),
        other => other,
    }
}

/// Parses and validates a JSON configuration; schema errors carry the field path.
pub fn parse_config(text: &str) -> Result<HeadsetConfig, ConfigError> {
    parse_config_file(text)?.resolve()
}

pub fn parse_config_file(text: &str) -> Result<ConfigFile, ConfigError> {
    let de = &mut serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        ConfigError::invalid(if path == "." { String::new() } else { path }, e.into_inner().to_string())
    })
}

/// Loads `preset:NAME` or a JSON file.
pub fn load_config(source: &str) -> Result<HeadsetConfig, ConfigError> {
    if let Some(name) = source.strip_prefix(PRESET_PREFIX) {
        let config = preset(name)?;
        resolve_placements(&config)?;
        return Ok(config);
    }
    let text = std::fs::read_to_string(Path::new(source))
        .map_err(|e| ConfigError::invalid(source, format!("cannot read: {e}")))?;
    parse_config(&text)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn preset_reference() {
        let cfg = load_config("preset:parallel-lcd").unwrap();
        assert_eq!(cfg.mounts.len(), 2);
        assert_eq!(cfg.mounts[0].side, Side::Left);
        assert_eq!(cfg.mounts[1].side, Side::Right);
        assert!(matches!(load_config("preset:nope"), Err(ConfigError::UnknownPreset(_))));
        let inline = parse_config(r#"{"schema":1,"preset":"angled-52"}"#).unwrap();
        assert_eq!(inline, preset("angled-52").unwrap());
    }

    #[test]
    fn explicit_mounts() {
        let cfg = parse_config(
            r#"{"schema":1,"frame_width_mm":300,"mounts":[
                {"side":"left","hole_index":2,"display":"lcd31"},
                {"side":"right","hole_index":2,"spacer_yaw":10,"display":{"led-stick":{"leds":8}}}]}"#,
        )
        .unwrap();
        assert_eq!(cfg.frame.outer_width_mm, 300.0);
        assert_eq!(cfg.mounts[1].display.kind, DisplayKind::LedStick { leds: 8 });
        let back = ConfigFile::from_config(&cfg).resolve().unwrap();
        assert_eq!(back, cfg);
    }

    #[test]
    fn frame_275_rejected() {
        let err = parse_config(r#"{"schema":1,"frame_width_mm":275,"mounts":[]}"#).unwrap_err();
        assert!(matches!(err, ConfigError::Invalid { ref path, .. } if path == "frame_width_mm"), "{err}");
    }

    #[test]
    fn duplicate_mount_names_both() {
        let err = parse_config(
            r#"{"schema":1,"mounts":[
                {"side":"left","hole_index":3,"display":"lcd31"},
                {"side":"left","hole_index":3,"display":"led-matrix13x9"}]}"#,
        )
        .unwrap_err();
        assert_eq!(
            err,
            ConfigError::DuplicateMount { first: 0, second: 1, side: Side::Left, hole: 3 }
        );
        let text = err.to_string();
        assert!(text.contains("mounts[0]") && text.contains("mounts[1]"), "{text}");
    }

    #[test]
    fn schema_errors_carry_paths() {
        let err = parse_config(r#"{"schema":1,"mounts":[{"side":"up","hole_index":1,"display":"lcd31"}]}"#)
            .unwrap_err();
        assert!(matches!(err, ConfigError::Invalid { ref path, .. } if path == "mounts[0].side"), "{err}");
        let err = parse_config(r#"{"schema":2,"preset":"angled-52"}"#).unwrap_err();
        assert!(matches!(err, ConfigError::Invalid { ref path, .. } if path == "schema"));
        assert!(parse_config(r#"{"schema":1,"preset":"angled-52","colour":1}"#).is_err());
    }
}
