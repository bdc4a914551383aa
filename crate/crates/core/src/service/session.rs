//! Live-session messages: JSON control text and binary frames.
//!
//! A binary frame is `[display_id u8][width u16 LE][height u16 LE][encoding u8]`
//! followed by the payload; encoding 0 is raw RGB8, row-major.

use nalgebra::Vector3;
use serde::{Deserialize, Serialize};

use super::config::ConfigFile;
use super::sim::{DisplayInfo, Event, Simulation};
use crate::geometry::CoverageReport;
use crate::render::{CueSpec, Framebuffer};

pub const ENCODING_RGB8: u8 = 0;
pub const FRAME_HEADER_LEN: usize = 6;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum ClientMessage {
    /// Degrees; position in meters relative to the scenario's start.
    SetPose {
        #[serde(default)]
        yaw: f64,
        #[serde(default)]
        pitch: f64,
        #[serde(default)]
        roll: f64,
        #[serde(default)]
        x: f64,
        #[serde(default)]
        y: f64,
        #[serde(default)]
        z: f64,
    },
    SetParam {
        path: String,
        value: serde_json::Value,
    },
    SetCue {
        cue: CueSpec,
    },
    SetConfig {
        config: ConfigFile,
    },
    SetFeedback {
        current: f64,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum ServerMessage {
    Hello {
        scenario: String,
        fps: f64,
        downscale: u32,
        displays: Vec<DisplayInfo>,
    },
    Event {
        kind: String,
        t: f64,
        side: String,
        detail: String,
    },
    Report {
        report: CoverageReport,
    },
    Error {
        code: String,
        message: String,
    },
    Stats {
        step: u64,
        t: f64,
        dropped_frames: u64,
    },
}

impl ServerMessage {
    pub fn error(code: &str, message: impl ToString) -> Self {
        ServerMessage::Error {
            code: code.to_string(),
            message: message.to_string(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("server messages serialize")
    }
}

impl From<Event> for ServerMessage {
    fn from(e: Event) -> Self {
        ServerMessage::Event {
            kind: e.kind,
            t: e.t,
            side: e.side,
            detail: e.detail,
        }
    }
}

pub fn parse_client_message(text: &str) -> Result<ClientMessage, ServerMessage> {
    serde_json::from_str(text).map_err(|e| ServerMessage::error("bad_message", e))
}

/// Applies a control message at a step boundary. `Ok(Some(_))` is an immediate
/// acknowledgement; `Ok(None)` is acknowledged by the next frames.
pub fn apply_message(sim: &mut Simulation, msg: ClientMessage) -> Result<Option<ServerMessage>, ServerMessage> {
    match msg {
        ClientMessage::SetPose { yaw, pitch, roll, x, y, z } => {
            if ![yaw, pitch, roll, x, y, z].iter().all(|v| v.is_finite()) {
                return Err(ServerMessage::error("bad_message", "pose values must be finite"));
            }
            sim.set_pose(yaw, pitch, roll, Vector3::new(x, y, z));
            Ok(None)
        }
        ClientMessage::SetParam { path, value } => sim
            .set_param(&path, value)
            .map(|_| None)
            .map_err(|e| ServerMessage::error("param", e)),
        ClientMessage::SetCue { cue } => sim
            .set_cue(cue)
            .map(|_| None)
            .map_err(|e| ServerMessage::error("cue", e)),
        ClientMessage::SetConfig { config } => {
            let cfg = config.resolve().map_err(|e| ServerMessage::error("config", e))?;
            sim.set_config(cfg).map_err(|e| ServerMessage::error("config", e))?;
            let report = sim.report().map_err(|e| ServerMessage::error("config", e))?;
            Ok(Some(ServerMessage::Report { report }))
        }
        ClientMessage::SetFeedback { current } => sim
            .set_feedback(current)
            .map(|_| None)
            .map_err(|e| ServerMessage::error("bad_message", e)),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FrameHeader {
    pub display_id: u8,
    pub width: u16,
    pub height: u16,
    pub encoding: u8,
}

pub fn encode_frame(display_id: u8, fb: &Framebuffer) -> Vec<u8> {
    let mut out = Vec::with_capacity(FRAME_HEADER_LEN + fb.pixels().len());
    out.push(display_id);
    out.extend_from_slice(&(fb.width() as u16).to_le_bytes());
    out.extend_from_slice(&(fb.height() as u16).to_le_bytes());
    out.push(ENCODING_RGB8);
    out.extend_from_slice(fb.pixels());
    out
}

pub fn decode_frame(bytes: &[u8]) -> Result<(FrameHeader, &[u8]), String> {
    if bytes.len() < FRAME_HEADER_LEN {
        return Err(format!("frame shorter than its {FRAME_HEADER_LEN}-byte header"));
    }
    let header = FrameHeader {
        display_id: bytes[0],
        width: u16::from_le_bytes([bytes[1], bytes[2]]),
        height: u16::from_le_bytes([bytes[3], bytes[4]]),
        encoding: bytes[5],
    };
    if header.encoding != ENCODING_RGB8 {
        return Err(format!("unknown encoding {}", header.encoding));
    }
    let payload = &bytes[FRAME_HEADER_LEN..];
    let expected = header.width as usize * header.height as usize * 3;
    if payload.len() != expected {
        return Err(format!("payload {} bytes, expected {expected}", payload.len()));
    }
    Ok((header, payload))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::service::scenario::builtin;
    use crate::service::sim::SimOptions;

    #[test]
    fn frame_round_trip() {
        let mut fb = Framebuffer::new(3, 2);
        fb.set(2, 1, [1, 2, 3]);
        let bytes = encode_frame(4, &fb);
        assert_eq!(&bytes[..6], &[4, 3, 0, 2, 0, 0]);
        let (h, payload) = decode_frame(&bytes).unwrap();
        assert_eq!(h, FrameHeader { display_id: 4, width: 3, height: 2, encoding: 0 });
        assert_eq!(payload, fb.pixels());
        assert!(decode_frame(&bytes[..10]).is_err());
    }

    #[test]
    fn client_messages_parse() {
        let m = parse_client_message(r#"{"type":"set_pose","roll":10}"#).unwrap();
        assert_eq!(m, ClientMessage::SetPose { yaw: 0.0, pitch: 0.0, roll: 10.0, x: 0.0, y: 0.0, z: 0.0 });
        let m = parse_client_message(r#"{"type":"set_feedback","current":165}"#).unwrap();
        assert_eq!(m, ClientMessage::SetFeedback { current: 165.0 });
        let err = parse_client_message(r#"{"type":"launch"}"#).unwrap_err();
        assert!(matches!(err, ServerMessage::Error { ref code, .. } if code == "bad_message"));
        assert!(parse_client_message("not json").is_err());
    }

    #[test]
    fn invalid_config_keeps_previous() {
        let mut sim = Simulation::from_scenario(builtin("balance").unwrap(), SimOptions::default()).unwrap();
        let before = sim.config().clone();
        let msg = parse_client_message(
            r#"{"type":"set_config","config":{"schema":1,"mounts":[
                {"side":"left","hole_index":40,"display":"lcd31"}]}}"#,
        )
        .unwrap();
        let err = apply_message(&mut sim, msg).unwrap_err();
        assert!(matches!(err, ServerMessage::Error { ref code, .. } if code == "config"));
        assert_eq!(sim.config(), &before);
        let ok = parse_client_message(r#"{"type":"set_config","config":{"schema":1,"preset":"parallel-lcd"}}"#)
            .unwrap();
        assert!(matches!(apply_message(&mut sim, ok), Ok(Some(ServerMessage::Report { .. }))));
    }

    #[test]
    fn server_messages_are_tagged() {
        let text = ServerMessage::Stats { step: 3, t: 0.05, dropped_frames: 1 }.to_json();
        assert_eq!(text, r#"{"type":"stats","step":3,"t":0.05,"dropped_frames":1}"#);
    }
}
