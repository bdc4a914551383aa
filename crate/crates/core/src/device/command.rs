//! Line protocol for LED and OLED modules.
//!
//! One command per line: ASCII, single spaces between tokens, terminated by LF,
//! at most [`MAX_LINE`] bytes including the LF. Keywords are uppercase, integers
//! are plain decimal without sign or leading zeros, hex payloads are uppercase.
//! Only the canonical spelling parses, so `encode(parse(x)) == x`.

use std::fmt;

use thiserror::Error;

pub const MAX_LINE: usize = 512;
pub const OLED_WIDTH: u32 = 128;
pub const OLED_HEIGHT: u32 = 64;
pub const MATRIX_W: u32 = 13;
pub const MATRIX_H: u32 = 9;
pub const MATRIX_LEDS: u32 = MATRIX_W * MATRIX_H;
/// Hex digits in a `ROW` payload: one bit per OLED pixel.
pub const ROW_HEX: usize = OLED_WIDTH as usize / 4;
/// Hex digits in a `MATRIX` payload: one 4-bit level per channel.
pub const MATRIX_HEX: usize = MATRIX_LEDS as usize * 3;
/// Upper bound for animation rates.
pub const MAX_RATE: u32 = 1000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Error)]
pub enum ErrorCode {
    #[error("UNKNOWN")]
    Unknown,
    #[error("RANGE")]
    Range,
    #[error("LEN")]
    Len,
    #[error("BUSY")]
    Busy,
    #[error("SYNTAX")]
    Syntax,
    #[error("TARGET")]
    Target,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ClearTarget {
    Stick,
    Matrix,
    Oled,
    All,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Horizontal {
    Left,
    Right,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Vertical {
    Up,
    Down,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BlinkShape {
    Dot,
    Bar,
    Arrow,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum DeviceCommand {
    Ping,
    Clear(ClearTarget),
    SetLed { index: u32, rgb: [u8; 3] },
    /// OLED row `y`; bit 7 of byte 0 is the leftmost pixel.
    Row { y: u32, bits: [u8; ROW_HEX / 2] },
    /// 4-bit levels, R G B per LED in row-major order.
    Matrix(Vec<u8>),
    AnimDot { dir: Horizontal, steps_per_s: u32 },
    AnimArrow { dir: Vertical, speed: u32 },
    AnimBlink { shape: BlinkShape, hz: u32 },
    Stop,
    ImuQuery,
    /// Debug readback of the current frame.
    Dump,
}

/// Parser bounds that depend on the attached module.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Limits {
    /// Addressable LEDs for `LED`; zero when the module has none.
    pub led_count: u32,
    /// Accept `DUMP`.
    pub debug: bool,
}

impl Limits {
    pub fn permissive() -> Self {
        Limits {
            led_count: MATRIX_LEDS,
            debug: true,
        }
    }
}

fn hex_digit(b: u8) -> Option<u8> {
    match b {
        b'0'..=b'9' => Some(b - b'0'),
        b'A'..=b'F' => Some(b - b'A' + 10),
        _ => None,
    }
}

const HEX: &[u8; 16] = b"0123456789ABCDEF";

fn uint(tok: &str) -> Result<u64, ErrorCode> {
    let canonical = !tok.is_empty()
        && tok.len() <= 10
        && tok.bytes().all(|b| b.is_ascii_digit())
        && (tok == "0" || !tok.starts_with('0'));
    if !canonical {
        return Err(ErrorCode::Syntax);
    }
    tok.parse().map_err(|_| ErrorCode::Syntax)
}

fn rate(tok: &str) -> Result<u32, ErrorCode> {
    let v = uint(tok)?;
    if (1..=MAX_RATE as u64).contains(&v) {
        Ok(v as u32)
    } else {
        Err(ErrorCode::Range)
    }
}

fn channel(tok: &str) -> Result<u8, ErrorCode> {
    let v = uint(tok)?;
    u8::try_from(v).map_err(|_| ErrorCode::Range)
}

fn hex_digits(tok: &str, len: usize) -> Result<Vec<u8>, ErrorCode> {
    if tok.len() != len {
        return Err(ErrorCode::Syntax);
    }
    tok.bytes()
        .map(|b| hex_digit(b).ok_or(ErrorCode::Syntax))
        .collect()
}

/// Parses one line. A trailing LF is accepted but not required.
pub fn parse(line: &[u8], limits: &Limits) -> Result<DeviceCommand, ErrorCode> {
    let body = line.strip_suffix(b"\n").unwrap_or(line);
    if body.len() + 1 > MAX_LINE {
        return Err(ErrorCode::Len);
    }
    if !body.iter().all(|&b| (0x21..=0x7E).contains(&b) || b == b' ') {
        return Err(ErrorCode::Syntax);
    }
    let text = std::str::from_utf8(body).map_err(|_| ErrorCode::Syntax)?;
    let toks: Vec<&str> = text.split(' ').collect();
    if toks.iter().any(|t| t.is_empty()) {
        return Err(ErrorCode::Syntax);
    }
    let args = &toks[1..];
    let arity = |n: usize| if args.len() == n { Ok(()) } else { Err(ErrorCode::Syntax) };
    match toks[0] {
        "PING" => arity(0).map(|_| DeviceCommand::Ping),
        "STOP" => arity(0).map(|_| DeviceCommand::Stop),
        "IMU?" => arity(0).map(|_| DeviceCommand::ImuQuery),
        "DUMP" if limits.debug => arity(0).map(|_| DeviceCommand::Dump),
        "CLEAR" => {
            arity(1)?;
            let target = match args[0] {
                "STICK" => ClearTarget::Stick,
                "MATRIX" => ClearTarget::Matrix,
                "OLED" => ClearTarget::Oled,
                "ALL" => ClearTarget::All,
                _ => return Err(ErrorCode::Syntax),
            };
            Ok(DeviceCommand::Clear(target))
        }
        "LED" => {
            arity(4)?;
            let index = uint(args[0])?;
            let rgb = [channel(args[1])?, channel(args[2])?, channel(args[3])?];
            if limits.led_count == 0 {
                return Err(ErrorCode::Target);
            }
            if index >= limits.led_count as u64 {
                return Err(ErrorCode::Range);
            }
            Ok(DeviceCommand::SetLed {
                index: index as u32,
                rgb,
            })
        }
        "ROW" => {
            arity(2)?;
            let y = uint(args[0])?;
            let digits = hex_digits(args[1], ROW_HEX)?;
            if y >= OLED_HEIGHT as u64 {
                return Err(ErrorCode::Range);
            }
            let mut bits = [0u8; ROW_HEX / 2];
            for (b, pair) in bits.iter_mut().zip(digits.chunks_exact(2)) {
                *b = pair[0] << 4 | pair[1];
            }
            Ok(DeviceCommand::Row { y: y as u32, bits })
        }
        "MATRIX" => {
            arity(1)?;
            Ok(DeviceCommand::Matrix(hex_digits(args[0], MATRIX_HEX)?))
        }
        "ANIM" => {
            if args.is_empty() {
                return Err(ErrorCode::Syntax);
            }
            let rest = &args[1..];
            if rest.len() != 2 {
                return Err(ErrorCode::Syntax);
            }
            match args[0] {
                "DOT" => {
                    let dir = match rest[0] {
                        "LEFT" => Horizontal::Left,
                        "RIGHT" => Horizontal::Right,
                        _ => return Err(ErrorCode::Syntax),
                    };
                    Ok(DeviceCommand::AnimDot {
                        dir,
                        steps_per_s: rate(rest[1])?,
                    })
                }
                "ARROW" => {
                    let dir = match rest[0] {
                        "UP" => Vertical::Up,
                        "DOWN" => Vertical::Down,
                        _ => return Err(ErrorCode::Syntax),
                    };
                    Ok(DeviceCommand::AnimArrow {
                        dir,
                        speed: rate(rest[1])?,
                    })
                }
                "BLINK" => {
                    let shape = match rest[0] {
                        "DOT" => BlinkShape::Dot,
                        "BAR" => BlinkShape::Bar,
                        "ARROW" => BlinkShape::Arrow,
                        _ => return Err(ErrorCode::Syntax),
                    };
                    Ok(DeviceCommand::AnimBlink {
                        shape,
                        hz: rate(rest[1])?,
                    })
                }
                _ => Err(ErrorCode::Unknown),
            }
        }
        _ => Err(ErrorCode::Unknown),
    }
}

impl fmt::Display for DeviceCommand {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DeviceCommand::Ping => f.write_str("PING"),
            DeviceCommand::Stop => f.write_str("STOP"),
            DeviceCommand::ImuQuery => f.write_str("IMU?"),
            DeviceCommand::Dump => f.write_str("DUMP"),
            DeviceCommand::Clear(t) => write!(
                f,
                "CLEAR {}",
                match t {
                    ClearTarget::Stick => "STICK",
                    ClearTarget::Matrix => "MATRIX",
                    ClearTarget::Oled => "OLED",
                    ClearTarget::All => "ALL",
                }
            ),
            DeviceCommand::SetLed { index, rgb } => {
                write!(f, "LED {index} {} {} {}", rgb[0], rgb[1], rgb[2])
            }
            DeviceCommand::Row { y, bits } => {
                write!(f, "ROW {y} ")?;
                for b in bits {
                    write!(f, "{b:02X}")?;
                }
                Ok(())
            }
            DeviceCommand::Matrix(levels) => {
                f.write_str("MATRIX ")?;
                let hex: String = levels.iter().map(|&d| HEX[(d & 0xF) as usize] as char).collect();
                f.write_str(&hex)
            }
            DeviceCommand::AnimDot { dir, steps_per_s } => write!(
                f,
                "ANIM DOT {} {steps_per_s}",
                match dir {
                    Horizontal::Left => "LEFT",
                    Horizontal::Right => "RIGHT",
                }
            ),
            DeviceCommand::AnimArrow { dir, speed } => write!(
                f,
                "ANIM ARROW {} {speed}",
                match dir {
                    Vertical::Up => "UP",
                    Vertical::Down => "DOWN",
                }
            ),
            DeviceCommand::AnimBlink { shape, hz } => write!(
                f,
                "ANIM BLINK {} {hz}",
                match shape {
                    BlinkShape::Dot => "DOT",
                    BlinkShape::Bar => "BAR",
                    BlinkShape::Arrow => "ARROW",
                }
            ),
        }
    }
}

/// Canonical wire form, LF-terminated.
pub fn encode(cmd: &DeviceCommand) -> Vec<u8> {
    format!("{cmd}\n").into_bytes()
}

/// Device-to-host reply.
#[derive(Debug, Clone, PartialEq)]
pub enum Reply {
    Ok,
    Pong,
    /// Orientation quaternion `w x y z`.
    Imu([f64; 4]),
    Err(ErrorCode),
    Dump(String),
}

impl fmt::Display for Reply {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Reply::Ok => f.write_str("OK"),
            Reply::Pong => f.write_str("PONG"),
            Reply::Imu([w, x, y, z]) => write!(f, "IMU {w:.6} {x:.6} {y:.6} {z:.6}"),
            Reply::Err(code) => write!(f, "ERR {code}"),
            Reply::Dump(hex) => write!(f, "DUMP {hex}"),
        }
    }
}

impl Reply {
    pub fn to_bytes(&self) -> Vec<u8> {
        format!("{self}\n").into_bytes()
    }
}

impl serde::Serialize for DeviceCommand {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}
