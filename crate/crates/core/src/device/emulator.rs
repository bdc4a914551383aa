//! LED/OLED module emulator.

use nalgebra::UnitQuaternion;
use serde::{Deserialize, Serialize};

use super::command::{
    parse, BlinkShape, ClearTarget, DeviceCommand, ErrorCode, Horizontal, Limits, Reply, Vertical,
    MATRIX_H, MATRIX_LEDS, MATRIX_W, OLED_HEIGHT, OLED_WIDTH,
};
use crate::geometry::DEFAULT_STICK_LEDS;
use crate::render::Rgb;

/// Full-frame MATRIX budget.
pub const MATRIX_PER_S: f64 = 30.0;
/// 115200 baud, 8N1 plus framing, as a byte rate.
pub const SERIAL_BYTES_PER_S: f64 = 11_520.0;
/// Horizontal positions of the OLED dot (4 px blocks).
pub const OLED_DOT_POSITIONS: u32 = OLED_WIDTH / 4;

const ON: Rgb = [255, 255, 255];
const OFF: Rgb = [0, 0, 0];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModuleKind {
    Stick { leds: u32 },
    Matrix,
    Oled,
}

impl ModuleKind {
    pub fn stick() -> Self {
        ModuleKind::Stick {
            leds: DEFAULT_STICK_LEDS,
        }
    }

    pub fn dims(self) -> (u32, u32) {
        match self {
            ModuleKind::Stick { leds } => (leds.max(1), 1),
            ModuleKind::Matrix => (MATRIX_W, MATRIX_H),
            ModuleKind::Oled => (OLED_WIDTH, OLED_HEIGHT),
        }
    }

    pub fn limits(self, debug: bool) -> Limits {
        let led_count = match self {
            ModuleKind::Stick { leds } => leds.max(1),
            ModuleKind::Matrix => MATRIX_LEDS,
            ModuleKind::Oled => 0,
        };
        Limits { led_count, debug }
    }

    pub fn clear_target(self) -> ClearTarget {
        match self {
            ModuleKind::Stick { .. } => ClearTarget::Stick,
            ModuleKind::Matrix => ClearTarget::Matrix,
            ModuleKind::Oled => ClearTarget::Oled,
        }
    }

    /// Positions an `ANIM DOT` sweep steps through.
    pub fn dot_positions(self) -> u32 {
        match self {
            ModuleKind::Stick { leds } => leds.max(1),
            ModuleKind::Matrix => MATRIX_W,
            ModuleKind::Oled => OLED_DOT_POSITIONS,
        }
    }
}

impl std::str::FromStr for ModuleKind {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "stick" => Ok(ModuleKind::stick()),
            "matrix" => Ok(ModuleKind::Matrix),
            "oled" => Ok(ModuleKind::Oled),
            other => match other.strip_prefix("stick:").map(str::parse::<u32>) {
                Some(Ok(leds)) if leds > 0 => Ok(ModuleKind::Stick { leds }),
                _ => Err(format!("unknown module kind {other:?} (stick, stick:N, matrix, oled)")),
            },
        }
    }
}

/// Up-pointing arrow; row 0 is the top.
const ARROW_UP: [&str; 9] = [
    "......#......",
    ".....###.....",
    "....#####....",
    "...#######...",
    ".....###.....",
    ".....###.....",
    ".....###.....",
    ".....###.....",
    ".....###.....",
];

fn arrow_lit(x: u32, y: u32, dir: Vertical) -> bool {
    let row = match dir {
        Vertical::Up => y,
        Vertical::Down => MATRIX_H - 1 - y,
    };
    ARROW_UP[row as usize].as_bytes()[x as usize] == b'#'
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Animation {
    Dot { dir: Horizontal, rate: u32 },
    Arrow { dir: Vertical, rate: u32 },
    Blink { shape: BlinkShape, rate: u32 },
}

/// Refills continuously at `rate` up to `capacity`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TokenBucket {
    pub capacity: f64,
    pub rate: f64,
    tokens: f64,
    last: f64,
}

impl TokenBucket {
    pub fn new(capacity: f64, rate: f64) -> Self {
        TokenBucket {
            capacity,
            rate,
            tokens: capacity,
            last: 0.0,
        }
    }

    pub fn tokens(&self) -> f64 {
        self.tokens
    }

    pub fn try_take(&mut self, t: f64) -> bool {
        if t > self.last {
            self.tokens = (self.tokens + (t - self.last) * self.rate).min(self.capacity);
            self.last = t;
        }
        if self.tokens >= 1.0 {
            self.tokens -= 1.0;
            true
        } else {
            false
        }
    }
}

/// Byte-rate-limited link; lines queue behind each other.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SerialLink {
    pub bytes_per_s: f64,
    busy_until: f64,
}

impl SerialLink {
    pub fn new(bytes_per_s: f64) -> Self {
        SerialLink {
            bytes_per_s,
            busy_until: 0.0,
        }
    }

    /// Arrival time of `len` bytes sent at `t`.
    pub fn deliver(&mut self, len: usize, t: f64) -> f64 {
        let start = t.max(self.busy_until);
        self.busy_until = start + len as f64 / self.bytes_per_s;
        self.busy_until
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Emulator {
    kind: ModuleKind,
    base: Vec<Rgb>,
    anim: Option<Animation>,
    phase: f64,
    bucket: TokenBucket,
    link: SerialLink,
    imu: UnitQuaternion<f64>,
    debug: bool,
}

impl Emulator {
    pub fn new(kind: ModuleKind, debug: bool) -> Self {
        let (w, h) = kind.dims();
        Emulator {
            kind,
            base: vec![OFF; (w * h) as usize],
            anim: None,
            phase: 0.0,
            bucket: TokenBucket::new(MATRIX_PER_S, MATRIX_PER_S),
            link: SerialLink::new(SERIAL_BYTES_PER_S),
            imu: UnitQuaternion::identity(),
            debug,
        }
    }

    pub fn kind(&self) -> ModuleKind {
        self.kind
    }

    pub fn limits(&self) -> Limits {
        self.kind.limits(self.debug)
    }

    pub fn bucket(&self) -> &TokenBucket {
        &self.bucket
    }

    pub fn is_animating(&self) -> bool {
        self.anim.is_some()
    }

    pub fn set_imu(&mut self, q: UnitQuaternion<f64>) {
        self.imu = q;
    }

    /// Advances the animation clock and returns the displayed frame.
    pub fn step(&mut self, dt: f64) -> Vec<Rgb> {
        if dt > 0.0 && self.anim.is_some() {
            self.phase += dt;
        }
        self.frame()
    }

    /// Whole steps taken after `phase` seconds at `rate` per second.
    fn steps(&self, rate: u32) -> u64 {
        (self.phase * rate as f64 + 1e-9).floor() as u64
    }

    pub fn frame(&self) -> Vec<Rgb> {
        let Some(anim) = self.anim else {
            return self.base.clone();
        };
        let (w, h) = self.kind.dims();
        let mut out = vec![OFF; (w * h) as usize];
        let mut lit = |x: u32, y: u32| {
            if x < w && y < h {
                out[(y * w + x) as usize] = ON;
            }
        };
        match anim {
            Animation::Dot { dir, rate } => {
                let n = self.kind.dot_positions() as u64;
                let k = self.steps(rate) % n;
                let pos = match dir {
                    Horizontal::Right => k,
                    Horizontal::Left => n - 1 - k,
                } as u32;
                match self.kind {
                    ModuleKind::Stick { .. } => lit(pos, 0),
                    ModuleKind::Matrix => lit(pos, MATRIX_H / 2),
                    ModuleKind::Oled => {
                        for dy in 0..4 {
                            for dx in 0..4 {
                                lit(pos * 4 + dx, OLED_HEIGHT / 2 - 2 + dy);
                            }
                        }
                    }
                }
            }
            Animation::Arrow { dir, rate } => {
                let shift = (self.steps(rate) % MATRIX_H as u64) as u32;
                for y in 0..MATRIX_H {
                    // Up scrolls content toward row 0; down toward the last row.
                    let src = match dir {
                        Vertical::Up => (y + shift) % MATRIX_H,
                        Vertical::Down => (y + MATRIX_H - shift) % MATRIX_H,
                    };
                    for x in 0..MATRIX_W {
                        if arrow_lit(x, src, dir) {
                            lit(x, y);
                        }
                    }
                }
            }
            Animation::Blink { shape, rate } => {
                if (self.phase * rate as f64).fract() < 0.5 {
                    match (self.kind, shape) {
                        (ModuleKind::Stick { leds }, BlinkShape::Dot) => lit(leds / 2, 0),
                        (ModuleKind::Stick { .. }, _) => (0..w).for_each(|x| lit(x, 0)),
                        (ModuleKind::Matrix, BlinkShape::Dot) => lit(MATRIX_W / 2, MATRIX_H / 2),
                        (ModuleKind::Matrix, BlinkShape::Bar) => {
                            (0..w).for_each(|x| lit(x, MATRIX_H / 2))
                        }
                        (ModuleKind::Matrix, BlinkShape::Arrow) => {
                            for y in 0..h {
                                for x in 0..w {
                                    if arrow_lit(x, y, Vertical::Up) {
                                        lit(x, y);
                                    }
                                }
                            }
                        }
                        (ModuleKind::Oled, BlinkShape::Dot) => {
                            for y in 28..36 {
                                (60..68).for_each(|x| lit(x, y));
                            }
                        }
                        (ModuleKind::Oled, _) => {
                            for y in 30..34 {
                                (0..w).for_each(|x| lit(x, y));
                            }
                        }
                    }
                }
            }
        }
        out
    }

    /// Frame as uppercase hex: RGB bytes, or packed bits for the OLED.
    pub fn dump_hex(&self) -> String {
        let frame = self.frame();
        match self.kind {
            ModuleKind::Oled => frame
                .chunks(8)
                .map(|px| {
                    let byte = px
                        .iter()
                        .enumerate()
                        .fold(0u8, |acc, (i, p)| acc | (((p[0] > 0) as u8) << (7 - i)));
                    format!("{byte:02X}")
                })
                .collect(),
            _ => frame.iter().flatten().map(|b| format!("{b:02X}")).collect(),
        }
    }

    fn target_ok(&self, cmd: &DeviceCommand) -> bool {
        use ModuleKind::*;
        match (cmd, self.kind) {
            (DeviceCommand::Clear(ClearTarget::All), _) => true,
            (DeviceCommand::Clear(ClearTarget::Stick), Stick { .. }) => true,
            (DeviceCommand::Clear(ClearTarget::Matrix), Matrix) => true,
            (DeviceCommand::Clear(ClearTarget::Oled), Oled) => true,
            (DeviceCommand::Clear(_), _) => false,
            (DeviceCommand::SetLed { .. }, k) => k != Oled,
            (DeviceCommand::Row { .. }, k) => k == Oled,
            (DeviceCommand::Matrix(_), k) => k == Matrix,
            (DeviceCommand::AnimArrow { .. }, k) => k == Matrix,
            (DeviceCommand::AnimBlink { shape: BlinkShape::Arrow, .. }, k) => k == Matrix,
            _ => true,
        }
    }

    /// Applies a parsed command at time `t` (seconds, used by the rate limiter).
    pub fn submit(&mut self, cmd: &DeviceCommand, t: f64) -> Reply {
        if !self.target_ok(cmd) {
            return Reply::Err(ErrorCode::Target);
        }
        let (w, _) = self.kind.dims();
        match cmd {
            DeviceCommand::Ping => return Reply::Pong,
            DeviceCommand::ImuQuery => {
                let q = self.imu.quaternion();
                return Reply::Imu([q.w, q.i, q.j, q.k]);
            }
            DeviceCommand::Dump => {
                if !self.debug {
                    return Reply::Err(ErrorCode::Unknown);
                }
                return Reply::Dump(self.dump_hex());
            }
            DeviceCommand::Clear(_) => {
                self.base.fill(OFF);
                self.anim = None;
            }
            DeviceCommand::SetLed { index, rgb } => {
                let Some(px) = self.base.get_mut(*index as usize) else {
                    return Reply::Err(ErrorCode::Range);
                };
                *px = *rgb;
            }
            DeviceCommand::Row { y, bits } => {
                for x in 0..w {
                    let on = bits[(x / 8) as usize] >> (7 - x % 8) & 1 == 1;
                    self.base[(y * w + x) as usize] = if on { ON } else { OFF };
                }
            }
            DeviceCommand::Matrix(levels) => {
                if !self.bucket.try_take(t) {
                    return Reply::Err(ErrorCode::Busy);
                }
                for (px, rgb) in self.base.iter_mut().zip(levels.chunks_exact(3)) {
                    *px = [rgb[0] * 17, rgb[1] * 17, rgb[2] * 17];
                }
            }
            DeviceCommand::AnimDot { dir, steps_per_s } => {
                self.start(Animation::Dot { dir: *dir, rate: *steps_per_s })
            }
            DeviceCommand::AnimArrow { dir, speed } => {
                self.start(Animation::Arrow { dir: *dir, rate: *speed })
            }
            DeviceCommand::AnimBlink { shape, hz } => {
                self.start(Animation::Blink { shape: *shape, rate: *hz })
            }
            DeviceCommand::Stop => self.anim = None,
        }
        Reply::Ok
    }

    fn start(&mut self, anim: Animation) {
        self.anim = Some(anim);
        self.phase = 0.0;
    }

    /// Parses and applies one line sent at `t`; it takes effect when the last byte
    /// has crossed the serial link. Returns the reply and that arrival time.
    pub fn receive_line(&mut self, line: &[u8], t: f64) -> (Reply, f64) {
        let arrival = self.link.deliver(line.len(), t);
        let reply = match parse(line, &self.limits()) {
            Ok(cmd) => self.submit(&cmd, arrival),
            Err(code) => Reply::Err(code),
        };
        (reply, arrival)
    }

    /// Parses and applies one line at `t`, bypassing the link model.
    pub fn handle_line(&mut self, line: &[u8], t: f64) -> Reply {
        match parse(line, &self.limits()) {
            Ok(cmd) => self.submit(&cmd, t),
            Err(code) => Reply::Err(code),
        }
    }
}
