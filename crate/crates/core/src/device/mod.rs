//! Text protocol and emulator for LED/OLED modules.

pub mod command;
pub mod emulator;

pub use command::{encode, parse, DeviceCommand, ErrorCode, Limits, Reply, MAX_LINE};
pub use emulator::{Emulator, ModuleKind, SerialLink, TokenBucket};
