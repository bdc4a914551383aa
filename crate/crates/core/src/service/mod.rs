//! Configuration loading, scenario runs and the live-session protocol.

pub mod config;
pub mod run;
pub mod scenario;
pub mod session;
pub mod sim;

pub use config::{load_config, parse_config, ConfigFile, MountFile};
pub use run::{frame_file_name, run_scenario, FrameFormat, RunOptions, RunReport};
pub use scenario::{builtin, Scenario, BUILTIN_SCENARIOS};
pub use session::{
    apply_message, decode_frame, encode_frame, parse_client_message, ClientMessage, FrameHeader,
    ServerMessage,
};
pub use sim::{DisplayInfo, Event, SimOptions, Simulation, DEFAULT_FPS};

use thiserror::Error;

use crate::apps::AppError;
use crate::geometry::ConfigError;
use crate::tracking::TrackingError;

#[derive(Debug, Error)]
pub enum ServiceError {
    #[error("config: {0}")]
    Config(#[from] ConfigError),
    #[error("scenario: {0}")]
    Scenario(String),
    #[error("parameter {0}")]
    Param(String),
    #[error(transparent)]
    App(#[from] AppError),
    #[error("tracking: {0}")]
    Tracking(#[from] TrackingError),
    #[error("io: {0}")]
    Io(String),
    #[error("step {step}: {source}")]
    Step {
        step: u64,
        source: Box<ServiceError>,
    },
}
