//! Live session server and device emulator transports.

pub mod device;
pub mod session;

pub use device::{run_device_session, serve_device_tcp};
pub use session::{router, spawn_simulation, ServeOptions, SimHandle};
