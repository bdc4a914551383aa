//! Simulation engine for modular peripheral-vision headsets.

pub mod apps;
pub mod device;
pub mod exec;
pub mod geometry;
pub mod render;
pub mod service;
pub mod tracking;

pub use exec::Exec;
