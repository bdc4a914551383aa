//! Batch scenario runner with frame and event export.

use std::fs::{self, File};
use std::io::BufWriter;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::Serialize;
use sha2::{Digest, Sha256};

use super::scenario::Scenario;
use super::sim::{Event, SimOptions, Simulation};
use super::ServiceError;
use crate::geometry::HeadsetConfig;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum FrameFormat {
    Ppm,
    Png,
}

impl FrameFormat {
    pub fn extension(self) -> &'static str {
        match self {
            FrameFormat::Ppm => "ppm",
            FrameFormat::Png => "png",
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    pub sim: SimOptions,
    /// Directory for `events.csv` and frame dumps.
    pub out_dir: Option<PathBuf>,
    pub dump_frames: Option<FrameFormat>,
    /// Fold every frame into `frames_digest`.
    pub hash_frames: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunReport {
    pub scenario: String,
    pub steps: u64,
    pub displays: usize,
    pub frames: u64,
    pub frames_dumped: u64,
    pub events: usize,
    /// SHA-256 over all frames in step and display order.
    pub frames_digest: Option<String>,
    pub events_digest: String,
    pub elapsed_s: f64,
    pub steps_per_s: f64,
}

pub fn frame_file_name(display: usize, step: u64, format: FrameFormat) -> String {
    format!("frame_{display}_{step:05}.{}", format.extension())
}

fn io_err(path: &Path, e: impl std::fmt::Display) -> ServiceError {
    ServiceError::Io(format!("{}: {e}", path.display()))
}

/// Runs `scenario` for its full duration. `config` overrides the scenario's headset.
pub fn run_scenario(
    scenario: &Scenario,
    config: Option<HeadsetConfig>,
    options: &RunOptions,
) -> Result<RunReport, ServiceError> {
    let config = match config {
        Some(c) => c,
        None => scenario.config.resolve()?,
    };
    let mut sim = Simulation::new(scenario.clone(), config, options.sim)?;
    if let Some(dir) = &options.out_dir {
        fs::create_dir_all(dir).map_err(|e| io_err(dir, e))?;
    }
    let steps = scenario.steps(options.sim.fps);
    let mut events: Vec<Event> = Vec::new();
    let mut frames_hash = options.hash_frames.then(Sha256::new);
    let mut frames = 0;
    let mut dumped = 0;
    let start = Instant::now();
    for step in 0..steps {
        let step_events = sim.step().map_err(|e| ServiceError::Step {
            step,
            source: Box::new(e),
        })?;
        events.extend(step_events);
        for (id, fb) in sim.frames().enumerate() {
            frames += 1;
            if let Some(h) = &mut frames_hash {
                h.update((id as u32).to_le_bytes());
                h.update(fb.width().to_le_bytes());
                h.update(fb.height().to_le_bytes());
                h.update(fb.pixels());
            }
            if let (Some(format), Some(dir)) = (options.dump_frames, &options.out_dir) {
                let path = dir.join(frame_file_name(id, step, format));
                match format {
                    FrameFormat::Ppm => {
                        let f = File::create(&path).map_err(|e| io_err(&path, e))?;
                        fb.write_ppm(BufWriter::new(f)).map_err(|e| io_err(&path, e))?;
                    }
                    FrameFormat::Png => fb.save_png(&path).map_err(|e| io_err(&path, e))?,
                }
                dumped += 1;
            }
        }
    }
    let elapsed = start.elapsed().as_secs_f64();
    let mut csv_bytes = Vec::new();
    write_events_csv(&events, &mut csv_bytes)?;
    if let Some(dir) = &options.out_dir {
        let path = dir.join("events.csv");
        fs::write(&path, &csv_bytes).map_err(|e| io_err(&path, e))?;
    }
    let displays = sim.frames().len();
    Ok(RunReport {
        scenario: scenario.name.clone(),
        steps,
        displays,
        frames,
        frames_dumped: dumped,
        events: events.len(),
        frames_digest: frames_hash.map(|h| hex(&h.finalize())),
        events_digest: hex(&Sha256::digest(&csv_bytes)),
        elapsed_s: elapsed,
        steps_per_s: if elapsed > 0.0 { steps as f64 / elapsed } else { f64::INFINITY },
    })
}

fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

/// Writes `t,kind,side,detail` rows with a header.
pub fn write_events_csv<W: std::io::Write>(events: &[Event], out: W) -> Result<(), ServiceError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["t", "kind", "side", "detail"])
        .map_err(|e| ServiceError::Io(e.to_string()))?;
    for e in events {
        w.serialize(e).map_err(|e| ServiceError::Io(e.to_string()))?;
    }
    w.flush().map_err(|e| ServiceError::Io(e.to_string()))?;
    Ok(())
}
