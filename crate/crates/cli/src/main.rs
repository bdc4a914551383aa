use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use tokio::io::BufReader;
use tokio::net::TcpListener;

use pvsim_core::device::ModuleKind;
use pvsim_core::geometry::coverage_report;
use pvsim_core::service::{
    builtin, load_config, run_scenario, FrameFormat, RunOptions, Scenario, SimOptions, Simulation,
    BUILTIN_SCENARIOS,
};
use pvsim_core::Exec;
use pvsim_server::{router, run_device_session, serve_device_tcp, spawn_simulation, ServeOptions};

#[derive(Parser)]
#[command(name = "pvsim", version, about = "Peripheral-vision headset simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum ExecArg {
    Sequential,
    Parallel,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario headless and export events and frames.
    Run {
        /// JSON file or `preset:NAME`; defaults to the scenario's own headset.
        #[arg(long)]
        config: Option<String>,
        /// Built-in scenario name or JSON file.
        #[arg(long)]
        scenario: String,
        #[arg(long, default_value_t = 60.0)]
        fps: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value = "out")]
        out: PathBuf,
        /// Write `frame_<display>_<step>.ppm` for every frame.
        #[arg(long)]
        dump_frames: bool,
        /// Dump PNG instead of PPM.
        #[arg(long, requires = "dump_frames")]
        png: bool,
        #[arg(long, value_enum, default_value = "parallel")]
        exec: ExecArg,
    },
    /// Print the coverage report of a headset.
    Report {
        #[arg(long)]
        config: String,
        #[arg(long)]
        json: bool,
    },
    /// Serve the live session endpoint.
    Serve {
        #[arg(long)]
        config: Option<String>,
        #[arg(long, default_value = "balance")]
        scenario: String,
        #[arg(long, default_value_t = 8080)]
        port: u16,
        #[arg(long, default_value = "127.0.0.1")]
        host: String,
        #[arg(long, default_value_t = 1)]
        downscale: u32,
        #[arg(long, default_value_t = 60.0)]
        fps: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Emulate an LED or OLED module.
    DeviceEmu {
        /// stick, stick:N, matrix or oled.
        #[arg(long)]
        kind: ModuleKind,
        /// `tcp:PORT`, `tcp:HOST:PORT` or `stdio`.
        #[arg(long, default_value = "tcp:9000")]
        listen: String,
        /// Enable the DUMP readback command.
        #[arg(long)]
        debug: bool,
    },
    /// List built-in scenarios, or print one as JSON.
    Scenarios { name: Option<String> },
}

fn load_scenario(name: &str) -> Result<Scenario> {
    Scenario::load(name).with_context(|| format!("loading scenario {name:?}"))
}

fn exec_policy(e: ExecArg) -> Exec {
    match e {
        ExecArg::Sequential => Exec::Sequential,
        ExecArg::Parallel => Exec::Parallel,
    }
}

#[tokio::main]
async fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    match run(Cli::parse()).await {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

async fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Run { config, scenario, fps, seed, out, dump_frames, png, exec } => {
            let scenario = load_scenario(&scenario)?;
            let config = config.map(|c| load_config(&c)).transpose()?;
            let options = RunOptions {
                sim: SimOptions { fps, seed: Some(seed), exec: exec_policy(exec) },
                out_dir: Some(out),
                dump_frames: dump_frames.then_some(if png { FrameFormat::Png } else { FrameFormat::Ppm }),
                hash_frames: true,
            };
            let report = tokio::task::spawn_blocking(move || run_scenario(&scenario, config, &options))
                .await??;
            println!("{}", serde_json::to_string_pretty(&report)?);
        }
        Command::Report { config, json } => {
            let report = coverage_report(&load_config(&config)?)?;
            if json {
                println!("{}", serde_json::to_string_pretty(&report)?);
            } else {
                println!("{report}");
            }
        }
        Command::Serve { config, scenario, port, host, downscale, fps, seed } => {
            let scenario = load_scenario(&scenario)?;
            let config = match config {
                Some(c) => load_config(&c)?,
                None => scenario.config.resolve()?,
            };
            let sim = Simulation::new(scenario, config, SimOptions { fps, seed: Some(seed), exec: Exec::Parallel })?;
            let handle = spawn_simulation(sim, ServeOptions { downscale, rate: fps });
            let listener = TcpListener::bind((host.as_str(), port)).await.with_context(|| format!("binding {host}:{port}"))?;
            log::info!("serving on http://{}", listener.local_addr()?);
            axum::serve(listener, router(handle)).await?;
        }
        Command::DeviceEmu { kind, listen, debug } => {
            if listen == "stdio" {
                run_device_session(BufReader::new(tokio::io::stdin()), tokio::io::stdout(), kind, debug).await?;
            } else if let Some(addr) = listen.strip_prefix("tcp:") {
                let addr = if addr.contains(':') { addr.to_string() } else { format!("127.0.0.1:{addr}") };
                let listener = TcpListener::bind(&addr).await.with_context(|| format!("binding {addr}"))?;
                log::info!("device emulator ({kind:?}) on {}", listener.local_addr()?);
                serve_device_tcp(listener, kind, debug).await?;
            } else {
                bail!("--listen must be tcp:PORT, tcp:HOST:PORT or stdio");
            }
        }
        Command::Scenarios { name: None } => {
            for name in BUILTIN_SCENARIOS {
                println!("{name}");
            }
        }
        Command::Scenarios { name: Some(name) } => {
            let s = builtin(&name).with_context(|| format!("no built-in scenario {name:?}"))?;
            println!("{}", serde_json::to_string_pretty(&s)?);
        }
    }
    Ok(())
}
