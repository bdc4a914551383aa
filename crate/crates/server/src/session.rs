//! WebSocket `/session` endpoint and `/healthz`.
//!
//! The simulation runs on its own thread. Clients talk to it through an ordered
//! control queue; it publishes each step as an immutable snapshot on a
//! broadcast channel, so a slow client only loses frames.

use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;
use std::thread;
use std::time::{Duration, Instant};

use axum::extract::ws::{Message, WebSocket, WebSocketUpgrade};
use axum::extract::State;
use axum::response::IntoResponse;
use axum::routing::get;
use axum::Router;
use futures::{SinkExt, StreamExt};
use log::{debug, warn};
use tokio::sync::{broadcast, mpsc, oneshot};

use pvsim_core::service::{
    apply_message, encode_frame, parse_client_message, ClientMessage, ServerMessage, Simulation,
};

const SNAPSHOT_BUFFER: usize = 4;
const STATS_INTERVAL: Duration = Duration::from_secs(1);

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ServeOptions {
    /// Integer factor applied to streamed frames.
    pub downscale: u32,
    /// Steps per wall-clock second.
    pub rate: f64,
}

impl Default for ServeOptions {
    fn default() -> Self {
        ServeOptions {
            downscale: 1,
            rate: 60.0,
        }
    }
}

/// Everything one step produced, already encoded for the wire.
#[derive(Debug)]
pub struct Snapshot {
    pub step: u64,
    pub t: f64,
    pub frames: Vec<Vec<u8>>,
    pub events: Vec<String>,
    /// Set when the display set changed in this step.
    pub hello: Option<String>,
}

type Reply = Result<Option<ServerMessage>, ServerMessage>;

struct Control {
    msg: ClientMessage,
    reply: oneshot::Sender<Reply>,
}

/// Shared state handed to every connection.
#[derive(Clone)]
pub struct SimHandle {
    control: mpsc::UnboundedSender<Control>,
    snapshots: broadcast::Sender<Arc<Snapshot>>,
    hello: Arc<std::sync::Mutex<String>>,
    report: Arc<std::sync::Mutex<Option<String>>>,
    dropped: Arc<AtomicU64>,
}

impl SimHandle {
    /// Frames dropped across all sessions so far.
    pub fn dropped_frames(&self) -> u64 {
        self.dropped.load(Ordering::Relaxed)
    }
}

fn hello_json(sim: &Simulation, downscale: u32) -> String {
    let displays = sim
        .displays()
        .into_iter()
        .map(|mut d| {
            d.width = (d.width / downscale).max(1);
            d.height = (d.height / downscale).max(1);
            d
        })
        .collect();
    ServerMessage::Hello {
        scenario: sim.scenario().name.clone(),
        fps: sim.options().fps,
        downscale,
        displays,
    }
    .to_json()
}

fn report_json(sim: &Simulation) -> Option<String> {
    sim.report().ok().map(|report| ServerMessage::Report { report }.to_json())
}

/// Starts the simulation thread. It stops when every handle is dropped.
pub fn spawn_simulation(mut sim: Simulation, options: ServeOptions) -> SimHandle {
    let downscale = options.downscale.max(1);
    let (control, mut rx) = mpsc::unbounded_channel::<Control>();
    let (snapshots, _) = broadcast::channel(SNAPSHOT_BUFFER);
    let handle = SimHandle {
        control,
        snapshots: snapshots.clone(),
        hello: Arc::new(std::sync::Mutex::new(hello_json(&sim, downscale))),
        report: Arc::new(std::sync::Mutex::new(report_json(&sim))),
        dropped: Arc::new(AtomicU64::new(0)),
    };
    let hello = handle.hello.clone();
    let report = handle.report.clone();
    let period = Duration::from_secs_f64(1.0 / options.rate.max(1e-3));
    thread::Builder::new()
        .name("pvsim-sim".into())
        .spawn(move || {
            let mut next = Instant::now();
            loop {
                let mut reconfigured = false;
                loop {
                    match rx.try_recv() {
                        Ok(Control { msg, reply }) => {
                            let is_config = matches!(msg, ClientMessage::SetConfig { .. });
                            let result = apply_message(&mut sim, msg);
                            reconfigured |= is_config && result.is_ok();
                            let _ = reply.send(result);
                        }
                        Err(mpsc::error::TryRecvError::Empty) => break,
                        Err(mpsc::error::TryRecvError::Disconnected) => return,
                    }
                }
                if sim.step_index() >= sim.total_steps() {
                    if let Err(e) = sim.rewind() {
                        warn!("rewind failed: {e}");
                    }
                }
                let t = sim.time();
                let events = match sim.step() {
                    Ok(ev) => ev,
                    Err(e) => {
                        warn!("step {} failed: {e}", sim.step_index());
                        thread::sleep(period);
                        continue;
                    }
                };
                let new_hello = reconfigured.then(|| {
                    let h = hello_json(&sim, downscale);
                    *hello.lock().unwrap() = h.clone();
                    *report.lock().unwrap() = report_json(&sim);
                    h
                });
                let frames = sim
                    .frames()
                    .enumerate()
                    .map(|(id, fb)| {
                        if downscale > 1 {
                            encode_frame(id as u8, &fb.downscale(downscale))
                        } else {
                            encode_frame(id as u8, fb)
                        }
                    })
                    .collect();
                let snap = Snapshot {
                    step: sim.step_index() - 1,
                    t,
                    frames,
                    events: events.into_iter().map(|e| ServerMessage::from(e).to_json()).collect(),
                    hello: new_hello,
                };
                // No receivers is fine.
                let _ = snapshots.send(Arc::new(snap));
                next += period;
                let now = Instant::now();
                if next > now {
                    thread::sleep(next - now);
                } else {
                    next = now;
                }
            }
        })
        .expect("spawn simulation thread");
    handle
}

pub fn router(handle: SimHandle) -> Router {
    Router::new()
        .route("/healthz", get(|| async { "ok" }))
        .route("/session", get(session))
        .with_state(handle)
}

async fn session(ws: WebSocketUpgrade, State(handle): State<SimHandle>) -> impl IntoResponse {
    ws.on_upgrade(move |socket| run_session(socket, handle))
}

async fn run_session(socket: WebSocket, handle: SimHandle) {
    let (mut tx, mut rx) = socket.split();
    let mut snapshots = handle.snapshots.subscribe();
    let hello = handle.hello.lock().unwrap().clone();
    let report = handle.report.lock().unwrap().clone();
    for text in std::iter::once(hello).chain(report) {
        if tx.send(Message::Text(text.into())).await.is_err() {
            return;
        }
    }
    let mut dropped = 0u64;
    let mut frames_per_step = 1u64;
    let mut last_step = 0;
    let mut last_t = 0.0;
    let mut stats = tokio::time::interval(STATS_INTERVAL);
    loop {
        let outgoing: Vec<Message> = tokio::select! {
            incoming = rx.next() => match incoming {
                Some(Ok(Message::Text(text))) => match control(&handle, text.as_str()).await {
                    Some(out) => out,
                    None => break,
                },
                Some(Ok(Message::Binary(_))) => vec_text(
                    ServerMessage::error("bad_message", "binary messages are not accepted").to_json(),
                ),
                Some(Ok(_)) => Vec::new(),
                Some(Err(_)) | None => break,
            },
            snap = snapshots.recv() => match snap {
                Ok(snap) => {
                    frames_per_step = snap.frames.len().max(1) as u64;
                    last_step = snap.step;
                    last_t = snap.t;
                    let mut out = Vec::with_capacity(snap.frames.len() + snap.events.len() + 1);
                    if let Some(h) = &snap.hello {
                        out.push(Message::Text(h.clone().into()));
                    }
                    out.extend(snap.events.iter().map(|e| Message::Text(e.clone().into())));
                    out.extend(snap.frames.iter().map(|f| Message::Binary(f.clone().into())));
                    out
                }
                Err(broadcast::error::RecvError::Lagged(n)) => {
                    let lost = n * frames_per_step;
                    dropped += lost;
                    handle.dropped.fetch_add(lost, Ordering::Relaxed);
                    debug!("session lagged, dropped {lost} frames");
                    Vec::new()
                }
                Err(broadcast::error::RecvError::Closed) => break,
            },
            _ = stats.tick() => vec_text(
                ServerMessage::Stats { step: last_step, t: last_t, dropped_frames: dropped }.to_json(),
            ),
        };
        for m in outgoing {
            if tx.send(m).await.is_err() {
                return;
            }
        }
    }
}

/// Applies one control message; `None` once the simulation has stopped.
async fn control(handle: &SimHandle, text: &str) -> Option<Vec<Message>> {
    let msg = match parse_client_message(text) {
        Ok(msg) => msg,
        Err(err) => return Some(vec_text(err.to_json())),
    };
    let (reply, wait) = oneshot::channel();
    handle.control.send(Control { msg, reply }).ok()?;
    Some(match wait.await.ok()? {
        Ok(Some(ack)) => vec_text(ack.to_json()),
        Ok(None) => Vec::new(),
        Err(err) => vec_text(err.to_json()),
    })
}

fn vec_text(text: String) -> Vec<Message> {
    vec![Message::Text(text.into())]
}
