//! Fixed-timestep simulation loop.

use nalgebra::Vector3;
use serde::Serialize;

use super::scenario::{module_kind, Scenario};
use super::ServiceError;
use crate::apps::{
    balance_update, bearing_deg, display_side, feedback_update, notify, oov_cameras,
    oov_led_commands, oov_update, selection_ops, selection_update, AppError, AppKind, Hand,
    NotifyOutput, NotifyTarget, SelectionLayout, SelectionState,
};
use crate::device::{DeviceCommand, Emulator, ModuleKind, Reply};
use crate::exec::Exec;
use crate::geometry::{
    coverage_report, resolve_placements, CoverageReport, DisplayPlacement, HeadsetConfig, Side,
};
use crate::render::{
    camera_from_placement, cue_ops, execute, CueSide, CueSpec, DrawList, DrawOp, Framebuffer,
    BLACK, WHITE,
};
use crate::tracking::{Pose, Tracker, Trajectory};

pub const DEFAULT_FPS: f64 = 60.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimOptions {
    pub fps: f64,
    /// Replaces the scenario's tracking noise seed.
    pub seed: Option<u64>,
    pub exec: Exec,
}

impl Default for SimOptions {
    fn default() -> Self {
        SimOptions {
            fps: DEFAULT_FPS,
            seed: None,
            exec: Exec::default(),
        }
    }
}

/// One row of `events.csv`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Event {
    pub t: f64,
    pub kind: String,
    pub side: String,
    pub detail: String,
}

impl Event {
    fn new(t: f64, kind: &str, side: impl ToString, detail: impl ToString) -> Self {
        Event {
            t,
            kind: kind.to_string(),
            side: side.to_string(),
            detail: detail.to_string(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DisplayInfo {
    pub id: usize,
    pub kind: String,
    pub side: Side,
    pub width: u32,
    pub height: u32,
}

#[derive(Debug, Clone)]
struct Slot {
    placement: DisplayPlacement,
    side: Side,
    ppd: f64,
    module: Option<ModuleKind>,
    emulator: Option<Emulator>,
    sent: Vec<DeviceCommand>,
    unsupported_reported: bool,
    fb: Framebuffer,
}

impl Slot {
    fn hand(&self) -> Option<Hand> {
        match self.side {
            Side::Left => Some(Hand::Left),
            Side::Right => Some(Hand::Right),
            Side::Front => None,
        }
    }

    fn shows(&self, cue_side: CueSide) -> bool {
        match (cue_side, self.side) {
            (CueSide::Both, _) | (_, Side::Front) => true,
            (CueSide::Left, s) => s == Side::Left,
            (CueSide::Right, s) => s == Side::Right,
        }
    }
}

fn build_slots(config: &HeadsetConfig) -> Result<Vec<Slot>, ServiceError> {
    let eye = config.head.cyclopean_eye();
    resolve_placements(config)?
        .into_iter()
        .map(|placement| {
            let cam = camera_from_placement(&placement, &eye, &Pose::identity()).map_err(AppError::from)?;
            let module = module_kind(placement.kind);
            let (w, h) = module.map_or((placement.res_x, placement.res_y), |m| m.dims());
            Ok(Slot {
                placement,
                side: display_side(&placement),
                ppd: cam.center_ppd(),
                module,
                emulator: module.map(|m| Emulator::new(m, false)),
                sent: Vec::new(),
                unsupported_reported: false,
                fb: Framebuffer::new(w, h),
            })
        })
        .collect()
}

/// Deterministic scenario state machine: poses and scenario values in, frames
/// and events out, one fixed step at a time.
#[derive(Debug, Clone)]
pub struct Simulation {
    scenario: Scenario,
    config: HeadsetConfig,
    options: SimOptions,
    slots: Vec<Slot>,
    head: Trajectory,
    tracker: Tracker,
    layout: SelectionLayout,
    selection: SelectionState,
    feedback_override: Option<f64>,
    feedback_dir: i8,
    pose_override: Option<Pose>,
    tracking_lost: bool,
    pose: Pose,
    step: u64,
}

impl Simulation {
    pub fn new(scenario: Scenario, config: HeadsetConfig, options: SimOptions) -> Result<Self, ServiceError> {
        if !(options.fps > 0.0 && options.fps.is_finite()) {
            return Err(ServiceError::Scenario(format!("fps {} must be > 0", options.fps)));
        }
        scenario.validate()?;
        let slots = build_slots(&config)?;
        let mut tracking = scenario.tracking;
        if let Some(seed) = options.seed {
            tracking.noise.seed = seed;
        }
        Ok(Simulation {
            head: scenario.head_trajectory(),
            layout: scenario.selection_layout()?,
            tracker: Tracker::new(tracking),
            scenario,
            config,
            options,
            slots,
            selection: SelectionState::default(),
            feedback_override: None,
            feedback_dir: 0,
            pose_override: None,
            tracking_lost: false,
            pose: Pose::identity(),
            step: 0,
        })
    }

    /// Resolves the scenario's own headset configuration.
    pub fn from_scenario(scenario: Scenario, options: SimOptions) -> Result<Self, ServiceError> {
        let config = scenario.config.resolve()?;
        Self::new(scenario, config, options)
    }

    pub fn scenario(&self) -> &Scenario {
        &self.scenario
    }

    pub fn config(&self) -> &HeadsetConfig {
        &self.config
    }

    pub fn options(&self) -> &SimOptions {
        &self.options
    }

    pub fn step_index(&self) -> u64 {
        self.step
    }

    /// Time of the next step.
    pub fn time(&self) -> f64 {
        self.step as f64 / self.options.fps
    }

    /// Pose used by the last step.
    pub fn pose(&self) -> Pose {
        self.pose
    }

    pub fn displays(&self) -> Vec<DisplayInfo> {
        self.slots
            .iter()
            .enumerate()
            .map(|(id, s)| DisplayInfo {
                id,
                kind: s.placement.kind.name().to_string(),
                side: s.side,
                width: s.fb.width(),
                height: s.fb.height(),
            })
            .collect()
    }

    /// Frames produced by the last step, in display order.
    pub fn frames(&self) -> impl ExactSizeIterator<Item = &Framebuffer> {
        self.slots.iter().map(|s| &s.fb)
    }

    pub fn selection(&self) -> &SelectionState {
        &self.selection
    }

    pub fn report(&self) -> Result<CoverageReport, ServiceError> {
        Ok(coverage_report(&self.config)?)
    }

    /// Overrides tracking with a fixed pose; position is relative to the
    /// scenario's starting head position.
    pub fn set_pose(&mut self, yaw: f64, pitch: f64, roll: f64, offset: Vector3<f64>) {
        let origin = self.head.pose_at_clamped(self.head.domain().0).position;
        self.pose_override = Some(Pose::from_euler_deg(origin + offset, yaw, pitch, roll));
    }

    pub fn clear_pose(&mut self) {
        self.pose_override = None;
    }

    pub fn set_feedback(&mut self, current: f64) -> Result<(), ServiceError> {
        if !current.is_finite() {
            return Err(ServiceError::Param("feedback value must be finite".into()));
        }
        self.feedback_override = Some(current);
        Ok(())
    }

    pub fn set_cue(&mut self, cue: CueSpec) -> Result<(), ServiceError> {
        cue.validate().map_err(|e| ServiceError::Param(format!("cue: {e}")))?;
        self.scenario.cue = cue;
        for s in &mut self.slots {
            s.unsupported_reported = false;
        }
        Ok(())
    }

    /// Swaps the headset; on error the previous configuration stays active.
    pub fn set_config(&mut self, config: HeadsetConfig) -> Result<(), ServiceError> {
        let slots = build_slots(&config)?;
        self.config = config;
        self.slots = slots;
        Ok(())
    }

    /// Sets one scenario field by dotted path, e.g. `grid.spacing` or `tracking.noise.pos_sigma`.
    pub fn set_param(&mut self, path: &str, value: serde_json::Value) -> Result<(), ServiceError> {
        let bad = |m: String| ServiceError::Param(format!("{path}: {m}"));
        let mut doc = serde_json::to_value(&self.scenario).map_err(|e| bad(e.to_string()))?;
        let mut cursor = &mut doc;
        for key in path.split('.') {
            cursor = match cursor {
                serde_json::Value::Object(map) => map.entry(key).or_insert(serde_json::Value::Null),
                serde_json::Value::Array(items) => key
                    .parse::<usize>()
                    .ok()
                    .and_then(|i| items.get_mut(i))
                    .ok_or_else(|| bad(format!("no element {key:?}")))?,
                _ => return Err(bad(format!("cannot descend into {key:?}"))),
            };
        }
        *cursor = value;
        let next: Scenario = serde_json::from_value(doc).map_err(|e| bad(e.to_string()))?;
        next.validate()?;
        let config = if next.config != self.scenario.config {
            Some(next.config.resolve()?)
        } else {
            None
        };
        let layout = next.selection_layout()?;
        if let Some(config) = config {
            self.set_config(config)?;
        }
        if next.tracking != self.scenario.tracking {
            let mut tracking = next.tracking;
            if let Some(seed) = self.options.seed {
                tracking.noise.seed = seed;
            }
            self.tracker = Tracker::new(tracking);
        }
        self.head = next.head_trajectory();
        self.layout = layout;
        for s in &mut self.slots {
            s.unsupported_reported = false;
        }
        self.scenario = next;
        Ok(())
    }

    /// Steps in one pass of the scenario.
    pub fn total_steps(&self) -> u64 {
        self.scenario.steps(self.options.fps)
    }

    /// Restarts at t = 0 with fresh tracker, selection and device state.
    /// Pose, feedback and cue overrides are kept.
    pub fn rewind(&mut self) -> Result<(), ServiceError> {
        self.slots = build_slots(&self.config)?;
        self.tracker = Tracker::new(self.tracker.spec().clone());
        self.selection = SelectionState::default();
        self.feedback_dir = 0;
        self.tracking_lost = false;
        self.step = 0;
        Ok(())
    }

    /// Advances one fixed step and renders every display.
    pub fn step(&mut self) -> Result<Vec<Event>, ServiceError> {
        let t = self.time();
        let mut events = Vec::new();
        let pose = match self.pose_override {
            Some(p) => p,
            None => {
                let out = self.tracker.step(&self.head, t)?;
                if out.lost != self.tracking_lost {
                    let kind = if out.lost { "tracking_lost" } else { "tracking_restored" };
                    events.push(Event::new(t, kind, "", self.tracker.spec().kind.name()));
                    self.tracking_lost = out.lost;
                }
                out.pose
            }
        };
        self.pose = pose;
        for s in &mut self.slots {
            if let Some(emu) = &mut s.emulator {
                emu.set_imu(pose.orientation);
            }
        }
        let lists = self.update_apps(t, &pose, &mut events)?;
        let exec = self.options.exec;
        exec.for_each_chunk(&mut self.slots, 1, |i, chunk| {
            if let Some(ops) = &lists[i] {
                execute(&mut chunk[0].fb, ops, exec);
            }
        });
        let dt = 1.0 / self.options.fps;
        for s in &mut self.slots {
            if let Some(emu) = &mut s.emulator {
                let (w, h) = (s.fb.width(), s.fb.height());
                let pixels = emu.frame().into_iter().flatten().collect();
                s.fb = Framebuffer::from_pixels(w, h, pixels).expect("emulator frame size");
                emu.step(dt);
            }
        }
        self.step += 1;
        Ok(events)
    }

    fn update_apps(&mut self, t: f64, pose: &Pose, events: &mut Vec<Event>) -> Result<Vec<Option<DrawList>>, ServiceError> {
        let eye = self.config.head.cyclopean_eye();
        let mut lists: Vec<Option<DrawList>> = vec![None; self.slots.len()];
        let mut led: Vec<Option<Vec<DeviceCommand>>> = vec![None; self.slots.len()];
        match self.scenario.app {
            AppKind::Balance => {
                for (i, s) in self.slots.iter().enumerate() {
                    if s.module.is_none() {
                        let cam = camera_from_placement(&s.placement, &eye, pose).map_err(AppError::from)?;
                        lists[i] = balance_update(&self.scenario.grid, &[cam]).pop();
                    }
                }
            }
            AppKind::Oov => {
                let object = self
                    .scenario
                    .object
                    .as_ref()
                    .map(|o| o.pose_at_clamped(t).position)
                    .unwrap_or_default();
                let proxy = &self.scenario.proxy;
                for (i, s) in self.slots.iter().enumerate() {
                    match s.module {
                        None => {
                            let cams = oov_cameras(std::slice::from_ref(&s.placement), &eye, pose, proxy)?;
                            match oov_update(pose, &eye, &object, proxy, &cams) {
                                Ok(mut frame) => lists[i] = frame.lists.pop(),
                                Err(AppError::CoincidentObject) => {
                                    events.push(Event::new(t, "skip_frame", s.side, "object at head"));
                                }
                                Err(e) => return Err(e.into()),
                            }
                        }
                        Some(kind) => {
                            let [left, right] = oov_led_commands(bearing_deg(pose, &eye, &object), kind);
                            led[i] = Some(match s.side {
                                Side::Left => left,
                                Side::Right => right,
                                Side::Front if left.len() > right.len() => left,
                                Side::Front => right,
                            });
                        }
                    }
                }
            }
            AppKind::Selection => {
                let at = |traj: &Option<Trajectory>| traj.as_ref().map(|c| c.pose_at_clamped(t).position);
                let left = at(&self.scenario.controllers.left);
                let right = at(&self.scenario.controllers.right);
                let next = selection_update(left.as_ref(), right.as_ref(), &self.layout, &self.selection, t);
                for e in &next.haptic_events {
                    let detail = e.option.map_or("none".to_string(), |o| format!("option {o}"));
                    events.push(Event::new(e.t, "haptic", e.side.name(), detail));
                }
                for (i, s) in self.slots.iter().enumerate() {
                    if s.module.is_none() {
                        lists[i] = Some(match s.hand() {
                            Some(h) => selection_ops(next.selected(h), s.fb.width(), s.fb.height(), s.ppd, WHITE),
                            None => vec![DrawOp::Clear { color: BLACK }],
                        });
                    }
                }
                self.selection = next;
            }
            AppKind::Feedback => {
                let mut state = self.scenario.feedback.state_at(t);
                if let Some(v) = self.feedback_override {
                    state.current = v;
                }
                let cues = feedback_update(&state, &self.scenario.feedback.params);
                let dir = cues.first().map_or(0, |c| {
                    if c.animation == crate::render::Animation::MoveUp { 1 } else { -1 }
                });
                if dir != self.feedback_dir {
                    let name = ["down", "none", "up"][(dir + 1) as usize];
                    events.push(Event::new(t, "feedback", "", format!("{name} {:.1}", state.current)));
                    self.feedback_dir = dir;
                }
                for (i, s) in self.slots.iter_mut().enumerate() {
                    let cue = cues.iter().find(|c| s.shows(c.side));
                    cue_output(s, cue, t, &mut lists[i], &mut led[i], events);
                }
            }
            AppKind::Notify => {
                let cue = self.scenario.cue;
                for (i, s) in self.slots.iter_mut().enumerate() {
                    let shown = s.shows(cue.side).then_some(&cue);
                    cue_output(s, shown, t, &mut lists[i], &mut led[i], events);
                }
            }
        }
        for (s, cmds) in self.slots.iter_mut().zip(led) {
            let (Some(cmds), Some(emu)) = (cmds, s.emulator.as_mut()) else {
                continue;
            };
            if cmds == s.sent {
                continue;
            }
            for c in &cmds {
                if let Reply::Err(code) = emu.submit(c, t) {
                    events.push(Event::new(t, "device_error", s.side, format!("{c}: {code}")));
                }
            }
            s.sent = cmds;
        }
        Ok(lists)
    }
}

/// Draw ops for an LCD slot, device commands for an LED slot.
fn cue_output(
    s: &mut Slot,
    cue: Option<&CueSpec>,
    t: f64,
    list: &mut Option<DrawList>,
    led: &mut Option<Vec<DeviceCommand>>,
    events: &mut Vec<Event>,
) {
    match s.module {
        None => {
            let mut ops = vec![DrawOp::Clear { color: BLACK }];
            if let Some(cue) = cue {
                ops.extend(cue_ops(cue, s.fb.width(), s.fb.height(), s.ppd, t));
            }
            *list = Some(ops);
        }
        Some(kind) => {
            let clear = vec![DeviceCommand::Clear(kind.clear_target())];
            let Some(cue) = cue else {
                *led = Some(clear);
                return;
            };
            let target = match kind {
                ModuleKind::Stick { leds } => NotifyTarget::LedStick { leds },
                ModuleKind::Matrix => NotifyTarget::LedMatrix,
                ModuleKind::Oled => NotifyTarget::Oled,
            };
            *led = Some(match notify(cue, target, t) {
                Ok(NotifyOutput::Commands(cmds)) => cmds,
                Ok(NotifyOutput::Draw(_)) => clear,
                Err(e) => {
                    if !s.unsupported_reported {
                        events.push(Event::new(t, "unsupported_cue", s.side, e));
                        s.unsupported_reported = true;
                    }
                    clear
                }
            });
        }
    }
}
