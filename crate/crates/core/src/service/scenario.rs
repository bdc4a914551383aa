//! Scenario files and the built-in demonstration scenarios.

use nalgebra::Vector3;
use serde::{Deserialize, Serialize};

use super::config::{ConfigFile, PRESET_PREFIX};
use super::ServiceError;
use crate::apps::{
    AppKind, FeedbackParams, FeedbackState, ProxySpec, SelectionLayout, SelectionVolume,
};
use crate::device::ModuleKind;
use crate::geometry::{preset, HeadsetConfig};
use crate::render::{Animation, CueSpec, GridSpec, Shape};
use crate::tracking::{NoiseModel, Pose, Segment, SourceKind, Trajectory, TrackingSpec};

pub const BUILTIN_SCENARIOS: [&str; 7] =
    ["balance", "oov", "oov-led", "selection", "feedback", "notify", "notify-led"];

/// Headset configuration inside a scenario: `"preset:NAME"` or an inline document.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ConfigSource {
    Reference(String),
    Inline(ConfigFile),
}

impl ConfigSource {
    pub fn resolve(&self) -> Result<HeadsetConfig, ServiceError> {
        match self {
            ConfigSource::Reference(s) => Ok(super::config::load_config(s)?),
            ConfigSource::Inline(file) => Ok(file.resolve()?),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Controllers {
    pub left: Option<Trajectory>,
    pub right: Option<Trajectory>,
}

/// Measured value over time, linear between `(t, value)` points.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FeedbackScenario {
    pub target: f64,
    pub dead_zone: f64,
    pub curve: Vec<[f64; 2]>,
    pub params: FeedbackParams,
}

impl Default for FeedbackScenario {
    fn default() -> Self {
        let s = FeedbackState::default();
        FeedbackScenario {
            target: s.target,
            dead_zone: s.dead_zone,
            curve: Vec::new(),
            params: FeedbackParams::default(),
        }
    }
}

impl FeedbackScenario {
    pub fn value_at(&self, t: f64) -> f64 {
        let c = &self.curve;
        match c.len() {
            0 => self.target,
            _ if t <= c[0][0] => c[0][1],
            n if t >= c[n - 1][0] => c[n - 1][1],
            _ => {
                let i = c.partition_point(|p| p[0] <= t);
                let ([t0, v0], [t1, v1]) = (c[i - 1], c[i]);
                if t1 > t0 {
                    v0 + (v1 - v0) * (t - t0) / (t1 - t0)
                } else {
                    v1
                }
            }
        }
    }

    pub fn state_at(&self, t: f64) -> FeedbackState {
        FeedbackState {
            current: self.value_at(t),
            target: self.target,
            dead_zone: self.dead_zone,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    #[serde(default = "schema_v1")]
    pub schema: u32,
    pub name: String,
    /// Seconds.
    pub duration: f64,
    pub app: AppKind,
    #[serde(default = "default_config")]
    pub config: ConfigSource,
    /// Head pose in the world; defaults to holding the identity.
    #[serde(default)]
    pub head: Option<Trajectory>,
    /// World position of the tracked object (out-of-view awareness).
    #[serde(default)]
    pub object: Option<Trajectory>,
    /// Controller positions in head coordinates (selection).
    #[serde(default)]
    pub controllers: Controllers,
    #[serde(default)]
    pub feedback: FeedbackScenario,
    #[serde(default)]
    pub tracking: TrackingSpec,
    #[serde(default)]
    pub grid: GridSpec,
    #[serde(default)]
    pub proxy: ProxySpec,
    /// Empty selects the default layout.
    #[serde(default)]
    pub selection: Vec<SelectionVolume>,
    #[serde(default)]
    pub cue: CueSpec,
}

fn schema_v1() -> u32 {
    super::config::SCHEMA_VERSION
}

fn default_config() -> ConfigSource {
    ConfigSource::Reference(format!("{PRESET_PREFIX}parallel-lcd"))
}

impl Scenario {
    pub fn new(name: &str, app: AppKind, preset_name: &str, duration: f64) -> Self {
        Scenario {
            schema: schema_v1(),
            name: name.to_string(),
            duration,
            app,
            config: ConfigSource::Reference(format!("{PRESET_PREFIX}{preset_name}")),
            head: None,
            object: None,
            controllers: Controllers::default(),
            feedback: FeedbackScenario::default(),
            tracking: TrackingSpec::default(),
            grid: GridSpec::default(),
            proxy: ProxySpec::default(),
            selection: Vec::new(),
            cue: CueSpec::default(),
        }
    }

    pub fn validate(&self) -> Result<(), ServiceError> {
        let bad = |path: &str, msg: String| Err(ServiceError::Scenario(format!("{path}: {msg}")));
        if self.schema != schema_v1() {
            return bad("schema", format!("unsupported schema {}", self.schema));
        }
        if !(self.duration > 0.0 && self.duration.is_finite()) {
            return bad("duration", format!("{} must be > 0", self.duration));
        }
        if let ConfigSource::Reference(r) = &self.config {
            if let Some(name) = r.strip_prefix(PRESET_PREFIX) {
                preset(name)?;
            }
        }
        self.tracking.noise.validate().map_err(|e| ServiceError::Scenario(format!("tracking.noise: {e}")))?;
        if !(self.tracking.horizon >= 0.0) {
            return bad("tracking.horizon", "must be >= 0".into());
        }
        self.grid.validate().or_else(|e| bad("grid", e))?;
        self.proxy.validate().or_else(|e| bad("proxy", e))?;
        self.cue.validate().or_else(|e| bad("cue", e))?;
        self.feedback.params.validate().or_else(|e| bad("feedback.params", e))?;
        if !(self.feedback.dead_zone >= 0.0) {
            return bad("feedback.dead_zone", "must be >= 0".into());
        }
        if self.feedback.curve.windows(2).any(|w| w[1][0] < w[0][0]) {
            return bad("feedback.curve", "times must be non-decreasing".into());
        }
        if self.app == AppKind::Oov && self.object.is_none() {
            return bad("object", "required by the oov app".into());
        }
        self.selection_layout()?;
        Ok(())
    }

    pub fn selection_layout(&self) -> Result<SelectionLayout, ServiceError> {
        if self.selection.is_empty() {
            Ok(SelectionLayout::default())
        } else {
            Ok(SelectionLayout::new(self.selection.clone())?)
        }
    }

    pub fn head_trajectory(&self) -> Trajectory {
        self.head
            .clone()
            .unwrap_or_else(|| Trajectory::hold(Pose::identity(), self.duration))
    }

    pub fn steps(&self, fps: f64) -> u64 {
        (self.duration * fps + 1e-9).floor() as u64
    }

    pub fn from_json(text: &str) -> Result<Self, ServiceError> {
        let de = &mut serde_json::Deserializer::from_str(text);
        let s: Scenario = serde_path_to_error::deserialize(de)
            .map_err(|e| {
            let path = e.path().to_string();
            ServiceError::Scenario(format!("{path}: {}", e.into_inner()))
        })?;
        s.validate()?;
        Ok(s)
    }

    /// A built-in name or a JSON file path.
    pub fn load(source: &str) -> Result<Self, ServiceError> {
        if let Some(s) = builtin(source) {
            return Ok(s);
        }
        let text = std::fs::read_to_string(source)
            .map_err(|e| ServiceError::Scenario(format!("{source}: {e}")))?;
        Self::from_json(&text)
    }
}

fn cv(t1: f64, start: Pose, velocity: [f64; 3]) -> Trajectory {
    Trajectory::new(vec![Segment::ConstantVelocity {
        t0: 0.0,
        t1,
        start,
        velocity: Vector3::from(velocity),
        angular_velocity_deg: Vector3::zeros(),
    }])
    .expect("valid built-in trajectory")
}

fn at(x: f64, y: f64, z: f64) -> Pose {
    Pose::new(Vector3::new(x, y, z), Default::default())
}

pub fn builtin(name: &str) -> Option<Scenario> {
    let s = match name {
        "balance" => {
            let mut s = Scenario::new("balance", AppKind::Balance, "angled-52", 4.0);
            s.head = Some(
                Trajectory::new(vec![Segment::Sway {
                    t0: 0.0,
                    t1: 4.0,
                    center: at(0.0, 1.6, 0.0),
                    amplitude_deg: Vector3::new(4.0, 6.0, 10.0),
                    amplitude_m: Vector3::new(0.02, 0.0, 0.02),
                    frequency_hz: 0.5,
                }])
                .expect("valid sway"),
            );
            s.grid.anchor = at(0.0, 1.6, 0.0);
            s.tracking = TrackingSpec {
                kind: SourceKind::Slam6Dof,
                noise: NoiseModel { pos_sigma: 0.0005, rot_sigma: 0.05, ..NoiseModel::none() },
                ..TrackingSpec::default()
            };
            s
        }
        "oov" => {
            let mut s = Scenario::new("oov", AppKind::Oov, "parallel-lcd", 4.0);
            s.object = Some(cv(4.0, at(2.0, 0.0, 2.0), [0.0, 0.0, -1.0]));
            s
        }
        "oov-led" => {
            let mut s = Scenario::new("oov-led", AppKind::Oov, "led-stick", 4.0);
            s.object = Some(cv(4.0, at(-2.0, 0.0, -1.0), [1.0, 0.0, 0.0]));
            s
        }
        "selection" => {
            let mut s = Scenario::new("selection", AppKind::Selection, "parallel-lcd", 4.0);
            s.controllers = Controllers {
                left: Some(Trajectory::hold(at(-0.45, -0.3, 0.0), 4.0)),
                right: Some(cv(4.0, at(0.45, -0.3, 0.45), [0.0, 0.0, -0.25])),
            };
            s
        }
        "feedback" => {
            let mut s = Scenario::new("feedback", AppKind::Feedback, "parallel-lcd", 4.0);
            s.feedback.curve = vec![[0.0, 130.0], [1.5, 150.0], [2.5, 150.0], [4.0, 180.0]];
            s
        }
        "notify" => {
            let mut s = Scenario::new("notify", AppKind::Notify, "parallel-lcd", 2.0);
            s.cue = CueSpec { animation: Animation::Blink, speed: 2.0, ..CueSpec::default() };
            s
        }
        "notify-led" => {
            let mut s = Scenario::new("notify-led", AppKind::Notify, "led-matrix", 2.0);
            s.cue = CueSpec {
                shape: Shape::Arrow,
                animation: Animation::MoveUp,
                speed: 9.0,
                ..CueSpec::default()
            };
            s
        }
        _ => return None,
    };
    Some(s)
}

/// LED module kind behind a display, if it is one.
pub fn module_kind(kind: crate::geometry::DisplayKind) -> Option<ModuleKind> {
    use crate::geometry::DisplayKind as K;
    match kind {
        K::LedStick { leds } => Some(ModuleKind::Stick { leds }),
        K::LedMatrix13x9 => Some(ModuleKind::Matrix),
        K::Oled128x64 => Some(ModuleKind::Oled),
        K::Lcd31 | K::LcdSeeThrough29 => None,
    }
}
