//! Simulated tracking sources.

use std::io;

use nalgebra::{UnitQuaternion, Vector3};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use super::predict::{predict, DEFAULT_HORIZON_S};
use super::trajectory::Trajectory;
use super::{renormalize, Pose, TrackingError};

/// Ambient light below which camera tracking fails.
pub const SLAM_MIN_LUX: f64 = 15.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SourceKind {
    /// Lighthouse-style external tracking.
    #[serde(rename = "external6dof")]
    External6Dof,
    /// Inside-out camera tracking; needs light.
    #[serde(rename = "slam6dof")]
    Slam6Dof,
    /// Orientation-only inertial unit.
    #[serde(rename = "imu3dof")]
    Imu3Dof,
}

impl SourceKind {
    pub fn name(self) -> &'static str {
        match self {
            SourceKind::External6Dof => "external6dof",
            SourceKind::Slam6Dof => "slam6dof",
            SourceKind::Imu3Dof => "imu3dof",
        }
    }

    fn tag(self) -> u64 {
        match self {
            SourceKind::External6Dof => 1,
            SourceKind::Slam6Dof => 2,
            SourceKind::Imu3Dof => 3,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct NoiseModel {
    /// Per-axis position standard deviation, meters.
    pub pos_sigma: f64,
    /// Per-axis rotation standard deviation, degrees.
    pub rot_sigma: f64,
    /// IMU yaw drift, degrees per second.
    pub yaw_drift_rate: f64,
    pub seed: u64,
}

impl Default for NoiseModel {
    fn default() -> Self {
        NoiseModel::none()
    }
}

impl NoiseModel {
    pub fn none() -> Self {
        NoiseModel {
            pos_sigma: 0.0,
            rot_sigma: 0.0,
            yaw_drift_rate: 0.0,
            seed: 0,
        }
    }

    pub fn validate(&self) -> Result<(), TrackingError> {
        if !(self.pos_sigma >= 0.0 && self.rot_sigma >= 0.0) {
            return Err(TrackingError::Range("noise sigmas must be >= 0".into()));
        }
        if !self.yaw_drift_rate.is_finite() {
            return Err(TrackingError::Range("yaw drift rate must be finite".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PoseSample {
    pub t: f64,
    pub pose: Pose,
    pub kind: SourceKind,
}

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    let mut z = x;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Independent, reproducible generator per (seed, t, kind).
fn sample_rng(seed: u64, t: f64, kind: SourceKind) -> ChaCha8Rng {
    let mixed = splitmix64(splitmix64(splitmix64(seed) ^ t.to_bits()) ^ kind.tag());
    ChaCha8Rng::seed_from_u64(mixed)
}

fn gaussian3(rng: &mut ChaCha8Rng, sigma: f64) -> Vector3<f64> {
    if sigma == 0.0 {
        return Vector3::zeros();
    }
    let n = Normal::new(0.0, sigma).expect("sigma validated");
    Vector3::new(n.sample(rng), n.sample(rng), n.sample(rng))
}

/// Pose reported by a `kind` source at time `t`.
pub fn sample(
    trajectory: &Trajectory,
    kind: SourceKind,
    noise: &NoiseModel,
    t: f64,
    ambient_lux: f64,
) -> Result<PoseSample, TrackingError> {
    noise.validate()?;
    let truth = trajectory.pose_at(t)?;
    if kind == SourceKind::Slam6Dof && !(ambient_lux >= SLAM_MIN_LUX) {
        return Err(TrackingError::TrackingLost);
    }
    let mut rng = sample_rng(noise.seed, t, kind);
    let dp = gaussian3(&mut rng, noise.pos_sigma);
    let dr = gaussian3(&mut rng, noise.rot_sigma.to_radians());
    let noisy_q = UnitQuaternion::from_scaled_axis(dr) * truth.orientation;
    let pose = match kind {
        SourceKind::Imu3Dof => {
            let drift = UnitQuaternion::from_axis_angle(
                &Vector3::y_axis(),
                (noise.yaw_drift_rate * t).to_radians(),
            );
            Pose::new(Vector3::zeros(), renormalize(drift * noisy_q))
        }
        _ => Pose::new(truth.position + dp, renormalize(noisy_q)),
    };
    Ok(PoseSample { t, pose, kind })
}

/// Tracking setup of a scenario.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TrackingSpec {
    pub kind: SourceKind,
    pub noise: NoiseModel,
    /// Pipeline latency compensated by prediction, seconds.
    pub horizon: f64,
    pub lux: f64,
}

impl Default for TrackingSpec {
    fn default() -> Self {
        TrackingSpec {
            kind: SourceKind::External6Dof,
            noise: NoiseModel::none(),
            horizon: DEFAULT_HORIZON_S,
            lux: 300.0,
        }
    }
}

/// What a tracker delivers for one simulation step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrackerOutput {
    /// Pose used for rendering at the step time.
    pub pose: Pose,
    pub sample: Option<PoseSample>,
    pub lost: bool,
    pub clamped: bool,
}

/// Stateful wrapper: samples with a latency equal to the horizon, then predicts
/// forward over it. Lost samples reuse the previous estimate.
#[derive(Debug, Clone)]
pub struct Tracker {
    spec: TrackingSpec,
    history: Vec<PoseSample>,
    last: Pose,
}

impl Tracker {
    pub fn new(spec: TrackingSpec) -> Self {
        Tracker {
            spec,
            history: Vec::with_capacity(3),
            last: Pose::identity(),
        }
    }

    pub fn spec(&self) -> &TrackingSpec {
        &self.spec
    }

    pub fn step(&mut self, trajectory: &Trajectory, t: f64) -> Result<TrackerOutput, TrackingError> {
        let (start, _) = trajectory.domain();
        let horizon = self.spec.horizon.max(0.0);
        let t_meas = (t - horizon).max(start);
        let got = match sample(trajectory, self.spec.kind, &self.spec.noise, t_meas, self.spec.lux) {
            Ok(s) => Some(s),
            Err(TrackingError::TrackingLost) => None,
            Err(e) => return Err(e),
        };
        let Some(s) = got else {
            return Ok(TrackerOutput {
                pose: self.last,
                sample: None,
                lost: true,
                clamped: false,
            });
        };
        if self.history.last().is_some_and(|prev| prev.t == s.t) {
            self.history.pop();
        }
        self.history.push(s);
        if self.history.len() > 2 {
            self.history.remove(0);
        }
        let (pose, clamped) = match predict(&self.history, t - s.t) {
            Ok(p) => (p.pose, p.clamped),
            Err(TrackingError::InsufficientHistory) => (s.pose, false),
            Err(e) => return Err(e),
        };
        self.last = pose;
        Ok(TrackerOutput {
            pose,
            sample: Some(s),
            lost: false,
            clamped,
        })
    }
}

#[derive(Serialize)]
struct CsvRow {
    t: f64,
    px: f64,
    py: f64,
    pz: f64,
    qw: f64,
    qx: f64,
    qy: f64,
    qz: f64,
    kind: &'static str,
}

/// Writes `t,px,py,pz,qw,qx,qy,qz,kind` rows with a header.
pub fn write_samples_csv<W: io::Write>(samples: &[PoseSample], out: W) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for s in samples {
        let q = s.pose.orientation.quaternion();
        w.serialize(CsvRow {
            t: s.t,
            px: s.pose.position.x,
            py: s.pose.position.y,
            pz: s.pose.position.z,
            qw: q.w,
            qx: q.i,
            qy: q.j,
            qz: q.k,
            kind: s.kind.name(),
        })?;
    }
    w.flush()?;
    Ok(())
}
