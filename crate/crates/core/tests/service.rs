use nalgebra::Vector3;

use pvsim_core::geometry::preset;
use pvsim_core::render::Framebuffer;
use pvsim_core::service::{
    builtin, frame_file_name, load_config, run_scenario, FrameFormat, RunOptions, Scenario, ServiceError,
    SimOptions, Simulation,
};
use pvsim_core::tracking::{Pose, Segment, Trajectory};

fn short_head(name: &str, t1: f64) -> Scenario {
    let mut s = builtin(name).unwrap();
    s.head = Some(
        Trajectory::new(vec![Segment::Hold { t0: 0.0, t1, pose: Pose::identity() }]).unwrap(),
    );
    s
}

#[test]
fn scenario_file_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    for name in ["oov", "feedback", "notify-led"] {
        let s = builtin(name).unwrap();
        let path = dir.path().join(format!("{name}.json"));
        std::fs::write(&path, serde_json::to_string_pretty(&s).unwrap()).unwrap();
        assert_eq!(Scenario::load(path.to_str().unwrap()).unwrap(), s);
    }
}

#[test]
fn config_file_matches_preset() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("cfg.json");
    std::fs::write(&path, r#"{"schema": 1, "preset": "angled-52"}"#).unwrap();
    assert_eq!(load_config(path.to_str().unwrap()).unwrap(), preset("angled-52").unwrap());
    assert!(load_config("preset:nope").is_err());
}

#[test]
fn png_dumps_decode_to_the_rendered_frames() {
    let dir = tempfile::tempdir().unwrap();
    let scenario = builtin("selection").unwrap();
    let opts = RunOptions {
        sim: SimOptions { fps: 4.0, ..SimOptions::default() },
        out_dir: Some(dir.path().to_path_buf()),
        dump_frames: Some(FrameFormat::Png),
        hash_frames: false,
    };
    let report = run_scenario(&scenario, None, &opts).unwrap();
    assert_eq!(report.frames_dumped, report.steps * report.displays as u64);

    let mut sim = Simulation::from_scenario(scenario, opts.sim).unwrap();
    for step in 0..report.steps {
        sim.step().unwrap();
        for (id, fb) in sim.frames().enumerate() {
            let img = image::open(dir.path().join(frame_file_name(id, step, FrameFormat::Png)))
                .unwrap()
                .to_rgb8();
            let decoded = Framebuffer::from_pixels(img.width(), img.height(), img.into_raw()).unwrap();
            assert_eq!(&decoded, fb, "display {id} step {step}");
        }
    }
}

#[test]
fn failing_step_is_named() {
    let scenario = short_head("balance", 1.0);
    let opts = RunOptions { sim: SimOptions { fps: 10.0, ..SimOptions::default() }, ..RunOptions::default() };
    let err = run_scenario(&scenario, None, &opts).unwrap_err();
    match &err {
        ServiceError::Step { step, .. } => assert_eq!(*step, 11),
        other => panic!("unexpected {other:?}"),
    }
    assert!(err.to_string().starts_with("step 11: "), "{err}");
}

#[test]
fn set_pose_offset_is_relative_to_start() {
    let mut sim = Simulation::from_scenario(builtin("balance").unwrap(), SimOptions::default()).unwrap();
    sim.set_pose(0.0, 0.0, 10.0, Vector3::new(0.0, 0.1, 0.0));
    sim.step().unwrap();
    let start = builtin("balance").unwrap().head_trajectory().pose_at(0.0).unwrap().position;
    assert!((sim.pose().position - start - Vector3::new(0.0, 0.1, 0.0)).norm() < 1e-12);
}

#[test]
fn rewind_replays_identically() {
    let mut sim = Simulation::from_scenario(builtin("oov-led").unwrap(), SimOptions::default()).unwrap();
    let pass = |sim: &mut Simulation| {
        let mut frames = Vec::new();
        let mut events = Vec::new();
        for _ in 0..sim.total_steps() {
            events.extend(sim.step().unwrap());
            frames.extend(sim.frames().map(|f| f.sha256()));
        }
        (frames, events)
    };
    let first = pass(&mut sim);
    let _ = sim.step();
    sim.rewind().unwrap();
    assert_eq!(pass(&mut sim), first);
}
