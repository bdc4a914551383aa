use std::io::{BufRead, BufReader, Write};
use std::net::TcpStream;
use std::process::{Command, Stdio};
use std::time::Duration;

fn pvsim() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_pvsim"));
    c.env("RUST_LOG", "warn");
    c
}

#[test]
fn report_prints_preset_numbers() {
    let out = pvsim().args(["report", "--config", "preset:angled-52"]).output().unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("center eccentricity 52.00 deg"), "{text}");

    let out = pvsim().args(["report", "--config", "preset:angled-52", "--json"]).output().unwrap();
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!(v.is_object());
}

#[test]
fn run_writes_events_and_frames() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path().join("out");
    let out = pvsim()
        .args(["run", "--scenario", "selection", "--fps", "20", "--dump-frames", "--out"])
        .arg(&dir)
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["steps"], 80);
    let csv = std::fs::read_to_string(dir.join("events.csv")).unwrap();
    assert!(csv.starts_with("t,kind,side,detail"));
    assert!(csv.contains("haptic"));
    assert!(dir.join("frame_0_00000.ppm").exists());
    assert!(dir.join("frame_1_00079.ppm").exists());
}

#[test]
fn run_is_identical_across_exec_policies() {
    let digest = |exec: &str| {
        let dir = tempfile::tempdir().unwrap();
        let out = pvsim()
            .args(["run", "--scenario", "balance", "--fps", "30", "--seed", "7", "--exec", exec, "--out"])
            .arg(dir.path())
            .output()
            .unwrap();
        assert!(out.status.success());
        let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
        v["frames_digest"].as_str().unwrap().to_string()
    };
    assert_eq!(digest("sequential"), digest("parallel"));
}

#[test]
fn bad_config_fails_with_field_path() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    std::fs::write(&cfg, r#"{"schema":1,"preset":"parallel-lcd","frame_width_mm":275}"#).unwrap();
    let out = pvsim().args(["report", "--config"]).arg(&cfg).output().unwrap();
    assert!(!out.status.success());
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("frame_width_mm"), "{err}");
}

#[test]
fn unknown_scenario_fails() {
    let out = pvsim().args(["run", "--scenario", "no-such", "--out", "/nonexistent"]).output().unwrap();
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("no-such"));
}

#[test]
fn scenario_listing_round_trips() {
    let out = pvsim().arg("scenarios").output().unwrap();
    let names = String::from_utf8(out.stdout).unwrap();
    assert_eq!(names.lines().count(), 7);
    let out = pvsim().args(["scenarios", "oov"]).output().unwrap();
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["name"], "oov");
}

#[test]
fn device_emu_over_stdio() {
    let mut child = pvsim()
        .args(["device-emu", "--kind", "stick", "--listen", "stdio"])
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .spawn()
        .unwrap();
    let mut stdin = child.stdin.take().unwrap();
    writeln!(stdin, "CLEAR STICK").unwrap();
    writeln!(stdin, "BOGUS").unwrap();
    drop(stdin);
    let lines: Vec<String> = BufReader::new(child.stdout.take().unwrap()).lines().map(Result::unwrap).collect();
    assert!(child.wait().unwrap().success());
    assert_eq!(lines.len(), 2);
    assert_eq!(lines[0], "OK");
    assert!(lines[1].starts_with("ERR"));
}

#[test]
fn device_emu_over_tcp() {
    let port = std::net::TcpListener::bind("127.0.0.1:0").unwrap().local_addr().unwrap().port();
    let mut child = pvsim()
        .args(["device-emu", "--kind", "matrix", "--listen", &format!("tcp:{port}")])
        .spawn()
        .unwrap();
    let stream = (0..100)
        .find_map(|_| {
            TcpStream::connect(("127.0.0.1", port)).ok().or_else(|| {
                std::thread::sleep(Duration::from_millis(50));
                None
            })
        })
        .expect("emulator listening");
    let mut w = stream.try_clone().unwrap();
    writeln!(w, "ANIM ARROW UP 9").unwrap();
    let mut line = String::new();
    BufReader::new(stream).read_line(&mut line).unwrap();
    child.kill().unwrap();
    let _ = child.wait();
    assert_eq!(line.trim_end(), "OK");
}

#[test]
fn failing_run_names_the_step() {
    let dir = tempfile::tempdir().unwrap();
    let mut scenario: serde_json::Value =
        serde_json::from_slice(&pvsim().args(["scenarios", "balance"]).output().unwrap().stdout).unwrap();
    scenario["head"] = serde_json::json!([{"type": "hold", "t0": 0.0, "t1": 1.0, "pose": {"position": [0.0, 1.6, 0.0], "orientation": [0.0, 0.0, 0.0, 1.0]}}]);
    let path = dir.path().join("short.json");
    std::fs::write(&path, scenario.to_string()).unwrap();
    let out = pvsim()
        .args(["run", "--fps", "10", "--scenario"])
        .arg(&path)
        .arg("--out")
        .arg(dir.path().join("out"))
        .output()
        .unwrap();
    assert!(!out.status.success());
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("step 11"), "{err}");
}
