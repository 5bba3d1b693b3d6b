use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use inls_core::io::{load_snapshot, parse_config};
use inls_core::Field;
use serde_json::Value;

fn inls(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_inls"))
        .args(args)
        .env_remove("INLS_THREADS")
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn load(path: impl AsRef<Path>) -> (Field, f64) {
    load_snapshot(path.as_ref()).unwrap()
}

fn write_config(dir: &Path, body: &str) -> String {
    let path = dir.join("run.json");
    fs::write(&path, body).unwrap();
    path.to_str().unwrap().to_owned()
}

fn gaussian_config(dir: &Path) -> String {
    format!(
        r#"{{
  "params": {{"N": 1, "b": 0.5}},
  "grid": {{"M": 128, "L": 12}},
  "initial_condition": {{"type": "gaussian", "amplitude": 0.6, "width": 1.0}},
  "evolution": {{"dt0": 0.002, "t_end": 0.1, "record_every": 5, "snapshot_every": 25}},
  "outputs": {{"directory": "{}"}}
}}"#,
        dir.join("out").display()
    )
}

fn is_17_digit(s: &str) -> bool {
    let mant = s.trim_start_matches('-').split('e').next().unwrap();
    mant.len() == 18 && mant.as_bytes()[1] == b'.'
}

#[test]
fn ground_state_prints_json_to_stdout() {
    let out = inls(&["ground-state", "--N", "1", "--b", "0.5", "--json", "-"]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let text = stdout(&out);
    let v: Value = serde_json::from_str(&text).unwrap();
    assert_eq!(v["N"], 1);
    assert!(v["psi0"].as_f64().unwrap() > 1.0);
    let p = v["p"].as_f64().unwrap();
    let (grad, pot) = (v["grad_sq"].as_f64().unwrap(), v["potential_term"].as_f64().unwrap());
    assert!((grad * (p + 1.0) / (2.0 * pot) - 1.0).abs() < 1e-6);
    let psi0 = text.lines().find(|l| l.contains("\"psi0\"")).unwrap();
    let literal = psi0.split(':').nth(1).unwrap().trim().trim_end_matches(',');
    assert!(is_17_digit(literal), "{literal}");
}

#[test]
fn ground_state_writes_csv_profile() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("psi.csv");
    let out = inls(&["ground-state", "--b", "0.5", "--csv", csv.to_str().unwrap(), "--dr", "0.5"]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let text = fs::read_to_string(&csv).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("r,psi"));
    let rows: Vec<(f64, f64)> = lines
        .map(|l| {
            let (r, v) = l.split_once(',').unwrap();
            (r.parse().unwrap(), v.parse().unwrap())
        })
        .collect();
    assert!(rows.len() > 10);
    assert!(rows.windows(2).all(|w| w[1].1 < w[0].1), "profile decreases");
}

#[test]
fn out_of_range_b_is_a_usage_error() {
    let out = inls(&["ground-state", "--N", "1", "--b", "3"]);
    assert_eq!(code(&out), 2);
    assert!(stderr(&out).contains("b"), "{}", stderr(&out));
}

#[test]
fn evolve_without_config_exits_2() {
    assert_eq!(code(&inls(&["evolve"])), 2);
}

#[test]
fn unknown_subcommand_exits_2_and_help_exits_0() {
    assert_eq!(code(&inls(&["integrate"])), 2);
    assert_eq!(code(&inls(&[])), 2);
    let help = inls(&["--help"]);
    assert_eq!(code(&help), 0);
    for sub in ["ground-state", "evolve", "s-family", "verify", "transform"] {
        assert!(stdout(&help).contains(sub), "{sub} missing from help");
    }
}

#[test]
fn bad_thread_cap_is_a_usage_error() {
    let out = Command::new(env!("CARGO_BIN_EXE_inls"))
        .args(["ground-state", "--json", "-"])
        .env("INLS_THREADS", "zero")
        .output()
        .unwrap();
    assert_eq!(code(&out), 2);
    assert!(stderr(&out).contains("INLS_THREADS"));
    let ok = Command::new(env!("CARGO_BIN_EXE_inls"))
        .args(["ground-state", "--json", "-"])
        .env("INLS_THREADS", "1")
        .output()
        .unwrap();
    assert_eq!(code(&ok), 0);
}

#[test]
fn verify_quick_passes() {
    let out = inls(&["verify", "--suite", "quick"]);
    assert_eq!(code(&out), 0, "{}{}", stdout(&out), stderr(&out));
    let text = stdout(&out);
    assert!(text.lines().any(|l| l.starts_with("PASS ground_state_energy")));
    assert!(!text.lines().any(|l| l.starts_with("FAIL")));
}

#[test]
fn verify_json_to_stdout_is_a_report_array() {
    let out = inls(&["verify", "--suite", "quick", "--json", "-", "--seed", "7"]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let v: Value = serde_json::from_str(&stdout(&out)).unwrap();
    let reports = v.as_array().unwrap();
    assert!(reports.len() >= 10);
    for r in reports {
        assert_eq!(r["passed"], true, "{r}");
        assert!((7..=9).contains(&r["context"]["seed"].as_u64().unwrap()), "{r}");
        assert_eq!(r["context"]["suite"], "quick");
    }
}

#[test]
fn verify_rejects_invalid_grid() {
    let out = inls(&["verify", "--suite", "quick", "--M", "0"]);
    assert_eq!(code(&out), 2);
    assert!(stderr(&out).contains('M'), "{}", stderr(&out));
}

#[test]
fn evolve_writes_outputs_and_echo_reproduces_the_run() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), &gaussian_config(dir.path()));
    let out = inls(&["evolve", "--config", &config]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let summary: Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(summary["termination"], "reached_t_end");
    assert!(summary["mass_drift"].as_f64().unwrap() < 1e-12);

    let run = dir.path().join("out");
    let csv = fs::read_to_string(run.join("diagnostics.csv")).unwrap();
    let header: Vec<&str> = csv.lines().next().unwrap().split(',').collect();
    assert_eq!(header[0], "t");
    assert!(header.contains(&"mass") && header.contains(&"energy"));
    assert_eq!(csv.lines().count(), 1 + 11);
    assert!(run.join("snapshot_0000.inls").exists());
    assert!(run.join("snapshot_0001.inls").exists());

    let echo = fs::read_to_string(run.join("config.json")).unwrap();
    let original = parse_config(&fs::read_to_string(&config).unwrap()).unwrap();
    let mut echoed = parse_config(&echo).unwrap();
    assert!(echoed.evolution.grad_blowup_threshold.is_some());
    echoed.evolution.grad_blowup_threshold = None;
    assert_eq!(echoed, original);

    let (first, b) = load(run.join("final.inls"));
    assert_eq!(b, 0.5);
    assert!((first.time() - 0.1).abs() < 1e-12);

    let replay_dir = dir.path().join("replay");
    fs::create_dir(&replay_dir).unwrap();
    let replay = echo.replace(run.to_str().unwrap(), replay_dir.to_str().unwrap());
    let replay_path = replay_dir.join("echo.json");
    fs::write(&replay_path, replay).unwrap();
    assert_eq!(code(&inls(&["evolve", "--config", replay_path.to_str().unwrap()])), 0);
    let (second, _) = load(replay_dir.join("final.inls"));
    assert_eq!(first, second);
}

#[test]
fn evolve_rejects_unknown_keys_and_bad_values() {
    let dir = tempfile::tempdir().unwrap();
    let text = gaussian_config(dir.path()).replace("\"t_end\"", "\"t_stop\": 1, \"t_end\"");
    let out = inls(&["evolve", "--config", &write_config(dir.path(), &text)]);
    assert_eq!(code(&out), 2);
    assert!(stderr(&out).contains("line"), "{}", stderr(&out));

    let text = gaussian_config(dir.path()).replace("\"b\": 0.5", "\"b\": 1.5");
    let out = inls(&["evolve", "--config", &write_config(dir.path(), &text)]);
    assert_eq!(code(&out), 2);
    assert!(stderr(&out).contains("params.b"), "{}", stderr(&out));

    let missing = dir.path().join("nothing.json");
    assert_eq!(code(&inls(&["evolve", "--config", missing.to_str().unwrap()])), 2);
}

#[test]
fn overflowing_data_is_a_numerical_failure() {
    let dir = tempfile::tempdir().unwrap();
    let text = gaussian_config(dir.path())
        .replace("\"amplitude\": 0.6", "\"amplitude\": 1e100")
        .replace("\"t_end\": 0.1", "\"t_end\": 0.1, \"grad_blowup_threshold\": 1e300");
    let out = inls(&["evolve", "--config", &write_config(dir.path(), &text)]);
    assert_eq!(code(&out), 3, "{}", stderr(&out));
    let summary: Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(summary["termination"], "numerical_failure");
}

#[test]
fn s_family_and_transforms_round_trip_through_files() {
    let dir = tempfile::tempdir().unwrap();
    let p = |name: &str| dir.path().join(name).to_str().unwrap().to_owned();
    let out = inls(&[
        "s-family", "--T", "1", "--lambda0", "1", "--gamma0", "0.3", "--t", "0.25", "--grid", "256,10", "--out",
        &p("s.inls"),
    ]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let summary: Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert!((summary["lambda"].as_f64().unwrap() - 1.0 / 0.75).abs() < 1e-12);
    assert_eq!(summary["resolvable"], true);

    let (s, _) = load(p("s.inls"));
    assert_eq!(code(&inls(&["transform", "phase", "--gamma0", "0.7", "--input", &p("s.inls"), "--output", &p("a.inls")])), 0);
    assert_eq!(code(&inls(&["transform", "phase", "--gamma0", "-0.7", "--input", &p("a.inls"), "--output", &p("b.inls")])), 0);
    let (back, _) = load(p("b.inls"));
    assert!(back.sup_distance(&s).unwrap() < 1e-14);

    assert_eq!(code(&inls(&["transform", "scale", "--lambda0", "1.25", "--input", &p("s.inls"), "--output", &p("c.inls")])), 0);
    let (scaled, _) = load(p("c.inls"));
    let (m0, m1) = (s.l2_norm(), scaled.l2_norm());
    assert!((m1 / m0 - 1.0).abs() < 1e-5, "{m0} {m1}");

    let out = inls(&["transform", "scale", "--lambda0", "-1", "--input", &p("s.inls"), "--output", &p("d.inls")]);
    assert_eq!(code(&out), 2);
    let out = inls(&["transform", "phase", "--gamma0", "1", "--input", &p("none.inls"), "--output", &p("e.inls")]);
    assert_eq!(code(&out), 2);
}

#[test]
fn pseudo_conformal_transform_of_a_ground_state_snapshot() {
    let dir = tempfile::tempdir().unwrap();
    let p = |name: &str| dir.path().join(name).to_str().unwrap().to_owned();
    let config = format!(
        r#"{{"params": {{"N": 1, "b": 0.5}}, "grid": {{"M": 256, "L": 20}},
  "initial_condition": {{"type": "ground_state"}},
  "evolution": {{"dt0": 0.001, "t_end": 0.002}},
  "outputs": {{"directory": "{}", "final_state": "gs.inls"}}}}"#,
        dir.path().display()
    );
    assert_eq!(code(&inls(&["evolve", "--config", &write_config(dir.path(), &config)])), 0);
    let out = inls(&["transform", "pseudo-conformal", "--s", "2", "--T", "1", "--input", &p("gs.inls"), "--output", &p("pc.inls")]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let (u, _) = load(p("pc.inls"));
    assert!((u.time() - 0.5).abs() < 1e-15);
    assert_eq!(u.grid().extent(), 10.0);
    let out = inls(&["transform", "pseudo-conformal", "--s", "0", "--T", "1", "--input", &p("gs.inls"), "--output", &p("x.inls")]);
    assert_eq!(code(&out), 2);
}
