use std::path::Path;
use std::process::{Command, Output};

use boussinesq_core::io::{read_csv, read_ndjson};
use boussinesq_core::lab::CHECK_IDS;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_boussinesq")).args(args).output().expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn write_config(dir: &Path, body: &str) -> String {
    let path = dir.join("run.toml");
    std::fs::write(&path, body).unwrap();
    path.to_str().unwrap().to_string()
}

const SHEAR: &str = "[grid]\nn = 8\n[solver]\ndt = 0.01\nt_end = 0.1\nic_kind = \"shear\"\nsnapshot_every = 5\n[monitor]\nsample_every = 5\n";

#[test]
fn unknown_subcommand_lists_the_available_ones() {
    let out = run(&["frobnicate"]);
    assert_eq!(code(&out), 1);
    let err = stderr(&out);
    for name in ["simulate", "analyze", "verify", "decompose"] {
        assert!(err.contains(name), "{err}");
    }
}

#[test]
fn missing_arguments_and_files_are_invalid() {
    assert_eq!(code(&run(&[])), 1);
    assert_eq!(code(&run(&["simulate"])), 1);
    assert_eq!(code(&run(&["simulate", "--config", "/nonexistent/run.toml"])), 1);
    assert_eq!(code(&run(&["analyze", "/nonexistent/x.bsvf"])), 1);
    assert_eq!(code(&run(&["--help"])), 0);
}

#[test]
fn bad_config_values_are_reported_together() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "[grid]\nn = 12\n[solver]\ndt = -1.0\nt_end = 1.0\nbogus = 3\n");
    let out = run(&["simulate", "--config", &cfg, "--out", dir.path().join("o").to_str().unwrap()]);
    assert_eq!(code(&out), 1);
    let err = stderr(&out);
    assert!(err.contains("solver.dt"), "{err}");
    assert!(err.contains("bogus"), "{err}");
    assert!(!dir.path().join("o").exists());
}

#[test]
fn zero_duration_run_writes_a_single_sample() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), &SHEAR.replace("t_end = 0.1", "t_end = 0.0"));
    let o = dir.path().join("o");
    let out = run(&["simulate", "--config", &cfg, "--out", o.to_str().unwrap()]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let samples = read_csv(&std::fs::read_to_string(o.join("series.csv")).unwrap()).unwrap();
    assert_eq!(samples.len(), 1);
    assert_eq!(samples[0].t, 0.0);
    assert_eq!(samples[0].criterion_cum, 0.0);
}

#[test]
fn simulate_then_analyze_and_decompose() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), SHEAR);
    let o = dir.path().join("o");
    let out = run(&["simulate", "--config", &cfg, "--out", o.to_str().unwrap()]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));

    let samples = read_ndjson(&std::fs::read_to_string(o.join("series.ndjson")).unwrap()).unwrap();
    assert_eq!(samples.len(), 3);
    let report: serde_json::Value = serde_json::from_slice(&std::fs::read(o.join("monitor.json")).unwrap()).unwrap();
    assert!(report["blow_up"].is_null());

    let snap = o.join("snapshots").join("step_0000010.bsvf");
    let analyzed = run(&["analyze", snap.to_str().unwrap()]);
    assert_eq!(code(&analyzed), 0, "{}", stderr(&analyzed));
    let sample = read_ndjson(&String::from_utf8(analyzed.stdout).unwrap()).unwrap()[0];
    let last = samples[2];
    let (a, b) = (sample.values(), last.values());
    for i in 0..10 {
        assert!((a[i] - b[i]).abs() <= 1e-12 * b[i].abs().max(1e-300), "column {i}: {} vs {}", a[i], b[i]);
    }

    let dec = run(&["decompose", snap.to_str().unwrap()]);
    assert_eq!(code(&dec), 0);
    let text = String::from_utf8(dec.stdout).unwrap();
    let mut lines = text.lines();
    assert!(lines.next().unwrap().starts_with("# u "));
    assert!(lines.next().unwrap().starts_with("# theta "));
    assert_eq!(lines.next().unwrap(), "j,energy_u,energy_theta");
    // Shear energy sits at |k| = 1 only, split between the shells that see it.
    let total: f64 = lines.map(|l| l.split(',').nth(1).unwrap().parse::<f64>().unwrap()).sum();
    assert!(total > 0.0);
}

#[test]
fn non_finite_run_aborts_with_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "[grid]\nn = 8\n[solver]\ndt = 1.0\nt_end = 10.0\nic_kind = \"taylor_green\"\nic_amplitude = 1e300\nnu = 1e-3\nkappa = 1e-3\n",
    );
    let out = run(&["simulate", "--config", &cfg, "--out", dir.path().join("o").to_str().unwrap()]);
    assert_eq!(code(&out), 2, "{}", stderr(&out));
    assert!(stderr(&out).contains("non-finite"));
    let report: serde_json::Value =
        serde_json::from_slice(&std::fs::read(dir.path().join("o").join("monitor.json")).unwrap()).unwrap();
    assert!(report["blow_up"].is_object());
}

#[test]
fn verify_writes_every_check_and_repeats_byte_for_byte() {
    let dir = tempfile::tempdir().unwrap();
    let mut runs = Vec::new();
    for name in ["a", "b"] {
        let o = dir.path().join(name);
        let out = run(&["verify", "--grids", "32", "--count", "1", "--seed", "7", "--out", o.to_str().unwrap()]);
        assert_eq!(code(&out), 0, "{}", stderr(&out));
        runs.push((o.join("verify"), out.stdout));
    }
    assert_eq!(runs[0].1, runs[1].1);
    for id in CHECK_IDS.iter().copied().chain(["summary"]) {
        let a = std::fs::read(runs[0].0.join(format!("{id}.csv"))).unwrap();
        let b = std::fs::read(runs[1].0.join(format!("{id}.csv"))).unwrap();
        assert_eq!(a, b, "{id}");
    }
    let summary = std::fs::read_to_string(runs[0].0.join("summary.csv")).unwrap();
    assert_eq!(summary.lines().count(), 1 + CHECK_IDS.len());
}

#[test]
fn verify_rejects_grids_below_the_corpus_band() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&["verify", "--grids", "16", "--count", "1", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(code(&out), 1);
}

#[test]
fn shipped_example_config_parses() {
    let text = include_str!("../../../configs/example.toml");
    let config = boussinesq_core::io::parse_config(text).unwrap();
    assert_eq!(config.solver.n, 32);
    assert_eq!(config.solver.snapshot_every, 100);
    assert_eq!(boussinesq_core::io::parse_config(&boussinesq_core::io::render_config(&config)).unwrap(), config);
}
