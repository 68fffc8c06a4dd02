use std::path::{Path, PathBuf};

use nhq::config::apply_override;
use nhq::error::{EXIT_CONFIG, EXIT_NUMERICAL};
use nhq::executor::RayonRows;
use nhq::{run_scenario, validate_config, CliError, Scenario, ScenarioConfig};
use nhq_core::wigner::Sequential;

fn preset(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("presets")
        .join(name)
}

fn load(name: &str, overrides: &[&str]) -> ScenarioConfig {
    let o: Vec<String> = overrides.iter().map(|s| s.to_string()).collect();
    ScenarioConfig::load(&preset(name), &o).unwrap()
}

/// Parsed CSV: header names and numeric rows, comment lines dropped.
fn parse_csv(text: &str) -> (Vec<String>, Vec<Vec<f64>>) {
    let mut lines = text
        .lines()
        .filter(|l| !l.is_empty() && !l.starts_with('#'));
    let header = lines.next().unwrap().split(',').map(String::from).collect();
    let rows = lines
        .map(|l| l.split(',').map(|v| v.parse().unwrap()).collect())
        .collect();
    (header, rows)
}

fn run_to_string(cfg: ScenarioConfig, threads: usize) -> Result<String, (CliError, String)> {
    let scenario = Scenario::prepare(cfg).map_err(|e| (e, String::new()))?;
    let mut buf = Vec::new();
    let res = if threads > 1 {
        scenario
            .run(&mut buf, &RayonRows::new(threads).unwrap())
            .map(|_| ())
    } else {
        scenario.run(&mut buf, &Sequential).map(|_| ())
    };
    let text = String::from_utf8(buf).unwrap();
    res.map(|_| text.clone()).map_err(|e| (e, text))
}

fn column(header: &[String], rows: &[Vec<f64>], name: &str) -> Vec<f64> {
    let i = header
        .iter()
        .position(|h| h == name)
        .unwrap_or_else(|| panic!("missing column {name}"));
    rows.iter().map(|r| r[i]).collect()
}

const PRESETS: [&str; 6] = [
    "qubit-constant-decay.toml",
    "qubit-unitary.toml",
    "qutrit-selective-decay.toml",
    "wigner-constant-decay.toml",
    "wigner-unitary.toml",
    "wigner-double-well.toml",
];

#[test]
fn presets_are_valid() {
    for name in PRESETS {
        let cfg = load(name, &[]);
        assert!(
            validate_config(&cfg).is_empty(),
            "{name}: {:?}",
            validate_config(&cfg)
        );
        Scenario::prepare(cfg).unwrap_or_else(|e| panic!("{name}: {e}"));
    }
}

#[test]
fn presets_run_shortened() {
    for name in PRESETS {
        let cfg = load(name, &["integrator.steps=20", "integrator.sample_every=5"]);
        let text = run_to_string(cfg, 1).unwrap_or_else(|(e, _)| panic!("{name}: {e}"));
        let (header, rows) = parse_csv(&text);
        assert_eq!(rows.len(), 5, "{name}");
        assert!(rows.iter().all(|r| r.len() == header.len()));
        assert_eq!(&header[..2], ["time", "trace_omega"]);
    }
}

#[test]
fn violations_are_reported_per_field() {
    let cfg = load(
        "qutrit-selective-decay.toml",
        &[
            "integrator.dt=-1e-3",
            "initial.probabilities=[0.5, 0.3, 0.1]",
        ],
    );
    let v = validate_config(&cfg);
    let fields: Vec<&str> = v.iter().map(|v| v.field.as_str()).collect();
    assert!(fields.contains(&"integrator.dt"), "{fields:?}");
    assert!(fields.contains(&"initial.probabilities"), "{fields:?}");
    let err = Scenario::prepare(cfg).err().unwrap();
    assert_eq!(err.exit_code(), EXIT_CONFIG);
    let msg = err.to_string();
    assert!(
        msg.contains("integrator.dt") && msg.contains("initial.probabilities"),
        "{msg}"
    );
}

#[test]
fn mode_specific_sections_are_checked() {
    let cfg = load("qubit-unitary.toml", &["mode=\"quantum-classical\""]);
    let fields: Vec<String> = validate_config(&cfg).into_iter().map(|v| v.field).collect();
    assert!(
        fields.contains(&"grid".into()) && fields.contains(&"bath".into()),
        "{fields:?}"
    );

    let cfg = load(
        "qubit-unitary.toml",
        &["hamiltonian.matrix=[[[1.0, 0.0], [0.0, 1.0]], [[0.0, -1.0], [0.0, 0.0]]]"],
    );
    assert!(!validate_config(&cfg).is_empty());
}

#[test]
fn unknown_keys_and_bad_overrides_are_config_errors() {
    let o = vec!["integrator.dtt=1e-3".to_string()];
    let err = ScenarioConfig::load(&preset("qubit-unitary.toml"), &o)
        .err()
        .unwrap();
    assert_eq!(err.exit_code(), EXIT_CONFIG);
    let o = vec!["integrator".to_string()];
    let err = ScenarioConfig::load(&preset("qubit-unitary.toml"), &o)
        .err()
        .unwrap();
    assert!(matches!(err, CliError::Override(..)));
    let err = ScenarioConfig::load(Path::new("/nonexistent/scenario.toml"), &[])
        .err()
        .unwrap();
    assert_eq!(err.exit_code(), EXIT_CONFIG);
}

#[test]
fn override_values_are_toml_literals() {
    let mut t = toml::Table::new();
    apply_override(&mut t, "a.b.c=2.5").unwrap();
    apply_override(&mut t, "a.n=7").unwrap();
    apply_override(&mut t, "a.v=[1.0, 2.0]").unwrap();
    apply_override(&mut t, "a.s=pauli-x").unwrap();
    assert_eq!(t["a"]["b"]["c"].as_float(), Some(2.5));
    assert_eq!(t["a"]["n"].as_integer(), Some(7));
    assert_eq!(t["a"]["v"].as_array().unwrap().len(), 2);
    assert_eq!(t["a"]["s"].as_str(), Some("pauli-x"));
    assert!(apply_override(&mut t, "a.n.x=1").is_err());
    assert!(apply_override(&mut t, "a..x=1").is_err());
}

#[test]
fn row_count_follows_sampling() {
    for (steps, every) in [(0usize, 1usize), (10, 1), (10, 3), (100, 10), (7, 10)] {
        let cfg = load(
            "qubit-unitary.toml",
            &[
                &format!("integrator.steps={steps}"),
                &format!("integrator.sample_every={every}"),
            ],
        );
        let (_, rows) = parse_csv(&run_to_string(cfg, 1).unwrap());
        assert_eq!(rows.len(), steps / every + 1, "steps {steps} every {every}");
    }
}

#[test]
fn header_records_config_hash() {
    let a = run_to_string(load("qubit-unitary.toml", &["integrator.steps=3"]), 1).unwrap();
    let b = run_to_string(
        load(
            "qubit-unitary.toml",
            &["integrator.steps=3", "output.dir=\"elsewhere\""],
        ),
        1,
    )
    .unwrap();
    let c = run_to_string(load("qubit-unitary.toml", &["integrator.steps=4"]), 1).unwrap();
    let hash = |s: &str| {
        s.lines()
            .find_map(|l| l.strip_prefix("# config-sha256: "))
            .unwrap()
            .to_string()
    };
    assert_eq!(hash(&a).len(), 64);
    assert_eq!(hash(&a), hash(&b));
    assert_ne!(hash(&a), hash(&c));
    assert!(a.contains("# mode: quantum\n"));
}

#[test]
fn constant_decay_preset_tracks_closed_forms() {
    let (header, rows) =
        parse_csv(&run_to_string(load("qubit-constant-decay.toml", &[]), 1).unwrap());
    for name in [
        "dev_trace",
        "dev_s_vn",
        "dev_s_nh",
        "dev_s_lin",
        "dev_s_lin_nh",
    ] {
        let max = column(&header, &rows, name).into_iter().fold(0.0, f64::max);
        assert!(max < 1e-6, "{name}: {max:e}");
    }
    let t = column(&header, &rows, "time");
    assert!((t.last().unwrap() - 5.0).abs() < 1e-9);
}

#[test]
fn wigner_constant_decay_preset_tracks_closed_forms() {
    let (header, rows) = parse_csv(
        &run_to_string(
            load("wigner-constant-decay.toml", &["integrator.steps=200"]),
            1,
        )
        .unwrap(),
    );
    let trace = column(&header, &rows, "dev_qc_trace")
        .into_iter()
        .fold(0.0, f64::max);
    let slnh = column(&header, &rows, "dev_qc_s_lin_nh")
        .into_iter()
        .fold(0.0, f64::max);
    assert!(trace < 1e-4, "{trace:e}");
    assert!(slnh < 1e-3, "{slnh:e}");
    assert!(column(&header, &rows, "rate_vn").iter().all(|v| v.is_nan()));
}

#[test]
fn output_is_bit_identical_across_runs_and_threads() {
    let cfg = || {
        load(
            "wigner-constant-decay.toml",
            &["integrator.steps=40", "integrator.sample_every=4"],
        )
    };
    let a = run_to_string(cfg(), 1).unwrap();
    let b = run_to_string(cfg(), 1).unwrap();
    let c = run_to_string(cfg(), 4).unwrap();
    assert_eq!(a, b);
    assert_eq!(a, c);
    let q = || load("qutrit-selective-decay.toml", &["integrator.steps=200"]);
    assert_eq!(
        run_to_string(q(), 1).unwrap(),
        run_to_string(q(), 1).unwrap()
    );
}

fn drifting_packet(overrides: &[&str]) -> ScenarioConfig {
    let mut o = vec![
        "bath.potential=\"free\"",
        "bath.coupling_strength=0.0",
        "initial.center=[0.0, 2.0]",
        "integrator.steps=400",
    ];
    o.extend_from_slice(overrides);
    load("wigner-unitary.toml", &o)
}

#[test]
fn leakage_aborts_with_marker() {
    let (err, text) = run_to_string(drifting_packet(&[]), 1).unwrap_err();
    assert_eq!(err.exit_code(), EXIT_NUMERICAL);
    assert!(matches!(err, CliError::Numerical { step, .. } if step > 0));
    let last = text.lines().last().unwrap();
    assert!(
        last.starts_with("# FAILED: ") && last.contains("leakage"),
        "{last}"
    );
    let (_, rows) = parse_csv(&text.replace(last, ""));
    assert!(!rows.is_empty());
}

#[test]
fn unstable_step_is_a_config_error() {
    let err = Scenario::prepare(load("wigner-unitary.toml", &["integrator.dt=0.05"]))
        .err()
        .unwrap();
    assert_eq!(err.exit_code(), EXIT_CONFIG);
    assert!(err.to_string().contains("integrator.dt"), "{err}");
    let err = Scenario::prepare(load("qubit-unitary.toml", &["integrator.dt=2.0"]))
        .err()
        .unwrap();
    assert_eq!(err.exit_code(), EXIT_CONFIG);
}

#[test]
fn run_scenario_writes_file() {
    let dir = tempfile::tempdir().unwrap();
    let (path, rows) = run_scenario(
        load(
            "qubit-unitary.toml",
            &["integrator.steps=30", "integrator.sample_every=1"],
        ),
        Some(dir.path()),
        1,
    )
    .unwrap();
    assert_eq!(rows, 31);
    assert_eq!(path, dir.path().join("qubit-unitary.csv"));
    let (_, parsed) = parse_csv(&std::fs::read_to_string(path).unwrap());
    assert_eq!(parsed.len(), 31);
}

mod cli {
    use super::*;
    use std::process::Command;

    fn nhq() -> Command {
        Command::new(env!("CARGO_BIN_EXE_nhq"))
    }

    #[test]
    fn run_check_and_exit_codes() {
        let dir = tempfile::tempdir().unwrap();
        let out = nhq()
            .args([
                "run",
                preset("qubit-unitary.toml").to_str().unwrap(),
                "--out",
                dir.path().to_str().unwrap(),
            ])
            .args(["--override", "integrator.steps=10"])
            .output()
            .unwrap();
        assert!(
            out.status.success(),
            "{}",
            String::from_utf8_lossy(&out.stderr)
        );
        assert!(dir.path().join("qubit-unitary.csv").exists());

        let out = nhq()
            .args(["check", preset("wigner-double-well.toml").to_str().unwrap()])
            .output()
            .unwrap();
        assert!(out.status.success());

        let out = nhq()
            .args([
                "check",
                preset("qubit-unitary.toml").to_str().unwrap(),
                "--override",
                "integrator.dt=-1.0",
            ])
            .output()
            .unwrap();
        assert_eq!(out.status.code(), Some(EXIT_CONFIG));
        assert!(String::from_utf8_lossy(&out.stderr).contains("integrator.dt"));

        let out = nhq()
            .args(["run", "/nonexistent/scenario.toml"])
            .output()
            .unwrap();
        assert_eq!(out.status.code(), Some(EXIT_CONFIG));
    }

    #[test]
    fn numerical_failure_exit_code() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = drifting_packet(&[]);
        let path = dir.path().join("drift.toml");
        std::fs::write(&path, cfg.to_toml()).unwrap();
        let out = nhq()
            .args([
                "run",
                path.to_str().unwrap(),
                "--out",
                dir.path().to_str().unwrap(),
            ])
            .env("NHQ_THREADS", "2")
            .output()
            .unwrap();
        assert_eq!(out.status.code(), Some(EXIT_NUMERICAL));
        let text = std::fs::read_to_string(dir.path().join("wigner-unitary.csv")).unwrap();
        assert!(text.lines().last().unwrap().starts_with("# FAILED: "));
    }
}
