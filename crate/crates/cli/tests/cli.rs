//! End-to-end tests of the `bakerlab` binary.

use bakerlab::hyper::{GroupingMethod, TradeoffCurve};
use bakerlab_cli::output::read_csv;
use std::path::Path;
use std::process::{Command, Output};

fn bakerlab(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bakerlab"))
        .args(args)
        .arg("--out-dir")
        .arg(dir)
        .env_remove("BAKERLAB_THREADS")
        .output()
        .expect("spawning the binary")
}

fn assert_success(out: &Output) {
    assert!(
        out.status.success(),
        "stdout:\n{}\nstderr:\n{}",
        String::from_utf8_lossy(&out.stdout),
        String::from_utf8_lossy(&out.stderr)
    );
}

fn meta_value<'a>(meta: &'a [(String, String)], key: &str) -> &'a str {
    meta.iter()
        .find(|(k, _)| k == key)
        .map(|(_, v)| v.as_str())
        .unwrap_or_else(|| panic!("missing metadata key {key}"))
}

#[test]
fn entropy_emits_the_staircase() {
    let dir = tempfile::tempdir().unwrap();
    let out = bakerlab(
        &["entropy", "--N", "5", "--n", "5", "--pert", "x-flip", "--t", "6"],
        dir.path(),
    );
    assert_success(&out);

    let (meta, header, rows) = read_csv(&dir.path().join("entropy.csv")).unwrap();
    assert_eq!(meta_value(&meta, "pert"), "x-flip");
    assert!(meta_value(&meta, "version").starts_with("bakerlab "));
    assert_eq!(header, vec!["t", "H"]);
    assert_eq!(rows.len(), 7);
    for row in &rows {
        let t: f64 = row[0].parse().unwrap();
        let h: f64 = row[1].parse().unwrap();
        assert!((h - t.min(5.0)).abs() < 1e-9, "t={t}: H={h}");
    }

    let gp = std::fs::read_to_string(dir.path().join("entropy.gp")).unwrap();
    assert!(gp.contains("entropy.csv"));
}

#[test]
fn fidelity_first_step_matches_the_rotation_overlap() {
    let dir = tempfile::tempdir().unwrap();
    let out = bakerlab(&["fidelity", "--N", "5", "--n", "5", "--t", "4"], dir.path());
    assert_success(&out);

    let (_, _, rows) = read_csv(&dir.path().join("fidelity.csv")).unwrap();
    let f0: f64 = rows[0][1].parse().unwrap();
    let f1: f64 = rows[1][1].parse().unwrap();
    assert_eq!(f0, 1.0);
    let expect = (0.2 * std::f64::consts::PI).cos().powi(2);
    assert!((f1 - expect).abs() < 1e-12, "F(1) = {f1}, expected {expect}");
}

#[test]
fn reruns_are_byte_identical() {
    let dir_a = tempfile::tempdir().unwrap();
    let dir_b = tempfile::tempdir().unwrap();
    let args = ["tradeoff", "--N", "3", "--n", "1", "--t", "3", "--seed", "42"];
    assert_success(&bakerlab(&args, dir_a.path()));
    assert_success(&bakerlab(&args, dir_b.path()));
    for name in ["tradeoff.json", "tradeoff.csv", "tradeoff.gp"] {
        let a = std::fs::read(dir_a.path().join(name)).unwrap();
        let b = std::fs::read(dir_b.path().join(name)).unwrap();
        assert_eq!(a, b, "{name} differs between reruns");
    }
}

#[test]
fn tradeoff_json_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let out = bakerlab(
        &["tradeoff", "--N", "3", "--n", "2", "--t", "3", "--grouping", "temporal,genetic,exhaustive"],
        dir.path(),
    );
    assert_success(&out);

    let text = std::fs::read_to_string(dir.path().join("tradeoff.json")).unwrap();
    let curve: TradeoffCurve = serde_json::from_str(&text).unwrap();
    assert!(curve.s.is_some());
    assert_eq!(curve.points.len(), 4 + 2);
    let meta = curve.ensemble.as_ref().unwrap();
    assert_eq!((meta.n_qubits, meta.map_index, meta.steps), (3, 2, 3));

    // genetic agrees with exhaustive on this small ensemble
    let by_method = |m: GroupingMethod| {
        curve.points.iter().find(|p| p.method == m).unwrap().avg_entropy
    };
    let gap = (by_method(GroupingMethod::Genetic) - by_method(GroupingMethod::Exhaustive)).abs();
    assert!(gap < 1e-9);

    // reserializing loses nothing beyond the injected meta object
    let mut original: serde_json::Value = serde_json::from_str(&text).unwrap();
    original.as_object_mut().unwrap().remove("meta");
    assert_eq!(original, serde_json::to_value(&curve).unwrap());
}

#[test]
fn s_series_reports_both_methods() {
    let dir = tempfile::tempdir().unwrap();
    let out = bakerlab(
        &["s-series", "--N", "3", "--n", "3", "--pert", "x-flip", "--t", "3"],
        dir.path(),
    );
    assert_success(&out);

    let (_, header, rows) = read_csv(&dir.path().join("s_series.csv")).unwrap();
    assert_eq!(
        header,
        vec!["t", "H_S", "H_temporal", "I_temporal", "s_temporal", "H_genetic", "I_genetic", "s_genetic"]
    );
    assert_eq!(rows.len(), 3);
    for row in &rows {
        let s_temporal: f64 = row[4].parse().unwrap();
        let s_genetic: f64 = row[7].parse().unwrap();
        assert!((s_temporal - 1.0).abs() < 1e-9);
        assert!((s_genetic - 1.0).abs() < 1e-9);
    }
}

#[test]
fn config_file_feeds_defaults_and_flags_win() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("run.conf");
    std::fs::write(
        &config,
        "# sweep base\nN = 3\nn = 2\nalpha = 0.1\nt = 4\npert = rotation\n",
    )
    .unwrap();

    let out = Command::new(env!("CARGO_BIN_EXE_bakerlab"))
        .args(["entropy", "--config"])
        .arg(&config)
        .args(["--alpha", "0.3"])
        .arg("--out-dir")
        .arg(dir.path())
        .env_remove("BAKERLAB_THREADS")
        .output()
        .unwrap();
    assert_success(&out);

    let (meta, _, rows) = read_csv(&dir.path().join("entropy.csv")).unwrap();
    assert_eq!(meta_value(&meta, "N"), "3");
    assert_eq!(meta_value(&meta, "n"), "2");
    assert_eq!(meta_value(&meta, "alpha"), "0.3");
    assert_eq!(meta_value(&meta, "t"), "4");
    assert_eq!(rows.len(), 5);
}

#[test]
fn unknown_config_key_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("bad.conf");
    std::fs::write(&config, "qubits = 5\n").unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_bakerlab"))
        .args(["entropy", "--config"])
        .arg(&config)
        .output()
        .unwrap();
    assert!(!out.status.success());
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("unknown config key"), "{stderr}");
}

#[test]
fn rotation_on_even_qubits_fails() {
    let dir = tempfile::tempdir().unwrap();
    let out = bakerlab(&["entropy", "--N", "4"], dir.path());
    assert!(!out.status.success());
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("odd qubit count"), "{stderr}");
}

#[test]
fn budget_overflow_reports_the_product() {
    let dir = tempfile::tempdir().unwrap();
    let out = bakerlab(
        &["entropy", "--t", "30", "--memory-budget", "1048576"],
        dir.path(),
    );
    assert!(!out.status.success());
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("2^30") && stderr.contains("budget"), "{stderr}");
}

#[test]
fn thread_cap_env_does_not_change_artifacts() {
    let dir_a = tempfile::tempdir().unwrap();
    let dir_b = tempfile::tempdir().unwrap();
    let args = ["tradeoff", "--N", "3", "--n", "1", "--t", "3"];
    assert_success(&bakerlab(&args, dir_a.path()));

    let out = Command::new(env!("CARGO_BIN_EXE_bakerlab"))
        .args(args)
        .arg("--out-dir")
        .arg(dir_b.path())
        .env("BAKERLAB_THREADS", "1")
        .output()
        .unwrap();
    assert_success(&out);

    let a = std::fs::read(dir_a.path().join("tradeoff.json")).unwrap();
    let b = std::fs::read(dir_b.path().join("tradeoff.json")).unwrap();
    assert_eq!(a, b);
}

#[test]
fn analytic_product_line_has_the_stated_slope() {
    let dir = tempfile::tempdir().unwrap();
    let out = bakerlab(&["analytic", "--curve", "product", "--N", "5"], dir.path());
    assert_success(&out);

    let (meta, _, rows) = read_csv(&dir.path().join("analytic_product.csv")).unwrap();
    let s: f64 = meta_value(&meta, "s-product").parse().unwrap();
    let first: Vec<f64> = rows[0].iter().map(|c| c.parse().unwrap()).collect();
    let last: Vec<f64> = rows[rows.len() - 1].iter().map(|c| c.parse().unwrap()).collect();
    assert_eq!(first, vec![0.0, 5.0]);
    let slope = (last[1] - first[1]) / (last[0] - first[0]);
    assert!((slope + 1.0 / s).abs() < 1e-12, "slope {slope} vs -1/{s}");
}

#[test]
fn validate_passes() {
    let dir = tempfile::tempdir().unwrap();
    let out = bakerlab(&["validate"], dir.path());
    assert_success(&out);
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("checks passed"), "{stdout}");
}
