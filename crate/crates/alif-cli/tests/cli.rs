//! End-to-end tests driving the compiled binary: artifacts on disk, exit
//! codes, and byte-level determinism.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn binary() -> Command {
    Command::new(env!("CARGO_BIN_EXE_alif-spectra"))
}

fn temp_dir(tag: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("alif-cli-test-{tag}-{}", std::process::id()));
    let _ = fs::remove_dir_all(&dir);
    fs::create_dir_all(&dir).unwrap();
    dir
}

fn run(args: &[&str]) -> Output {
    binary().args(args).output().expect("binary runs")
}

fn read_json(path: &Path) -> Value {
    let text = fs::read_to_string(path).unwrap_or_else(|e| panic!("read {}: {e}", path.display()));
    serde_json::from_str(&text).unwrap()
}

/// Strip the provenance timestamp before determinism comparisons.
fn without_timestamp(mut v: Value) -> Value {
    if let Some(obj) = v.as_object_mut() {
        obj.remove("generated_unix_ms");
    }
    v
}

#[test]
fn counterexample_verifies_and_exits_zero() {
    let out = temp_dir("counterexample");
    let result = run(&[
        "counterexample",
        "--dump-filter",
        "--dump-symbol",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(
        result.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&result.stderr)
    );

    let report = read_json(&out.join("counterexample.json"));
    assert_eq!(report["ok"], Value::Bool(true));
    assert_eq!(report["determinant"].as_f64().unwrap(), -0.00081);
    assert_eq!(report["determinant_exact"], "-81/100000");
    assert_eq!(report["config"]["seed"].as_u64().unwrap(), 42);
    let rho = report["iteration_radius"].as_f64().unwrap();
    assert!((rho - 1.0018).abs() <= 2e-4, "rho = {rho}");
    assert_eq!(report["sift"]["status"], "diverged");

    // Dumped artifacts exist and carry the exact node table.
    let nodes = fs::read_to_string(out.join("filter_nodes.csv")).unwrap();
    assert!(nodes.lines().count() > 10);
    assert!(nodes.contains("357/190"));
    assert!(out.join("symbol_grid.csv").exists());
}

#[test]
fn spectrum_of_identity_configuration() {
    let out = temp_dir("spectrum");
    let result = run(&[
        "spectrum",
        "--filter",
        r#"{"type":"uniform"}"#,
        "--length",
        r#"{"type":"constant","nodes":[[0,1]]}"#,
        "--n",
        "16",
        "--dump-matrix-csv",
        "--dump-matrix-bin",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(
        result.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&result.stderr)
    );

    let report = read_json(&out.join("spectrum.json"));
    assert_eq!(report["necessary_condition_ok"], Value::Bool(true));
    let eigs = report["eigenvalues"].as_array().unwrap();
    assert_eq!(eigs.len(), 16);
    for z in eigs {
        assert_eq!(z[0].as_f64().unwrap(), 1.0);
        assert_eq!(z[1].as_f64().unwrap(), 0.0);
    }

    // The binary layout: (rows, cols) u64 LE header + row-major f64 LE.
    let bytes = fs::read(out.join("k_matrix.bin")).unwrap();
    assert_eq!(bytes.len(), 16 + 16 * 16 * 8);
    let rows = u64::from_le_bytes(bytes[0..8].try_into().unwrap());
    let cols = u64::from_le_bytes(bytes[8..16].try_into().unwrap());
    assert_eq!((rows, cols), (16, 16));
    let first = f64::from_le_bytes(bytes[16..24].try_into().unwrap());
    let second = f64::from_le_bytes(bytes[24..32].try_into().unwrap());
    assert_eq!((first, second), (1.0, 0.0), "identity matrix starts 1, 0");

    // CSV dump: 16 rows of 16 comma-separated values.
    let csv = fs::read_to_string(out.join("k_matrix.csv")).unwrap();
    assert_eq!(csv.lines().count(), 16);
    assert_eq!(csv.lines().next().unwrap().split(',').count(), 16);
}

#[test]
fn decompose_monotone_signal_yields_pure_trend() {
    let out = temp_dir("decompose-trend");
    let signal_path = out.join("input.csv");
    let samples: Vec<String> = (0..64).map(|i| format!("{}.0", i)).collect();
    fs::write(&signal_path, samples.join("\n")).unwrap();

    let result = run(&[
        "decompose",
        "--signal",
        signal_path.to_str().unwrap(),
        "--filter",
        r#"{"type":"triangular"}"#,
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(
        result.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&result.stderr)
    );

    let telemetry = read_json(&out.join("telemetry.json"));
    assert_eq!(telemetry["status"], "trend_reached");
    assert_eq!(telemetry["imf_count"].as_u64().unwrap(), 0);
    assert!(!out.join("imf_01.csv").exists());

    // The trend reproduces the input samples.
    let trend = fs::read_to_string(out.join("trend.csv")).unwrap();
    let values: Vec<f64> = trend.lines().map(|l| l.parse::<f64>().unwrap()).collect();
    assert_eq!(values.len(), 64);
    for (i, v) in values.iter().enumerate() {
        assert_eq!(*v, i as f64);
    }
}

#[test]
fn decompose_two_sinusoids_writes_imfs_and_reconstructs() {
    let out = temp_dir("decompose-two-sine");
    let signal_path = out.join("input.csv");
    let n = 512usize;
    let samples: Vec<f64> = (0..n)
        .map(|i| {
            let x = i as f64 / (n - 1) as f64;
            (2.0 * std::f64::consts::PI * 16.0 * x).sin()
                + (2.0 * std::f64::consts::PI * 2.0 * x).sin()
        })
        .collect();
    let text: Vec<String> = samples.iter().map(|v| format!("{v:.17e}")).collect();
    fs::write(&signal_path, text.join("\n")).unwrap();

    let result = run(&[
        "decompose",
        "--signal",
        signal_path.to_str().unwrap(),
        "--filter",
        r#"{"type":"triangular"}"#,
        "--length",
        r#"{"type":"extrema","multiplier":2.0}"#,
        "--delta",
        "0.01",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(
        result.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&result.stderr)
    );

    let telemetry = read_json(&out.join("telemetry.json"));
    let imf_count = telemetry["imf_count"].as_u64().unwrap() as usize;
    assert!(imf_count >= 1);
    assert!(out.join("imf_01.csv").exists());
    let residual = telemetry["reconstruction_residual"].as_f64().unwrap();
    let scale: f64 = samples.iter().map(|x| x * x).sum::<f64>().sqrt();
    assert!(residual <= 1e-8 * scale, "residual {residual}");

    // Config echo carries the resolved strategy.
    assert_eq!(telemetry["config"]["length"]["type"], "extrema");
}

#[test]
fn symbol_dump_is_deterministic() {
    let args = [
        "symbol",
        "--filter",
        r#"{"type":"triangular"}"#,
        "--length",
        r#"{"type":"step","nodes":[[0,2],[0.5,4]]}"#,
        "--grid-x",
        "21",
        "--grid-theta",
        "33",
    ];
    let out1 = temp_dir("symbol-a");
    let out2 = temp_dir("symbol-b");
    for out in [&out1, &out2] {
        let result = run(&[&args[..], &["--out", out.to_str().unwrap()]].concat());
        assert!(result.status.success());
    }
    let csv1 = fs::read(out1.join("symbol.csv")).unwrap();
    let csv2 = fs::read(out2.join("symbol.csv")).unwrap();
    assert_eq!(csv1, csv2, "symbol CSV must be byte-identical across runs");
    assert_eq!(
        String::from_utf8(csv1).unwrap().lines().count(),
        1 + 21 * 33,
        "header plus one row per grid point"
    );

    let j1 = without_timestamp(read_json(&out1.join("symbol.json")));
    let j2 = without_timestamp(read_json(&out2.join("symbol.json")));
    assert_eq!(j1, j2, "reports must agree modulo the timestamp");
    assert_eq!(j1["range"]["condition_ok"], Value::Bool(true));
}

#[test]
fn acs_table_respects_the_bound() {
    let out = temp_dir("acs");
    let result = run(&[
        "acs",
        "--filter",
        r#"{"type":"triangular"}"#,
        "--length",
        r#"{"type":"constant","nodes":[[0,8]]}"#,
        "--sizes",
        "32,64",
        "--m",
        "1,2,4,8",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(
        result.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&result.stderr)
    );

    let report = read_json(&out.join("acs.json"));
    assert_eq!(report["all_within_bound"], Value::Bool(true));
    let csv = fs::read_to_string(out.join("acs.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next().unwrap(), "n,m,empirical,bound,ok");
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 2 * 4);
    for row in rows {
        assert!(row.ends_with(",true"), "row violates the bound: {row}");
    }
}

#[test]
fn sweep_distribution_runs_with_thread_cap() {
    let out = temp_dir("sweep");
    let result = binary()
        .env("ALIF_SPECTRA_THREADS", "2")
        .args([
            "sweep",
            "--metric",
            "distribution",
            "--filter",
            r#"{"type":"triangular"}"#,
            "--length",
            r#"{"type":"constant","nodes":[[0,4]]}"#,
            "--sizes",
            "96,48",
            "--out",
            out.to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert!(
        result.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&result.stderr)
    );

    let csv = fs::read_to_string(out.join("sweep.csv")).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(
        lines[0],
        "n,discrepancy,max_imag,outlier_fraction,test_function_gap"
    );
    // Aggregation is sorted by size regardless of worker order.
    assert!(lines[1].starts_with("48,"));
    assert!(lines[2].starts_with("96,"));
}

#[test]
fn decompose_outputs_are_deterministic() {
    let signal_dir = temp_dir("decompose-det-input");
    let signal_path = signal_dir.join("input.csv");
    let n = 200usize;
    let samples: Vec<String> = (0..n)
        .map(|i| {
            let x = i as f64 / (n - 1) as f64;
            format!("{:.17e}", (2.0 * std::f64::consts::PI * 9.0 * x).sin() + 0.3 * x)
        })
        .collect();
    fs::write(&signal_path, samples.join("\n")).unwrap();

    let args = [
        "decompose",
        "--signal",
        signal_path.to_str().unwrap(),
        "--filter",
        r#"{"type":"triangular"}"#,
        "--delta",
        "0.01",
    ];
    let out1 = temp_dir("decompose-det-a");
    let out2 = temp_dir("decompose-det-b");
    for out in [&out1, &out2] {
        let result = run(&[&args[..], &["--out", out.to_str().unwrap()]].concat());
        assert!(result.status.success());
    }
    for name in ["imf_01.csv", "trend.csv"] {
        let a = fs::read(out1.join(name)).unwrap();
        let b = fs::read(out2.join(name)).unwrap();
        assert_eq!(a, b, "{name} must be byte-identical across runs");
    }
    let t1 = without_timestamp(read_json(&out1.join("telemetry.json")));
    let t2 = without_timestamp(read_json(&out2.join("telemetry.json")));
    assert_eq!(t1, t2, "telemetry must agree modulo the timestamp");
}

#[test]
fn sweep_other_metrics_and_affine_length() {
    // Symmetry defect with a smoothly varying (affine) width: positive and
    // shrinking with size.
    let out = temp_dir("sweep-defect");
    let result = run(&[
        "sweep",
        "--metric",
        "symmetry-defect",
        "--filter",
        r#"{"type":"triangular"}"#,
        "--length",
        r#"{"type":"affine","offset":2,"slope":1}"#,
        "--sizes",
        "32,128",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(
        result.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&result.stderr)
    );
    let csv = fs::read_to_string(out.join("sweep.csv")).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "n,defect");
    let defect = |line: &str| -> f64 { line.split(',').nth(1).unwrap().parse().unwrap() };
    assert!(defect(lines[2]) < defect(lines[1]), "defect must shrink: {csv}");

    // Zero-distribution metric: the band-truncation residual decays.
    let out = temp_dir("sweep-zerodist");
    let result = run(&[
        "sweep",
        "--metric",
        "zero-distribution",
        "--filter",
        r#"{"type":"triangular"}"#,
        "--length",
        r#"{"type":"constant","nodes":[[0,6]]}"#,
        "--sizes",
        "32,64",
        "--m",
        "2",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(result.status.success());
    let csv = fs::read_to_string(out.join("sweep.csv")).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "n,scaled_schatten_2");
    for line in &lines[1..] {
        let v: f64 = line.split(',').nth(1).unwrap().parse().unwrap();
        assert!(v > 0.0 && v < 1.0, "scaled norm out of range: {line}");
    }
}

#[test]
fn missing_signal_file_exits_two() {
    let out = temp_dir("missing");
    let result = run(&[
        "decompose",
        "--signal",
        "/nonexistent/input.csv",
        "--filter",
        r#"{"type":"triangular"}"#,
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(result.status.code(), Some(2));
}

#[test]
fn invalid_filter_spec_exits_two() {
    let out = temp_dir("badspec");
    let result = run(&[
        "symbol",
        "--filter",
        r#"{"type":"sinc"}"#,
        "--length",
        r#"{"type":"constant","nodes":[[0,1]]}"#,
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(result.status.code(), Some(2));
    let stderr = String::from_utf8_lossy(&result.stderr);
    assert!(stderr.contains("unknown filter type"), "stderr: {stderr}");
}

#[test]
fn filter_spec_round_trips_through_file() {
    // A pwl document written with 17-significant-digit strings parses back
    // to the same filter.
    let out = temp_dir("roundtrip");
    let doc = r#"{
        "type": "pwl",
        "nodes": [["0.0", "2.1000000000000001e0"], ["5.0000000000000000e-1", "1.0"], ["1.0", "0.0"]],
        "normalized": false
    }"#;
    let spec_path = out.join("filter.json");
    fs::write(&spec_path, doc).unwrap();

    let result = run(&[
        "spectrum",
        "--filter",
        spec_path.to_str().unwrap(),
        "--length",
        r#"{"type":"constant","nodes":[[0,2]]}"#,
        "--n",
        "8",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(
        result.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&result.stderr)
    );
    let report = read_json(&out.join("spectrum.json"));
    let echoed = &report["config"]["filter"];
    assert_eq!(echoed["type"], "pwl");
    let nodes = echoed["nodes"].as_array().unwrap();
    assert_eq!(nodes.len(), 3);
    assert_eq!(nodes[0][1].as_str().unwrap().parse::<f64>().unwrap(), 2.1);
}
