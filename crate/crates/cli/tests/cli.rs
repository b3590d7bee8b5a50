use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn cyclewalk(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cyclewalk"))
        .args(args)
        .env_remove("CYCLEWALK_THREADS")
        .output()
        .expect("spawn cyclewalk")
}

fn stdout(out: &Output) -> String {
    assert!(
        out.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout.clone()).unwrap()
}

/// `(t, x, p, method)` rows of a simulate CSV.
fn rows(csv: &str) -> Vec<(usize, usize, f64, String)> {
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("t,x,p,method"));
    lines
        .map(|l| {
            let f: Vec<&str> = l.split(',').collect();
            (
                f[0].parse().unwrap(),
                f[1].parse().unwrap(),
                f[2].parse().unwrap(),
                f[3].to_owned(),
            )
        })
        .collect()
}

#[test]
fn simulate_fourier_rows_are_normalized() {
    let out = cyclewalk(&[
        "simulate",
        "--nodes",
        "7",
        "--decoherence",
        "0.5",
        "--steps",
        "100",
        "--method",
        "fourier",
        "--initial-coin",
        "up",
    ]);
    let rows = rows(&stdout(&out));
    assert_eq!(rows.len(), 7 * 101);
    for t in 0..=100 {
        let sum: f64 = rows.iter().filter(|r| r.0 == t).map(|r| r.2).sum();
        assert!((sum - 1.0).abs() < 1e-10, "t = {t}: {sum}");
    }
    assert!(rows.iter().all(|r| r.3 == "fourier"));
}

#[test]
fn simulate_direct_at_full_decoherence_matches_classical() {
    let direct = rows(&stdout(&cyclewalk(&[
        "simulate",
        "--nodes",
        "5",
        "--decoherence",
        "1.0",
        "--steps",
        "3",
        "--method",
        "direct",
    ])));
    let classical = rows(&stdout(&cyclewalk(&[
        "simulate",
        "--nodes",
        "5",
        "--decoherence",
        "1.0",
        "--steps",
        "3",
        "--method",
        "classical",
    ])));
    assert_eq!(direct.len(), classical.len());
    for (a, b) in direct.iter().zip(&classical) {
        assert_eq!((a.0, a.1), (b.0, b.1));
        assert!((a.2 - b.2).abs() < 1e-15);
    }
}

#[test]
fn simulate_zero_steps_is_a_point_mass() {
    let rows = rows(&stdout(&cyclewalk(&[
        "simulate",
        "--nodes",
        "4",
        "--decoherence",
        "0",
        "--steps",
        "0",
        "--method",
        "fourier",
    ])));
    let nonzero: Vec<_> = rows.iter().filter(|r| r.2 != 0.0).collect();
    assert_eq!(nonzero.len(), 1);
    assert_eq!((nonzero[0].0, nonzero[0].1, nonzero[0].2), (0, 0, 1.0));
}

#[test]
fn simulate_output_is_byte_identical_across_runs() {
    let args = [
        "simulate",
        "--nodes",
        "6",
        "--decoherence",
        "0.3",
        "--steps",
        "40",
    ];
    assert_eq!(stdout(&cyclewalk(&args)), stdout(&cyclewalk(&args)));
}

fn spectrum_summary(nodes: &str, p: &str, dir: &Path) -> (String, Value) {
    let summary = dir.join(format!("summary-{nodes}.json"));
    let out = cyclewalk(&[
        "spectrum",
        "--nodes",
        nodes,
        "--decoherence",
        p,
        "--summary",
        summary.to_str().unwrap(),
    ]);
    let csv = stdout(&out);
    (
        csv,
        serde_json::from_str(&std::fs::read_to_string(summary).unwrap()).unwrap(),
    )
}

fn class_count(csv: &str, class: &str) -> usize {
    csv.lines()
        .skip(1)
        .filter(|l| l.ends_with(&format!(",{class}")))
        .count()
}

#[test]
fn spectrum_even_cycle_counts() {
    let dir = tempfile::tempdir().unwrap();
    let (csv, summary) = spectrum_summary("6", "0.5", dir.path());
    assert_eq!(class_count(&csv, "diagonal-pair"), 6);
    assert_eq!(class_count(&csv, "antipodal-pair"), 6);
    assert_eq!(class_count(&csv, "generic"), 24);
    assert_eq!(summary["generic_pairs"], 24);
    assert_eq!(summary["classification_holds"], true);
    assert!(summary["max_generic_radius"].as_f64().unwrap() < 1.0);
}

#[test]
fn spectrum_odd_cycle_has_no_antipodal_pairs() {
    let dir = tempfile::tempdir().unwrap();
    let (csv, summary) = spectrum_summary("7", "0.3", dir.path());
    assert_eq!(class_count(&csv, "antipodal-pair"), 0);
    assert_eq!(summary["antipodal_pairs"], 0);
    assert_eq!(csv.lines().count(), 1 + 49);
}

#[test]
fn spectrum_threads_do_not_change_output() {
    let args = ["spectrum", "--nodes", "8", "--decoherence", "0.4"];
    let serial = stdout(&cyclewalk(&args));
    let parallel = Command::new(env!("CARGO_BIN_EXE_cyclewalk"))
        .args(args)
        .env("CYCLEWALK_THREADS", "4")
        .output()
        .unwrap();
    assert_eq!(serial, stdout(&parallel));
}

fn mixing(args: &[&str]) -> Value {
    let mut full = vec!["mixing"];
    full.extend_from_slice(args);
    serde_json::from_str(&stdout(&cyclewalk(&full))).unwrap()
}

#[test]
fn mixing_report_schema() {
    let v = mixing(&[
        "--nodes",
        "9",
        "--decoherence",
        "0.2",
        "--epsilon",
        "0.01",
        "--horizon",
        "3000",
    ]);
    assert_eq!(v["converged"], true);
    assert!(v["mixing_time"].as_u64().unwrap() >= 1);
    assert!(v["bound"].is_null());
    let trace = v["tv_trace"].as_array().unwrap();
    assert_eq!(trace.len(), 3000);
    assert_eq!(trace[0][0], 1);
    let keys: Vec<&str> = v.as_object().unwrap().keys().map(String::as_str).collect();
    for k in [
        "epsilon",
        "horizon",
        "converged",
        "mixing_time",
        "bound",
        "tv_trace",
    ] {
        assert!(keys.contains(&k), "missing {k}");
    }
}

#[test]
fn mixing_with_bound_and_stride() {
    let v = mixing(&[
        "--nodes",
        "5",
        "--decoherence",
        "0.5",
        "--epsilon",
        "0.05",
        "--horizon",
        "1000",
        "--bound",
        "--trace-stride",
        "100",
    ]);
    let bound = &v["bound"];
    assert!(bound["value"].as_f64().unwrap() > 0.0);
    assert!(bound["tau"].as_u64().unwrap() >= 1);
    let trace = v["tv_trace"].as_array().unwrap();
    assert_eq!(trace.len(), 11);
    assert_eq!(trace.last().unwrap()[0], 1000);
}

#[test]
fn coherent_odd_cycle_averaged_mixing() {
    let v = mixing(&[
        "--nodes",
        "9",
        "--decoherence",
        "0",
        "--epsilon",
        "0.01",
        "--target",
        "averaged",
    ]);
    assert_eq!(v["horizon"], 162_000);
    assert!(v["tv_trace"].as_array().unwrap().len() == 162_000);
}

#[test]
fn coherent_even_cycle_never_settles_instantaneously() {
    let v = mixing(&[
        "--nodes",
        "8",
        "--decoherence",
        "0",
        "--epsilon",
        "0.001",
        "--target",
        "instantaneous",
        "--horizon",
        "5000",
    ]);
    assert_eq!(v["converged"], false);
    assert!(v["mixing_time"].is_null());
}

#[test]
fn bound_on_even_cycle_is_a_usage_error() {
    let out = cyclewalk(&[
        "mixing",
        "--nodes",
        "8",
        "--decoherence",
        "0.3",
        "--epsilon",
        "0.1",
        "--bound",
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("--bound"));
}

#[test]
fn usage_errors_exit_two() {
    for args in [
        vec![
            "simulate",
            "--nodes",
            "1",
            "--decoherence",
            "0.5",
            "--steps",
            "3",
        ],
        vec![
            "simulate",
            "--nodes",
            "5",
            "--decoherence",
            "1.5",
            "--steps",
            "3",
        ],
        vec!["simulate", "--nodes", "5", "--decoherence", "0.5"],
        vec!["simulate", "--bogus"],
        vec![
            "mixing",
            "--nodes",
            "5",
            "--decoherence",
            "0.5",
            "--epsilon",
            "-1",
        ],
        vec!["verify", "--check", "nonsense"],
        vec![
            "simulate",
            "--nodes",
            "5",
            "--decoherence",
            "0.5",
            "--steps",
            "2",
            "--initial-coin",
            "0,0,0,0",
        ],
    ] {
        assert_eq!(cyclewalk(&args).status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn raw_coin_is_renormalized_with_warning() {
    let out = cyclewalk(&[
        "simulate",
        "--nodes",
        "5",
        "--decoherence",
        "0.5",
        "--steps",
        "2",
        "--initial-coin",
        "2,0,0,0",
    ]);
    assert!(out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr)
        .to_lowercase()
        .contains("normaliz"));
    let up = cyclewalk(&[
        "simulate",
        "--nodes",
        "5",
        "--decoherence",
        "0.5",
        "--steps",
        "2",
    ]);
    assert_eq!(out.stdout, up.stdout);
}

#[test]
fn config_file_with_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("walk.cfg");
    std::fs::write(
        &cfg,
        "# walk\nnodes = 5\ndecoherence = 0.25\nsteps = 4\nmethod = direct\n",
    )
    .unwrap();
    let from_file = cyclewalk(&[
        "--config",
        cfg.to_str().unwrap(),
        "simulate",
        "--steps",
        "2",
    ]);
    let flags = cyclewalk(&[
        "simulate",
        "--nodes",
        "5",
        "--decoherence",
        "0.25",
        "--steps",
        "2",
        "--method",
        "direct",
    ]);
    assert_eq!(stdout(&from_file), stdout(&flags));
}

#[test]
fn manifest_echoes_config() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("p.csv");
    let manifest = dir.path().join("m.json");
    let out = cyclewalk(&[
        "simulate",
        "--nodes",
        "5",
        "--decoherence",
        "0.5",
        "--steps",
        "3",
        "-o",
        csv.to_str().unwrap(),
        "--manifest",
        manifest.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let m: Value = serde_json::from_str(&std::fs::read_to_string(&manifest).unwrap()).unwrap();
    assert_eq!(m["command"], "simulate");
    assert_eq!(m["config"]["nodes"], 5);
    assert_eq!(m["deterministic"], true);
    assert_eq!(m["outputs"][0], csv.to_str().unwrap());
    assert_eq!(rows(&std::fs::read_to_string(&csv).unwrap()).len(), 5 * 4);
}

#[test]
fn verify_single_check() {
    let out = cyclewalk(&["verify", "--check", "eq10"]);
    let v: Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["passed"], true);
    let checks = v["checks"].as_array().unwrap();
    assert_eq!(checks.len(), 1);
    assert_eq!(checks[0]["name"], "eq10");
}

#[test]
fn verify_quick_passes() {
    let out = cyclewalk(&["verify", "--quick"]);
    let v: Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["passed"], true);
    assert_eq!(v["checks"].as_array().unwrap().len(), 11);
    assert_eq!(v["sizes"]["max_nodes"], 7);
}
