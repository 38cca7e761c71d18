//! End-to-end tests of the `intersim` binary: subcommand behavior, exit
//! codes, byte-deterministic outputs, and consistency of the emitted CSV.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn intersim(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_intersim"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary runs")
}

fn write_scenario(dir: &Path, name: &str, body: &str) -> String {
    let path = dir.join(name);
    fs::write(&path, body).unwrap();
    path.to_str().unwrap().to_string()
}

const SMALL_SCENARIO: &str = r#"
name = "cli-small"
duration = 120.0
arrival_weights = [0.4, 0.2, 0.2, 0.2]
p_arrival = 0.12
seed = 7
"#;

#[test]
fn validate_accepts_a_good_scenario() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_scenario(dir.path(), "good.toml", SMALL_SCENARIO);
    let out = intersim(&["validate", "--scenario", &path], dir.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(String::from_utf8_lossy(&out.stdout).contains("cli-small"));
}

#[test]
fn validate_reports_every_violation_with_field_paths() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_scenario(
        dir.path(),
        "bad.toml",
        r#"
arrival_weights = [0.5, 0.5, 0.5, 0.5]
p_arrival = 1.7

[controller]
min_green = 40
max_green = 20
detection_lead = 50
"#,
    );
    let out = intersim(&["validate", "--scenario", &path], dir.path());
    assert_eq!(out.status.code(), Some(3));
    let stderr = String::from_utf8_lossy(&out.stderr);
    for needle in [
        "arrival_weights",
        "p_arrival",
        "controller.min_green",
        "controller.detection_lead",
    ] {
        assert!(stderr.contains(needle), "missing '{needle}' in: {stderr}");
    }
}

#[test]
fn missing_file_and_bad_syntax_are_config_errors() {
    let dir = tempfile::tempdir().unwrap();
    let out = intersim(&["validate", "--scenario", "no-such.toml"], dir.path());
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("cannot read"));

    let path = write_scenario(dir.path(), "syntax.toml", "arrival_weights = [0.25,\n");
    let out = intersim(&["validate", "--scenario", &path], dir.path());
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("malformed"));
}

#[test]
fn usage_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let out = intersim(&["frobnicate"], dir.path());
    assert_eq!(out.status.code(), Some(2));

    // run without --controller
    let path = write_scenario(dir.path(), "s.toml", SMALL_SCENARIO);
    let out = intersim(&["run", "--scenario", &path], dir.path());
    assert_eq!(out.status.code(), Some(2));

    // --trace without --output
    let out = intersim(
        &["run", "--scenario", &path, "--controller", "static", "--trace"],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn unwritable_output_is_a_runtime_abort() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_scenario(dir.path(), "s.toml", SMALL_SCENARIO);
    let out = intersim(
        &[
            "run",
            "--scenario",
            &path,
            "--controller",
            "static",
            "--output",
            "/nonexistent-dir/out.json",
        ],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(4));
    assert!(String::from_utf8_lossy(&out.stderr).contains("cannot write"));
}

#[test]
fn run_is_byte_deterministic_and_seed_overridable() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_scenario(dir.path(), "s.toml", SMALL_SCENARIO);
    let run = |output: &str| {
        let out = intersim(
            &[
                "run",
                "--scenario",
                &path,
                "--controller",
                "static",
                "--output",
                output,
                "--trace",
            ],
            dir.path(),
        );
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
        (
            fs::read(dir.path().join(output)).unwrap(),
            fs::read(dir.path().join(Path::new(output).with_extension("trace.jsonl"))).unwrap(),
        )
    };
    let (json_a, trace_a) = run("a.json");
    let (json_b, trace_b) = run("b.json");
    assert_eq!(json_a, json_b, "run result files must be byte-identical");
    assert_eq!(trace_a, trace_b, "trace files must be byte-identical");

    let out = intersim(
        &[
            "run",
            "--scenario",
            &path,
            "--controller",
            "static",
            "--seed",
            "999",
            "--output",
            "c.json",
        ],
        dir.path(),
    );
    assert!(out.status.success());
    let json_c = fs::read(dir.path().join("c.json")).unwrap();
    assert_ne!(json_a, json_c, "a different seed must change the run");
    let text = String::from_utf8(json_c).unwrap();
    assert!(text.contains("\"seed\": 999"));
}

#[test]
fn compare_summary_recomputes_from_emitted_csv() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_scenario(dir.path(), "s.toml", SMALL_SCENARIO);
    let out = intersim(
        &[
            "compare",
            "--scenario",
            &path,
            "--replications",
            "3",
            "--output",
            "report",
        ],
        dir.path(),
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));

    let runs = fs::read_to_string(dir.path().join("report/runs.csv")).unwrap();
    let mut static_totals = Vec::new();
    let mut adaptive_totals = Vec::new();
    for line in runs.lines().skip(1) {
        let cols: Vec<&str> = line.split(',').collect();
        let total: f64 = cols[7].parse().unwrap();
        match cols[2] {
            "static" => static_totals.push(total),
            "adaptive" => adaptive_totals.push(total),
            other => panic!("unexpected controller column {other}"),
        }
    }
    assert_eq!(static_totals.len(), 3);
    assert_eq!(adaptive_totals.len(), 3);
    let static_mean = static_totals.iter().sum::<f64>() / 3.0;
    let adaptive_mean = adaptive_totals.iter().sum::<f64>() / 3.0;
    let expected = 100.0 * (adaptive_mean - static_mean) / static_mean;

    let summary = fs::read_to_string(dir.path().join("report/summary.csv")).unwrap();
    let row = summary.lines().nth(1).unwrap();
    let cols: Vec<&str> = row.split(',').collect();
    assert_eq!(cols[0], "cli-small");
    let reported_static: f64 = cols[1].parse().unwrap();
    let reported_adaptive: f64 = cols[2].parse().unwrap();
    let reported_improvement: f64 = cols[3].parse().unwrap();
    assert!((reported_static - static_mean).abs() < 1e-3);
    assert!((reported_adaptive - adaptive_mean).abs() < 1e-3);
    assert!(
        (reported_improvement - expected).abs() < 1e-2,
        "summary improvement {reported_improvement} vs recomputed {expected}"
    );
}

#[test]
fn suite_emits_15_rows_and_regime_means() {
    let dir = tempfile::tempdir().unwrap();
    let out = intersim(
        &["suite", "--replications", "1", "--output", "suite"],
        dir.path(),
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));

    let summary = fs::read_to_string(dir.path().join("suite/summary.csv")).unwrap();
    assert_eq!(summary.lines().count(), 16, "header plus 15 scenario rows");
    let runs = fs::read_to_string(dir.path().join("suite/runs.csv")).unwrap();
    assert_eq!(runs.lines().count(), 31, "header plus 15 x 1 x 2 run rows");

    let regimes = fs::read_to_string(dir.path().join("suite/regimes.json")).unwrap();
    let parsed: serde_json::Value = serde_json::from_str(&regimes).unwrap();
    for regime in ["near_equal", "uniform", "skewed"] {
        assert_eq!(parsed[regime]["scenarios"], 5);
        assert!(parsed[regime]["mean_improvement_percent"].is_number());
    }
}
