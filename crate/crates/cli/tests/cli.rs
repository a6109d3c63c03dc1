use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::{Command, Output, Stdio};

use serde_json::Value;
use tempfile::TempDir;

fn lqcc(args: &[&str], stdin: Option<&str>) -> Output {
    let mut child = Command::new(env!("CARGO_BIN_EXE_lqcc"))
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    let mut pipe = child.stdin.take().unwrap();
    pipe.write_all(stdin.unwrap_or("").as_bytes()).unwrap();
    drop(pipe);
    child.wait_with_output().unwrap()
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!(
            "{e}: {}\nstderr: {}",
            String::from_utf8_lossy(&out.stdout),
            String::from_utf8_lossy(&out.stderr)
        )
    })
}

fn write(dir: &Path, name: &str, body: &str) -> String {
    let path: PathBuf = dir.join(name);
    std::fs::write(&path, body).unwrap();
    path.to_str().unwrap().to_string()
}

fn floats(v: &Value) -> Vec<f64> {
    v.as_array()
        .unwrap()
        .iter()
        .map(|x| x.as_f64().unwrap())
        .collect()
}

fn close(a: &[f64], b: &[f64], tol: f64) -> bool {
    a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).abs() <= tol)
}

#[test]
fn help_and_version() {
    let out = lqcc(&["--help"], None);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8_lossy(&out.stdout);
    for sub in [
        "decompose",
        "check-feasible",
        "build-povm",
        "concentrate",
        "lp-solve",
        "simulate",
    ] {
        assert!(text.contains(sub), "{sub} missing from help");
    }
    let out = lqcc(&["--version"], None);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stdout).starts_with("lqcc "));
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(lqcc(&[], None).status.code(), Some(2));
    assert_eq!(lqcc(&["frobnicate"], None).status.code(), Some(2));
    assert_eq!(
        lqcc(&["concentrate", "--state", "-", "--nope"], None)
            .status
            .code(),
        Some(2)
    );
    let both = lqcc(
        &[
            "check-feasible",
            "--source",
            "a",
            "--target",
            "b",
            "--ensemble",
            "c",
        ],
        None,
    );
    assert_eq!(both.status.code(), Some(2));
}

#[test]
fn uniform_state_gives_ln4() {
    let dir = TempDir::new().unwrap();
    let state = write(
        dir.path(),
        "uniform4.json",
        r#"{"spectrum": [0.25, 0.25, 0.25, 0.25]}"#,
    );
    let out = lqcc(&["concentrate", "--state", &state], None);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(floats(&v["plan"]["p"]), vec![0.0, 0.0, 0.0, 1.0]);
    assert!((v["plan"]["expected_nats"].as_f64().unwrap() - 4f64.ln()).abs() < 1e-15);
}

#[test]
fn deterministic_feasibility_exit_codes() {
    let dir = TempDir::new().unwrap();
    let a = write(dir.path(), "a.json", r#"{"spectrum": [0.6, 0.4]}"#);
    let b = write(dir.path(), "b.json", r#"{"spectrum": [0.8, 0.2]}"#);
    let out = lqcc(&["check-feasible", "--source", &a, "--target", &b], None);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["feasible"], Value::Bool(true));
    assert_eq!(v["max_conversion_probability"].as_f64(), Some(1.0));

    let out = lqcc(&["check-feasible", "--source", &b, "--target", &a], None);
    assert_eq!(out.status.code(), Some(3));
    let v = json(&out);
    assert_eq!(v["feasible"], Value::Bool(false));
    assert_eq!(v["violated_indices"], serde_json::json!([2]));
    assert!((v["max_conversion_probability"].as_f64().unwrap() - 0.5).abs() < 1e-15);
}

#[test]
fn worked_instance_with_certificate() {
    let out = lqcc(
        &["concentrate", "--state", "-", "--certify"],
        Some(r#"{"spectrum": [0.5, 0.3, 0.2]}"#),
    );
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert!(close(&floats(&v["plan"]["p"]), &[0.2, 0.2, 0.6], 1e-15));
    let e = v["plan"]["expected_nats"].as_f64().unwrap();
    assert!((e - 0.797_796_809_312_854_9).abs() < 1e-15);
    assert_eq!(v["certificate"]["passed"], Value::Bool(true));
    let z = floats(&v["certificate"]["z"]);
    assert!((z[2] - 0.523_248_143_764_547_8).abs() < 1e-15);
}

#[test]
fn numbers_have_17_significant_digits() {
    let out = lqcc(
        &["concentrate", "--state", "-"],
        Some(r#"{"spectrum": [0.5, 0.3, 0.2]}"#),
    );
    let text = String::from_utf8(out.stdout).unwrap();
    // 0.2 prints as its exact 17-digit expansion.
    assert!(
        text.contains("0.20000000000000001") || text.contains("0.19999999999999998"),
        "{text}"
    );
}

#[test]
fn decompose_round_trips_into_concentrate() {
    let dir = TempDir::new().unwrap();
    // Rows of a 2x3 amplitude matrix with complex phases.
    let amps = r#"{"amplitudes": [
        [{"re": 0.5, "im": 0.1}, {"re": 0.2, "im": -0.3}, {"re": 0.0, "im": 0.4}],
        [{"re": -0.3, "im": 0.0}, {"re": 0.4, "im": 0.2}, {"re": 0.1, "im": 0.3872983346207417}]
    ]}"#;
    let state = write(dir.path(), "amps.json", amps);
    let dec = lqcc(&["decompose", "--state", &state], None);
    assert_eq!(
        dec.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&dec.stderr)
    );
    let spectrum_file = write(
        dir.path(),
        "dec.json",
        &String::from_utf8(dec.stdout.clone()).unwrap(),
    );

    let direct = json(&lqcc(&["concentrate", "--state", &state], None));
    let via = json(&lqcc(&["concentrate", "--state", &spectrum_file], None));
    assert_eq!(direct, via);
    let spectrum = floats(&json(&dec)["spectrum"]);
    let back = json(&lqcc(&["decompose", "--state", &spectrum_file], None));
    assert_eq!(floats(&back["spectrum"]), spectrum);
}

#[test]
fn bits_are_a_rescaling() {
    let state = r#"{"spectrum": [0.5, 0.3, 0.2]}"#;
    let nats = json(&lqcc(
        &["concentrate", "--state", "-", "--asymptotic", "3"],
        Some(state),
    ));
    let bits = json(&lqcc(
        &[
            "concentrate",
            "--state",
            "-",
            "--asymptotic",
            "3",
            "--units",
            "bits",
        ],
        Some(state),
    ));
    let n = nats["plan"]["expected_nats"].as_f64().unwrap();
    let b = bits["plan"]["expected_bits"].as_f64().unwrap();
    assert!((b - n / std::f64::consts::LN_2).abs() < 1e-15);
    assert_eq!(nats["plan"]["p"], bits["plan"]["p"]);
    let curve = bits["curve"].as_array().unwrap();
    assert_eq!(curve.len(), 3);
    assert!(curve[0]["yield_per_copy_bits"].as_f64().is_some());
}

#[test]
fn csv_output() {
    let out = lqcc(
        &[
            "concentrate",
            "--state",
            "-",
            "--format",
            "csv",
            "--asymptotic",
            "2",
        ],
        Some(r#"{"spectrum": [0.5, 0.3, 0.2]}"#),
    );
    assert_eq!(out.status.code(), Some(0));
    let mut reader = csv::Reader::from_reader(out.stdout.as_slice());
    let rows: Vec<csv::StringRecord> = reader.records().map(Result::unwrap).collect();
    let plan: Vec<f64> = rows
        .iter()
        .filter(|r| &r[0] == "plan")
        .map(|r| r[2].parse().unwrap())
        .collect();
    assert!(close(&plan, &[0.2, 0.2, 0.6], 1e-15));
    assert_eq!(rows.iter().filter(|r| &r[0] == "curve_nats").count(), 2);
}

#[test]
fn indicator_weights() {
    let out = lqcc(
        &[
            "concentrate",
            "--state",
            "-",
            "--weights",
            "indicator",
            "--certify",
        ],
        Some(r#"{"spectrum": [0.5, 0.3, 0.2]}"#),
    );
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert!((v["plan"]["objective"].as_f64().unwrap() - 1.0).abs() < 1e-12);
    assert_eq!(v["certificate"]["passed"], Value::Bool(true));
}

#[test]
fn custom_weight_file() {
    let dir = TempDir::new().unwrap();
    let w = write(
        dir.path(),
        "w.json",
        "[0.0, 0.6931471805599453, 1.0986122886681098]",
    );
    let out = lqcc(
        &["concentrate", "--state", "-", "--weights", &w],
        Some(r#"{"spectrum": [0.5, 0.3, 0.2]}"#),
    );
    assert_eq!(out.status.code(), Some(0));
    assert!(close(
        &floats(&json(&out)["plan"]["p"]),
        &[0.2, 0.2, 0.6],
        1e-9
    ));

    let short = write(dir.path(), "short.json", r#"{"weights": [0.0, 1.0]}"#);
    let out = lqcc(
        &["concentrate", "--state", "-", "--weights", &short],
        Some(r#"{"spectrum": [0.5, 0.3, 0.2]}"#),
    );
    assert_eq!(out.status.code(), Some(4));
}

#[test]
fn povm_build_then_simulate() {
    let dir = TempDir::new().unwrap();
    let source = write(dir.path(), "s.json", r#"{"spectrum": [0.4, 0.35, 0.25]}"#);
    let ensemble = write(
        dir.path(),
        "e.json",
        r#"{"ensemble": [
            {"p": 0.3, "spectrum": [1.0]},
            {"p": 0.5, "spectrum": [0.5, 0.5]},
            {"p": 0.2, "spectrum": [0.5, 0.5], "note": "duplicate"}
        ]}"#,
    );
    let povm = dir.path().join("povm.json");
    let out = lqcc(
        &[
            "build-povm",
            "--source",
            &source,
            "--ensemble",
            &ensemble,
            "--out",
            povm.to_str().unwrap(),
        ],
        None,
    );
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    assert!(out.stdout.is_empty());
    let report: Value = serde_json::from_str(&std::fs::read_to_string(&povm).unwrap()).unwrap();
    assert_eq!(report["elements"].as_array().unwrap().len(), 2);
    let die = report["die"].as_array().unwrap();
    assert_eq!(die[1]["members"].as_array().unwrap().len(), 2);
    assert!(report["completeness_residual"].as_f64().unwrap() <= 1e-12);

    // The POVM acts on the average target (0.65, 0.35).
    let avg = write(dir.path(), "avg.json", r#"{"spectrum": [0.65, 0.35]}"#);
    let out = lqcc(
        &[
            "simulate",
            "--state",
            &avg,
            "--protocol",
            "povm",
            povm.to_str().unwrap(),
            "--trials",
            "100000",
            "--seed",
            "7",
        ],
        None,
    );
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let v = json(&out);
    let expected = floats(&v["expected_probs"]);
    assert!(close(&expected, &[0.3, 0.7], 1e-12));
    for (phat, p) in floats(&v["empirical_probs"]).iter().zip(&expected) {
        assert!((phat - p).abs() <= 4.0 * (p * (1.0 - p) / 1e5).sqrt());
    }
    let h = v["mean_post_entropy_nats"].as_f64().unwrap();
    assert!((h - 0.7 * 2f64.ln()).abs() < 0.01);
}

#[test]
fn infeasible_ensemble_is_refused() {
    let dir = TempDir::new().unwrap();
    let source = write(dir.path(), "s.json", r#"{"spectrum": [0.9, 0.1]}"#);
    let ensemble = write(
        dir.path(),
        "e.json",
        r#"{"ensemble": [{"p": 1.0, "spectrum": [0.5, 0.5]}]}"#,
    );
    let out = lqcc(
        &["build-povm", "--source", &source, "--ensemble", &ensemble],
        None,
    );
    assert_eq!(out.status.code(), Some(3));
    let out = lqcc(
        &[
            "check-feasible",
            "--source",
            &source,
            "--ensemble",
            &ensemble,
        ],
        None,
    );
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn simulation_is_reproducible() {
    let state = r#"{"spectrum": [0.5, 0.3, 0.2]}"#;
    let args = [
        "simulate",
        "--state",
        "-",
        "--protocol",
        "optimal",
        "--trials",
        "50000",
        "--seed",
        "11",
    ];
    let a = lqcc(&args, Some(state));
    let b = lqcc(&args, Some(state));
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let v = json(&a);
    assert_eq!(
        v["counts"]
            .as_array()
            .unwrap()
            .iter()
            .map(|c| c.as_u64().unwrap())
            .sum::<u64>(),
        50_000
    );
}

#[test]
fn lp_solve_float_and_exact() {
    let dir = TempDir::new().unwrap();
    let lp = write(
        dir.path(),
        "lp.json",
        r#"{"objective": [3, 5], "matrix": [[1, 0], [0, 2], [3, 2]], "bounds": [4, 12, 18]}"#,
    );
    let out = lqcc(&["lp-solve", &lp], None);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert!((v["objective_value"].as_f64().unwrap() - 36.0).abs() < 1e-12);
    assert_eq!(v["verified"], Value::Bool(true));

    let out = lqcc(&["lp-solve", &lp, "--exact"], None);
    let v = json(&out);
    assert_eq!(v["objective_exact"], Value::String("36".into()));
    assert_eq!(v["values_exact"], serde_json::json!(["2", "6"]));

    let infeasible = write(
        dir.path(),
        "bad.json",
        r#"{"objective": [1], "matrix": [[1], [1]], "bounds": [1, 2], "relations": ["le", "ge"]}"#,
    );
    let out = lqcc(&["lp-solve", &infeasible], None);
    assert_eq!(out.status.code(), Some(3));
    assert_eq!(json(&out)["status"], Value::String("infeasible".into()));
}

#[test]
fn bad_inputs_exit_4() {
    let dir = TempDir::new().unwrap();
    let unnormalized = write(
        dir.path(),
        "u.json",
        r#"{"amplitudes": [[{"re": 1.0, "im": 0.0}, {"re": 1.0, "im": 0.0}]]}"#,
    );
    assert_eq!(
        lqcc(&["decompose", "--state", &unnormalized], None)
            .status
            .code(),
        Some(4)
    );
    assert_eq!(
        lqcc(&["decompose", "--state", "-"], Some("not json"))
            .status
            .code(),
        Some(4)
    );
    assert_eq!(
        lqcc(&["decompose", "--state", "-"], Some(r#"{"other": 1}"#))
            .status
            .code(),
        Some(4)
    );
    assert_eq!(
        lqcc(&["decompose", "--state", "/missing.json"], None)
            .status
            .code(),
        Some(4)
    );
    let out = lqcc(
        &["decompose", "--state", "-"],
        Some(r#"{"spectrum": [0.5, -0.5]}"#),
    );
    assert_eq!(out.status.code(), Some(4));
    assert!(!out.stderr.is_empty());
}
