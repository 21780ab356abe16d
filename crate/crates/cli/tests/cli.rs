use std::path::Path;
use std::process::{Command, Output};

fn qcircle(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qcircle"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json(o: &Output) -> serde_json::Value {
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    serde_json::from_slice(&o.stdout).unwrap()
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

const MEASURE_FIELDS: [&str; 6] = [
    "lambda",
    "circ_variance",
    "kr_angle",
    "j_variance",
    "sum_kr",
    "u2_magnitude",
];

#[test]
fn dump_and_reload_reproduce_measures_bitwise() {
    let dir = tempfile::tempdir().unwrap();
    let dump = dir.path().join("state.json");
    let cases: [&[&str]; 4] = [
        &[
            "--state", "cat", "--l", "0.3", "--alpha", "1.1", "--phase", "0.7",
        ],
        &["--state", "squeezed", "--s", "0.4", "--alpha", "2"],
        &["--state", "char", "--epsilon", "1.3"],
        &["--state", "uniform"],
    ];
    for case in cases {
        let mut args = vec!["measure", "--lambda", "0.9", "--dump-state", path(&dump)];
        args.extend_from_slice(case);
        let first = json(&qcircle(&args));
        let second = json(&qcircle(&[
            "measure",
            "--lambda",
            "0.9",
            "--load-state",
            path(&dump),
        ]));
        for key in MEASURE_FIELDS {
            assert_eq!(first[key], second[key], "{case:?} {key}");
        }
    }
}

#[test]
fn load_state_does_not_renormalize() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("s.json");
    std::fs::write(
        &file,
        r#"{"schema_version":1,"kind":"fourier_state","n_min":0,"n_max":1,"re":[1,1],"im":[0,0]}"#,
    )
    .unwrap();
    let o = qcircle(&["measure", "--load-state", path(&file)]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("not normalized"));
}

#[test]
fn writes_output_file_and_csv_headers() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("sweep.csv");
    let o = qcircle(&[
        "--output",
        path(&out),
        "sweep",
        "--epsilon",
        "3.14159265358979",
        "--lambda-grid",
        "0:6.283:64",
    ]);
    assert!(o.status.success());
    assert!(o.stdout.is_empty());
    let text = std::fs::read_to_string(&out).unwrap();
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "epsilon,lambda,circ_variance,difference,origin_shift_rhs,closed_form_difference,kr_angle"
    );
    let diffs: Vec<f64> = lines
        .map(|l| l.split(',').nth(3).unwrap().parse().unwrap())
        .collect();
    assert_eq!(diffs.len(), 64);
    let peak = diffs.iter().copied().fold(f64::MIN, f64::max);
    let target = std::f64::consts::PI.powi(2) / 2.0;
    assert!(peak <= target + 1e-9 && peak > target - 0.01, "{peak}");
}

#[test]
fn sweep_json_over_epsilon_grid() {
    let v = json(&qcircle(&[
        "--format",
        "json",
        "sweep",
        "--epsilon-grid",
        "0.5:6:4",
        "--lambda-grid",
        "0:6:5",
    ]));
    assert_eq!(v["kind"], "lambda_sweep");
    let sweeps = v["sweeps"].as_array().unwrap();
    assert_eq!(sweeps.len(), 4);
    assert!(sweeps
        .iter()
        .all(|s| s["rows"].as_array().unwrap().len() == 5));
    let uni = qcircle(&["sweep", "--packet", "uniform", "--lambda-grid", "0:6:4"]);
    let text = stdout(&uni);
    assert!(text.lines().skip(1).all(|l| l.starts_with(",")), "{text}");
}

#[test]
fn demo_line_contract() {
    for length in ["0.5", "1", "2"] {
        let v = json(&qcircle(&["demo-line", "--L", length]));
        let l: f64 = length.parse().unwrap();
        assert!((v["box_variance"].as_f64().unwrap() - l * l / 12.0).abs() < 1e-15);
        assert!((v["split_box_variance"].as_f64().unwrap() - 7.0 * l * l / 48.0).abs() < 1e-15);
        assert!((v["ratio"].as_f64().unwrap() - 1.75).abs() < 1e-12);
        assert_eq!(v["schema_version"], 1);
    }
    let csv = stdout(&qcircle(&[
        "--format",
        "csv",
        "demo-line",
        "--sigma-grid",
        "0.25:1:4",
    ]));
    assert_eq!(
        csv,
        "sigma_sq,heisenberg_sum\n0.25,1.25\n0.5,1\n0.75,1.0833333333333333\n1,1.25\n"
    );
}

#[test]
fn half_circle_packet_serializes_infinity() {
    let v = json(&qcircle(&[
        "measure",
        "--state",
        "char",
        "--epsilon",
        "3.141592653589793",
    ]));
    assert_eq!(v["kr_angle"], "inf");
    assert_eq!(v["j_variance"], "inf");
}

#[test]
fn config_file_with_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    std::fs::write(&cfg, "format = \"csv\"\nn_range = [-6, 6]\nl_grid = [0.0]\nseed = 5\n[optimizer]\nrestarts = 4\nmax_iters = 3000\n").unwrap();
    let csv = qcircle(&["--config", path(&cfg), "minimize"]);
    assert!(
        csv.status.success(),
        "{}",
        String::from_utf8_lossy(&csv.stderr)
    );
    let text = stdout(&csv);
    assert!(
        text.starts_with("index,start,start_value,final_value,iterations,evaluations,converged\n")
    );
    assert_eq!(text.lines().count(), 5);

    let a = qcircle(&[
        "--config",
        path(&cfg),
        "--format",
        "json",
        "--seed",
        "11",
        "minimize",
    ]);
    let v = json(&a);
    assert_eq!(v["seed"], 11);
    assert_eq!(v["n_range"], serde_json::json!([-6, 6]));
    assert_eq!(v["restarts"].as_array().unwrap().len(), 4);
    assert!(v["best_value"].as_f64().unwrap() <= v["coherent"]["value"].as_f64().unwrap());
    let b = qcircle(&[
        "--config",
        path(&cfg),
        "--format",
        "json",
        "--seed",
        "11",
        "minimize",
    ]);
    assert_eq!(a.stdout, b.stdout);

    std::fs::write(&cfg, "restarts = 4\n").unwrap();
    let bad = qcircle(&["--config", path(&cfg), "minimize"]);
    assert_eq!(bad.status.code(), Some(2));
}

#[test]
fn evolve_csv_and_packet_rejection() {
    let text = stdout(&qcircle(&[
        "evolve",
        "--state",
        "eigen",
        "--n",
        "2",
        "--time-grid",
        "0:1:3",
    ]));
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "t,phase_estimate,u1_magnitude,windowed_mean,norm,circ_variance,kr_angle,j_variance,sum_kr"
    );
    for line in lines {
        let cols: Vec<&str> = line.split(',').collect();
        assert_eq!(cols[1], "", "undefined phase for an eigenstate");
        assert_eq!(cols[6], "inf");
        assert_eq!(cols[7], "0");
    }
    let o = qcircle(&["evolve", "--state", "uniform"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn exit_codes() {
    let o = qcircle(&["--output", "/nonexistent-dir/x.json", "demo-line"]);
    assert_eq!(o.status.code(), Some(1));
    let o = qcircle(&["measure", "--state", "cat", "--frobnicate"]);
    assert_eq!(o.status.code(), Some(2));
    let o = qcircle(&["--n-range", "-3:3", "measure", "--state", "coherent"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("truncation"));
    let o = qcircle(&["--version"]);
    assert_eq!(o.status.code(), Some(0));
}
