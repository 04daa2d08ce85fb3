use l3lab::record::{parse_csv, Cell, ResultRecord};
use std::process::{Command, Output};

fn l3lab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_l3lab")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json(args: &[&str]) -> ResultRecord {
    let mut a = args.to_vec();
    a.extend(["--format", "json"]);
    let o = l3lab(&a);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    serde_json::from_str(&stdout(&o)).unwrap()
}

fn num(r: &ResultRecord, key: &str) -> f64 {
    r.outputs[key].as_f64().unwrap()
}

#[test]
fn a_prints_value() {
    let o = l3lab(&["a"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("A = 0.177744"), "{}", stdout(&o));
}

#[test]
fn coarse_a_is_consistent() {
    let tight = num(&json(&["a"]), "value");
    let coarse = json(&["a", "--tol", "1e-6"]);
    assert!((num(&coarse, "value") - tight).abs() < 1e-5);
    for k in ["value", "err", "evals"] {
        assert!(coarse.outputs.contains_key(k));
    }
}

#[test]
fn argument_errors_exit_2() {
    assert_eq!(l3lab(&["stokes", "--rho-min", "20", "--rho-max", "13"]).status.code(), Some(2));
    assert_eq!(l3lab(&["stokes", "--rho-min", "5"]).status.code(), Some(2));
    assert_eq!(l3lab(&["a", "--tol", "0.5"]).status.code(), Some(2));
    assert_eq!(l3lab(&["a", "--bogus"]).status.code(), Some(2));
}

#[test]
fn numerical_failures_exit_1() {
    // Below the quadrature's attainable tolerance.
    assert_eq!(l3lab(&["a", "--tol", "1e-14"]).status.code(), Some(1));
    // A loose tolerance leaves too few digits after the cancellation at
    // rho = 20; the table is still written.
    let o = l3lab(&["stokes", "--rho-min", "20", "--rho-max", "20", "--tol", "1e-7", "--format", "csv"]);
    assert_eq!(o.status.code(), Some(1));
    let (header, rows) = parse_csv(&stdout(&o));
    assert_eq!(header, ["rho", "abs_deltaY", "exp_rho", "theta", "digits_lost"]);
    assert_eq!(rows.len(), 1);
}

#[test]
fn stokes_plateau() {
    let r = json(&["stokes", "--rho-min", "14", "--rho-max", "20", "--rho-step", "0.5"]);
    assert_eq!(r.rows.len(), 13);
    let theta: Vec<f64> = r.rows.iter().map(|row| row[3].as_f64().unwrap()).collect();
    let spread = theta.iter().cloned().fold(f64::MIN, f64::max) - theta.iter().cloned().fold(f64::MAX, f64::min);
    assert!(spread <= 1e-2, "{spread}");
}

#[test]
fn csv_and_json_agree() {
    let args = ["singularities"];
    let r = json(&args);
    let (header, rows) = parse_csv(&stdout(&l3lab(&["singularities", "--format", "csv"])));
    assert_eq!(header, r.columns);
    assert_eq!(rows, r.rows);
    assert_eq!(rows.len(), 4);
    assert_eq!(rows[2][0], Cell::Text("t2+".into()));
}

#[test]
fn config_file_and_flag_override() {
    let path = std::env::temp_dir().join(format!("l3lab-test-{}.cfg", std::process::id()));
    std::fs::write(&path, "# coarse run\ntol = 1e-6\nformat = json\n").unwrap();
    let p = path.to_str().unwrap();
    let from_file: ResultRecord = serde_json::from_str(&stdout(&l3lab(&["--config", p, "a"]))).unwrap();
    assert_eq!(from_file.inputs["tol"], Cell::Num(1e-6));
    let o = l3lab(&["--config", p, "a", "--tol", "1e-9", "--format", "csv"]);
    let (header, rows) = parse_csv(&stdout(&o));
    assert_eq!(header, ["err", "evals", "value"]);
    assert_eq!(rows.len(), 1);
    let r: ResultRecord = serde_json::from_str(&stdout(&l3lab(&["--config", p, "a", "--tol", "1e-9"]))).unwrap();
    assert_eq!(r.inputs["tol"], Cell::Num(1e-9));
    std::fs::remove_file(&path).unwrap();
}

#[test]
fn out_file_matches_stdout() {
    let path = std::env::temp_dir().join(format!("l3lab-out-{}.json", std::process::id()));
    let o = l3lab(&["l3", "--mu", "0.003", "--format", "json", "--out", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(o.stdout.is_empty());
    let written = std::fs::read_to_string(&path).unwrap();
    std::fs::remove_file(&path).unwrap();
    assert_eq!(written, stdout(&l3lab(&["l3", "--mu", "0.003", "--format", "json"])));
    let r: ResultRecord = serde_json::from_str(&written).unwrap();
    assert!((num(&r, "hyperbolic_over_sqrt_mu") / (21.0f64 / 8.0).sqrt() - 1.0).abs() < 0.01);
    assert_eq!(r.rows.len(), 4);
}

#[test]
fn distance_reports_ratio() {
    let r = json(&["distance", "--mu", "1e-3"]);
    let ratio = num(&r, "ratio");
    assert!((ratio - num(&r, "measured") / num(&r, "asymptotic")).abs() < 1e-12);
    assert!(num(&r, "measured") > 0.0);
}

#[test]
fn plot_csv_columns() {
    let (h, rows) = parse_csv(&stdout(&l3lab(&["separatrix", "--format", "csv"])));
    assert_eq!(h, ["t", "lambda", "big_lambda", "q", "energy_residual"]);
    assert!(rows.iter().all(|r| r[4].as_f64().unwrap() < 1e-10));
    let (h, rows) = parse_csv(&stdout(&l3lab(&["manifolds", "--mu", "0.003", "--format", "csv"])));
    assert_eq!(h, ["branch", "t", "q1", "q2", "p1", "p2"]);
    for b in ["unstable+", "unstable-", "stable+", "stable-"] {
        assert!(rows.iter().any(|r| r[0] == Cell::Text(b.into())));
    }
}

#[test]
fn thread_cap_does_not_change_output() {
    let base = l3lab(&["stokes", "--rho-min", "14", "--rho-max", "16"]);
    let capped = Command::new(env!("CARGO_BIN_EXE_l3lab"))
        .args(["stokes", "--rho-min", "14", "--rho-max", "16"])
        .env("L3LAB_THREADS", "1")
        .output()
        .unwrap();
    assert_eq!(base.stdout, capped.stdout);
    let bad = Command::new(env!("CARGO_BIN_EXE_l3lab")).arg("a").env("L3LAB_THREADS", "zero").output().unwrap();
    assert_eq!(bad.status.code(), Some(2));
}
