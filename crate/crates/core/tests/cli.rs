use std::path::Path;
use std::process::{Command, Output};

fn stochgeo(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_stochgeo"))
        .args(args)
        .env_remove("STOCHGEO_SEED")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

#[test]
fn sample_is_deterministic_and_respects_the_seed_variable() {
    let args = [
        "sample",
        "mhc",
        "--lambda-p",
        "2",
        "--d",
        "0.4",
        "--window",
        "8x8",
    ];
    let a = stochgeo(&args);
    let b = stochgeo(&args);
    assert!(a.status.success(), "{}", stderr(&a));
    assert_eq!(a.stdout, b.stdout);

    let env7 = Command::new(env!("CARGO_BIN_EXE_stochgeo"))
        .args(args)
        .env("STOCHGEO_SEED", "7")
        .output()
        .unwrap();
    let mut flag7 = args.to_vec();
    flag7.extend(["--seed", "7"]);
    assert_eq!(env7.stdout, stochgeo(&flag7).stdout);
    assert_ne!(env7.stdout, a.stdout);
}

#[test]
fn sample_grid_writes_the_lattice() {
    let out = stochgeo(&["sample", "grid", "--n", "24", "--window", "100x80"]);
    assert!(out.status.success());
    let text = stdout(&out);
    let rows: Vec<(f64, f64)> = text
        .lines()
        .filter(|l| !l.starts_with('#') && !l.starts_with("x_km"))
        .map(|l| {
            let (x, y) = l.split_once(',').unwrap();
            (x.parse().unwrap(), y.parse().unwrap())
        })
        .collect();
    assert_eq!(rows.len(), 24);
    assert!(rows
        .iter()
        .any(|&(x, y)| (x - 100.0 / 12.0).abs() < 1e-9 && (y - 10.0).abs() < 1e-9));
}

#[test]
fn usage_errors_exit_with_two() {
    let out = stochgeo(&["sample", "mhc", "--lambda-p", "1", "--d", "-1"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("`d`"), "{}", stderr(&out));

    let out = stochgeo(&["simulate", "--trials", "0"]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(stochgeo(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(
        stochgeo(&["bound", "--kind", "theorem9"]).status.code(),
        Some(2)
    );
}

#[test]
fn missing_files_exit_with_one() {
    let out = stochgeo(&[
        "simulate",
        "--source",
        "file",
        "--file",
        "/nonexistent/bs.csv",
    ]);
    assert_eq!(out.status.code(), Some(1));
    let out = stochgeo(&["fit", "--target", "/nonexistent/curve.csv"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn recorded_config_reproduces_output_across_thread_counts() {
    let dir = tempfile::tempdir().unwrap();
    let first = dir.path().join("first.csv");
    let out = stochgeo(&[
        "--threads",
        "1",
        "simulate",
        "--source",
        "ppp,mhc,grid",
        "--lambda-p",
        "1.5",
        "--d",
        "0.3",
        "--trials",
        "400",
        "--beta-db",
        "-5:5:15",
        "--seed",
        "42",
        "-o",
        first.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    let rerun = |threads: &str, path: &Path| {
        let out = stochgeo(&[
            "--threads",
            threads,
            "simulate",
            "--config",
            first.to_str().unwrap(),
            "-o",
            path.to_str().unwrap(),
        ]);
        assert!(out.status.success(), "{}", stderr(&out));
        std::fs::read(path).unwrap()
    };
    let original = std::fs::read(&first).unwrap();
    assert_eq!(rerun("4", &dir.path().join("a.csv")), original);
    assert_eq!(rerun("2", &dir.path().join("b.csv")), original);
}

#[test]
fn bound_with_simulation_reports_gaps() {
    let out = stochgeo(&[
        "bound",
        "--lambda-p",
        "3",
        "--d",
        "0.5",
        "--beta-db",
        "10:5:20",
        "--with-sim",
        "--trials",
        "500",
        "--n-r",
        "32",
        "--n-theta",
        "32",
        "--n-upsilon",
        "32",
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    let text = stdout(&out);
    assert!(text.contains("beta_db,p_c,std_err,label,gap"));
    assert!(text.contains("## mean_abs_gap_proposition1="));
    let curves = stochgeo::io::read_curves(&text).unwrap();
    let labels: Vec<&str> = curves.iter().map(|c| c.label()).collect();
    assert_eq!(labels, ["mhc", "theorem1", "proposition1"]);
}

#[test]
fn validate_exit_code_follows_the_checks() {
    let pass = stochgeo(&[
        "validate",
        "empty-space",
        "--lambda-p",
        "2",
        "--d",
        "0.05",
        "--realizations",
        "100",
    ]);
    assert_eq!(pass.status.code(), Some(0), "{}", stdout(&pass));
    assert!(stdout(&pass).starts_with("[PASS] empty-space"));
    let fail = stochgeo(&[
        "validate",
        "empty-space",
        "--lambda-p",
        "2",
        "--d",
        "0.5",
        "--realizations",
        "100",
    ]);
    assert_eq!(fail.status.code(), Some(1));
    assert!(stdout(&fail).starts_with("[FAIL] empty-space"));
}

#[test]
fn fit_recovers_the_generating_candidate_from_its_own_curve() {
    let dir = tempfile::tempdir().unwrap();
    let target = dir.path().join("target.csv");
    let out = stochgeo(&[
        "simulate",
        "--lambda-p",
        "2",
        "--d",
        "0.4",
        "--trials",
        "300",
        "--beta-db",
        "-5:5:15",
        "--seed",
        "3",
        "-o",
        target.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let out = stochgeo(&[
        "fit",
        "--target",
        target.to_str().unwrap(),
        "--trials",
        "300",
        "--beta-db",
        "-5:5:15",
        "--seed",
        "3",
        "--lambda-p-grid",
        "1,2",
        "--d-grid",
        "0.2,0.4",
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    let text = stdout(&out);
    assert!(
        text.contains("## best_lambda_p=2 best_d=0.4 best_mse=0\n"),
        "{text}"
    );
    assert_eq!(
        text.lines()
            .filter(|l| l.contains(',') && !l.starts_with('#'))
            .count(),
        5
    );
}
