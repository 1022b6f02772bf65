use std::process::{Command, Output};

fn rrd(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rrd"))
        .args(args)
        .env("RRD_THREADS", "1")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn unknown_table_is_a_config_error() {
    assert_eq!(rrd(&["table", "--which", "3"]).status.code(), Some(2));
}

#[test]
fn bp_without_beta_is_a_config_error() {
    assert_eq!(rrd(&["theory", "--objective", "bp"]).status.code(), Some(2));
}

#[test]
fn too_few_comparison_trials_is_a_config_error() {
    assert_eq!(rrd(&["gordon", "--trials", "10"]).status.code(), Some(2));
}

#[test]
fn unwritable_output_is_an_io_error() {
    let o = rrd(&["theory", "--out", "/nonexistent/dir/out.csv"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("/nonexistent/dir/out.csv"));
}

#[test]
fn theory_json_parses() {
    let o = rrd(&["theory", "--alpha2", "0.5,0.75", "--format", "json"]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    let rows = v.as_array().expect("array of rows");
    assert_eq!(rows.len(), 2);
    assert!(rows[0].get("theory_lower").is_some());
}

#[test]
fn general_linear_with_all_ones_matches_sum_objective() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("c.txt");
    std::fs::write(&path, "1 1\n1,1\n").unwrap();
    let gl = rrd(&["theory", "--objective", "gl", "--c-file", path.to_str().unwrap()]);
    let lp = rrd(&["theory"]);
    assert!(gl.status.success() && lp.status.success());
    let col = |s: String| s.lines().nth(1).unwrap().split(',').skip(1).collect::<Vec<_>>().join(",");
    assert_eq!(col(stdout(&gl)), col(stdout(&lp)));
}

#[test]
fn small_simulation_writes_one_row() {
    let o = rrd(&["simulate", "--n", "20", "--trials", "8", "--alpha2", "0.5"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let out = stdout(&o);
    assert_eq!(out.lines().count(), 2);
    let mean: f64 = out.lines().nth(1).unwrap().split(',').nth(3).unwrap().parse().unwrap();
    assert!(mean < 0.0 && mean > -1.0);
}

#[test]
fn table_output_independent_of_thread_count() {
    let run = |threads: &str| {
        Command::new(env!("CARGO_BIN_EXE_rrd"))
            .args(["table", "--which", "2", "--n", "30", "--trials", "12", "--seed", "5"])
            .env("RRD_THREADS", threads)
            .output()
            .unwrap()
    };
    let (a, b) = (run("1"), run("3"));
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
}
