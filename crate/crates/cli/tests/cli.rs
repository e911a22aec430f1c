use std::io::Write;
use std::process::{Command, Output, Stdio};

fn trimis(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_trimis")).args(args).output().expect("binary runs")
}

fn trimis_stdin(args: &[&str], input: &[u8]) -> Output {
    let mut child = Command::new(env!("CARGO_BIN_EXE_trimis"))
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .expect("binary runs");
    child.stdin.take().unwrap().write_all(input).unwrap();
    child.wait_with_output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn capacity_small_rhombus() {
    let o = trimis(&["capacity", "--n", "3", "--m", "5"]);
    assert!(o.status.success());
    let s = stdout(&o);
    let mut lines = s.lines();
    assert_eq!(lines.next(), Some("lattice,n,m,log2_count,bound,upper"));
    let row: Vec<&str> = lines.next().unwrap().split(',').collect();
    assert_eq!(&row[..3], ["triangular", "3", "5"]);
    let bound: f64 = row[4].parse().unwrap();
    assert!(bound > 0.0 && bound < 0.4808);
}

#[test]
fn count_matches_small_cases() {
    let o = trimis(&["count", "--n", "2", "--m", "2", "--format", "json"]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    // 2x2 rhombus: the two long-diagonal corners together, or either short-diagonal site alone
    assert_eq!(v[0]["count"], "3");
}

#[test]
fn sparse_ground_states_listed() {
    let o = trimis(&["pgs", "--mode", "sparse"]);
    assert!(o.status.success());
    let s = stdout(&o);
    assert_eq!(s.lines().count(), 15);
    assert!(s.lines().skip(1).all(|l| l.contains(",7,1/7,")));
}

#[test]
fn delaunay_audit_passes() {
    let o = trimis(&["delaunay-audit", "--triangulations", "2", "--sides", "7,14"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let s = stdout(&o);
    assert!(s.contains(",3/2,2.598076211,"));
}

#[test]
fn encode_decode_round_trip() {
    let payload = b"maximal independent sets";
    let enc = trimis_stdin(&["encode", "--n", "4", "--m", "5", "--bytes"], payload);
    assert!(enc.status.success());
    let dec = trimis_stdin(&["decode", "--bytes"], &enc.stdout);
    assert!(dec.status.success());
    assert_eq!(dec.stdout, payload);
}

#[test]
fn encode_decode_to_files() {
    let dir = tempfile::tempdir().unwrap();
    let window = dir.path().join("w.txt");
    let enc = trimis_stdin(&["encode", "--n", "3", "--m", "3", "--out", window.to_str().unwrap()], b"1011001110001\n");
    assert!(enc.status.success());
    let dec = trimis(&["decode", "--input", window.to_str().unwrap()]);
    assert_eq!(stdout(&dec).trim(), "1011001110001");
}

#[test]
fn bad_arguments_exit_two() {
    assert_eq!(trimis(&["gibbs-sweep", "--boundary", "purple"]).status.code(), Some(2));
    assert_eq!(trimis(&["gibbs-sweep", "--lambda", "x"]).status.code(), Some(2));
    assert_eq!(trimis(&["delaunay-audit", "--rho", "sqrt(-1)"]).status.code(), Some(2));
    assert_eq!(trimis_stdin(&["encode"], b"012").status.code(), Some(2));
    assert_eq!(trimis(&["--threads", "0", "pattern-count"]).status.code(), Some(2));
    assert_eq!(trimis(&["no-such-command"]).status.code(), Some(2));
}

#[test]
fn json_errors_are_structured() {
    let o = trimis(&["--format", "json", "gibbs-sweep", "--boundary", "purple"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stderr).unwrap();
    assert_eq!(v["error"], "invalid_argument");
}

#[test]
fn seeded_runs_are_deterministic() {
    let args = ["--seed", "7", "peierls-audit", "--no-single", "--random", "20", "--k", "3"];
    let a = trimis(&args);
    let b = trimis(&["--threads", "1", "--seed", "7", "peierls-audit", "--no-single", "--random", "20", "--k", "3"]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn pattern_counts_json() {
    let o = trimis(&["--format", "json", "pattern-count", "--graphs", "4"]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["total"], 15);
    assert_eq!(v["graphs"].as_array().unwrap().len(), 4);
}
