use std::path::Path;
use std::process::{Command, Output};

fn qrao(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qrao")).args(args).output().expect("binary runs")
}

fn write_graph(dir: &Path, name: &str, body: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, body).unwrap();
    p.to_string_lossy().into_owned()
}

#[test]
fn solve_is_byte_identical_across_runs() {
    let dir = tempfile::tempdir().unwrap();
    let g = write_graph(dir.path(), "c6.txt", "0 1\n1 2\n2 3\n3 4\n4 5\n5 0\n0 3\n");
    for kind in ["11", "21", "31", "32", "tetra"] {
        let args = ["solve", "--graph", &g, "--kind", kind, "--shots", "500", "--seed", "5"];
        let a = qrao(&args);
        let b = qrao(&args);
        assert_eq!(a.status.code(), Some(0), "{}", String::from_utf8_lossy(&a.stderr));
        assert_eq!(a.stdout, b.stdout);
        assert!(String::from_utf8_lossy(&a.stdout).contains("best cut"));
    }
}

#[test]
fn solve_writes_report_to_out() {
    let dir = tempfile::tempdir().unwrap();
    let g = write_graph(dir.path(), "k3.txt", "0 1\n1 2\n0 2\n");
    let out = dir.path().join("report.txt");
    let o = qrao(&[
        "solve", "--graph", &g, "--kind", "tetra", "--rounding", "tetra-magic", "--pairing", "greedy",
        "--out", out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert!(o.stdout.is_empty());
    let text = std::fs::read_to_string(out).unwrap();
    assert!(text.contains("tetra-magic"));
    assert!(!text.contains("method pauli"));
}

#[test]
fn input_errors_exit_1() {
    let dir = tempfile::tempdir().unwrap();
    let bad = write_graph(dir.path(), "bad.txt", "0 1\n1 x\n");
    let k3 = write_graph(dir.path(), "k3.txt", "0 1\n1 2\n0 2\n");
    assert_eq!(qrao(&["solve", "--graph", &bad]).status.code(), Some(1));
    assert_eq!(qrao(&["solve", "--graph", "/does/not/exist"]).status.code(), Some(1));
    assert_eq!(qrao(&["solve", "--graph", &k3, "--kind", "42"]).status.code(), Some(1));
    // Simultaneous rounding belongs to the (3,2) code.
    let o = qrao(&["solve", "--graph", &k3, "--kind", "31", "--rounding", "simultaneous"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).starts_with("error:"));
}

#[test]
fn qubit_cap_exits_2_and_honours_env_override() {
    let dir = tempfile::tempdir().unwrap();
    let edges: String = (0..13).map(|i| format!("{i} {}\n", i + 1)).collect();
    let path14 = write_graph(dir.path(), "p14.txt", &edges);
    let o = qrao(&["solve", "--graph", &path14, "--kind", "11"]);
    assert_eq!(o.status.code(), Some(2));
    let k3 = write_graph(dir.path(), "k3.txt", "0 1\n1 2\n0 2\n");
    let o = Command::new(env!("CARGO_BIN_EXE_qrao"))
        .args(["solve", "--graph", &k3, "--kind", "11"])
        .env("QRAO_MAX_QUBITS", "2")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn verify_suites_pass() {
    for suite in ["qrac", "channels", "bounds"] {
        let o = qrao(&["verify", suite]);
        assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stdout));
        let text = String::from_utf8_lossy(&o.stdout);
        assert!(text.lines().filter(|l| l.starts_with("PASS")).count() >= 3);
        assert!(!text.contains("FAIL"));
    }
}

#[test]
fn sweep_writes_csv() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("region.csv");
    let o = qrao(&[
        "sweep", "--eps", "0,0.25,0.45", "--lambda-points", "5", "--out", out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    let csv = std::fs::read_to_string(out).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "epsilon,lambda,bound,branch,feasible");
    assert_eq!(lines.len(), 1 + 3 * 5);
    // ε = 0.45, λ = 0.5 sits inside the infeasible band.
    assert!(lines.contains(&"0.450000000000,0.500000000000,0.495126705653,2,false"), "{csv}");
}

#[test]
fn sweep_rejects_out_of_range_values() {
    assert_eq!(qrao(&["sweep", "--eps", "-0.1"]).status.code(), Some(1));
}
