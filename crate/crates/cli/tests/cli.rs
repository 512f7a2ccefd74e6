use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

const PATH3: &str = "a\tm\t1\nm\tb\t1\n";

fn treegap(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_treegap"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn write(dir: &TempDir, name: &str, contents: &str) -> PathBuf {
    let path = dir.path().join(name);
    std::fs::write(&path, contents).unwrap();
    path
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn json(args: &[&str]) -> Value {
    let mut all = args.to_vec();
    all.extend(["--output", "json"]);
    let out = treegap(&all);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

fn close(v: &Value, expected: f64, tol: f64) {
    let x = v.as_f64().unwrap_or_else(|| panic!("not a number: {v}"));
    assert!((x - expected).abs() <= tol, "{x} vs {expected}");
}

#[test]
fn gap_of_unit_path() {
    let dir = TempDir::new().unwrap();
    let path = write(&dir, "p3.tsv", PATH3);
    let v = json(&["gap", s(&path)]);
    assert_eq!(v["gamma"].as_f64(), Some(0.5));
    assert_eq!(v["generic_weights"]["m"]["weight"].as_f64(), Some(1.0));
    let checks = v["checks"].as_array().unwrap();
    assert!(checks.iter().any(|c| c["name"] == "brute_force_gamma"));
    assert!(checks.iter().all(|c| c["passed"] == true));
}

#[test]
fn gap_of_single_edge_from_newick() {
    let dir = TempDir::new().unwrap();
    let path = write(&dir, "edge.nwk", "(a:4)b;");
    let v = json(&["gap", s(&path)]);
    assert_eq!(v["gamma"].as_f64(), Some(4.0));
}

#[test]
fn text_output_uses_six_digits() {
    let dir = TempDir::new().unwrap();
    let path = write(&dir, "p.tsv", "a\tm\t1\nm\tb\t2\n");
    let out = treegap(&["gap", s(&path)]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("gamma        0.666667"), "{text}");
}

#[test]
fn malformed_newick_exits_2_with_position() {
    let dir = TempDir::new().unwrap();
    let path = write(&dir, "bad.nwk", "(a:1,b:2");
    let out = treegap(&["gap", s(&path)]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("byte"));
}

#[test]
fn validation_errors_exit_3() {
    let dir = TempDir::new().unwrap();
    let cycle = write(&dir, "cycle.tsv", "a\tb\t1\nb\tc\t1\nc\ta\t1\n");
    assert_eq!(treegap(&["gap", s(&cycle)]).status.code(), Some(3));
    let path = write(&dir, "p3.tsv", PATH3);
    assert_eq!(treegap(&["check", s(&path)]).status.code(), Some(3));
    assert_eq!(treegap(&["maxp", s(&path), "--tol", "0"]).status.code(), Some(3));
    assert_eq!(treegap(&["star", "--n", "1"]).status.code(), Some(3));
    assert_eq!(treegap(&["necklace", "--n", "1"]).status.code(), Some(3));
}

#[test]
fn check_reports_status_and_certificate() {
    let dir = TempDir::new().unwrap();
    let path = write(&dir, "p3.tsv", PATH3);
    let v = json(&["check", s(&path), "--p", "1"]);
    assert_eq!(v["status"], "strict");
    assert_eq!(v["certificate"], Value::Null);

    let v = json(&["check", s(&path), "--p", "2"]);
    assert_eq!(v["status"], "non_strict");
    let r = 6f64.sqrt().recip();
    close(&v["certificate"]["a"], r, 1e-9);
    close(&v["certificate"]["m"], -2.0 * r, 1e-9);
    close(&v["certificate"]["b"], r, 1e-9);

    let v = json(&["check", s(&path), "--p", "3"]);
    assert_eq!(v["status"], "fails");
    assert!(v["lambda_max"].as_f64().unwrap() > 0.0);
    assert!(v["certificate"].is_object());
}

#[test]
fn maxp_of_tree_and_matrix() {
    let dir = TempDir::new().unwrap();
    let path = write(&dir, "p3.tsv", PATH3);
    let v = json(&["maxp", s(&path)]);
    close(&v["max_p"]["p_star"], 2.0, 1e-5);
    assert!(v["tree_maxp_lower_bound"].as_f64().unwrap() > 1.0);
    let z = v["zeta"]["zeta"].as_f64().unwrap();
    assert!(z > 0.0 && z < 1.0);

    let matrix = write(&dir, "y4.txt", "r l1 l2 l3 l4\n0 1 1 1 1\n1 0 2 2 2\n1 2 0 2 2\n1 2 2 0 2\n1 2 2 2 0\n");
    let v = json(&["maxp", s(&matrix), "--format", "matrix"]);
    close(&v["max_p"]["p_star"], 1.415037, 1e-5);
    assert_eq!(v["zeta"], Value::Null);
    assert_eq!(v["tree_maxp_lower_bound"], Value::Null);

    let pair = write(&dir, "pair.txt", "x y\n0 1\n1 0\n");
    let v = json(&["maxp", s(&pair), "--format", "matrix"]);
    assert_eq!(v["capped"], true);
    assert_eq!(v["max_p"], Value::Null);
}

#[test]
fn star_and_necklace_reports() {
    let v = json(&["star", "--n", "2"]);
    close(&v["report"]["max_p"]["p_star"], 2.0, 1e-4);

    let v = json(&["star", "--n", "8"]);
    close(&v["report"]["gamma"], 0.125, 1e-15);
    assert!(v["edge_list"].as_str().unwrap().starts_with("# root l1\n"));

    let v = json(&["necklace", "--n", "3"]);
    close(&v["report"]["gamma"], 1.0 / 6.0, 1e-15);
    assert_eq!(v["report"]["tree_summary"]["edge_count"], 6);
    assert!(v["report"]["checks"].as_array().unwrap().iter().all(|c| c["passed"] == true));

    let v = json(&["necklace", "--n", "4"]);
    assert!(v["report"]["max_p"]["p_star"].as_f64().unwrap() <= 1.415137);
}

#[test]
fn emitted_edge_list_reads_back() {
    let dir = TempDir::new().unwrap();
    let v = json(&["star", "--n", "3"]);
    let path = write(&dir, "star.tsv", v["edge_list"].as_str().unwrap());
    let again = json(&["gap", s(&path)]);
    assert_eq!(again["gamma"], v["report"]["gamma"]);
    assert_eq!(again["tree_summary"]["root"], "l1");
}

#[test]
fn verify_margins() {
    let dir = TempDir::new().unwrap();
    let tree = write(&dir, "p3.tsv", PATH3);
    let witness = write(&dir, "w.tsv", "# generic witness\na\t0.5\nm\t-1\nb\t0.5\n");
    let v = json(&["verify", s(&tree), s(&witness)]);
    close(&v["margin"], 0.0, 1e-12);
    assert_eq!(v["equality"], true);
    assert_eq!(v["generic_witness"], true);

    let adjacent = write(&dir, "am.tsv", "a\t1\nm\t-1\n");
    let v = json(&["verify", s(&tree), s(&adjacent)]);
    close(&v["margin"], 1.0, 1e-12);
    assert_eq!(v["equality"], false);

    let ends = write(&dir, "ab.tsv", "a\t1\nb\t-1\n");
    close(&json(&["verify", s(&tree), s(&ends)])["margin"], 3.0, 1e-12);

    let unbalanced = write(&dir, "bad.tsv", "a\t1\nb\t-0.5\n");
    assert_eq!(treegap(&["verify", s(&tree), s(&unbalanced)]).status.code(), Some(3));
    let unknown = write(&dir, "unknown.tsv", "a\t1\nz\t-1\n");
    assert_eq!(treegap(&["verify", s(&tree), s(&unknown)]).status.code(), Some(3));
}

#[test]
fn oracle_suite_passes() {
    let dir = TempDir::new().unwrap();
    let path = write(&dir, "t.nwk", "((a:0.5,b:2)c:1.5,(d:3,e:0.25)f:1)g;");
    let v = json(&["oracle", s(&path), "--seed", "7"]);
    assert_eq!(v["passed"], true, "{v:#}");
    assert!(v["checks"].as_array().unwrap().len() >= 6);
}

#[test]
fn json_output_is_deterministic() {
    let dir = TempDir::new().unwrap();
    let path = write(&dir, "t.nwk", "((a:0.5,b:2)c:1.5,(d:3,e:0.25)f:1)g;");
    for args in [
        vec!["gap", s(&path), "--output", "json"],
        vec!["oracle", s(&path), "--seed", "11", "--output", "json"],
        vec!["maxp", s(&path), "--output", "json"],
    ] {
        let first = treegap(&args).stdout;
        assert!(!first.is_empty());
        assert_eq!(first, treegap(&args).stdout);
    }
}
