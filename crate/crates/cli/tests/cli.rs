use std::io::Write;
use std::process::{Command, Output, Stdio};

use serde_json::Value;

fn data(name: &str) -> String {
    format!("{}/../../data/{name}", env!("CARGO_MANIFEST_DIR"))
}

fn padrec(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_padrec"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(args: &[&str]) -> String {
    let out = padrec(args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn json(args: &[&str]) -> Value {
    let mut v = args.to_vec();
    v.push("--json");
    serde_json::from_str(&stdout(&v)).expect("valid JSON")
}

#[test]
fn terms_small_and_large() {
    let fib = data("fibonacci.json");
    assert!(stdout(&["terms", &fib, "--n", "10"]).contains("s(10) = 55 "));
    let large = json(&["terms", &fib, "--large", "1,0,3", "--precision", "6"]);
    let direct = json(&["terms", &fib, "--n-max", "1331", "--precision", "6"]);
    assert_eq!(large["terms"][0]["n"], "1331");
    assert_eq!(large["terms"][0]["value"], direct["terms"][1331]["value"]);
    let inline = json(&[
        "terms",
        "--p",
        "11",
        "--coeffs=-1,-1",
        "--initial",
        "0,1",
        "--n-list",
        "5,6",
    ]);
    assert_eq!(inline["terms"][1]["value"], "8");
}

#[test]
fn configuration_errors() {
    let out = padrec(&[
        "terms",
        "--p",
        "4",
        "--coeffs=-1,-1",
        "--initial",
        "0,1",
        "--n",
        "3",
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("p must be prime"));
    let out = padrec(&[
        "terms",
        "--p",
        "5",
        "--coeffs=1/5,-1",
        "--initial",
        "0,1",
        "--n",
        "3",
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("denominator divisible by 5"));
    let out = padrec(&[
        "terms",
        "--p",
        "5",
        "--coeffs=1,-1",
        "--initial",
        "0",
        "--n",
        "3",
    ]);
    assert_eq!(out.status.code(), Some(2));
    let out = padrec(&["explog", "--p", "5", "--value", "2", "--fn", "log"]);
    assert_eq!(out.status.code(), Some(2));
    let out = padrec(&["terms", "--n", "3"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn classification_lines() {
    let fib = data("fibonacci.json");
    assert!(stdout(&["classify", &fib]).contains("ExactTwisted, 10 functions, q=1, f=1"));
    assert!(stdout(&["classify", &data("doubling.json")]).starts_with("no twisted interpolation"));
    assert!(stdout(&["classify", &data("cubic-shift.json")]).contains("q=9"));
    let v = json(&["classify", &fib, "--p", "2"]);
    assert_eq!(v["function_count"], 6);
    assert_eq!(v["q"], 2);
}

#[test]
fn limits() {
    let fib = data("fibonacci.json");
    let v = json(&["limit", &fib, "--p", "5"]);
    assert!(v["limit"]["digits"]
        .as_array()
        .unwrap()
        .iter()
        .all(|d| d == 0));
    let text = stdout(&[
        "limit",
        &fib,
        "--check-poly",
        "5,5,1",
        "--verify-terms",
        "6",
    ]);
    assert!(text.contains("root verified"));
    assert!(text.contains("for n <= 6: yes"));
    assert!(
        stdout(&["limit", &fib, "--p", "2", "--check-poly", "5,0,3"]).contains("root verified")
    );
    assert!(stdout(&["limit", &fib, "--check-poly", "1,5,5"]).contains("root not verified"));
}

fn pipe_to_verify(input: &str, extra: &[&str]) -> String {
    let mut args = vec!["verify"];
    args.extend_from_slice(extra);
    let mut child = Command::new(env!("CARGO_BIN_EXE_padrec"))
        .args(&args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .spawn()
        .unwrap();
    child
        .stdin
        .take()
        .unwrap()
        .write_all(input.as_bytes())
        .unwrap();
    let out = child.wait_with_output().unwrap();
    assert!(out.status.success());
    String::from_utf8(out.stdout).unwrap()
}

#[test]
fn limit_json_round_trips_through_verify() {
    let fib = data("fibonacci.json");
    for (p, poly) in [
        ("11", "5,5,1"),
        ("11", "1,5,5"),
        ("2", "5,0,3"),
        ("5", "1,0"),
    ] {
        let inline = stdout(&["limit", &fib, "--p", p, "--check-poly", poly]);
        let expected = inline.lines().last().unwrap();
        let doc = stdout(&["limit", &fib, "--p", p, "--check-poly", poly, "--json"]);
        let piped = pipe_to_verify(&doc, &[]);
        assert_eq!(piped.trim(), expected, "p={p} poly={poly}");
        let with_poly = pipe_to_verify(&doc, &["--poly", poly]);
        assert_eq!(with_poly.trim(), expected);
    }
}

#[test]
fn densities() {
    let fib = data("fibonacci.json");
    let text = stdout(&["density", &fib, "--exact"]);
    assert!(text.contains("exact limit: 145/264"));
    assert!(text.contains("bracket check: pass"));
    let text = stdout(&["density", &fib, "--p", "3", "--alpha-max", "5"]);
    assert!(text.contains("profile: 1, 1, 1, 1, 1"));
    let v = json(&["density", &fib, "--exact"]);
    assert_eq!(v["exact_limit"], "145/264");
    assert_eq!(v["profile"]["profile"][0], "7/11");
    assert_eq!(v["exact"]["components"][5]["measure"], "1/264");
    let out = padrec(&["density", &fib, "--p", "2", "--exact"]);
    assert_eq!(out.status.code(), Some(3));
    let out = padrec(&["density", &fib, "--state-budget", "10"]);
    assert_eq!(out.status.code(), Some(3));
}

/// `(parent, child, digit)` triples and boxed node ids from a DOT file.
fn parse_dot(dot: &str) -> (Vec<(String, String, u64)>, Vec<String>) {
    let mut edges = Vec::new();
    let mut boxes = Vec::new();
    for line in dot.lines().map(str::trim) {
        if let Some((lhs, rest)) = line.split_once(" -> ") {
            let (child, label) = rest.split_once(' ').unwrap();
            let digit = label
                .trim_start_matches("[label=\"")
                .trim_end_matches("\"];");
            edges.push((lhs.to_string(), child.to_string(), digit.parse().unwrap()));
        } else if line.contains("shape=box") {
            boxes.push(line.split_whitespace().next().unwrap().to_string());
        }
    }
    (edges, boxes)
}

#[test]
fn tree_dot_matches_figure() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("tree.dot");
    let fib = data("fibonacci.json");
    stdout(&[
        "tree",
        &fib,
        "--alpha-max",
        "3",
        "--dot",
        path.to_str().unwrap(),
    ]);
    let dot = std::fs::read_to_string(&path).unwrap();
    assert_eq!(dot, stdout(&["tree", &fib, "--alpha-max", "3", "--dot"]));
    let (edges, boxes) = parse_dot(&dot);
    let children =
        |node: &str| -> Vec<u64> { edges.iter().filter(|e| e.0 == node).map(|e| e.2).collect() };
    assert_eq!(children("n0_0"), vec![0, 1, 2, 3, 5, 8, 10]);
    assert_eq!(children("n1_5"), vec![0]);
    assert_eq!(children("n2_5"), vec![0, 4, 5, 6, 8, 9]);
    for r in [0, 1, 2, 3, 8, 10] {
        assert!(boxes.contains(&format!("n1_{r}")));
    }
    assert!(!boxes.contains(&"n1_5".to_string()));
    assert!(!boxes.contains(&"n3_1094".to_string()));
    assert!(boxes.contains(&"n3_489".to_string()));

    let text = stdout(&["tree", &fib, "--alpha-max", "2", "--empirical"]);
    assert!(text
        .lines()
        .any(|l| l.trim_start().starts_with("5 (digit 0, mod 11^2)")));
    let v = json(&["tree", &fib, "--alpha-max", "2"]);
    assert_eq!(v["levels"][0]["residues"].as_array().unwrap().len(), 7);
}

#[test]
fn field_functions() {
    let v = json(&["omega", "--p", "11", "--value", "3"]);
    let d = v["omega"]["digits"].as_array().unwrap();
    assert_eq!(d[0], 3);
    let out = stdout(&["explog", "--p", "5", "--value", "5", "--precision", "6"]);
    assert!(out.contains("digits: 1 1 3 3 4 1"));
    let out = stdout(&["explog", "--p", "7", "--value", "8", "--fn", "log"]);
    assert!(out.starts_with("log_p"));
}

#[test]
fn interp_summary() {
    let fib = data("fibonacci.json");
    let text = stdout(&["interp", &fib, "--eval", "5,0,0", "--agreement", "200"]);
    assert!(text.starts_with("q=1, f=1, 10 functions"));
    assert!(text.contains("within bound: true, exact: true"));
    let v = json(&["interp", &data("mixed.json"), "--agreement", "100"]);
    assert_eq!(v["agreement"]["within_bound"], true);
    assert_eq!(v["agreement"]["exact"], false);
}
