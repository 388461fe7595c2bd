use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::{Command, Output, Stdio};
use std::sync::atomic::{AtomicUsize, Ordering};

use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_domclust"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn run_stdin(args: &[&str], input: &[u8]) -> Output {
    let mut child = bin().args(args).stdin(Stdio::piped()).stdout(Stdio::piped()).stderr(Stdio::piped()).spawn().unwrap();
    child.stdin.take().unwrap().write_all(input).unwrap();
    child.wait_with_output().unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&o.stdout)))
}

fn file(name: &str, text: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("domclust-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    static NEXT: AtomicUsize = AtomicUsize::new(0);
    let p = dir.join(format!("{}-{name}", NEXT.fetch_add(1, Ordering::Relaxed)));
    std::fs::write(&p, text).unwrap();
    p
}

fn gen(family: &str, n: usize) -> PathBuf {
    let o = run(&["gen", "--family", family, "-n", &n.to_string(), "--seed", "7"]);
    assert_eq!(code(&o), 0);
    file(&format!("{family}{n}.gr"), &String::from_utf8(o.stdout).unwrap())
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn path_of_nine_is_solvable_with_two_deletions() {
    let p9 = gen("path", 9);
    let o = run(&["solve", "dcd", s(&p9), "-k", "2", "-d", "1", "--oracle", "--verify"]);
    assert_eq!(code(&o), 0);
    let v = json(&o);
    assert_eq!(v["schema"], 1);
    assert_eq!(v["verdict"], true);
    assert_eq!(v["oracle_verdict"], true);
    assert_eq!(v["verified"], true);
    assert!(v["deleted"].as_array().unwrap().len() <= 2);
    // 1-based ids.
    let all: Vec<u64> = v["dominators"].as_array().unwrap().iter().flat_map(|c| c["component"].as_array().unwrap().iter().map(|x| x.as_u64().unwrap())).collect();
    assert!(all.iter().all(|&x| (1..=9).contains(&x)));
    for key in ["q", "nodes", "branches", "leaves"] {
        assert!(v["stats"][key].is_u64(), "{key}");
    }
}

#[test]
fn four_cycle_needs_depth_three() {
    let c4 = gen("cycle", 4);
    let o = run(&["solve", "eddc", s(&c4), "-k", "2", "-d", "0"]);
    assert_eq!(code(&o), 1);
    assert_eq!(json(&o)["verdict"], false);
    let o = run(&["solve", "eddc", s(&c4), "-k", "3", "-d", "0", "--oracle"]);
    assert_eq!(code(&o), 0);
    let v = json(&o);
    assert_eq!(v["elimination_tree"].as_array().unwrap().len(), 4);
    assert_eq!(v["oracle_verdict"], true);
}

#[test]
fn half_graph_semi_ladder_through_a_pipe() {
    let g = run(&["gen", "--family", "half-graph", "-n", "5", "--seed", "7"]);
    let o = run_stdin(&["semiladder", "-"], &g.stdout);
    assert_eq!(code(&o), 0);
    let text = String::from_utf8(o.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "index 5");
    assert_eq!(lines[1].split_whitespace().count(), 5);
    assert_eq!(lines[2].split_whitespace().count(), 5);
}

#[test]
fn reports_are_byte_identical() {
    let g = gen("er", 9);
    let args = ["solve", "dcd", s(&g), "-k", "1", "-d", "1", "--trace", "--oracle"];
    assert_eq!(run(&args).stdout, run(&args).stdout);
    let a = run(&["gen", "--family", "er", "-n", "12", "--seed", "3"]);
    let b = run(&["gen", "--family", "er", "-n", "12", "--seed", "3"]);
    assert_eq!(a.stdout, b.stdout);
    let c = run(&["gen", "--family", "er", "-n", "12", "--seed", "4"]);
    assert_ne!(a.stdout, c.stdout);
}

#[test]
fn malformed_input_is_a_usage_error() {
    let bad = file("bad.gr", "p 3 1\ne 1 4\n");
    let o = run(&["solve", "dcd", s(&bad), "-k", "1", "-d", "1"]);
    assert_eq!(code(&o), 2);
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("line 2") && !err.contains("panicked"), "{err}");
    assert_eq!(code(&run(&["solve", "dcd", "/nonexistent/x.gr"])), 2);
    assert_eq!(code(&run(&["solve", "tsp", s(&bad)])), 2);
    assert_eq!(code(&run(&["frobnicate"])), 2);
    let p9 = gen("path", 9);
    let td = file("bad.td", "t 1\nn 1 - 1 2 3\n");
    let o = run(&["solve", "dcd", s(&p9), "-k", "1", "-d", "1", "--decomposition", s(&td)]);
    assert_eq!(code(&o), 2);
    let ann = file("bad.ann", "R 1 2 x\n");
    assert_eq!(code(&run(&["solve", "dcd", s(&p9), s(&ann), "-k", "1", "-d", "1"])), 2);
    assert_eq!(code(&run_stdin(&["semiladder", "-"], b"garbage")), 2);
}

#[test]
fn decompose_then_validate_then_solve() {
    let p9 = gen("path", 9);
    let o = run(&["decompose", s(&p9), "-k", "1"]);
    assert_eq!(code(&o), 0);
    let td = file("p9.td", &String::from_utf8(o.stdout).unwrap());
    let v = run(&["validate", s(&p9), s(&td), "-q", "2", "-k", "1"]);
    assert_eq!(code(&v), 0);
    assert_eq!(json(&v)["valid"], true);
    let o = run(&["solve", "dcd", s(&p9), "-k", "2", "-d", "1", "--decomposition", s(&td)]);
    assert_eq!(code(&o), 0);
    let single = file("single.td", "t 1\nn 1 - 1 2 3 4 5 6 7 8 9\n");
    let v = run(&["validate", s(&p9), s(&single), "-q", "2", "-k", "1"]);
    assert_eq!(code(&v), 1);
    assert_eq!(json(&v)["valid"], false);
}

#[test]
fn apd_prints_solution_or_infeasible() {
    let k3 = gen("clique", 3);
    let ann = file("k3.ann", "R 1 2 3\nB 1\n");
    let o = run(&["apd", s(&k3), s(&ann), "-k", "0", "-d", "1"]);
    assert_eq!(code(&o), 0);
    assert_eq!(String::from_utf8(o.stdout).unwrap(), "deleted\ndominators 1\n");
    let p9 = gen("path", 9);
    let o = run(&["apd", s(&p9), "-k", "2", "-d", "1"]);
    assert_eq!(code(&o), 1);
    assert_eq!(String::from_utf8(o.stdout).unwrap(), "infeasible\n");
    let o = run(&["solve", "apd", s(&p9), "-k", "6", "-d", "1"]);
    assert_eq!(code(&o), 0);
}

#[test]
fn oracle_subcommand_and_budget_cap() {
    let c4 = gen("cycle", 4);
    let o = run(&["oracle", "treedepth", s(&c4), "-k", "3"]);
    assert_eq!(json(&o)["treedepth"], 3);
    let o = run(&["oracle", "dcd", s(&c4), "-k", "0", "-d", "1"]);
    assert_eq!(code(&o), 1);
    let p9 = gen("path", 9);
    let o = bin().args(["solve", "dcd", s(&p9), "-k", "2", "-d", "1", "--oracle"]).env("DOMCLUST_ORACLE_MAX_N", "5").output().unwrap();
    assert_eq!(code(&o), 0);
    let v = json(&o);
    assert!(v["oracle_verdict"].is_null());
    assert!(v["oracle_error"].is_string());
}

#[test]
fn unbreakable_solvers() {
    let k5 = gen("clique", 5);
    let o = run(&["dcd-unbreakable", s(&k5), "-q", "2", "-k", "2", "-d", "1"]);
    assert_eq!(code(&o), 0);
    assert_eq!(json(&o)["deleted"].as_array().unwrap().len(), 0);
    let o = run(&["eddc-unbreakable", s(&k5), "-q", "2", "-k", "2", "-d", "1", "--route", "dominator-guessing"]);
    assert_eq!(code(&o), 0);
    let p9 = gen("path", 9);
    let o = run(&["dcd-unbreakable", s(&p9), "-q", "2", "-k", "2", "-d", "1"]);
    assert_eq!(code(&o), 2);
}

#[test]
fn empty_corpus_passes() {
    let cfg = file("empty.toml", "");
    let o = run(&["corpus", s(&cfg)]);
    assert_eq!(code(&o), 0);
    assert_eq!(json(&o)["instances"], 0);
}

#[test]
fn small_corpus_agrees_with_the_oracle() {
    let cfg = file(
        "grid.toml",
        "seed = 5\n[[family]]\nname = \"er\"\np = [0.3, 0.5]\nn = [2, 8]\nk = [0, 1, 2]\nd = [0, 1]\n\n[[family]]\nname = \"cycle\"\nn = [3, 9]\nk = [1]\nd = [1]\nannotate = false\n",
    );
    let o = run(&["corpus", s(&cfg), "--threads", "2"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stdout));
    let v = json(&o);
    assert_eq!(v["instances"], 2 * (7 * 2 * 3 * 2 + 7));
    assert_eq!(v["disagreements"], 0);
    assert_eq!(v["black_white"]["invalid"], 0);
    assert_eq!(v["black_white"]["bound_violations"], 0);
    let recs = v["records"].as_array().unwrap();
    assert!(recs.iter().all(|r| r["agree"] == true && r["black_white"]["valid"] == true));
    assert!(recs.iter().all(|r| r.get("wall_ms").is_none()));
    // Same run with one worker: identical report.
    assert_eq!(run(&["corpus", s(&cfg), "--threads", "1"]).stdout, o.stdout);
}

#[test]
fn injected_fault_is_detected() {
    let o = run(&["corpus", "--inject-fault", "--summary-only"]);
    assert_eq!(code(&o), 1);
    let v = json(&o);
    assert!(v["disagreements"].as_u64().unwrap() > 0);
    let f = &v["failures"][0];
    let minimal = f["minimal"]["graph"].as_str().unwrap();
    let original = f["original"]["graph"].as_str().unwrap();
    assert!(minimal.len() <= original.len());
    assert!(minimal.starts_with("p "));
}

#[test]
fn default_corpus_has_no_disagreement() {
    let o = run(&["corpus", "--summary-only"]);
    assert_eq!(code(&o), 0);
    assert_eq!(json(&o)["disagreements"], 0);
}

#[test]
fn bench_reports_rows() {
    let o = run(&["bench", "--sizes", "5,7", "--reps", "2", "--oracle"]);
    assert_eq!(code(&o), 0);
    let v = json(&o);
    assert_eq!(v["rows"].as_array().unwrap().len(), 2);
    assert!(v["rows"][0]["median_ms"].is_f64());
}
