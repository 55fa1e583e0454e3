use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("tests/data")
        .join(name)
}

fn zvass(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_zvass"))
        .args(args)
        .env_remove("ZVASS_QSOLVER")
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json(o: &Output) -> Value {
    serde_json::from_str(stdout(o).trim()).expect("one JSON document")
}

fn demo() -> String {
    data("demo.zvass").display().to_string()
}

#[test]
fn reachable_target_prints_a_witness() {
    let o = zvass(&["check", "reach", &demo(), "--from", "q0:0", "--to", "q0:4"]);
    assert_eq!(code(&o), 0);
    let text = stdout(&o);
    assert!(text.starts_with("yes\n"));
    assert!(text.contains("q0:0 -> q0:2 -> q0:4"));

    let o = zvass(&[
        "check",
        "reach",
        &demo(),
        "--from",
        "q0:0",
        "--to",
        "q0:4",
        "--format",
        "json",
    ]);
    assert_eq!(code(&o), 0);
    let v = json(&o);
    assert_eq!(v["schema"], 1);
    assert_eq!(v["answer"], "yes");
    let witness = v["witness"].as_array().unwrap();
    assert_eq!(witness.len(), 3);
    assert_eq!(witness[2]["state"], "q0");
    assert_eq!(witness[2]["counters"], serde_json::json!([4]));
    assert_eq!(v["word"], serde_json::json!(["a", "a"]));
}

#[test]
fn unreachable_target_is_no() {
    let o = zvass(&["check", "reach", &demo(), "--from", "q0:0", "--to", "q0:3"]);
    assert_eq!(code(&o), 1);
    assert!(stdout(&o).starts_with("no\n"));
    let o = zvass(&[
        "--format",
        "json",
        "check",
        "reach",
        &demo(),
        "--from",
        "q0:0",
        "--to",
        "q0:3",
    ]);
    assert_eq!(code(&o), 1);
    let v = json(&o);
    assert_eq!(v["answer"], "no");
    assert!(v["witness"].is_null());
}

#[test]
fn json_verdict_schema() {
    let o = zvass(&[
        "--format",
        "json",
        "check",
        "cover",
        &demo(),
        "--from",
        "q0:0",
        "--to",
        "q0:3",
    ]);
    let v = json(&o);
    let mut keys: Vec<&str> = v.as_object().unwrap().keys().map(String::as_str).collect();
    keys.sort_unstable();
    assert_eq!(
        keys,
        [
            "answer",
            "counterexample",
            "query",
            "reason",
            "schema",
            "stats",
            "witness",
            "word"
        ]
    );
    let mut stats: Vec<&str> = v["stats"]
        .as_object()
        .unwrap()
        .keys()
        .map(String::as_str)
        .collect();
    stats.sort_unstable();
    assert_eq!(stats, ["formula_size", "solver_calls", "solver_ms"]);
    assert_eq!(v["query"], "cover");
}

#[test]
fn timeout_is_unknown_with_a_reason() {
    let o = zvass(&[
        "--timeout-ms",
        "1",
        "--format",
        "json",
        "check",
        "reach",
        &demo(),
        "--from",
        "q0:0",
        "--to",
        "q0:4",
    ]);
    assert_eq!(code(&o), 2);
    let v = json(&o);
    assert_eq!(v["answer"], "unknown");
    assert!(v["reason"].as_str().unwrap().contains("timeout"));
}

#[test]
fn resets_in_the_witness() {
    let m = data("reset.zvass").display().to_string();
    let o = zvass(&["check", "reach", &m, "--from", "p:0,0", "--to", "p:0,1"]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("[a r1 b]"));
}

#[test]
fn emit_smt_is_stable_and_matches_the_golden_file() {
    let args = [
        "emit-smt",
        "reach",
        &demo(),
        "--from",
        "q0:0",
        "--to",
        "q0:4",
    ];
    let a = zvass(&args);
    let b = zvass(&args);
    assert_eq!(code(&a), 0);
    assert_eq!(a.stdout, b.stdout);
    let golden = std::fs::read_to_string(data("demo_reach.smt2")).unwrap();
    assert_eq!(stdout(&a), golden);
}

#[test]
fn simulate_the_empty_word_echoes_the_source() {
    let o = zvass(&["simulate", &demo(), "--from", "q0:7"]);
    assert_eq!(code(&o), 0);
    assert_eq!(stdout(&o), "q0:7\n");
    let o = zvass(&["simulate", &demo(), "--from", "q0:0", "a", "a", "a"]);
    assert_eq!(stdout(&o), "q0:6\n");
    let o = zvass(&["simulate", &demo(), "--from", "q0:0", "b"]);
    assert_eq!(code(&o), 11);
}

#[test]
fn oracle_reports_explored_states() {
    let o = zvass(&[
        "oracle",
        "reach",
        &demo(),
        "--from",
        "q0:0",
        "--to",
        "q0:6",
        "--max-len",
        "5",
    ]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("explored 4 configurations"));
    let o = zvass(&[
        "--format",
        "json",
        "oracle",
        "reach",
        &demo(),
        "--from",
        "q0:0",
        "--to",
        "q0:5",
        "--max-len",
        "5",
    ]);
    assert_eq!(code(&o), 2);
    let v = json(&o);
    assert_eq!(v["found"], false);
    assert_eq!(v["explored"], 6);
}

#[test]
fn errors_have_their_own_exit_codes() {
    assert_eq!(code(&zvass(&["check"])), 10);
    assert_eq!(code(&zvass(&["frobnicate"])), 10);
    assert_eq!(code(&zvass(&["--help"])), 0);
    let o = zvass(&[
        "check",
        "reach",
        &demo(),
        "--from",
        "nowhere:0",
        "--to",
        "q0:1",
    ]);
    assert_eq!(code(&o), 11);
    let o = zvass(&[
        "check",
        "reach",
        &demo(),
        "--from",
        "q0:0,0",
        "--to",
        "q0:1",
    ]);
    assert_eq!(code(&o), 11);
    let o = zvass(&[
        "check",
        "reach",
        "/nonexistent.zvass",
        "--from",
        "q:0",
        "--to",
        "q:1",
    ]);
    assert_eq!(code(&o), 11);
    let o = zvass(&[
        "--solver-cmd",
        "/nonexistent/solver",
        "check",
        "reach",
        &demo(),
        "--from",
        "q0:0",
        "--to",
        "q0:2",
    ]);
    assert_eq!(code(&o), 12);
}

#[test]
fn generated_instances_agree_with_their_notes() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().display().to_string();
    let mut queries = Vec::new();
    for (kind, seed) in [("random", "1"), ("diophantine", "2"), ("random", "5")] {
        let name = format!("{kind}{seed}");
        let o = zvass(&["gen", kind, "--out", &out, "--name", &name, "--seed", seed]);
        assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
        let files = stdout(&o);
        assert!(files.lines().last().unwrap().ends_with(".query"));
        queries.push(name);
    }
    let paths: Vec<String> = queries
        .iter()
        .map(|q| dir.path().join(format!("{q}.query")).display().to_string())
        .collect();
    let mut args = vec!["--format", "json", "check", "--jobs", "3", "--batch"];
    args.extend(paths.iter().map(String::as_str));
    let o = zvass(&args);
    let lines: Vec<Value> = stdout(&o)
        .lines()
        .map(|l| serde_json::from_str(l).unwrap())
        .collect();
    assert_eq!(lines.len(), 3);
    for (v, (name, path)) in lines.iter().zip(queries.iter().zip(&paths)) {
        assert_eq!(v["input"], path.as_str());
        let note = std::fs::read_to_string(dir.path().join(format!("{name}.truth"))).unwrap();
        let expected = note
            .lines()
            .find_map(|l| l.strip_prefix("expected: "))
            .unwrap();
        match expected {
            "yes" => assert_eq!(v["answer"], "yes", "{name}"),
            // brute force only bounds the search
            "unknown" => assert_ne!(v["answer"], "unknown", "{name}"),
            other => assert_eq!(v["answer"], other, "{name}"),
        }
    }
}

#[test]
fn pcp_instance_simulates_but_is_not_decided() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().display().to_string();
    let o = zvass(&["gen", "pcp", "--out", &out]);
    assert_eq!(code(&o), 0);
    let m = dir.path().join("pcp.zvass").display().to_string();
    let mut word: Vec<String> = "u1 u1 u0 v1 v1 u0 u1 v0 v0 u1 u1 u0 v1 v1 u0 v1 v0 v0"
        .split(' ')
        .map(String::from)
        .collect();
    word.extend(std::iter::repeat_n("sep".to_string(), 412));
    let mut args = vec!["simulate", m.as_str(), "--from", "q0:0,0"];
    args.extend(word.iter().map(String::as_str));
    let o = zvass(&args);
    assert!(stdout(&o).lines().any(|l| l == "qf:0,0"));
    let o = zvass(&["check", "reach", &m, "--from", "q0:0,0", "--to", "qf:0,0"]);
    assert_eq!(code(&o), 11);
}

#[test]
fn psi_size_table() {
    let o = zvass(&[
        "--format",
        "json",
        "stats",
        "psi-size",
        &data("reset.zvass").display().to_string(),
        "--max-k",
        "4",
    ]);
    assert_eq!(code(&o), 0);
    let v = json(&o);
    let rows = v["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 3);
    assert_eq!(rows[0]["k"], 2);
    let unary: Vec<u64> = rows.iter().map(|r| r["unary"].as_u64().unwrap()).collect();
    assert!(unary.windows(2).all(|w| w[0] < w[1]));
}
