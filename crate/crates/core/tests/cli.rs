mod common;

use std::process::{Command, Output};

use common::corpus_dir;

fn kiwi(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_kiwi-verify")).args(args).current_dir(corpus_dir()).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn exit_codes_follow_the_verdict() {
    assert_eq!(kiwi(&["counting_loop.c"]).status.code(), Some(0));
    assert_eq!(kiwi(&["exit_count.c"]).status.code(), Some(10));
    assert_eq!(kiwi(&["--mode", "kind", "--max-k", "3", "counting_loop.c"]).status.code(), Some(2));
    assert_eq!(kiwi(&["--bogus", "counting_loop.c"]).status.code(), Some(64));
    assert_eq!(kiwi(&["missing.c"]).status.code(), Some(64));
}

#[test]
fn counterexample_is_printed_as_a_trace() {
    let o = kiwi(&["exit_count.c"]);
    let out = stdout(&o);
    assert!(out.starts_with("UNSAFE k=3\n"), "{out}");
    assert!(out.contains("assertion violated at line"), "{out}");
    assert!(out.contains("x=3"), "{out}");
}

#[test]
fn json_record_and_invariant_dump() {
    let o = kiwi(&["--json", "counting_loop.c"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["verdict"], "safe");
    assert_eq!(v["k"], 1);
    let inv: Vec<&str> = v["invariant"].as_array().unwrap().iter().map(|l| l.as_str().unwrap()).collect();
    assert!(inv.iter().any(|l| l.ends_with("x#lb1 <= 10")), "{inv:?}");

    let out = stdout(&kiwi(&["--dump-invariant", "counting_loop.c"]));
    assert!(out.contains("-x#lb1 <= 0"), "{out}");
}

#[test]
fn enumeration_is_gated_on_wide_variables() {
    assert_eq!(kiwi(&["--infer", "enum", "counting_loop.c"]).status.code(), Some(64));
    assert_eq!(kiwi(&["--infer", "enum", "m_count_u8.c"]).status.code(), Some(0));
    assert_eq!(kiwi(&["--infer", "enum", "--force", "counting_loop.c"]).status.code(), Some(0));
}

#[test]
fn witness_file_holds_the_invariant() {
    let dir = tempfile::tempdir().unwrap();
    let w = dir.path().join("w.txt");
    let o = kiwi(&["--witness", w.to_str().unwrap(), "counting_loop.c"]);
    assert_eq!(o.status.code(), Some(0));
    let text = std::fs::read_to_string(&w).unwrap();
    assert!(text.starts_with("k=1\n"), "{text}");
}

#[test]
fn external_solver_round_trip() {
    let exe = env!("CARGO_BIN_EXE_kiwi-verify");
    let solver = format!("external:{exe} sat-server");
    assert_eq!(kiwi(&["--solver", &solver, "counting_loop.c"]).status.code(), Some(0));
    assert_eq!(kiwi(&["--solver", &solver, "exit_count.c"]).status.code(), Some(10));
}
