use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use besat_cli::report::{FuzzReport, OracleReport, RunReport};
use serde_json::Value;

fn besat(args: &[&str], cache: Option<&Path>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_besat"));
    cmd.args(args).env_remove(besat_cli::cache::ENV);
    if let Some(dir) = cache {
        cmd.env(besat_cli::cache::ENV, dir);
    }
    cmd.output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

fn check_json(file: &str) -> (i32, RunReport) {
    let o = besat(&["check", "--json", file], None);
    (
        code(&o),
        serde_json::from_str(&stdout(&o)).expect("report parses"),
    )
}

#[test]
fn check_false_is_unsat() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "f.be", "false\n");
    let (c, r) = check_json(&f);
    assert_eq!(c, 1);
    assert_eq!(r.verdict, "unsat");
    assert!(r.witness.is_none());
}

#[test]
fn check_pi_and_not_pi_is_unsat() {
    let o = besat(&["check", "-e", "pi & ~pi"], None);
    assert_eq!(code(&o), 1);
    assert_eq!(stdout(&o).trim(), "unsat");
}

#[test]
fn check_example_one() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "ex1.be", "<B><B><E>(pi & p)");
    let (c, r) = check_json(&f);
    assert_eq!(c, 0);
    assert_eq!(r.verdict, "sat");
    assert_eq!(r.steps, 1);
    let w = r.witness.unwrap();
    assert!(w.verified);
    assert_eq!(w.points.len(), 4);
    assert!(w.points[1].contains(&"p".to_string()));
    assert_eq!(r.signature.user, 1);
    assert_eq!(r.signature.full, 1 + 12 + 3);
}

#[test]
fn report_round_trips() {
    let o = besat(
        &["check", "--json", "-e", "<B>(pi & p) & <E>(pi & ~p)"],
        None,
    );
    let text = stdout(&o);
    let r: RunReport = serde_json::from_str(&text).unwrap();
    let again: Value = serde_json::to_value(&r).unwrap();
    assert_eq!(again, serde_json::from_str::<Value>(&text).unwrap());
}

#[test]
fn inconclusive_exits_two() {
    let o = besat(
        &["check", "--max-states", "3", "-e", "<B><B><E>(pi & p)"],
        None,
    );
    assert_eq!(code(&o), 2);
    assert!(stdout(&o).starts_with("inconclusive"));
}

#[test]
fn parse_and_usage_errors_exit_64() {
    assert_eq!(code(&besat(&["check", "-e", "p & "], None)), 64);
    assert_eq!(code(&besat(&["check", "-e", "p#1"], None)), 64);
    assert_eq!(code(&besat(&["check", "--bogus"], None)), 64);
    assert_eq!(code(&besat(&[], None)), 64);
}

#[test]
fn missing_file_exits_66() {
    let o = besat(&["check", "/nonexistent/f.be"], None);
    assert_eq!(code(&o), 66);
}

#[test]
fn unsound_mode_is_labelled() {
    let o = besat(
        &[
            "check",
            "--unsound-m",
            "1",
            "--json",
            "-e",
            "<B><B><E>(pi & p)",
        ],
        None,
    );
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["unsound_mode"], 1);
    let o = besat(
        &["normalize", "--unsound-m", "1", "-e", "<B><B><E>(pi & p)"],
        None,
    );
    assert!(stdout(&o).starts_with("unsound-mode"));
}

#[test]
fn normalize_shallow_input_has_no_steps() {
    let o = besat(
        &["normalize", "--json", "-e", "<B><E>(pi & p) | ~<E>pi"],
        None,
    );
    assert_eq!(code(&o), 0);
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["steps"].as_array().unwrap().len(), 0);
}

#[test]
fn normalize_example_one_and_idempotence() {
    let o = besat(&["normalize", "--json", "-e", "<B><B><E>(pi & p)"], None);
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    let steps = v["steps"].as_array().unwrap();
    assert_eq!(steps.len(), 1);
    assert_eq!(steps[0]["m"], 12);
    let star = v["star"].as_str().unwrap().to_string();
    let o = besat(&["normalize", "--json", "-e", &star], None);
    assert_eq!(code(&o), 0);
    let w: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(w["steps"].as_array().unwrap().len(), 0);
}

#[test]
fn eval_pi_on_a_point() {
    let dir = tempfile::tempdir().unwrap();
    let s = write(dir.path(), "s.json", r#"{"points": [["p"], [], ["q"]]}"#);
    for lo in 0..3 {
        let i = format!("{lo},{lo}");
        assert_eq!(
            code(&besat(&["eval", "-e", "pi", "-s", &s, "-i", &i], None)),
            0
        );
    }
    assert_eq!(code(&besat(&["eval", "-e", "pi", "-s", &s], None)), 1);
    assert_eq!(
        code(&besat(&["eval", "-e", "pi", "-s", &s, "-i", "2,1"], None)),
        64
    );
    let bad = write(dir.path(), "bad.json", "{\"points\": []}");
    assert_eq!(code(&besat(&["eval", "-e", "pi", "-s", &bad], None)), 64);
}

#[test]
fn oracle_example_one() {
    let o = besat(
        &[
            "oracle",
            "--json",
            "--max-points",
            "4",
            "-e",
            "<B><B><E>(pi & p)",
        ],
        None,
    );
    assert_eq!(code(&o), 0);
    let r: OracleReport = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(
        r.points.unwrap(),
        vec![vec![], vec!["p".to_string()], vec![], vec![]]
    );
    let o = besat(
        &["oracle", "--max-points", "3", "-e", "<B><B><E>(pi & p)"],
        None,
    );
    assert_eq!(code(&o), 1);
}

#[test]
fn fuzz_seed_42_agrees() {
    let dir = tempfile::tempdir().unwrap();
    let art = dir.path().join("bundles");
    let o = besat(
        &[
            "fuzz",
            "--json",
            "--seed",
            "42",
            "--count",
            "100",
            "--max-points",
            "4",
            "--artifacts",
            art.to_str().unwrap(),
        ],
        None,
    );
    assert_eq!(code(&o), 0, "{}", stdout(&o));
    let r: FuzzReport = serde_json::from_str(&stdout(&o)).unwrap();
    assert!(r.disagreements.is_empty());
    assert_eq!(r.sat + r.unsat + r.inconclusive, 100);
    assert_eq!(fs::read_dir(&art).unwrap().count(), 0);
}

#[test]
fn cache_reuses_verdicts() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["check", "--json", "-e", "<B>(pi & p) & <E>(pi & q)"];
    let first: RunReport = serde_json::from_str(&stdout(&besat(&args, Some(dir.path())))).unwrap();
    assert!(!first.cached);
    assert_eq!(fs::read_dir(dir.path()).unwrap().count(), 1);
    let o = besat(&args, Some(dir.path()));
    assert_eq!(code(&o), 0);
    let second: RunReport = serde_json::from_str(&stdout(&o)).unwrap();
    assert!(second.cached);
    assert_eq!(second.witness, first.witness);
}

#[test]
fn cache_rejects_a_forged_witness() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["check", "--json", "-e", "<B>(pi & p)"];
    besat(&args, Some(dir.path()));
    let entry = fs::read_dir(dir.path())
        .unwrap()
        .next()
        .unwrap()
        .unwrap()
        .path();
    let mut r: RunReport = serde_json::from_str(&fs::read_to_string(&entry).unwrap()).unwrap();
    r.witness.as_mut().unwrap().points = vec![vec![], vec![]];
    fs::write(&entry, serde_json::to_string(&r).unwrap()).unwrap();
    let again: RunReport = serde_json::from_str(&stdout(&besat(&args, Some(dir.path())))).unwrap();
    assert!(!again.cached);
    assert!(again.witness.unwrap().points[0].contains(&"p".to_string()));
}
