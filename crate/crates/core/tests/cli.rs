mod common;

use std::process::{Command, Output};

use common::{fixture, solver};

fn dsverify(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dsverify")).args(args).output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

#[test]
fn verify_sample_is_violated() {
    if solver().is_none() {
        return;
    }
    let data = fixture("sample10.csv");
    let props = fixture("spec");
    let params = fixture("params.txt");
    let out = dsverify(&[
        "verify",
        "-d",
        data.to_str().unwrap(),
        "-p",
        props.to_str().unwrap(),
        "--params-file",
        params.to_str().unwrap(),
        "-b",
        "balanced",
        "--format",
        "csv",
    ]);
    assert_eq!(out.status.code(), Some(1), "{}", String::from_utf8_lossy(&out.stderr));
    let text = stdout(&out);
    let verdicts: Vec<(&str, &str)> = text
        .lines()
        .skip(1)
        .map(|l| {
            let mut f = l.split(',');
            (f.next().unwrap(), f.next().unwrap())
        })
        .collect();
    assert_eq!(
        verdicts,
        [("balanced", "violated"), ("cardinality", "violated"), ("normalized", "holds"), ("tautology", "holds")]
    );
}

#[test]
fn verify_reports_json_and_models() {
    if solver().is_none() {
        return;
    }
    let data = fixture("sample10.csv");
    let out = dsverify(&["verify", "-d", data.to_str().unwrap(), "-b", "min-cardinality", "--param", "T=5", "--format", "structured", "--model"]);
    assert_eq!(out.status.code(), Some(0));
    let json: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(json["overall"], "holds");
    assert_eq!(json["properties"][0]["property"], "min-cardinality");
    assert!(json["properties"][0]["model"].as_str().unwrap().contains("define-fun m"));
}

#[test]
fn array_coverage_is_inconclusive() {
    if solver().is_none() {
        return;
    }
    let data = fixture("sample10.csv");
    let out = dsverify(&[
        "verify",
        "-d",
        data.to_str().unwrap(),
        "-b",
        "coverage-array",
        "--param",
        "delta=1",
        "--param",
        "min=-1",
        "--param",
        "max=1",
        "--timeout",
        "1",
    ]);
    assert_eq!(out.status.code(), Some(2), "{}", stdout(&out));
    assert!(stdout(&out).contains("overall: inconclusive"));
}

#[test]
fn encode_single_row() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("one.csv");
    std::fs::write(&path, "x,y,label\n0.5,-2,1\n").unwrap();
    let out = dsverify(&["encode", "-d", path.to_str().unwrap(), "--header"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.starts_with("(set-logic ALL)"), "{text}");
    for line in ["(assert (= m 1))", "(assert (= (select (select D 0) 1) (- 2.0)))", "(assert (= l 1))"] {
        assert!(text.contains(line), "missing {line} in\n{text}");
    }
    assert!(text.trim_end().ends_with("(check-sat)"));

    let target = dir.path().join("one.smt2");
    let out = dsverify(&["encode", "-d", path.to_str().unwrap(), "--header", "-o", target.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(std::fs::read_to_string(target).unwrap(), text);
}

#[test]
fn check_spec_flags_the_contradiction() {
    if solver().is_none() {
        return;
    }
    let dir = fixture("contradiction");
    let out = dsverify(&["check-spec", "-p", dir.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    let text = stdout(&out);
    assert!(text.contains("at_most_20 & more_than_30: CONFLICT"), "{text}");
    assert!(text.contains("specification: inadmissible"));

    let out = dsverify(&["check-spec", "-b", "min-cardinality", "-b", "minmax-normalized", "--param", "T=10", "--param", "min=-1", "--param", "max=1"]);
    assert_eq!(out.status.code(), Some(0), "{}", stdout(&out));
}

#[test]
fn bench_writes_a_series() {
    if solver().is_none() {
        return;
    }
    let out = dsverify(&["bench", "--synthetic", "25", "--step", "10", "-b", "min-cardinality", "--param", "T=20"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let text = stdout(&out);
    let rows: Vec<Vec<&str>> = text.lines().map(|l| l.split(',').collect()).collect();
    assert_eq!(rows[0], ["m", "property", "verdict", "seconds"]);
    let got: Vec<(&str, &str)> = rows[1..].iter().map(|r| (r[0], r[2])).collect();
    assert_eq!(got, [("10", "violated"), ("20", "holds"), ("25", "holds")]);
}

#[test]
fn usage_errors_exit_3() {
    let missing = dsverify(&["verify", "-d", "/nonexistent/data.csv", "-b", "no-contradictions"]);
    assert_eq!(missing.status.code(), Some(3));
    assert!(!missing.stderr.is_empty());

    assert_eq!(dsverify(&["verify", "--bogus-flag"]).status.code(), Some(3));

    let data = fixture("sample10.csv");
    let no_solver = dsverify(&["verify", "-d", data.to_str().unwrap(), "-b", "no-contradictions", "--solver", "/nonexistent/solver"]);
    assert_eq!(no_solver.status.code(), Some(3));

    let no_props = dsverify(&["verify", "-d", data.to_str().unwrap()]);
    assert_eq!(no_props.status.code(), Some(3));

    let unreadable = dsverify(&["check-spec", "-p", "/nonexistent/props"]);
    assert_eq!(unreadable.status.code(), Some(3));
}
