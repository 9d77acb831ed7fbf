use std::fs;
use std::process::{Command, Output};

use tempfile::TempDir;

const RUNNING: &str = include_str!("data/running_example.net");

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_stablebmc"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn net_file(dir: &TempDir) -> String {
    let path = dir.path().join("running.net");
    fs::write(&path, RUNNING).unwrap();
    path.to_str().unwrap().to_string()
}

fn json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).expect("json report")
}

#[test]
fn deadlock_report() {
    let dir = TempDir::new().unwrap();
    let net = net_file(&dir);
    let out = run(&["check", "--net", &net, "--mode", "deadlock", "--bounds", "1..5", "--json"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["verdict"], "COUNTEREXAMPLE");
    assert_eq!(v["bound_found"], 1);
    assert_eq!(
        v["counterexample"]["execution"],
        serde_json::json!([["p1", "p2"], ["t5"], ["p1", "p5"]])
    );

    let out = run(&["check", "--net", &net, "--mode", "deadlock", "--semantics", "interleaving"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("verdict: COUNTEREXAMPLE\n"), "{text}");
    assert!(text.contains("M1 = {p1, p5}"), "{text}");
}

#[test]
fn exit_codes() {
    let dir = TempDir::new().unwrap();
    let net = net_file(&dir);
    let none = run(&["check", "--net", &net, "--mode", "reach", "--target", "p2 & p5", "--bounds", "1..6"]);
    assert_eq!(none.status.code(), Some(1));

    let usage = run(&["check", "--net", &net, "--mode", "reach"]);
    assert_eq!(usage.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&usage.stderr).contains("--target"));
    for bad in [
        vec!["check", "--net", "/nonexistent.net", "--mode", "deadlock"],
        vec!["check", "--net", &net, "--mode", "ltl", "--formula", "F q"],
        vec!["check", "--net", &net, "--mode", "ltl", "--formula", "F ("],
        vec!["check", "--net", &net, "--mode", "deadlock", "--bounds", "3..1"],
        vec!["check", "--net", &net, "--mode", "deadlock", "--semantics", "both"],
        vec!["check", "--net", &net, "--mode", "deadlock", "--init", "p1 & !p1"],
    ] {
        let out = run(&bad);
        if bad.contains(&"--init") {
            // an unsatisfiable initial condition just admits no execution
            assert_eq!(out.status.code(), Some(1));
        } else {
            assert_eq!(out.status.code(), Some(2), "{bad:?}");
        }
    }

    let budget = run(&[
        "check", "--net", &net, "--mode", "reach", "--target", "p2 & p5", "--solver-budget", "0",
    ]);
    assert_eq!(budget.status.code(), Some(3));
    assert_eq!(String::from_utf8_lossy(&budget.stdout).lines().next(), Some("verdict: BUDGET_EXCEEDED"));
}

#[test]
fn ltl_and_initial_conditions() {
    let dir = TempDir::new().unwrap();
    let net = net_file(&dir);
    let out = run(&["check", "--net", &net, "--mode", "ltl", "--formula", "F p5", "--bounds", "1..4", "--json"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["bound_found"], 2);
    assert_eq!(v["counterexample"]["shape"], "loop");
    assert_eq!(v["counterexample"]["loop_at"], 0);
    assert_eq!(v["negated_formula"], "(false R !p5)");

    // from {p3} only t1 fires, ending in {p1}
    let out = run(&[
        "check", "--net", &net, "--mode", "reach", "--init", "p3 & !p1 & !p2 & !p4 & !p5", "--target",
        "p1 & p5", "--json",
    ]);
    assert_eq!(out.status.code(), Some(1), "{}", String::from_utf8_lossy(&out.stdout));

    let out = run(&[
        "check", "--net", &net, "--mode", "reach", "--init", "p1 & p2 & !p3 & !p4 & !p5", "--target",
        "p1 & p2", "--bounds", "0..0", "--json",
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["counterexample"]["execution"], serde_json::json!([["p1", "p2"]]));
}

#[test]
fn dump_is_byte_stable() {
    let dir = TempDir::new().unwrap();
    let net = net_file(&dir);
    let dump = |name: &str, extra: &[&str]| -> String {
        let path = dir.path().join(name);
        let mut args = vec!["check", "--net", &net, "--mode", "deadlock", "--bounds", "1..1", "--dump"];
        args.push(path.to_str().unwrap());
        args.extend_from_slice(extra);
        assert_eq!(run(&args).status.code(), Some(0));
        fs::read_to_string(path).unwrap()
    };
    let a = dump("a.lp", &[]);
    let b = dump("b.lp", &[]);
    assert_eq!(a, b);
    let golden = include_str!("data/running_n1.lp");
    for line in golden.lines() {
        assert!(a.lines().any(|l| l == line), "missing {line}");
    }
    assert!(a.contains("live :- p1(1), p2(1).\n"));
    assert!(a.ends_with(":- live.\n"));
    let inter = dump("c.lp", &["--semantics", "interleaving"]);
    assert!(inter.contains(":- 2 {t1(0), t2(0), t3(0), t4(0), t5(0)}.\n"));
    assert_eq!(inter.lines().count(), a.lines().count() + 1);
}

#[test]
fn generated_benchmarks() {
    let dir = TempDir::new().unwrap();
    let path = dir.path().join("dp2.net");
    let p = path.to_str().unwrap();
    assert_eq!(run(&["gen", "dp", "2", "-o", p]).status.code(), Some(0));
    let text = fs::read_to_string(&path).unwrap();
    assert_eq!(text.lines().filter(|l| l.starts_with("place ")).count(), 8);
    assert_eq!(text.lines().filter(|l| l.starts_with("trans ")).count(), 6);
    assert_ne!(run(&["gen", "dp", "1", "-o", p]).status.code(), Some(0));

    let path6 = dir.path().join("dp6.net");
    assert_eq!(run(&["gen", "dp", "6", "-o", path6.to_str().unwrap()]).status.code(), Some(0));
    let out = run(&["check", "--net", path6.to_str().unwrap(), "--mode", "deadlock", "--json"]);
    assert_eq!(json(&out)["bound_found"], 1);
}
