//! End-to-end tests against the built binary: exit codes, output formats,
//! JSON round-trips, determinism.

use std::io::Write;
use std::process::{Command, Output, Stdio};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_ratio-cycle"))
}

fn run(args: &[&str], stdin: Option<&str>) -> Output {
    let mut cmd = bin();
    cmd.args(args).stdout(Stdio::piped()).stderr(Stdio::piped());
    match stdin {
        Some(text) => {
            cmd.stdin(Stdio::piped());
            let mut child = cmd.spawn().expect("binary runs");
            child
                .stdin
                .as_mut()
                .expect("stdin piped")
                .write_all(text.as_bytes())
                .expect("write stdin");
            child.wait_with_output().expect("binary exits")
        }
        None => cmd.output().expect("binary exits"),
    }
}

fn stdout_of(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).to_string()
}

fn stderr_of(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).to_string()
}

const TWO_CYCLE: &str = "p ratio 2 2\na 0 1 3 1\na 1 0 1 1\n";

fn write_fixture(name: &str, text: &str) -> std::path::PathBuf {
    let path = std::env::temp_dir().join(format!("ratio-cycle-test-{name}-{}", std::process::id()));
    std::fs::write(&path, text).expect("fixture written");
    path
}

#[test]
fn solve_two_cycle_json() {
    let fixture = write_fixture("fix2", TWO_CYCLE);
    let out = run(
        &[
            "solve",
            "--alg",
            "parametric-greedy",
            "--json",
            fixture.to_str().unwrap(),
        ],
        None,
    );
    assert!(out.status.success());
    let json: serde_json::Value = serde_json::from_str(stdout_of(&out).trim()).expect("valid JSON");
    assert_eq!(json["lambda_star"]["num"], "2");
    assert_eq!(json["lambda_star"]["den"], "1");
    assert_eq!(json["cycle"], serde_json::json!([0, 1, 0]));
    // stderr never carries the solution.
    assert!(stderr_of(&out).is_empty());
    let _ = std::fs::remove_file(fixture);
}

#[test]
fn solve_json_round_trips_and_reverifies() {
    let out = run(&["generate", "--n", "7", "--m", "18", "--seed", "11"], None);
    assert!(out.status.success());
    let graph_text = stdout_of(&out);
    for alg in [
        "brute",
        "lawler",
        "parametric-full",
        "parametric-randomized",
    ] {
        let solved = run(&["solve", "--alg", alg, "--json", "-"], Some(&graph_text));
        assert!(
            solved.status.success(),
            "{alg} failed: {}",
            stderr_of(&solved)
        );
        let json: serde_json::Value =
            serde_json::from_str(stdout_of(&solved).trim()).expect("valid JSON");
        // Re-verify cost_sum / time_sum = λ* from the emitted strings.
        let num: i128 = json["lambda_star"]["num"]
            .as_str()
            .unwrap()
            .parse()
            .unwrap();
        let den: i128 = json["lambda_star"]["den"]
            .as_str()
            .unwrap()
            .parse()
            .unwrap();
        let cost: i128 = json["cost_sum"].as_str().unwrap().parse().unwrap();
        let time: i128 = json["time_sum"].as_str().unwrap().parse().unwrap();
        assert!(time > 0);
        assert_eq!(cost * den, num * time, "{alg}: ratio mismatch");
    }
}

#[test]
fn solvers_agree_via_cli() {
    let out = run(&["generate", "--n", "4", "--m", "12", "--seed", "3"], None);
    let graph_text = stdout_of(&out);
    let brute = run(
        &["solve", "--alg", "brute", "--json", "-"],
        Some(&graph_text),
    );
    let lawler = run(
        &["solve", "--alg", "lawler", "--json", "-"],
        Some(&graph_text),
    );
    let a: serde_json::Value = serde_json::from_str(stdout_of(&brute).trim()).unwrap();
    let b: serde_json::Value = serde_json::from_str(stdout_of(&lawler).trim()).unwrap();
    assert_eq!(a["lambda_star"], b["lambda_star"]);
}

#[test]
fn acyclic_input_exits_2() {
    let out = run(&["solve", "-"], Some("p ratio 3 2\na 0 1 1 1\na 1 2 1 1\n"));
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr_of(&out).contains("Acyclic"));
    assert!(stdout_of(&out).is_empty());
}

#[test]
fn malformed_input_exits_1() {
    let out = run(&["solve", "-"], Some("p ratio 2 1\na 0 5 1 1\n"));
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr_of(&out).contains("line 2"));

    let missing = run(&["solve", "/nonexistent/path/graph.txt"], None);
    assert_eq!(missing.status.code(), Some(1));
}

#[test]
fn karp_requires_unit_times() {
    let out = run(&["solve", "--alg", "karp", "-"], Some(TWO_CYCLE));
    assert!(out.status.success(), "unit times here");
    let nonunit = run(
        &["solve", "--alg", "karp", "-"],
        Some("p ratio 1 1\na 0 0 3 2\n"),
    );
    assert_eq!(nonunit.status.code(), Some(2));
}

#[test]
fn detect_verdicts_across_lambda() {
    for (lambda, expect) in [
        ("3", "negative cycle: true"),
        ("2", "negative cycle: false"),
        ("1", "negative cycle: false"),
    ] {
        let out = run(&["detect", "--lambda", lambda, "-"], Some(TWO_CYCLE));
        assert!(out.status.success());
        assert!(stdout_of(&out).contains(expect), "λ = {lambda}");
    }
    // The no-cycle verdict ships a potential.
    let out = run(&["detect", "--lambda", "1", "-"], Some(TWO_CYCLE));
    assert!(stdout_of(&out).contains("potential:"));
    // JSON form carries the certificate and counters.
    let out = run(&["detect", "--lambda", "2", "--json", "-"], Some(TWO_CYCLE));
    let json: serde_json::Value = serde_json::from_str(stdout_of(&out).trim()).unwrap();
    assert_eq!(json["has_negative_cycle"], serde_json::json!(false));
    assert!(json["potential"].is_array());
    assert!(json["counters"]["comparisons"].as_u64().unwrap() > 0);
}

#[test]
fn oracle_words() {
    for (lambda, expect) in [
        ("2", "equal"),
        ("0", "less"),
        ("100", "greater"),
        ("-7/2", "less"),
    ] {
        let out = run(&["oracle", "--lambda", lambda, "-"], Some(TWO_CYCLE));
        assert!(out.status.success());
        assert_eq!(stdout_of(&out).trim(), expect, "λ = {lambda}");
    }
}

#[test]
fn generate_is_deterministic_and_solvable() {
    let args = ["generate", "--n", "6", "--m", "14", "--seed", "42"];
    let a = run(&args, None);
    let b = run(&args, None);
    assert_eq!(stdout_of(&a), stdout_of(&b));
    let solved = run(&["solve", "--alg", "brute", "-"], Some(&stdout_of(&a)));
    assert!(solved.status.success());
}

#[test]
fn generate_planted_reports_star() {
    let out = run(
        &[
            "generate",
            "--n",
            "5",
            "--m",
            "10",
            "--planted",
            "-2/3",
            "--seed",
            "9",
        ],
        None,
    );
    assert!(out.status.success());
    assert!(stdout_of(&out).contains("lambda_star=-2/3"));
    let solved = run(
        &["solve", "--alg", "parametric-full", "--json", "-"],
        Some(&stdout_of(&out)),
    );
    let json: serde_json::Value = serde_json::from_str(stdout_of(&solved).trim()).unwrap();
    assert_eq!(json["lambda_star"]["num"], "-2");
    assert_eq!(json["lambda_star"]["den"], "3");
}

#[test]
fn bench_rows_and_determinism() {
    let args = [
        "bench", "--n", "30", "--m", "120", "--h", "2,4", "--seed", "5",
    ];
    let a = run(&args, None);
    assert!(a.status.success());
    let text = stdout_of(&a);
    let lines: Vec<&str> = text.trim().lines().collect();
    assert_eq!(lines.len(), 3, "header + 2 rows");
    assert!(lines[0].starts_with("n,m,h,algorithm,wall_ms"));
    // Counter columns identical across runs; wall time may differ.
    let b = run(&args, None);
    let strip = |s: &str| -> Vec<String> {
        s.trim()
            .lines()
            .skip(1)
            .map(|line| {
                let mut cols: Vec<&str> = line.split(',').collect();
                cols.remove(4); // wall_ms
                cols.join(",")
            })
            .collect()
    };
    assert_eq!(strip(&text), strip(&stdout_of(&b)));

    // Single-point sweep yields exactly one record.
    let single = run(
        &["bench", "--n", "20", "--m", "60", "--h", "3", "--seed", "1"],
        None,
    );
    assert_eq!(stdout_of(&single).trim().lines().count(), 2);
}

#[test]
fn selftest_passes_and_fault_injection_trips() {
    let ok = run(&["selftest", "--instances", "6", "--seed", "2"], None);
    assert!(ok.status.success(), "{}", stderr_of(&ok));
    assert!(stdout_of(&ok).contains("6 instances per family"));
    assert!(stdout_of(&ok).contains("all agree"));

    // Default scale finishes far inside its one-minute budget.
    let started = std::time::Instant::now();
    let default_run = run(&["selftest"], None);
    assert!(default_run.status.success());
    assert!(started.elapsed() < std::time::Duration::from_secs(60));

    let tripped = run(&["selftest", "--instances", "3", "--inject-fault"], None);
    assert_eq!(tripped.status.code(), Some(3));
    assert!(stdout_of(&tripped).contains("counterexample"));
    assert!(stdout_of(&tripped).contains("p ratio"));
}
