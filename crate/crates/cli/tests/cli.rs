use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_braidtri"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn schema(command: &str) -> Value {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("schemas")
        .join(format!("{command}.json"));
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

/// Runs with `--format json`, validates against the command's schema and
/// returns the results array.
fn json_results(args: &[&str], expect_code: i32) -> Vec<Value> {
    let mut full = args.to_vec();
    full.extend(["--format", "json"]);
    let out = run(&full);
    assert_eq!(
        out.status.code(),
        Some(expect_code),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let doc: Value = serde_json::from_str(&stdout(&out)).unwrap();
    let validator = jsonschema::validator_for(&schema(args[0])).unwrap();
    let errors: Vec<String> = validator
        .iter_errors(&doc)
        .map(|e| format!("{} at {}", e, e.instance_path()))
        .collect();
    assert!(errors.is_empty(), "{errors:#?}");
    assert_eq!(doc["command"], args[0]);
    doc["results"].as_array().unwrap().clone()
}

#[test]
fn build_counts() {
    let r = json_results(&["build", "--p", "3"], 0);
    assert_eq!(r[0]["tets"], 7);
    assert_eq!(r[0]["gluings"], 14);
    let r = json_results(&["build", "--word", "RRRLLR"], 0);
    assert_eq!(r[0]["tets"], 10);
    assert_eq!(r[0]["cusps"], 2);
    let r = json_results(&["build", "--p", "1..6"], 0);
    let tets: Vec<u64> = r.iter().map(|x| x["tets"].as_u64().unwrap()).collect();
    assert_eq!(tets, [3, 5, 7, 9, 11, 13]);
}

#[test]
fn usage_errors_exit_one() {
    for args in [
        &["build", "--p", "0"][..],
        &["build"],
        &["build", "--p", "2", "--word", "RL"],
        &["solve", "--p", "5..2"],
        &["build", "--word", "RXL"],
        &["solve", "--file", "/nonexistent/tri.json"],
    ] {
        let out = run(args);
        assert_eq!(out.status.code(), Some(1), "{args:?}");
        assert!(!out.stderr.is_empty());
    }
}

#[test]
fn help_exits_zero() {
    assert_eq!(run(&["--help"]).status.code(), Some(0));
    assert_eq!(run(&["solve", "--help"]).status.code(), Some(0));
}

#[test]
fn solve_csv_sweep_is_geometric() {
    let out = run(&["solve", "--p", "1..12", "--format", "csv"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    let mut lines = text.lines();
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    let verdict = header.iter().position(|h| *h == "verdict").unwrap();
    let volume = header.iter().position(|h| *h == "volume").unwrap();
    let rows: Vec<Vec<&str>> = lines.map(|l| l.split(',').collect()).collect();
    assert_eq!(rows.len(), 12);
    let mut last = 0.0;
    for row in rows {
        assert_eq!(row[verdict], "geometric");
        let v: f64 = row[volume].parse().unwrap();
        assert!(v > last);
        last = v;
    }
}

#[test]
fn solve_json_and_degenerate_exit() {
    let r = json_results(&["solve", "--p", "1"], 0);
    assert!((r[0]["volume"].as_f64().unwrap() - 2.828122088331).abs() < 1e-10);
    let r = json_results(&["solve", "--word", "RRRR"], 2);
    assert_eq!(r[0]["verdict"], "degenerate");
    assert!(r[0]["volume"].is_null());
    let r = json_results(
        &["solve", "--word", "RRRLLR", "--starts", "4", "--seed", "3"],
        0,
    );
    assert!(r[0]["multistart"]["spread"].as_f64().unwrap() < 1e-8);
}

#[test]
fn file_input_round_trips() {
    let dir = std::env::temp_dir().join(format!("braidtri-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("p2.json");
    let built = run(&[
        "build",
        "--p",
        "2",
        "--format",
        "json",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(built.status.code(), Some(0));
    assert!(built.stdout.is_empty());
    let r = json_results(&["solve", "--file", path.to_str().unwrap()], 0);
    let direct = json_results(&["solve", "--p", "2"], 0);
    assert!(
        (r[0]["volume"].as_f64().unwrap() - direct[0]["volume"].as_f64().unwrap()).abs() < 1e-10
    );
    std::fs::remove_dir_all(dir).unwrap();
}

#[test]
fn other_commands_validate() {
    let r = json_results(&["simplify", "--p", "1..4"], 0);
    assert!(r.iter().all(|x| x["matches_build_tau"] == true));
    let r = json_results(&["angles", "--p", "2"], 0);
    assert_eq!(r[0]["interior_point"]["feasible"], true);
    json_results(&["angles", "--word", "RRRR"], 2);
    let r = json_results(&["shapes", "--p", "3"], 0);
    assert_eq!(r[0]["shapes"].as_array().unwrap().len(), 7);
    let r = json_results(&["twobridge", "--word", "R3L2R1"], 0);
    assert_eq!(r[0]["word"], "RRRLLR");
}

#[test]
fn braid_check_and_tamper_hook() {
    let r = json_results(&["braid-check", "--p", "1..20"], 0);
    assert_eq!(r.len(), 20);
    for (i, x) in r.iter().enumerate() {
        assert_eq!(x["ok"], true);
        assert_eq!(x["exponent_sum"], i as i64 + 12);
    }
    let r = json_results(&["braid-check", "--p", "4", "--tamper-step", "5"], 1);
    assert_eq!(r[0]["pretzel_chain"]["failed_step"], 5);
    let text = stdout(&run(&["braid-check", "--p", "4", "--tamper-step", "5"]));
    assert!(text.contains("FAILED at step 5"));
}

#[test]
fn output_is_deterministic() {
    for args in [
        &["solve", "--p", "1..6", "--format", "json"][..],
        &["shapes", "--word", "RLRLR", "--format", "csv"],
        &["solve", "--p", "3", "--starts", "5", "--seed", "11"],
    ] {
        let a = run(args);
        let b = run(args);
        assert_eq!(a.stdout, b.stdout, "{args:?}");
    }
}
