//! End-to-end checks of the `scfact` binary.
//!
//! Demo goldens live in tests/golden; regenerate with SCFACT_UPDATE_GOLDEN=1.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use scfact::cli::{ProblemFile, Report};
use serde_json::Value;

const DEMOS: [&str; 6] = ["fibonacci", "chebyshev", "bessel", "z7-periodic", "z8-nonrecursive", "boolean"];

/// (problem file, command) pairs that are expected to succeed.
const RUNS: &[(&str, &str)] = &[
    ("fibonacci.json", "solve"),
    ("fibonacci.json", "eigenseq"),
    ("fibonacci.json", "factorize"),
    ("fibonacci.json", "periodic"),
    ("fibonacci.json", "roots"),
    ("bessel_sampled.json", "solve"),
    ("bessel_sampled.json", "eigenseq"),
    ("c1_periodic.json", "periodic"),
    ("c2_degenerate.json", "periodic"),
    ("poincare_perron.json", "factorize"),
    ("poincare_perron.json", "pp"),
    ("sqrt2_roots.json", "roots"),
    ("sqrt2_roots.json", "factorize"),
    ("three_stage_mod11.json", "factorize"),
    ("three_stage_mod11.json", "roots"),
    ("z7_periodic.json", "periodic"),
    ("z8_nonrecursive.json", "nonrecursive"),
];

fn scfact(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_scfact")).args(args).output().expect("binary runs")
}

fn problems() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../problems")
}

fn problem(name: &str) -> String {
    problems().join(name).display().to_string()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).expect("utf-8 stdout")
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).expect("utf-8 stderr")
}

fn schema(which: &str) -> jsonschema::Validator {
    let o = scfact(&["schema", "--output", which]);
    assert_eq!(o.status.code(), Some(0));
    let schema: Value = serde_json::from_str(&stdout(&o)).unwrap();
    jsonschema::validator_for(&schema).expect("valid schema")
}

fn assert_valid(v: &jsonschema::Validator, instance: &Value, what: &str) {
    let errors: Vec<String> = v.iter_errors(instance).map(|e| e.to_string()).collect();
    assert!(errors.is_empty(), "{what}: {errors:?}");
}

#[test]
fn fibonacci_csv() {
    let o = scfact(&["solve", "--ring-file", &problem("fibonacci.json"), "--format", "csv"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = stdout(&o);
    assert!(text.starts_with("n,x\n0,0\n1,1\n"), "{text}");
    assert!(text.trim_end().ends_with("10,55"), "{text}");
}

#[test]
fn inline_json_and_seed() {
    let fib = r#"{"ring":{"kind":"rational"},"recurrence":{"coeffs":[1,1],"initials":[0,1]}}"#;
    let o = scfact(&["eigenseq", "--inline-json", fib, "--seed", "1", "--horizon", "5", "--format", "csv"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = stdout(&o);
    for r in ["1", "2", "3/2", "5/3", "8/5"] {
        assert!(text.contains(r), "{r} missing from {text}");
    }
}

#[test]
fn malformed_json_names_the_file() {
    let dir = std::env::temp_dir().join(format!("scfact-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let bad = dir.join("broken.json");
    std::fs::write(&bad, "{\"ring\": {\"kind\": \"rational\"},\n \"recurrence\": [").unwrap();
    let o = scfact(&["solve", "--ring-file", &bad.display().to_string()]);
    assert_eq!(o.status.code(), Some(2));
    let err: Value = serde_json::from_str(stderr(&o).trim()).unwrap();
    let msg = err["message"].as_str().unwrap();
    assert!(msg.contains("broken.json") && msg.contains("line 2"), "{msg}");
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn unknown_field_reports_path() {
    let text = r#"{"ring":{"kind":"rational"},"recurrence":{"coeffs":[1],"initials":[1],"extra":0}}"#;
    let o = scfact(&["solve", "--inline-json", text]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("recurrence"), "{}", stderr(&o));
}

#[test]
fn nonunit_leading_coefficient_is_rejected_by_solve() {
    let o = scfact(&["solve", "--ring-file", &problem("z8_nonrecursive.json")]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("use nonrecursive command"), "{}", stderr(&o));
}

#[test]
fn math_failure_exits_3() {
    let o = scfact(&["eigenseq", "--ring-file", &problem("z7_periodic.json")]);
    assert_eq!(o.status.code(), Some(3));
    let err: Value = serde_json::from_str(stderr(&o).trim()).unwrap();
    assert_eq!(err["error"], "non_unit_term");
}

#[test]
fn term_cap_from_environment() {
    let o = Command::new(env!("CARGO_BIN_EXE_scfact"))
        .args(["solve", "--ring-file", &problem("fibonacci.json"), "--horizon", "50"])
        .env("SCFACT_MAX_TERMS", "20")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2), "{}", stderr(&o));
}

#[test]
fn factorize_prints_oracle_verdict() {
    for (file, cmd) in RUNS.iter().filter(|(_, c)| *c == "factorize") {
        let o = scfact(&[cmd, "--ring-file", &problem(file)]);
        assert_eq!(o.status.code(), Some(0), "{file}: {}", stderr(&o));
        assert!(stdout(&o).contains("oracle: agrees with direct iteration"), "{file}");
    }
}

#[test]
fn demo_goldens() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden");
    let update = std::env::var_os("SCFACT_UPDATE_GOLDEN").is_some();
    for name in DEMOS {
        let o = scfact(&["demo", name]);
        assert_eq!(o.status.code(), Some(0), "{name}: {}", stderr(&o));
        let path = dir.join(format!("demo-{name}.txt"));
        if update {
            std::fs::create_dir_all(&dir).unwrap();
            std::fs::write(&path, &o.stdout).unwrap();
            continue;
        }
        let want = std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
        assert_eq!(stdout(&o), want, "demo {name} drifted from {}", path.display());
        // Output is byte-stable across runs.
        assert_eq!(scfact(&["demo", name]).stdout, o.stdout);
    }
}

#[test]
fn json_outputs_match_report_schema() {
    let v = schema("report");
    let mut outputs = Vec::new();
    for (file, cmd) in RUNS {
        let o = scfact(&[cmd, "--ring-file", &problem(file), "--format", "json"]);
        assert_eq!(o.status.code(), Some(0), "{cmd} {file}: {}", stderr(&o));
        outputs.push((format!("{cmd} {file}"), stdout(&o)));
    }
    for name in DEMOS {
        outputs.push((format!("demo {name}"), stdout(&scfact(&["demo", name, "--format", "json"]))));
    }
    outputs.push(("audit".into(), stdout(&scfact(&["audit", "--format", "json"]))));
    for (what, text) in outputs {
        let value: Value = serde_json::from_str(&text).unwrap_or_else(|e| panic!("{what}: {e}"));
        assert_valid(&v, &value, &what);
        let report: Report = serde_json::from_value(value).unwrap();
        assert!(what.starts_with(&report.command), "{what} reported as {}", report.command);
    }
}

#[test]
fn problem_files_match_problem_schema() {
    let v = schema("problem");
    let mut names: Vec<_> = std::fs::read_dir(problems()).unwrap().map(|e| e.unwrap().path()).collect();
    names.sort();
    assert!(names.len() >= 9);
    for path in names {
        let value: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
        assert_valid(&v, &value, &path.display().to_string());
        let _: ProblemFile = serde_json::from_value(value).unwrap();
    }
    let stray = serde_json::json!({"ring": {"kind": "rational"}, "recurrence": {"coeffs": [1], "initials": [1]}, "extra": 1});
    assert!(!v.is_valid(&stray));
}

#[test]
fn batch_directory() {
    let dir = std::env::temp_dir().join(format!("scfact-batch-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    for name in ["fibonacci.json", "z7_periodic.json"] {
        std::fs::copy(problems().join(name), dir.join(name)).unwrap();
    }
    let o = scfact(&["solve", "--ring-file", &dir.display().to_string(), "--horizon", "4"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = stdout(&o);
    let a = text.find("== fibonacci.json ==").expect("first header");
    let b = text.find("== z7_periodic.json ==").expect("second header");
    assert!(a < b);
    std::fs::copy(problems().join("z8_nonrecursive.json"), dir.join("z8.json")).unwrap();
    let o = scfact(&["solve", "--ring-file", &dir.display().to_string(), "--horizon", "4"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stdout(&o).contains("== z7_periodic.json =="));
    std::fs::remove_dir_all(&dir).unwrap();
}
