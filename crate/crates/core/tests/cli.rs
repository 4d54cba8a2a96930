use std::io::Write;
use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_algebroid")).args(args).output().unwrap()
}

fn json(args: &[&str]) -> (i32, Value) {
    let mut all = vec!["--json"];
    all.extend_from_slice(args);
    let out = run(&all);
    let v = serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!("{e}: {}\n{}", String::from_utf8_lossy(&out.stdout), String::from_utf8_lossy(&out.stderr))
    });
    (out.status.code().unwrap(), v)
}

fn docs(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../docs").join(name)
}

fn validator(name: &str) -> jsonschema::Validator {
    let schema: Value = serde_json::from_str(&std::fs::read_to_string(docs(name)).unwrap()).unwrap();
    jsonschema::validator_for(&schema).unwrap()
}

fn assert_valid(v: &jsonschema::Validator, x: &Value) {
    let errors: Vec<String> = v.iter_errors(x).map(|e| e.to_string()).collect();
    assert!(errors.is_empty(), "{errors:?}\n{x}");
}

fn temp_file(text: &str) -> tempfile::NamedTempFile {
    let mut f = tempfile::NamedTempFile::new().unwrap();
    f.write_all(text.as_bytes()).unwrap();
    f
}

#[test]
fn invariants_report_matches_schema() {
    let schema = validator("invariants.schema.json");
    let (code, v) = json(&["--field", "GF(5)", "invariants", "(Y^2-X^3)^2-Y*X^11"]);
    assert_eq!(code, 0);
    assert_eq!(v["mu"], 41);
    assert_eq!(v["e0_tjurina"], 30);
    assert_eq!(v["settings"]["field"], "GF(5)");
    assert_valid(&schema, &v);

    let (code, v) = json(&["--field", "GF(3)", "invariants", "X^2*Y+Y^2*X"]);
    assert_eq!(code, 0);
    assert_eq!(v["mu"], "infinite");
    assert!(v["mu_certificate"].is_string());
    assert_valid(&schema, &v);

    let (code, v) = json(&["invariants", "Y^2-X^3"]);
    assert_eq!((code, v["char"].clone(), v["mu"].clone()), (0, 0.into(), 2.into()));
    assert_valid(&schema, &v);
}

#[test]
fn parse_errors_exit_2() {
    let (code, v) = json(&["invariants", "2X+Y^2"]);
    assert_eq!(code, 2);
    assert_eq!(v["error"], "parse");
    assert_eq!(run(&["--field", "GF(6)", "invariants", "Y^2-X^3"]).status.code(), Some(2));
    assert_eq!(run(&["--field", "GF(7)", "frobnicate"]).status.code(), Some(2));
}

#[test]
fn vanishing_literal_warns() {
    let out = run(&["--field", "GF(5)", "semigroup", "Y^2-X^3+5*X"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stderr).contains("warning"));
    let (_, v) = json(&["--field", "GF(5)", "semigroup", "Y^2-X^3+5*X"]);
    assert_eq!(v["notes"].as_array().map(Vec::len), Some(1));
}

#[test]
fn branch_verbs_refuse_curves() {
    let (code, v) = json(&["--field", "GF(7)", "semigroup", "X^2*Y+Y^2*X"]);
    assert_eq!(code, 4);
    assert_eq!(v["error"], "unsupported");
}

#[test]
fn check_verbs() {
    let (code, v) = json(&["--field", "GF(7)", "check", "main", "(Y^2-X^3)^2-Y*X^11"]);
    assert_eq!((code, v["equal"].clone()), (0, true.into()));
    let (code, v) = json(&["--field", "GF(5)", "check", "main", "(Y^2-X^3)^2-Y*X^11"]);
    assert_eq!((code, v["tame"].clone(), v["equal"].clone()), (0, false.into(), false.into()));
    let (code, v) = json(&["--field", "GF(7)", "check", "key", "Y^3-X^8"]);
    assert_eq!((code, v["passed"].clone()), (0, true.into()));
    assert_eq!(run(&["--field", "GF(7)", "check", "counting", "Y^3-X^8"]).status.code(), Some(0));
    assert_eq!(run(&["--field", "GF(7)", "check", "gorenstein", "Y^3-X^8"]).status.code(), Some(0));
    assert_eq!(run(&["--field", "GF(7)", "check", "delgado", "Y^3-X^8", "Y+X^2"]).status.code(), Some(0));
}

#[test]
fn milnor_formula_from_factor_file() {
    let file = temp_file("(Y^2-X^3)^2-X^11*Y\n\n(Y^2-X^3+X^2*Y)^2-X^11*Y\n");
    let path = file.path().to_str().unwrap();
    let (code, v) = json(&["--field", "GF(7)", "--factors", path, "check", "milnor-formula"]);
    assert_eq!(code, 0);
    assert_eq!((v["mu"].clone(), v["rhs"].clone(), v["equal"].clone()), (112.into(), 111.into(), false.into()));
    let (code, _) = json(&["--field", "GF(7)", "--factors", path, "invariants", "Y^2-X^3"]);
    assert_eq!(code, 4);
}

#[test]
fn corpus_lines_match_schema() {
    let schema = validator("corpus.schema.json");
    let text = std::fs::read_to_string(PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../corpus/branches.jsonl"))
        .unwrap();
    let mut n = 0;
    for line in text.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('#')) {
        assert_valid(&schema, &serde_json::from_str(line).unwrap());
        n += 1;
    }
    assert!(n >= 30);
}

#[test]
fn corpus_exit_codes() {
    let empty = temp_file("# nothing\n\n");
    assert_eq!(run(&["corpus", empty.path().to_str().unwrap()]).status.code(), Some(0));

    let good = temp_file(r#"{"id":"cusp","field":"GF(7)","expr":"Y^2-X^3","expected":{"mu":2,"semigroup":[2,3]}}"#);
    let out = run(&["corpus", "--corpus", good.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stdout).contains("PASS cusp"));

    let wrong = temp_file(concat!(
        r#"{"id":"cusp","field":"GF(7)","expr":"Y^2-X^3","expected":{"mu":2}}"#,
        "\n",
        r#"{"id":"bad","field":"GF(7)","expr":"Y^2-X^3","expected":{"mu":3}}"#,
    ));
    let out = run(&["corpus", wrong.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(5));
    assert!(String::from_utf8_lossy(&out.stdout).contains("1/2 passed"));

    let broken = temp_file(r#"{"id":"x","field":"GF(7)","expr":"Y^2-X^3","expected":{"colour":1}}"#);
    assert_eq!(run(&["corpus", broken.path().to_str().unwrap()]).status.code(), Some(2));
}

#[test]
fn shipped_corpus_passes() {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../corpus/branches.jsonl");
    let out = run(&["corpus", path.to_str().unwrap()]);
    let text = String::from_utf8_lossy(&out.stdout);
    assert_eq!(out.status.code(), Some(0), "{text}");
    let last = text.lines().last().unwrap();
    let (passed, total) = last.split_once(' ').unwrap().0.split_once('/').unwrap();
    assert_eq!(passed, total, "{last}");
}
