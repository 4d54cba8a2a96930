//! Line-JSON corpus of examples with expected values.

use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value};

use super::{error_report, exit_code, parse_expression, parse_field, Outcome, EXIT_FALSIFIED, EXIT_OK, EXIT_PARSE};
use crate::algebra::{Poly, Var};
use crate::error::{Error, Result};
use crate::invariants::{
    analyze_branch, check_delgado_with, check_gorenstein_with, conductor_ideal_check_with, curve_milnor,
    delta_branch, milnor_formula_report, milnor_number, tjurina_number, MultiBranchInput,
};
use crate::keytheorem::verify_key_theorem;
use crate::localideal::{mu_stability, MuStability};

/// One corpus line.
#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct Entry {
    #[serde(default)]
    pub id: Option<String>,
    pub field: String,
    #[serde(default)]
    pub expr: Option<String>,
    #[serde(default)]
    pub factors: Option<Vec<String>>,
    #[serde(default)]
    pub lmax: Option<u32>,
    #[serde(default)]
    pub note: Option<String>,
    pub expected: Map<String, Value>,
}

#[derive(Clone, Debug, Serialize)]
pub struct Mismatch {
    pub key: String,
    pub expected: Value,
    pub actual: Value,
}

#[derive(Clone, Debug, Serialize)]
pub struct EntryResult {
    pub line: usize,
    pub id: String,
    pub passed: bool,
    pub mismatches: Vec<Mismatch>,
    pub error: Option<Value>,
    #[serde(skip)]
    pub code: i32,
}

/// Keys understood in `expected`.
pub const KEYS: &[&str] = &[
    "mu",
    "tau",
    "e0_tjurina",
    "mu_unit_x",
    "mu_unit_y",
    "irreducible",
    "semigroup",
    "conductor",
    "tame",
    "delta",
    "intersection",
    "mu_stable_at",
    "milnor_formula",
    "identities",
    "key",
];

fn json_of<T: Serialize>(v: T) -> Value {
    serde_json::to_value(v).unwrap()
}

fn unit_times(f: &Poly, var: Var) -> Poly {
    let k = f.field();
    let u = match var {
        Var::X => &Poly::one(k) + &Poly::x(k),
        Var::Y => &Poly::one(k) + &Poly::y(k),
    };
    &u * f
}

fn actual(key: &str, f: &Poly, factors: &[Poly], lmax: u32) -> Result<Value> {
    Ok(match key {
        "mu" => json_of(milnor_number(f)?),
        "tau" => json_of(tjurina_number(f)?),
        "e0_tjurina" => json!(curve_milnor(f)?),
        "mu_unit_x" => json_of(milnor_number(&unit_times(f, Var::X))?),
        "mu_unit_y" => json_of(milnor_number(&unit_times(f, Var::Y))?),
        "irreducible" => match analyze_branch(f) {
            Ok(_) => json!(true),
            Err(Error::Reducible(_)) => json!(false),
            Err(e) => return Err(e),
        },
        "semigroup" => json!(analyze_branch(f)?.semigroup.generators()),
        "conductor" => json!(analyze_branch(f)?.conductor()),
        "tame" => json!(analyze_branch(f)?.semigroup.is_tame(f.field().characteristic())),
        "delta" if factors.len() > 1 => json!(MultiBranchInput::new(factors.to_vec())?.delta()?),
        "delta" => json!(delta_branch(f)?),
        "intersection" => {
            let m = MultiBranchInput::new(factors.to_vec())?;
            json!(m.intersections()?.iter().map(|t| t.2).sum::<u64>())
        }
        "mu_stable_at" => match mu_stability(f, lmax)? {
            MuStability::StableAt(l) => json!(l),
            MuStability::UnknownUpTo(_) => Value::Null,
        },
        "milnor_formula" => {
            let r = milnor_formula_report(&MultiBranchInput::new(factors.to_vec())?)?;
            json!({ "mu": json_of(r.mu), "rhs": r.two_delta_plus, "equal": r.equal })
        }
        "identities" => {
            let b = analyze_branch(f)?;
            let k = f.field();
            let checks = [
                check_gorenstein_with(f, &b)?,
                conductor_ideal_check_with(f, &b, tjurina_number(f)?, milnor_number(f)?)?,
                check_delgado_with(f, &Poly::x(k), &b)?,
                check_delgado_with(f, &Poly::y(k), &b)?,
            ];
            json!(checks.iter().all(|c| c.passed))
        }
        "key" => json!(verify_key_theorem(f)?.passed),
        other => return Err(Error::InvalidInput(format!("unknown expected key '{other}'"))),
    })
}

fn evaluate(entry: &Entry) -> Result<Vec<Mismatch>> {
    let field = parse_field(&entry.field)?;
    let texts: Vec<String> = match (&entry.expr, &entry.factors) {
        (Some(e), None) => vec![e.clone()],
        (None, Some(fs)) if !fs.is_empty() => fs.clone(),
        _ => return Err(Error::InvalidInput("exactly one of expr and factors is required".into())),
    };
    let factors = texts.iter().map(|t| parse_expression(t, &field).map(|p| p.poly)).collect::<Result<Vec<_>>>()?;
    let f = factors.iter().skip(1).fold(factors[0].clone(), |a, b| &a * b);
    let lmax = entry.lmax.unwrap_or(5);
    let mut out = Vec::new();
    for (key, want) in &entry.expected {
        let got = actual(key, &f, &factors, lmax)?;
        if &got != want {
            out.push(Mismatch { key: key.clone(), expected: want.clone(), actual: got });
        }
    }
    Ok(out)
}

/// Shape errors of a decoded line: unknown expected keys, expr and factors.
fn shape_error(entry: &Entry) -> Option<String> {
    if let Some(k) = entry.expected.keys().find(|k| !KEYS.contains(&k.as_str())) {
        return Some(format!("unknown expected key '{k}'"));
    }
    match (&entry.expr, &entry.factors) {
        (Some(_), None) => None,
        (None, Some(fs)) if !fs.is_empty() => None,
        _ => Some("exactly one of expr and factors is required".into()),
    }
}

fn run_line(line: usize, text: &str) -> EntryResult {
    let decoded = serde_json::from_str::<Entry>(text)
        .map_err(|e| e.to_string())
        .and_then(|e| match shape_error(&e) {
            Some(msg) => Err(msg),
            None => Ok(e),
        });
    let entry = match decoded {
        Ok(e) => e,
        Err(e) => {
            return EntryResult {
                line,
                id: format!("line {line}"),
                passed: false,
                mismatches: Vec::new(),
                error: Some(json!({ "error": "parse", "message": e })),
                code: EXIT_PARSE,
            }
        }
    };
    let id = entry.id.clone().unwrap_or_else(|| format!("line {line}"));
    match evaluate(&entry) {
        Ok(mismatches) => {
            let passed = mismatches.is_empty();
            let code = if passed { EXIT_OK } else { EXIT_FALSIFIED };
            EntryResult { line, id, passed, mismatches, error: None, code }
        }
        Err(e) => EntryResult { line, id, passed: false, mismatches: Vec::new(), error: Some(error_report(&e)), code: exit_code(&e) },
    }
}

/// Runs the corpus text; results follow input order.
pub fn run_corpus(text: &str, jobs: Option<usize>) -> Vec<EntryResult> {
    let lines: Vec<(usize, &str)> = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
        .collect();
    let work = || lines.par_iter().map(|&(n, l)| run_line(n, l)).collect();
    match jobs {
        Some(j) => rayon::ThreadPoolBuilder::new().num_threads(j.max(1)).build().expect("thread pool").install(work),
        None => work(),
    }
}

/// Exit code of a corpus run: any mismatch first, then the first error.
pub fn corpus_exit_code(results: &[EntryResult]) -> i32 {
    if results.iter().any(|r| !r.mismatches.is_empty()) {
        return EXIT_FALSIFIED;
    }
    results.iter().map(|r| r.code).find(|&c| c != EXIT_OK).unwrap_or(EXIT_OK)
}

pub fn summary_text(results: &[EntryResult]) -> String {
    let mut out = String::new();
    for r in results {
        let status = if r.passed { "PASS" } else { "FAIL" };
        out.push_str(&format!("{status} {}", r.id));
        for m in &r.mismatches {
            out.push_str(&format!("  {}: expected {} got {}", m.key, m.expected, m.actual));
        }
        if let Some(e) = &r.error {
            out.push_str(&format!("  {}", e["message"].as_str().unwrap_or("")));
        }
        out.push('\n');
    }
    let passed = results.iter().filter(|r| r.passed).count();
    out.push_str(&format!("{passed}/{} passed\n", results.len()));
    out
}

pub fn run_file(path: &Path, jobs: Option<usize>) -> Outcome {
    let text = match std::fs::read_to_string(path) {
        Ok(t) => t,
        Err(e) => {
            let e = Error::InvalidInput(format!("{}: {e}", path.display()));
            return Outcome { report: error_report(&e), code: EXIT_PARSE, text: None };
        }
    };
    let results = run_corpus(&text, jobs);
    let passed = results.iter().filter(|r| r.passed).count();
    Outcome {
        report: json!({ "entries": json_of(&results), "passed": passed, "total": results.len() }),
        code: corpus_exit_code(&results),
        text: Some(summary_text(&results)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_corpus() {
        let r = run_corpus("\n# nothing\n", None);
        assert!(r.is_empty());
        assert_eq!(corpus_exit_code(&r), EXIT_OK);
    }

    #[test]
    fn mismatch_is_reported() {
        let text = r#"{"id":"cusp","field":"GF(7)","expr":"Y^2-X^3","expected":{"mu":2,"semigroup":[2,3]}}
{"id":"wrong","field":"GF(7)","expr":"Y^2-X^3","expected":{"mu":3}}"#;
        let r = run_corpus(text, Some(2));
        assert!(r[0].passed);
        assert!(!r[1].passed);
        assert_eq!(r[1].mismatches[0].actual, json!(2));
        assert_eq!(corpus_exit_code(&r), EXIT_FALSIFIED);
    }

    #[test]
    fn bad_lines() {
        let r = run_corpus(r#"{"field":"GF(7)","expr":"2X","expected":{}}"#, None);
        assert_eq!(r[0].code, EXIT_PARSE);
        let r = run_corpus(r#"{"field":"GF(7)","expr":"X","expected":{"colour":1}}"#, None);
        assert!(!r[0].passed);
    }
}
