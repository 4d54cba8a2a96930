//! Command line front end: expression parsing, dispatch, reports, corpus runs.

pub mod corpus;
pub mod parse;

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Map, Value};

use crate::algebra::{common_factor_at_origin, Poly, Var};
use crate::branch::hn_expand;
use crate::error::{Error, Result};
use crate::field::Field;
use crate::invariants::{
    analyze_branch, check_delgado, check_gorenstein, invariant_report, milnor_formula_report, milnor_number,
    MultiBranchInput, ReportOptions,
};
use crate::keytheorem::verify_key_theorem;
use crate::localideal::{mu_stability, Colength, MuStability};
use crate::prep::{is_weierstrass, weierstrass_by_coords};
use crate::semigroup::characteristic_from_multiplicities;

pub use parse::{parse_expression, parse_field, LiteralNote, Parsed};

pub const EXIT_OK: i32 = 0;
pub const EXIT_PARSE: i32 = 2;
pub const EXIT_PRECISION: i32 = 3;
pub const EXIT_UNSUPPORTED: i32 = 4;
pub const EXIT_FALSIFIED: i32 = 5;

#[derive(Parser, Debug)]
#[command(name = "algebroid", version, about = "Invariants of plane algebroid branches in any characteristic")]
pub struct Cli {
    #[command(flatten)]
    pub opts: Options,
    #[command(subcommand)]
    pub verb: Verb,
}

#[derive(Args, Debug, Clone)]
pub struct Options {
    /// GF(p), GF(p^k) or QQ
    #[arg(long, global = true, default_value = "QQ")]
    pub field: String,
    /// Extension degree over the prime field of --field
    #[arg(long, global = true)]
    pub ext: Option<u32>,
    /// Series precision, doubled at most twice when exhausted
    #[arg(long, global = true, default_value_t = 128)]
    pub prec: u32,
    /// One JSON object instead of `key: value` lines
    #[arg(long, global = true)]
    pub json: bool,
    /// One factor per line; the input is their product
    #[arg(long, global = true)]
    pub factors: Option<PathBuf>,
    /// Largest l tried in the μ-stability search
    #[arg(long, global = true, default_value_t = 5)]
    pub lmax: u32,
}

#[derive(Subcommand, Debug)]
pub enum Verb {
    /// μ, τ, e₀ of the tangent ideal, semigroup and identity checks
    Invariants { expr: Option<String> },
    /// Value semigroup, conductor and tameness of a branch
    Semigroup { expr: Option<String> },
    /// Parametrization (x(t), y(t)) of a branch
    Param { expr: Option<String> },
    /// Weierstrass form by a change of coordinates
    Prepare { expr: Option<String> },
    /// Identity checks with their witnesses
    Check {
        #[command(subcommand)]
        what: CheckVerb,
    },
    /// Runs every entry of a line-JSON corpus
    Corpus {
        path: Option<PathBuf>,
        #[arg(long)]
        corpus: Option<PathBuf>,
        /// Worker threads (default: all cores)
        #[arg(long)]
        jobs: Option<usize>,
    },
}

#[derive(Subcommand, Debug)]
pub enum CheckVerb {
    /// v(f_Y) = c + v(x') and v(f_X) = c + v(y')
    Gorenstein { expr: Option<String> },
    /// v([f,g]) = c + v(g') and the bound v([f,g]) >= c + v(g) − 1
    Delgado { f: String, g: String },
    /// μ = c with the key family and the elements q_s
    Key { expr: Option<String> },
    /// μ = c for a tame branch
    Main { expr: Option<String> },
    /// μ against 2δ + 1 − r for a product of branches
    MilnorFormula { exprs: Vec<String> },
    /// Smallest l with f^l ∈ M·T(f)^l
    MuStable { expr: Option<String> },
    /// #(S ∖ (S + c − 1)) = c
    Counting { expr: Option<String> },
}

/// A finished command: a JSON report and an exit code.
#[derive(Debug)]
pub struct Outcome {
    pub report: Value,
    pub code: i32,
    /// Text form when it differs from the generic rendering.
    pub text: Option<String>,
}

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Syntax { .. } => EXIT_PARSE,
        Error::PrecisionExhausted(_) | Error::BoundExhausted(_) => EXIT_PRECISION,
        Error::SemigroupMismatch(_) | Error::TowerInvariantViolated { .. } => EXIT_FALSIFIED,
        _ => EXIT_UNSUPPORTED,
    }
}

fn error_kind(e: &Error) -> &'static str {
    match exit_code(e) {
        EXIT_PARSE => "parse",
        EXIT_PRECISION => "precision",
        EXIT_FALSIFIED => "falsified",
        _ => "unsupported",
    }
}

pub fn error_report(e: &Error) -> Value {
    json!({ "error": error_kind(e), "message": e.to_string() })
}

/// The working field from `--field` and `--ext`.
pub fn resolve_field(opts: &Options) -> Result<Field> {
    let base = parse_field(&opts.field)?;
    match opts.ext {
        None | Some(1) => Ok(base),
        Some(k) if base.characteristic() > 0 && base.degree() == 1 => Field::extension(base.characteristic(), k),
        Some(_) => Err(Error::InvalidField("--ext needs a prime field".into())),
    }
}

/// Expressions from a file, one per line; `#` starts a comment.
pub fn read_factor_lines(path: &Path) -> Result<Vec<String>> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::InvalidInput(format!("{}: {e}", path.display())))?;
    Ok(text
        .lines()
        .map(|l| l.split('#').next().unwrap().trim())
        .filter(|l| !l.is_empty())
        .map(str::to_string)
        .collect())
}

struct Ctx {
    field: Field,
    opts: Options,
    notes: Vec<String>,
}

impl Ctx {
    fn parse(&mut self, text: &str) -> Result<Poly> {
        let parsed = parse_expression(text, &self.field)?;
        self.notes.extend(parsed.notes.iter().map(|n| n.to_string()));
        Ok(parsed.poly)
    }

    fn factors(&mut self, exprs: &[String]) -> Result<Vec<Poly>> {
        let mut texts = exprs.to_vec();
        if let Some(path) = self.opts.factors.clone() {
            texts.extend(read_factor_lines(&path)?);
        }
        texts.iter().map(|t| self.parse(t)).collect()
    }

    /// The single expression argument or the product of `--factors`.
    fn input(&mut self, expr: &Option<String>) -> Result<Poly> {
        let fs = self.factors(expr.as_slice())?;
        if fs.is_empty() {
            return Err(Error::InvalidInput("an expression or --factors FILE is required".into()));
        }
        if expr.is_some() && self.opts.factors.is_some() {
            return Err(Error::InvalidInput("give either an expression or --factors, not both".into()));
        }
        Ok(fs.iter().skip(1).fold(fs[0].clone(), |a, b| &a * b))
    }

    fn settings(&self) -> Value {
        json!({ "field": self.field.to_string(), "prec": self.opts.prec, "lmax": self.opts.lmax })
    }
}

/// Retries at doubled precision, at most twice.
fn escalate<T>(prec: u32, mut run: impl FnMut(u32) -> Result<T>) -> Result<(T, u32)> {
    let mut p = prec.max(1);
    for attempt in 0..3 {
        match run(p) {
            Err(Error::PrecisionExhausted(_) | Error::BoundExhausted(_)) if attempt < 2 => p *= 2,
            other => return other.map(|v| (v, p)),
        }
    }
    unreachable!()
}

fn colength_json(c: Colength) -> Value {
    serde_json::to_value(c).unwrap()
}

fn check_outcome(c: &crate::invariants::Check) -> (Value, i32) {
    (serde_json::to_value(c).unwrap(), if c.passed { EXIT_OK } else { EXIT_FALSIFIED })
}

fn dispatch(ctx: &mut Ctx, verb: &Verb) -> Result<(Value, i32)> {
    let k = ctx.field.clone();
    match verb {
        Verb::Invariants { expr } => {
            let f = ctx.input(expr)?;
            let rep = invariant_report(&f, ReportOptions { lmax: ctx.opts.lmax, e0: true })?;
            let code = if rep.all_checks_pass() { EXIT_OK } else { EXIT_FALSIFIED };
            let mut v = serde_json::to_value(&rep).unwrap();
            if rep.mu == Colength::Infinite {
                let common = common_factor_at_origin(&f.derivative(Var::X), &f.derivative(Var::Y));
                v["mu_certificate"] = json!(if common { "common factor of f_X and f_Y" } else { "lead ideal lacks a pure power" });
            }
            Ok((v, code))
        }
        Verb::Semigroup { expr } => {
            let f = ctx.input(expr)?;
            let b = analyze_branch(&f)?;
            let s = &b.semigroup;
            let mult: Vec<u64> = b.chain.multiplicity_sequence().iter().map(|&m| m as u64).collect();
            let p = k.characteristic();
            Ok((
                json!({
                    "gens": s.generators(),
                    "conductor": s.conductor(),
                    "genus": s.genus(),
                    "tame": s.is_tame(p),
                    "multiplicities": mult,
                    "characteristic": characteristic_from_multiplicities(&mult)?,
                    "sweep_size": s.sweep_set().len(),
                }),
                EXIT_OK,
            ))
        }
        Verb::Param { expr } => {
            let f = ctx.input(expr)?;
            let ((chain, par), prec) = escalate(ctx.opts.prec, |p| hn_expand(&f, p as usize))?;
            let (x, y) = if par.swapped() { (&par.y_of_t, &par.x_of_t) } else { (&par.x_of_t, &par.y_of_t) };
            Ok((
                json!({
                    "x": x.to_string(),
                    "y": y.to_string(),
                    "precision": prec,
                    "multiplicities": chain.multiplicity_sequence(),
                }),
                EXIT_OK,
            ))
        }
        Verb::Prepare { expr } => {
            let f = ctx.input(expr)?;
            let ((phi, w), prec) = escalate(ctx.opts.prec, |p| weierstrass_by_coords(&f, p))?;
            Ok((
                json!({
                    "x": phi.image_x.to_string(),
                    "y": phi.image_y.to_string(),
                    "weierstrass": w.to_poly().to_string(),
                    "is_weierstrass": is_weierstrass(&w),
                    "precision": prec,
                }),
                EXIT_OK,
            ))
        }
        Verb::Check { what } => check(ctx, what),
        Verb::Corpus { .. } => unreachable!("corpus runs outside dispatch"),
    }
}

fn check(ctx: &mut Ctx, what: &CheckVerb) -> Result<(Value, i32)> {
    let p = ctx.field.characteristic();
    match what {
        CheckVerb::Gorenstein { expr } => {
            let f = ctx.input(expr)?;
            Ok(check_outcome(&check_gorenstein(&f)?))
        }
        CheckVerb::Delgado { f, g } => {
            let f = ctx.parse(f)?;
            let g = ctx.parse(g)?;
            Ok(check_outcome(&check_delgado(&f, &g)?))
        }
        CheckVerb::Key { expr } => {
            let f = ctx.input(expr)?;
            let v = verify_key_theorem(&f)?;
            let code = if v.passed { EXIT_OK } else { EXIT_FALSIFIED };
            Ok((serde_json::to_value(&v).unwrap(), code))
        }
        CheckVerb::Main { expr } => {
            let f = ctx.input(expr)?;
            let b = analyze_branch(&f)?;
            let mu = milnor_number(&f)?;
            let c = b.conductor();
            let tame = b.semigroup.is_tame(p);
            let equal = mu == Colength::Finite(c);
            let code = if tame && !equal { EXIT_FALSIFIED } else { EXIT_OK };
            Ok((json!({ "mu": colength_json(mu), "conductor": c, "tame": tame, "equal": equal }), code))
        }
        CheckVerb::MilnorFormula { exprs } => {
            let fs = ctx.factors(exprs)?;
            if fs.is_empty() {
                return Err(Error::InvalidInput("milnor-formula needs factors".into()));
            }
            let input = MultiBranchInput::new(fs)?;
            let rep = milnor_formula_report(&input)?;
            let pairs: Vec<Value> =
                input.intersections()?.iter().map(|&(i, j, v)| json!({ "i": i, "j": j, "intersection": v })).collect();
            Ok((
                json!({
                    "mu": colength_json(rep.mu),
                    "rhs": rep.two_delta_plus,
                    "equal": rep.equal,
                    "delta": input.delta()?,
                    "r": input.r(),
                    "intersections": pairs,
                }),
                EXIT_OK,
            ))
        }
        CheckVerb::MuStable { expr } => {
            let f = ctx.input(expr)?;
            let v = match mu_stability(&f, ctx.opts.lmax)? {
                MuStability::StableAt(l) => json!({ "stable": true, "l": l }),
                MuStability::UnknownUpTo(l) => json!({ "stable": false, "checked_up_to": l }),
            };
            Ok((v, EXIT_OK))
        }
        CheckVerb::Counting { expr } => {
            let f = ctx.input(expr)?;
            let b = analyze_branch(&f)?;
            let n = b.semigroup.sweep_set().len() as u64;
            let c = b.conductor();
            let code = if n == c { EXIT_OK } else { EXIT_FALSIFIED };
            Ok((json!({ "gens": b.semigroup.generators(), "conductor": c, "count": n, "equal": n == c }), code))
        }
    }
}

fn finish(ctx: &Ctx, result: Result<(Value, i32)>) -> Outcome {
    let (mut report, code) = match result {
        Ok(r) => r,
        Err(e) => (error_report(&e), exit_code(&e)),
    };
    if let Value::Object(m) = &mut report {
        m.insert("settings".into(), ctx.settings());
        if !ctx.notes.is_empty() {
            m.insert("notes".into(), json!(ctx.notes));
        }
    }
    Outcome { report, code, text: None }
}

/// Runs one parsed command line.
pub fn run(cli: &Cli) -> Outcome {
    let field = match resolve_field(&cli.opts) {
        Ok(f) => f,
        Err(e) => return Outcome { report: error_report(&e), code: EXIT_PARSE, text: None },
    };
    if let Verb::Corpus { path, corpus, jobs } = &cli.verb {
        let Some(path) = path.clone().or_else(|| corpus.clone()) else {
            let e = Error::InvalidInput("corpus needs a file".into());
            return Outcome { report: error_report(&e), code: EXIT_PARSE, text: None };
        };
        return corpus::run_file(&path, *jobs);
    }
    let mut ctx = Ctx { field, opts: cli.opts.clone(), notes: Vec::new() };
    let result = dispatch(&mut ctx, &cli.verb);
    finish(&ctx, result)
}

/// Plain `key: value` lines.
pub fn render_text(v: &Value) -> String {
    let mut out = String::new();
    match v {
        Value::Object(m) => render_map(m, &mut out),
        other => out.push_str(&format!("{other}\n")),
    }
    out
}

fn render_map(m: &Map<String, Value>, out: &mut String) {
    for (k, v) in m {
        let shown = match v {
            Value::String(s) => s.clone(),
            Value::Null => "-".into(),
            other => other.to_string(),
        };
        out.push_str(&format!("{k}: {shown}\n"));
    }
}
