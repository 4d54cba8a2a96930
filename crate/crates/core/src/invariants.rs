//! Milnor and Tjurina numbers, δ, and the identities relating them to the
//! conductor of a branch.

use std::sync::Arc;

use serde::{Serialize, Serializer};
use serde_json::{json, Map, Value};

use crate::algebra::{bracket, common_factor_at_origin, gcd, Poly, Var};
use crate::branch::{self, BlowupChain, Parametrization, Valuation};
use crate::error::{Error, Result};
use crate::localideal::{self, Colength, MuStability};
use crate::semigroup::{semigroup_of, ValueSemigroup};

impl Serialize for Colength {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Colength::Finite(n) => s.serialize_u64(*n),
            Colength::Infinite => s.serialize_str("infinite"),
        }
    }
}

impl Serialize for Valuation {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Valuation::Finite(n) => s.serialize_u64(*n),
            Valuation::Infinite => s.serialize_str("infinite"),
        }
    }
}

fn nonzero(f: &Poly) -> Result<()> {
    if f.is_zero() {
        return Err(Error::InvalidInput("the zero series defines no curve".into()));
    }
    Ok(())
}

/// `μ(f) = dim k[[X,Y]]/⟨f_X, f_Y⟩`.
pub fn milnor_number(f: &Poly) -> Result<Colength> {
    nonzero(f)?;
    let j = [f.derivative(Var::X), f.derivative(Var::Y)];
    if common_factor_at_origin(&j[0], &j[1]) {
        return Ok(Colength::Infinite);
    }
    Ok(localideal::standard_basis_auto(&j)?.colength())
}

/// `τ(f) = dim k[[X,Y]]/⟨f, f_X, f_Y⟩`.
pub fn tjurina_number(f: &Poly) -> Result<Colength> {
    nonzero(f)?;
    let g = gcd(&f.derivative(Var::X), &f.derivative(Var::Y));
    if common_factor_at_origin(f, &g) {
        return Ok(Colength::Infinite);
    }
    Ok(localideal::standard_basis_auto(&localideal::tangent_ideal(f))?.colength())
}

/// `μ(C) = e_0(T(f))`, the Milnor number of the curve.
pub fn curve_milnor(f: &Poly) -> Result<u64> {
    nonzero(f)?;
    match localideal::hilbert_samuel_e0(&localideal::tangent_ideal(f)) {
        Err(Error::NotPrimary) => Err(Error::NotIsolated),
        r => r,
    }
}

/// Everything derived from the blowup chain of a branch.
#[derive(Clone, Debug)]
pub struct BranchData {
    pub chain: Arc<BlowupChain>,
    pub par: Parametrization,
    pub semigroup: ValueSemigroup,
}

impl BranchData {
    pub fn conductor(&self) -> u64 {
        self.semigroup.conductor()
    }

    pub fn valuation(&self, g: &Poly) -> Result<Valuation> {
        branch::valuation(&self.par, g)
    }
}

pub fn analyze_branch(f: &Poly) -> Result<BranchData> {
    nonzero(f)?;
    let (chain, par) = branch::hn_expand_auto(f)?;
    let semigroup = semigroup_of(&par, &chain)?;
    Ok(BranchData { chain, par, semigroup })
}

/// `δ = c/2` for a branch.
pub fn delta_branch(f: &Poly) -> Result<u64> {
    Ok(analyze_branch(f)?.conductor() / 2)
}

/// Irreducible, pairwise coprime factors `f_1, ..., f_r` of a reduced curve.
#[derive(Clone, Debug)]
pub struct MultiBranchInput {
    factors: Vec<Poly>,
    branches: Vec<BranchData>,
}

impl MultiBranchInput {
    pub fn new(factors: Vec<Poly>) -> Result<MultiBranchInput> {
        if factors.is_empty() {
            return Err(Error::InvalidInput("no factors".into()));
        }
        let branches = factors.iter().map(analyze_branch).collect::<Result<Vec<_>>>()?;
        for i in 0..factors.len() {
            for j in i + 1..factors.len() {
                if branches[i].valuation(&factors[j])? == Valuation::Infinite {
                    return Err(Error::InvalidInput(format!("factors {} and {} are associate", i + 1, j + 1)));
                }
            }
        }
        Ok(MultiBranchInput { factors, branches })
    }

    pub fn factors(&self) -> &[Poly] {
        &self.factors
    }

    pub fn branches(&self) -> &[BranchData] {
        &self.branches
    }

    pub fn r(&self) -> usize {
        self.factors.len()
    }

    pub fn product(&self) -> Poly {
        let k = self.factors[0].field();
        self.factors.iter().fold(Poly::one(k), |acc, f| &acc * f)
    }

    /// `I(f_i, f_j)` for `i < j`.
    pub fn intersections(&self) -> Result<Vec<(usize, usize, u64)>> {
        let mut out = Vec::new();
        for i in 0..self.r() {
            for j in i + 1..self.r() {
                let v = self.branches[i].valuation(&self.factors[j])?.finite().ok_or(Error::CommonFactor)?;
                out.push((i, j, v));
            }
        }
        Ok(out)
    }

    /// `δ = Σ δ_i + Σ_{i<j} I(f_i, f_j)`.
    pub fn delta(&self) -> Result<u64> {
        let own: u64 = self.branches.iter().map(|b| b.conductor() / 2).sum();
        let cross: u64 = self.intersections()?.iter().map(|t| t.2).sum();
        Ok(own + cross)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MilnorFormulaReport {
    pub mu: Colength,
    pub two_delta_plus: i64,
    pub equal: bool,
}

/// Compares `μ(f_1 ⋯ f_r)` with `2δ + 1 − r`.
pub fn milnor_formula_report(input: &MultiBranchInput) -> Result<MilnorFormulaReport> {
    let mu = milnor_number(&input.product())?;
    let rhs = 2 * input.delta()? as i64 + 1 - input.r() as i64;
    Ok(MilnorFormulaReport { mu, two_delta_plus: rhs, equal: mu == Colength::Finite(rhs as u64) })
}

/// A verified identity with the quantities that enter it.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub witness: Map<String, Value>,
}

impl Check {
    fn new(name: &str, passed: bool, witness: Value) -> Check {
        let Value::Object(witness) = witness else { unreachable!() };
        Check { name: name.to_string(), passed, witness }
    }
}

fn plus(a: u64, v: Valuation) -> Valuation {
    match v {
        Valuation::Finite(x) => Valuation::Finite(a + x),
        Valuation::Infinite => Valuation::Infinite,
    }
}

fn p_divides(p: u64, v: u64) -> bool {
    if p == 0 { v == 0 } else { v % p == 0 }
}

/// `v(f_Y) = c + v(x')` and `v(f_X) = c + v(y')`.
pub fn check_gorenstein(f: &Poly) -> Result<Check> {
    let b = analyze_branch(f)?;
    check_gorenstein_with(f, &b)
}

pub fn check_gorenstein_with(f: &Poly, b: &BranchData) -> Result<Check> {
    let k = f.field();
    let c = b.conductor();
    let v_fy = b.valuation(&f.derivative(Var::Y))?;
    let v_fx = b.valuation(&f.derivative(Var::X))?;
    let v_xp = branch::t_derivative_order(&b.par, &Poly::x(k))?;
    let v_yp = branch::t_derivative_order(&b.par, &Poly::y(k))?;
    let passed = v_fy == plus(c, v_xp) && v_fx == plus(c, v_yp);
    Ok(Check::new(
        "gorenstein",
        passed,
        json!({"c": c, "v_fy": v_fy, "v_xprime": v_xp, "v_fx": v_fx, "v_yprime": v_yp}),
    ))
}

/// `v([f,g]) = c + v(g')`, and `v([f,g]) >= c + v(g) − 1` with equality
/// exactly when `p ∤ v(g)`.
pub fn check_delgado(f: &Poly, g: &Poly) -> Result<Check> {
    let b = analyze_branch(f)?;
    check_delgado_with(f, g, &b)
}

pub fn check_delgado_with(f: &Poly, g: &Poly, b: &BranchData) -> Result<Check> {
    let c = b.conductor();
    let vg = b.valuation(g)?.finite().ok_or(Error::CommonFactor)?;
    let v_br = b.valuation(&bracket(f, g))?;
    let v_gp = branch::t_derivative_order(&b.par, g)?;
    let identity = v_br == plus(c, v_gp);
    let bound = (c + vg) as i64 - 1;
    let (inequality, equality) = match v_br {
        Valuation::Finite(v) => (v as i64 >= bound, v as i64 == bound),
        Valuation::Infinite => (true, false),
    };
    let p = f.field().characteristic();
    let criterion = equality == !p_divides(p, vg);
    Ok(Check::new(
        "delgado",
        identity && inequality && criterion,
        json!({"c": c, "v_g": vg, "v_bracket": v_br, "v_gprime": v_gp, "identity": identity,
               "inequality": inequality, "equality": equality, "p_divides_v_g": p_divides(p, vg)}),
    ))
}

/// `v(f_X), v(f_Y) >= c`, `τ >= c/2`, and `μ >= c` when `μ` is finite.
pub fn conductor_ideal_check(f: &Poly) -> Result<Check> {
    let b = analyze_branch(f)?;
    let tau = tjurina_number(f)?;
    let mu = milnor_number(f)?;
    conductor_ideal_check_with(f, &b, tau, mu)
}

pub fn conductor_ideal_check_with(f: &Poly, b: &BranchData, tau: Colength, mu: Colength) -> Result<Check> {
    let c = b.conductor();
    let v_fx = b.valuation(&f.derivative(Var::X))?;
    let v_fy = b.valuation(&f.derivative(Var::Y))?;
    let at_least = |v: Valuation| v >= Valuation::Finite(c);
    let tau_ok = match tau {
        Colength::Finite(t) => 2 * t >= c,
        Colength::Infinite => false,
    };
    let mu_ok = match mu {
        Colength::Finite(m) => m >= c,
        Colength::Infinite => true,
    };
    Ok(Check::new(
        "conductor_ideal",
        at_least(v_fx) && at_least(v_fy) && tau_ok && mu_ok,
        json!({"c": c, "v_fx": v_fx, "v_fy": v_fy, "tau": tau, "mu": mu,
               "mu_clause": if mu == Colength::Infinite { "skipped" } else { "checked" }}),
    ))
}

#[derive(Clone, Copy, Debug)]
pub struct ReportOptions {
    /// Largest `l` tried in the search for `f^l ∈ M·T(f)^l`; 0 skips it.
    pub lmax: u32,
    pub e0: bool,
}

impl Default for ReportOptions {
    fn default() -> Self {
        ReportOptions { lmax: 5, e0: true }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SemigroupSummary {
    pub gens: Vec<u64>,
    pub conductor: u64,
    pub tame: bool,
}

impl SemigroupSummary {
    pub fn new(s: &ValueSemigroup, p: u64) -> SemigroupSummary {
        SemigroupSummary { gens: s.generators().to_vec(), conductor: s.conductor(), tame: s.is_tame(p) }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct InvariantReport {
    pub char: u64,
    pub ext: u32,
    pub poly: String,
    pub irreducible: bool,
    pub mu: Colength,
    pub tau: Colength,
    pub e0_tjurina: Option<u64>,
    pub delta: Option<u64>,
    pub semigroup: Option<SemigroupSummary>,
    pub conductor: Option<u64>,
    pub tame: Option<bool>,
    pub mu_stable_at: Option<u32>,
    pub checks: Vec<Check>,
    pub wild_gap: Option<i64>,
}

impl InvariantReport {
    /// True unless some identity check failed.
    pub fn all_checks_pass(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

/// Full report for `f`; branch-only fields stay empty for reducible input.
pub fn invariant_report(f: &Poly, opts: ReportOptions) -> Result<InvariantReport> {
    nonzero(f)?;
    let k = f.field();
    let p = k.characteristic();
    let mu = milnor_number(f)?;
    let tau = tjurina_number(f)?;
    let isolated = tau != Colength::Infinite;
    let e0_tjurina = if opts.e0 && isolated { Some(curve_milnor(f)?) } else { None };
    let mu_stable_at = if opts.lmax > 0 && isolated {
        match localideal::mu_stability(f, opts.lmax)? {
            MuStability::StableAt(l) => Some(l),
            MuStability::UnknownUpTo(_) => None,
        }
    } else {
        None
    };
    let branch = match analyze_branch(f) {
        Ok(b) => Some(b),
        Err(Error::Reducible(_)) => None,
        Err(e) => return Err(e),
    };
    let mut report = InvariantReport {
        char: p,
        ext: k.degree(),
        poly: f.to_string(),
        irreducible: branch.is_some(),
        mu,
        tau,
        e0_tjurina,
        delta: None,
        semigroup: None,
        conductor: None,
        tame: None,
        mu_stable_at,
        checks: Vec::new(),
        wild_gap: None,
    };
    if let Some(b) = branch {
        let c = b.conductor();
        report.delta = Some(c / 2);
        report.semigroup = Some(SemigroupSummary::new(&b.semigroup, p));
        report.conductor = Some(c);
        report.tame = Some(b.semigroup.is_tame(p));
        report.wild_gap = mu.finite().map(|m| m as i64 - c as i64);
        if c > 0 {
            report.checks.push(check_gorenstein_with(f, &b)?);
            report.checks.push(conductor_ideal_check_with(f, &b, tau, mu)?);
        }
    }
    Ok(report)
}
