//! Approximate roots, the elements `q_s ∈ J(f)` with `I(f, q_s) = s + c − 1`,
//! and an executable check that `μ(f) = c(f)` for tame branches.

use std::collections::{BTreeMap, HashMap};

use serde::Serialize;

use crate::algebra::{bracket, Poly, UniSeries, Var};
use crate::branch::{hn_expand, Parametrization, Valuation};
use crate::error::{Error, Result};
use crate::field::{Elem, Field};
use crate::invariants::{analyze_branch, milnor_number};
use crate::localideal::{standard_basis_auto, Colength, StandardBasis};
use crate::prep::{is_weierstrass, weierstrass_by_coords};
use crate::semigroup::ValueSemigroup;

fn tower_err(level: usize, detail: impl Into<String>) -> Error {
    Error::TowerInvariantViolated { level, detail: detail.into() }
}

/// Digits of `f = Σ d_i g^i` with `deg_Y d_i < deg_Y g`, for monic `g`.
pub fn adic_expansion(f: &Poly, g: &Poly) -> Result<Vec<Poly>> {
    let mut digits = Vec::new();
    let mut rest = f.clone();
    while !rest.is_zero() {
        let (q, r) = rest.divrem_y(g)?;
        digits.push(r);
        rest = q;
    }
    Ok(digits)
}

/// The monic `G` of degree `n/d` with `deg_Y(F − G^d) < n − n/d`, by
/// Tschirnhausen steps `G ↦ G + a_{d−1}/d` on the `G`-adic expansion of `F`.
pub fn approximate_root(f: &Poly, d: u32) -> Result<Poly> {
    let k = f.field();
    if !f.is_monic_in_y() {
        return Err(Error::LeadingCoefficientNotUnit);
    }
    let n = f.deg_y().unwrap();
    if d == 0 || n % d != 0 {
        return Err(Error::InvalidInput(format!("{d} does not divide the degree {n}")));
    }
    if d == 1 {
        return Ok(f.clone());
    }
    let p = k.characteristic();
    if p != 0 && d as u64 % p == 0 {
        return Err(Error::CharacteristicDividesIndex(d as u64));
    }
    let dinv = k.inv(&k.from_i64(d as i64))?;
    let mut g = Poly::monomial(k, k.one(), 0, n / d);
    for _ in 0..=n {
        let digits = adic_expansion(f, &g)?;
        let a = digits.get(d as usize - 1).cloned().unwrap_or_else(|| Poly::zero(k));
        if a.is_zero() {
            return Ok(g);
        }
        g = &g + &a.scale(&dinv);
    }
    Err(Error::InvalidInput("Tschirnhausen iteration did not settle".into()))
}

/// Approximate roots `f_0, ..., f_{g−1}` of a monic Weierstrass polynomial,
/// with the data of every truncated curve `F_ℓ` (`F_ℓ = f_ℓ`, `F_g = f`).
#[derive(Clone, Debug)]
pub struct RootTower {
    f: Poly,
    semigroup: ValueSemigroup,
    roots: Vec<Poly>,
    remainders: Vec<Poly>,
    levels: Vec<ValueSemigroup>,
}

impl RootTower {
    pub fn f(&self) -> &Poly {
        &self.f
    }

    pub fn semigroup(&self) -> &ValueSemigroup {
        &self.semigroup
    }

    pub fn genus(&self) -> usize {
        self.roots.len()
    }

    /// `f_j` for `j >= −1`, where `f_{−1} = X`.
    pub fn root(&self, j: isize) -> Poly {
        if j < 0 { Poly::x(self.f.field()) } else { self.roots[j as usize].clone() }
    }

    pub fn roots(&self) -> &[Poly] {
        &self.roots
    }

    /// `G_j = f_{j−1}^{n_j} − f_j` for `j = 1..=g`, with `f_g = f`.
    pub fn remainders(&self) -> &[Poly] {
        &self.remainders
    }

    /// `F_ℓ` for `ℓ = 0..=g`.
    pub fn level_poly(&self, l: usize) -> &Poly {
        if l == self.genus() { &self.f } else { &self.roots[l] }
    }

    /// `S(F_ℓ) = ⟨v_0/e_ℓ, ..., v_ℓ/e_ℓ⟩`.
    pub fn level_semigroup(&self, l: usize) -> &ValueSemigroup {
        &self.levels[l]
    }

    /// `I(f, f_j) = v_{j+1}`.
    pub fn intersection_values(&self) -> Vec<u64> {
        self.semigroup.generators().to_vec()
    }
}

fn level_semigroup(s: &ValueSemigroup, l: usize) -> Result<ValueSemigroup> {
    let e = s.e(l);
    ValueSemigroup::new(s.generators()[..=l].iter().map(|v| v / e).collect())
}

/// Tower of approximate roots `f_j = approximate_root(f, e_j)`; checks
/// `deg f_j = v_0/e_j`, `I(f, f_j) = v_{j+1}`, `S(f_j)` and the shape of
/// the remainders.
pub fn build_tower(f: &Poly, s: &ValueSemigroup) -> Result<RootTower> {
    if !f.is_monic_in_y() || f.deg_y() != Some(s.generators()[0] as u32) {
        return Err(Error::HypothesisViolated(format!("{f} is not monic of degree {} in Y", s.generators()[0])));
    }
    let b = analyze_branch(f)?;
    if &b.semigroup != s {
        return Err(tower_err(s.genus(), format!("S(f) = {} differs from {s}", b.semigroup)));
    }
    let g = s.genus();
    let v = s.generators();
    let mut roots = Vec::new();
    for j in 0..g {
        let r = approximate_root(f, s.e(j) as u32)?;
        if r.deg_y() != Some((v[0] / s.e(j)) as u32) {
            return Err(tower_err(j, format!("degree of f_{j} is {:?}", r.deg_y())));
        }
        let iv = b.valuation(&r)?.finite();
        if iv != Some(v[j + 1]) {
            return Err(tower_err(j, format!("I(f, f_{j}) = {iv:?}, expected {}", v[j + 1])));
        }
        roots.push(r);
    }
    let mut levels = Vec::new();
    for l in 0..=g {
        let expected = level_semigroup(s, l)?;
        if l > 0 && l < g {
            let bl = analyze_branch(&roots[l])?;
            if bl.semigroup != expected {
                return Err(tower_err(l, format!("S(f_{l}) = {}, expected {expected}", bl.semigroup)));
            }
        }
        levels.push(expected);
    }
    let mut remainders = Vec::new();
    for j in 1..=g {
        let fj = if j == g { f.clone() } else { roots[j].clone() };
        let prev = &roots[j - 1];
        let n = s.n(j) as u32;
        let gj = &prev.pow(n) - &fj;
        let digits = adic_expansion(&gj, prev)?;
        if digits.len() + 1 > n as usize && !gj.is_zero() {
            return Err(tower_err(j, "remainder reaches f_{j-1}^{n_j - 1}"));
        }
        remainders.push(gj);
    }
    Ok(RootTower { f: f.clone(), semigroup: s.clone(), roots, remainders, levels })
}

/// `I(f, [f, f_{j−1}])` for `j = 1..=g`, next to the lower bound `v_j + c − 1`,
/// attained exactly when `p ∤ v_j`. The value is infinite when the bracket vanishes.
pub fn bracket_values(tower: &RootTower) -> Result<Vec<(u64, Valuation, u64)>> {
    let b = analyze_branch(tower.f())?;
    let c = tower.semigroup.conductor();
    let v = tower.semigroup.generators();
    (1..=tower.genus())
        .map(|j| {
            let iv = b.valuation(&bracket(tower.f(), &tower.root(j as isize - 1)))?;
            Ok((v[j], iv, v[j] + c - 1))
        })
        .collect()
}

/// Expansion `h = Σ a_J(X) f^J` over `f^J = f_0^{j_0} ⋯ f_{g−1}^{j_{g−1}}`,
/// `0 <= j_i < n_{i+1}`, and the split `h = f_{g−1}^{n_g − 1} h″ + h′`.
#[derive(Clone, Debug)]
pub struct VDecomposition {
    pub coeffs: BTreeMap<Vec<u32>, Poly>,
    pub h2: Poly,
    pub h1: Poly,
}

pub fn vmodule_decompose(h: &Poly, tower: &RootTower) -> Result<VDecomposition> {
    let g = tower.genus();
    let n0 = tower.semigroup.generators()[0] as u32;
    if h.deg_y().is_some_and(|d| d >= n0) {
        return Err(Error::HypothesisViolated(format!("deg_Y h >= {n0}")));
    }
    let mut coeffs = BTreeMap::new();
    fn rec(h: &Poly, level: usize, tower: &RootTower, prefix: &mut Vec<u32>, out: &mut BTreeMap<Vec<u32>, Poly>) -> Result<()> {
        if level == 0 {
            if !h.is_zero() {
                let mut key = prefix.clone();
                key.reverse();
                out.insert(key, h.clone());
            }
            return Ok(());
        }
        let digits = adic_expansion(h, &tower.roots[level - 1])?;
        for (i, d) in digits.iter().enumerate() {
            prefix.push(i as u32);
            rec(d, level - 1, tower, prefix, out)?;
            prefix.pop();
        }
        Ok(())
    }
    rec(h, g, tower, &mut Vec::new(), &mut coeffs)?;
    let k = h.field();
    if g == 0 {
        return Ok(VDecomposition { coeffs, h2: Poly::zero(k), h1: h.clone() });
    }
    let top = tower.semigroup.n(g) as u32 - 1;
    let (h2, h1) = h.divrem_y(&tower.roots[g - 1].pow(top))?;
    Ok(VDecomposition { coeffs, h2, h1 })
}

/// `Σ_J a_J f^J`.
pub fn vmodule_recompose(d: &VDecomposition, tower: &RootTower) -> Poly {
    let k = tower.f.field();
    let mut out = Poly::zero(k);
    for (j, a) in &d.coeffs {
        let mut term = a.clone();
        for (i, &e) in j.iter().enumerate() {
            term = &term * &tower.roots[i].pow(e);
        }
        out = &out + &term;
    }
    out
}

/// Sum `Σ_j A_j [F, f_j]` as coefficient polynomials `A_j`, index `j + 1`.
#[derive(Clone, Debug)]
struct QData {
    value: Poly,
    coeffs: Vec<Poly>,
    lead: (Poly, isize),
}

/// `q_s` together with its bracket expansion.
#[derive(Clone, Debug)]
pub struct QsElement {
    pub s: u64,
    pub value: Poly,
    /// `(j, A_j)` with `q_s ≡ Σ A_j [f, f_j]` modulo `M^{cut}`.
    pub trace: Vec<(isize, Poly)>,
    /// `P_1 f_{j_1}` with `I(f, P_1 f_{j_1}) = s`.
    pub lead: (Poly, isize),
    pub intersection: Option<u64>,
    pub deg_y: Option<u32>,
}

/// Builds `q_s` and the auxiliary `q̃` for every level of a tower.
pub struct QsBuilder<'a> {
    tower: &'a RootTower,
    powers: Vec<(Vec<UniSeries>, Vec<UniSeries>)>,
    thresholds: Vec<u64>,
    brackets: Vec<Vec<Poly>>,
    cut: u32,
    work: u32,
    memo: HashMap<(usize, u64), QData>,
}

/// Powers `x(t)^i`, `i < xs`, and `y(t)^j`, `j < ys`, in input coordinates.
fn series_powers(par: &Parametrization, xs: usize, ys: usize) -> (Vec<UniSeries>, Vec<UniSeries>) {
    let (x, y) = if par.swapped() { (&par.y_of_t, &par.x_of_t) } else { (&par.x_of_t, &par.y_of_t) };
    let pows = |s: &UniSeries, n: usize| {
        let mut v = vec![UniSeries::one(s.field(), s.precision())];
        for i in 1..n {
            let next = v[i - 1].mul(s);
            v.push(next);
        }
        v
    };
    (pows(x, xs + 1), pows(y, ys))
}

/// `s ∈ S*` with `s <= c + v_g`.
pub fn sweep_relevant_range(s: &ValueSemigroup) -> Vec<u64> {
    let top = s.conductor() + s.generators().last().unwrap();
    (1..=top).filter(|&x| s.contains(x)).collect()
}

impl<'a> QsBuilder<'a> {
    /// Every `q_s` with `s <= s_max` is exact modulo `M^{cut}`, where
    /// `M^{cut} ⊂ J(f)` and `cut·v_0 > s_max + c − 1`.
    pub fn new(tower: &'a RootTower, s_max: u64) -> Result<QsBuilder<'a>> {
        let s = &tower.semigroup;
        let k = tower.f.field();
        let p = k.characteristic();
        if !s.is_tame(p) {
            return Err(Error::HypothesisViolated(format!("{s} is not tame in characteristic {p}")));
        }
        let v0 = s.generators()[0];
        let c = s.conductor();
        let f = &tower.f;
        let jac = standard_basis_auto(&[f.derivative(Var::X), f.derivative(Var::Y)])?;
        let l = jac.primary_exponent()? as u64;
        let apery_top = *s.apery_set().last().unwrap();
        let cut = l.max((s_max + c - 1) / v0 + 1);
        let g = tower.genus();
        let mut thresholds = Vec::new();
        let mut pars = Vec::new();
        let mut work = cut;
        let mut degs = Vec::new();
        for lv in 0..=g {
            let e = s.e(lv);
            let t = (cut * v0 + apery_top).div_ceil(e) + c;
            work = work.max((t * e).div_ceil(v0) + 2);
            let fl = tower.level_poly(lv);
            let (_, par) = hn_expand(fl, (t + 2 * v0 / e + 8) as usize)?;
            pars.push(par);
            degs.push(fl.deg_y().unwrap());
            thresholds.push(t);
        }
        let powers = pars.iter().zip(&degs).map(|(par, &d)| series_powers(par, work as usize, d as usize)).collect();
        let brackets = (0..=g)
            .map(|lv| (-1..lv as isize).map(|j| bracket(tower.level_poly(lv), &tower.root(j))).collect())
            .collect();
        Ok(QsBuilder { tower, powers, thresholds, brackets, cut: cut as u32, work: work as u32, memo: HashMap::new() })
    }

    pub fn cut(&self) -> u32 {
        self.cut
    }

    fn trunc(&self, p: &Poly) -> Poly {
        p.truncate_x(self.work)
    }

    fn mul(&self, a: &Poly, b: &Poly) -> Poly {
        self.trunc(&(a * b))
    }

    /// `I(F_ℓ, h)`, or `None` above the working threshold.
    fn subst(&self, lv: usize, h: &Poly) -> UniSeries {
        let (xp, yp) = &self.powers[lv];
        let k = h.field();
        let mut acc = UniSeries::zero(k, xp[0].precision());
        for (&(i, j), c) in h.terms() {
            let xi = xp.get(i as usize).cloned().unwrap_or_else(|| xp[1].pow(i as u64));
            let yj = yp.get(j as usize).cloned().unwrap_or_else(|| yp[1].pow(j as u64));
            acc = acc.add(&xi.mul(&yj).scale(c));
        }
        acc
    }

    fn val(&self, lv: usize, h: &Poly) -> Option<u64> {
        let o = self.subst(lv, h).order()? as u64;
        (o <= self.thresholds[lv]).then_some(o)
    }

    fn lc(&self, lv: usize, h: &Poly, o: u64) -> Elem {
        self.subst(lv, h).coeff(o as usize)
    }

    fn bracket_sum(&self, lv: usize, coeffs: &[Poly]) -> Poly {
        let k = self.tower.f.field();
        let mut out = Poly::zero(k);
        for (a, b) in coeffs.iter().zip(&self.brackets[lv]) {
            if !a.is_zero() {
                out = &out + &self.mul(a, b);
            }
        }
        out
    }

    fn level(&self, lv: usize) -> &ValueSemigroup {
        self.tower.level_semigroup(lv)
    }

    fn conductor(&self, lv: usize) -> u64 {
        self.level(lv).conductor()
    }

    /// `s = n_ℓ t + w v'_ℓ` with `t ∈ S(F_{ℓ−1})` and `0 <= w < n_ℓ`.
    fn split(&self, lv: usize, s: u64) -> Result<(u64, u64)> {
        let sg = self.level(lv);
        let n = sg.n(lv);
        let v = sg.generators()[lv];
        let inv = (1..n).find(|x| (x * v) % n == 1).unwrap_or(0);
        let w = (s % n) * inv % n;
        if w * v > s || (s - w * v) % n != 0 {
            return Err(Error::NotInSemigroup(s));
        }
        let t = (s - w * v) / n;
        if !self.level(lv - 1).contains(t) {
            return Err(Error::NotInSemigroup(s));
        }
        Ok((t, w))
    }

    /// `q̃_{F_{ℓ−1}, t}`: the expansion of `q_{F_{ℓ−1}, t}` with `F_ℓ` in the brackets.
    fn tilde(&mut self, lv: usize, t: u64) -> Result<QData> {
        let below = self.q(lv - 1, t)?;
        let mut coeffs = below.coeffs.clone();
        coeffs.push(Poly::zero(self.tower.f.field()));
        let value = self.bracket_sum(lv, &coeffs);
        let deg = self.tower.level_poly(lv).deg_y().unwrap();
        if value.deg_y().is_some_and(|d| d >= deg) {
            return Err(tower_err(lv, format!("q̃ for t = {t} has Y-degree {:?}", value.deg_y())));
        }
        Ok(QData { value, coeffs, lead: below.lead })
    }

    fn q(&mut self, lv: usize, s: u64) -> Result<QData> {
        if let Some(d) = self.memo.get(&(lv, s)) {
            return Ok(d.clone());
        }
        let k = self.tower.f.field().clone();
        if s == 0 || !self.level(lv).contains(s) {
            return Err(Error::NotInSemigroup(s));
        }
        let out = if lv == 0 {
            // F_0 has degree 1: q = X^{s−1} [F_0, X]
            let p = Poly::monomial(&k, k.one(), s as u32 - 1, 0);
            let coeffs = vec![p.clone()];
            QData { value: self.bracket_sum(0, &coeffs), coeffs, lead: (p, -1) }
        } else {
            let (t, w) = self.split(lv, s)?;
            let v = self.level(lv).generators()[lv];
            let below = self.tower.root(lv as isize - 1);
            if w == 0 {
                self.tilde(lv, t)?
            } else if t == 0 && w == 1 {
                let mut coeffs = vec![Poly::zero(&k); lv + 1];
                coeffs[lv] = Poly::one(&k);
                QData { value: self.bracket_sum(lv, &coeffs), coeffs, lead: (Poly::one(&k), lv as isize - 1) }
            } else if t == 0 {
                let prev = self.q(lv, (w - 1) * v)?;
                let (h, coeffs, _) = self.reduce(lv, &prev, (w - 1) * v)?;
                QData {
                    value: self.mul(&below, &h),
                    coeffs: coeffs.iter().map(|a| self.mul(&below, a)).collect(),
                    lead: (self.mul(&prev.lead.0, &below), prev.lead.1),
                }
            } else {
                let qt = self.q(lv - 1, t)?;
                let factor = self.mul(&qt.lead.0, &self.tower.root(qt.lead.1));
                let qw = self.q(lv, w * v)?;
                let (h, coeffs, _) = self.reduce(lv, &qw, w * v)?;
                QData {
                    value: self.mul(&factor, &h),
                    coeffs: coeffs.iter().map(|a| self.mul(&factor, a)).collect(),
                    lead: (self.mul(&factor, &qw.lead.0), qw.lead.1),
                }
            }
        };
        let deg = self.tower.level_poly(lv).deg_y().unwrap();
        if out.value.deg_y().is_some_and(|d| d >= deg) {
            return Err(tower_err(lv, format!("q for s = {s} has Y-degree {:?}", out.value.deg_y())));
        }
        self.memo.insert((lv, s), out.clone());
        Ok(out)
    }

    /// The degree reduction `h ↦ h′` at level `ℓ`: returns `h′`, the
    /// expansion of `h − Σ α_j q̃_{u_j}` and the log `(α_j, u_j)`.
    fn reduce(&mut self, lv: usize, h: &QData, m: u64) -> Result<(Poly, Vec<Poly>, Vec<(Elem, u64)>)> {
        let k = self.tower.f.field().clone();
        let n = self.level(lv).n(lv);
        let c = self.conductor(lv);
        let c_below = self.conductor(lv - 1);
        let deg = self.tower.level_poly(lv).deg_y().unwrap();
        if m % n == 0 || m as i64 <= n as i64 * (c_below as i64 - 1) {
            return Err(Error::HypothesisViolated(format!("m = {m} with n = {n}, c(f_(g-1)) = {c_below}")));
        }
        if h.value.deg_y().is_some_and(|d| d >= deg) {
            return Err(Error::HypothesisViolated("deg_Y h >= deg_Y f".into()));
        }
        if self.val(lv, &h.value) != Some(c - 1 + m) {
            return Err(Error::HypothesisViolated(format!("I(f, h) is not c − 1 + {m}")));
        }
        let gpow = self.tower.root(lv as isize - 1).pow(n as u32 - 1);
        let mut cur = h.value.clone();
        let mut acc = Poly::zero(&k);
        let mut coeffs = h.coeffs.clone();
        let mut log = Vec::new();
        while self.val(lv, &cur).is_some() {
            let (q2, r) = cur.divrem_y(&gpow)?;
            acc = &acc + &r;
            let rest = self.mul(&gpow, &q2);
            let Some(iv) = self.val(lv, &rest) else { break };
            let excess = iv as i64 - (c as i64 - 1);
            if excess <= 0 || excess % n as i64 != 0 {
                return Err(tower_err(lv, format!("I(f, f_(g-1)^(n-1) h'') = {iv} is off the lattice")));
            }
            let u = excess as u64 / n;
            let tq = self.tilde(lv, u)?;
            if self.val(lv, &tq.value) != Some(iv) {
                return Err(tower_err(lv, format!("I(f, q̃_{u}) differs from {iv}")));
            }
            let alpha = k.div(&self.lc(lv, &rest, iv), &self.lc(lv, &tq.value, iv))?;
            cur = &rest - &tq.value.scale(&alpha);
            for (a, b) in coeffs.iter_mut().zip(&tq.coeffs) {
                *a = &*a - &b.scale(&alpha);
            }
            log.push((alpha, u));
        }
        Ok((acc, coeffs, log))
    }

    /// `q̃_{f_{g−1}, t}` at the top level.
    pub fn tilde_q(&mut self, t: u64) -> Result<Poly> {
        let g = self.tower.genus();
        if g == 0 {
            return Err(Error::HypothesisViolated("genus 0 has no auxiliary elements".into()));
        }
        Ok(self.tilde(g, t)?.value.truncate_x(self.cut))
    }

    /// Degree reduction of `h` at the top level, with `I(f, h) = c − 1 + m`.
    pub fn degree_reduce(&mut self, h: &Poly, m: u64) -> Result<(Poly, Vec<(Elem, u64)>)> {
        let g = self.tower.genus();
        let k = self.tower.f.field();
        let data = QData { value: self.trunc(h), coeffs: vec![Poly::zero(k); g + 1], lead: (Poly::one(k), -1) };
        let (hp, _, log) = self.reduce(g, &data, m)?;
        Ok((hp.truncate_x(self.cut), log))
    }

    pub fn q_element(&mut self, s: u64) -> Result<QsElement> {
        let g = self.tower.genus();
        if !self.tower.semigroup.contains(s) || s == 0 {
            return Err(Error::NotInSemigroup(s));
        }
        let d = self.q(g, s)?;
        let value = d.value.truncate_x(self.cut);
        let intersection = self.val(g, &value);
        let trace = d.coeffs.iter().enumerate().filter(|(_, a)| !a.is_zero()).map(|(j, a)| (j as isize - 1, a.truncate_x(self.cut))).collect();
        let deg_y = value.deg_y();
        Ok(QsElement { s, value, trace, lead: d.lead, intersection, deg_y })
    }
}

/// Realizers `X^{x_0} Π f_{i−1}^{x_i}` of every `α ∈ S \ (S + c − 1)`, read
/// off the canonical representation.
pub fn key_family(tower: &RootTower) -> Result<Vec<(u64, Poly)>> {
    let s = &tower.semigroup;
    let k = tower.f.field();
    let mut out = Vec::new();
    for alpha in s.sweep_set() {
        let x = s.canonical_representation(alpha).ok_or(Error::NotInSemigroup(alpha))?;
        let mut r = Poly::monomial(k, k.one(), x[0] as u32, 0);
        for (i, &e) in x.iter().enumerate().skip(1) {
            r = &r * &tower.roots[i - 1].pow(e as u32);
        }
        out.push((alpha, r));
    }
    Ok(out)
}

/// Rank of vectors over a field.
pub fn rank(k: &Field, mut rows: Vec<Vec<Elem>>) -> usize {
    let cols = rows.first().map_or(0, |r| r.len());
    let mut r = 0;
    for col in 0..cols {
        let Some(piv) = (r..rows.len()).find(|&i| !k.is_zero(&rows[i][col])) else { continue };
        rows.swap(r, piv);
        let inv = k.inv(&rows[r][col]).unwrap();
        for i in 0..rows.len() {
            if i != r && !k.is_zero(&rows[i][col]) {
                let factor = k.mul(&rows[i][col], &inv);
                for j in col..cols {
                    let t = k.mul(&factor, &rows[r][j]);
                    rows[i][j] = k.sub(&rows[i][j], &t);
                }
            }
        }
        r += 1;
    }
    r
}

fn normal_form_vectors(sb: &StandardBasis, polys: &[Poly]) -> Result<Vec<Vec<Elem>>> {
    let monos = sb.standard_monomials().ok_or(Error::NotPrimary)?;
    polys
        .iter()
        .map(|p| {
            let nf = sb.normal_form(p)?;
            Ok(monos.iter().map(|&(i, j)| nf.coeff(i, j)).collect())
        })
        .collect()
}

#[derive(Clone, Debug, Serialize)]
pub struct QsRow {
    pub s: u64,
    pub intersection: Option<u64>,
    pub expected: u64,
    pub deg_y: Option<u32>,
    pub member: bool,
    pub ok: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct KeyVerdict {
    pub mu: Colength,
    pub mu_weierstrass: Colength,
    pub conductor: u64,
    pub mu_equals_c: bool,
    pub family_size: usize,
    pub rank: usize,
    pub rank_ok: bool,
    pub q_rows: Vec<QsRow>,
    pub q_ok: bool,
    pub passed: bool,
}

/// Monic Weierstrass form of `f` whose semigroup matches that of `f`.
pub fn weierstrass_form(f: &Poly) -> Result<(Poly, ValueSemigroup)> {
    let b = analyze_branch(f)?;
    let s = b.semigroup;
    let v0 = s.generators()[0] as u32;
    let top = s.conductor() as u32 + *s.generators().last().unwrap() as u32;
    let prec = (2 * top).div_ceil(v0) + f.total_degree() + 4;
    let (_, w) = weierstrass_by_coords(f, prec)?;
    if !is_weierstrass(&w) {
        return Err(Error::HypothesisViolated("prepared form is not Weierstrass".into()));
    }
    let wp = w.to_poly();
    let bw = analyze_branch(&wp)?;
    if bw.semigroup != s {
        return Err(Error::SemigroupMismatch(format!("prepared form has {}, input has {s}", bw.semigroup)));
    }
    Ok((wp, s))
}

/// `μ = c`, the key family spans `k[[X,Y]]/J` with rank `c`, and every `q_s`
/// in the sweep-relevant range lies in `J` with `I(f, q_s) = s + c − 1`.
pub fn verify_key_theorem(f: &Poly) -> Result<KeyVerdict> {
    let (w, s) = weierstrass_form(f)?;
    let k = f.field();
    let c = s.conductor();
    let mu = milnor_number(f)?;
    let mu_w = milnor_number(&w)?;
    let tower = build_tower(&w, &s)?;
    let jac = standard_basis_auto(&[w.derivative(Var::X), w.derivative(Var::Y)])?;
    let family = key_family(&tower)?;
    let polys: Vec<Poly> = family.iter().map(|(_, p)| p.clone()).collect();
    let rk = if jac.colength().finite().is_some() { rank(k, normal_form_vectors(&jac, &polys)?) } else { 0 };
    let range = sweep_relevant_range(&s);
    let mut builder = QsBuilder::new(&tower, *range.last().unwrap_or(&1))?;
    let n = s.generators()[0] as u32;
    let mut rows = Vec::new();
    for &sv in &range {
        let q = builder.q_element(sv)?;
        let member = jac.contains(&q.value)?;
        let expected = sv + c - 1;
        let ok = member && q.intersection == Some(expected) && q.deg_y.is_none_or(|d| d < n);
        rows.push(QsRow { s: sv, intersection: q.intersection, expected, deg_y: q.deg_y, member, ok });
    }
    let mu_equals_c = mu == Colength::Finite(c) && mu_w == Colength::Finite(c);
    let rank_ok = rk as u64 == c && family.len() as u64 == c;
    let q_ok = rows.iter().all(|r| r.ok);
    Ok(KeyVerdict {
        mu,
        mu_weierstrass: mu_w,
        conductor: c,
        mu_equals_c,
        family_size: family.len(),
        rank: rk,
        rank_ok,
        q_rows: rows,
        q_ok,
        passed: mu_equals_c && rank_ok && q_ok,
    })
}
