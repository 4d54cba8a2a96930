//! Standard bases in `k[[X, Y]]` under a local degree order.
//!
//! Reduction follows Mora's normal form with ecart selection. As soon as the
//! lead ideal contains every monomial of some degree `N`, the ideal contains
//! `M^N` and all further work happens in the finite algebra `k[X, Y]/M^N`.

use std::cmp::{Ordering, Reverse};
use std::collections::{BTreeSet, HashSet};

use crate::algebra::poly::{Mono, Poly, Var};
use crate::error::{Error, Result};
use crate::field::{Elem, Field};

mod dense;
use dense::AnyDense;

/// Smaller total degree is larger; ties go to the larger `X`-exponent.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct LocalOrder;

impl LocalOrder {
    pub fn cmp(&self, a: Mono, b: Mono) -> Ordering {
        key(b).cmp(&key(a))
    }

    /// Largest monomial of `f` with its coefficient.
    pub fn lead(&self, f: &Poly) -> Option<(Mono, Elem)> {
        f.terms().min_by_key(|(m, _)| key(**m)).map(|(m, c)| (*m, c.clone()))
    }
}

fn key(m: Mono) -> (u32, Reverse<u32>) {
    (m.0 + m.1, Reverse(m.0))
}

fn divides(a: Mono, b: Mono) -> bool {
    a.0 <= b.0 && a.1 <= b.1
}

/// Polynomial stored with terms in increasing local order, lead last.
#[derive(Clone, Debug)]
struct LPoly {
    terms: Vec<(Mono, Elem)>,
}

impl LPoly {
    fn from_poly(p: &Poly, trunc: Option<u32>) -> LPoly {
        let mut terms: Vec<(Mono, Elem)> = p
            .terms()
            .filter(|((i, j), _)| trunc.is_none_or(|n| i + j < n))
            .map(|(m, c)| (*m, c.clone()))
            .collect();
        terms.sort_by_key(|(m, _)| Reverse(key(*m)));
        LPoly { terms }
    }

    fn to_poly(&self, k: &Field) -> Poly {
        Poly::from_terms(k, self.terms.iter().cloned())
    }

    fn lead(&self) -> Option<&(Mono, Elem)> {
        self.terms.last()
    }

    fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    fn max_degree(&self) -> u32 {
        self.terms.iter().map(|((i, j), _)| i + j).max().unwrap_or(0)
    }

    fn ecart(&self) -> u32 {
        match self.lead() {
            Some(((i, j), _)) => self.max_degree() - i - j,
            None => 0,
        }
    }

    fn truncate(&mut self, n: u32) {
        self.terms.retain(|((i, j), _)| i + j < n);
    }

    /// `self − c · X^s0 Y^s1 · g`, dropping terms of degree `>= trunc`.
    fn sub_scaled(&self, k: &Field, c: &Elem, s: Mono, g: &LPoly, trunc: Option<u32>) -> LPoly {
        let keep = |m: &Mono| trunc.is_none_or(|n| m.0 + m.1 < n);
        let mut out = Vec::with_capacity(self.terms.len() + g.terms.len());
        let mut a = self.terms.iter().peekable();
        let mut b = g
            .terms
            .iter()
            .map(|((i, j), v)| ((i + s.0, j + s.1), v))
            .filter(|(m, _)| keep(m))
            .peekable();
        loop {
            match (a.peek(), b.peek()) {
                (None, None) => break,
                (Some(_), None) => out.push(a.next().unwrap().clone()),
                (None, Some(_)) => {
                    let (m, v) = b.next().unwrap();
                    out.push((m, k.neg(&k.mul(c, v))));
                }
                (Some((ma, _)), Some((mb, _))) => match key(*mb).cmp(&key(*ma)) {
                    Ordering::Less => out.push(a.next().unwrap().clone()),
                    Ordering::Greater => {
                        let (m, v) = b.next().unwrap();
                        out.push((m, k.neg(&k.mul(c, v))));
                    }
                    Ordering::Equal => {
                        let (m, va) = a.next().unwrap();
                        let (_, vb) = b.next().unwrap();
                        let s = k.sub(va, &k.mul(c, vb));
                        if !k.is_zero(&s) {
                            out.push((*m, s));
                        }
                    }
                },
            }
        }
        LPoly { terms: out }
    }

    fn scaled_shift(&self, k: &Field, c: &Elem, s: Mono, trunc: Option<u32>) -> LPoly {
        let terms = self
            .terms
            .iter()
            .map(|((i, j), v)| ((i + s.0, j + s.1), k.mul(c, v)))
            .filter(|((i, j), _)| trunc.is_none_or(|n| i + j < n))
            .collect();
        LPoly { terms }
    }
}

/// Colength of an ideal: the `k`-dimension of the quotient.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Colength {
    Finite(u64),
    Infinite,
}

impl Colength {
    pub fn finite(self) -> Option<u64> {
        match self {
            Colength::Finite(n) => Some(n),
            Colength::Infinite => None,
        }
    }
}

impl std::fmt::Display for Colength {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Colength::Finite(n) => write!(f, "{n}"),
            Colength::Infinite => write!(f, "infinite"),
        }
    }
}

#[derive(Clone, Debug)]
pub struct StandardBasis {
    field: Field,
    generators: Vec<Poly>,
    bound: u32,
    /// Mora basis, kept when no power of `M` lies in the ideal.
    mora: Vec<LPoly>,
    /// Completed basis in `k[X, Y]/M^N` once some `M^N` is known to lie in the ideal.
    dense: Option<AnyDense>,
}

/// Smallest `N` such that every monomial of degree `N` is divisible by a lead.
fn corner_degree(leads: &[Mono]) -> Option<u32> {
    let a = leads.iter().filter(|m| m.1 == 0).map(|m| m.0).min()?;
    let b = leads.iter().filter(|m| m.0 == 0).map(|m| m.1).min()?;
    (0..=a + b).find(|&n| (0..=n).all(|i| leads.iter().any(|l| divides(*l, (i, n - i)))))
}

struct Engine<'a> {
    k: &'a Field,
    bound: u32,
    trunc: Option<u32>,
    basis: Vec<LPoly>,
}

impl Engine<'_> {
    fn leads(&self) -> Vec<Mono> {
        self.basis.iter().filter_map(|g| g.lead().map(|l| l.0)).collect()
    }

    fn check_bound(&self, h: &LPoly) -> Result<()> {
        if self.trunc.is_none() && h.max_degree() > self.bound {
            return Err(Error::BoundExhausted(self.bound));
        }
        Ok(())
    }

    /// Lead-reduces `h` (Mora's normal form before truncation is available).
    fn reduce_lead(&self, mut h: LPoly) -> Result<LPoly> {
        let k = self.k;
        if self.trunc.is_some() {
            while let Some((lm, lc)) = h.lead().cloned() {
                let g = self
                    .basis
                    .iter()
                    .filter(|g| divides(g.lead().unwrap().0, lm))
                    .min_by_key(|g| g.terms.len());
                let Some(g) = g else { break };
                let (gm, gc) = g.lead().unwrap();
                let c = k.div(&lc, gc)?;
                h = h.sub_scaled(k, &c, (lm.0 - gm.0, lm.1 - gm.1), g, self.trunc);
            }
            return Ok(h);
        }
        let mut extra: Vec<LPoly> = Vec::new();
        while let Some((lm, lc)) = h.lead().cloned() {
            let g = self
                .basis
                .iter()
                .chain(extra.iter())
                .filter(|g| divides(g.lead().unwrap().0, lm))
                .min_by_key(|g| (g.ecart(), g.terms.len()));
            let Some(g) = g.cloned() else { break };
            if g.ecart() > h.ecart() {
                extra.push(h.clone());
            }
            let (gm, gc) = g.lead().unwrap();
            let c = k.div(&lc, gc)?;
            h = h.sub_scaled(k, &c, (lm.0 - gm.0, lm.1 - gm.1), &g, None);
            self.check_bound(&h)?;
        }
        Ok(h)
    }

    fn spoly(&self, f: &LPoly, g: &LPoly) -> Result<LPoly> {
        let k = self.k;
        let (fm, fc) = f.lead().unwrap();
        let (gm, gc) = g.lead().unwrap();
        let l = (fm.0.max(gm.0), fm.1.max(gm.1));
        let a = f.scaled_shift(k, &k.inv(fc)?, (l.0 - fm.0, l.1 - fm.1), self.trunc);
        Ok(a.sub_scaled(k, &k.inv(gc)?, (l.0 - gm.0, l.1 - gm.1), g, self.trunc))
    }

    /// Switches to (or tightens) truncated mode when the leads allow it.
    /// Returns true if the truncation degree changed.
    fn update_truncation(&mut self) -> bool {
        let Some(n) = corner_degree(&self.leads()) else { return false };
        if self.trunc.is_some_and(|t| t <= n) {
            return false;
        }
        self.trunc = Some(n);
        for g in self.basis.iter_mut() {
            g.truncate(n);
        }
        self.basis.retain(|g| !g.is_zero());
        true
    }

    fn pair_key(&self, i: usize, j: usize) -> (u32, usize, usize) {
        let a = self.basis[i].lead().unwrap().0;
        let b = self.basis[j].lead().unwrap().0;
        (a.0.max(b.0) + a.1.max(b.1), i, j)
    }

    fn reset_pairs(&self, queue: &mut BTreeSet<(u32, usize, usize)>, pending: &mut HashSet<(usize, usize)>) {
        queue.clear();
        pending.clear();
        for j in 0..self.basis.len() {
            for i in 0..j {
                queue.insert(self.pair_key(i, j));
                pending.insert((i, j));
            }
        }
    }

    /// Mora completion; stops early once a power of `M` is certified.
    fn run(&mut self) -> Result<()> {
        if self.update_truncation() {
            return Ok(());
        }
        let mut queue = BTreeSet::new();
        let mut pending = HashSet::new();
        self.reset_pairs(&mut queue, &mut pending);
        // smallest lcm degree first
        while let Some((_, i, j)) = queue.pop_first() {
            pending.remove(&(i, j));
            let a = self.basis[i].lead().unwrap().0;
            let b = self.basis[j].lead().unwrap().0;
            let l = (a.0.max(b.0), a.1.max(b.1));
            if a.0.min(b.0) == 0 && a.1.min(b.1) == 0 {
                continue;
            }
            // chain criterion
            if self.basis.iter().enumerate().any(|(t, g)| {
                t != i
                    && t != j
                    && divides(g.lead().unwrap().0, l)
                    && !pending.contains(&(i.min(t), i.max(t)))
                    && !pending.contains(&(j.min(t), j.max(t)))
            }) {
                continue;
            }
            let s = self.spoly(&self.basis[i], &self.basis[j])?;
            self.check_bound(&s)?;
            let h = self.reduce_lead(s)?;
            if h.is_zero() {
                continue;
            }
            self.basis.push(h);
            if self.update_truncation() {
                return Ok(());
            } else {
                let n = self.basis.len() - 1;
                for t in 0..n {
                    queue.insert(self.pair_key(t, n));
                    pending.insert((t, n));
                }
            }
        }
        Ok(())
    }
}

/// Standard basis of the ideal generated by `gens`; `bound` caps the total
/// degree of intermediate polynomials before a finiteness certificate exists.
pub fn standard_basis(gens: &[Poly], bound: u32) -> Result<StandardBasis> {
    standard_basis_with_hint(gens, bound, None)
}

/// As [`standard_basis`], with a caller-certified `N` such that `M^N ⊂ I`.
pub fn standard_basis_with_hint(gens: &[Poly], bound: u32, hint: Option<u32>) -> Result<StandardBasis> {
    let k = match gens.first() {
        Some(g) => g.field().clone(),
        None => return Err(Error::InvalidInput("empty generator list".into())),
    };
    if gens.iter().any(|g| g.field() != &k) {
        return Err(Error::FieldMismatch);
    }
    let mut sb = StandardBasis { field: k.clone(), generators: gens.to_vec(), bound, mora: Vec::new(), dense: None };
    let (seeds, n) = match hint {
        Some(n) => (gens.to_vec(), n),
        None => {
            let mut eng = Engine { k: &k, bound, trunc: None, basis: Vec::new() };
            for g in gens.iter().map(|g| LPoly::from_poly(g, None)).filter(|g| !g.is_zero()) {
                eng.check_bound(&g)?;
                eng.basis.push(g);
            }
            eng.run()?;
            match eng.trunc {
                Some(n) => (eng.basis.iter().map(|g| g.to_poly(&k)).collect(), n),
                None => {
                    sb.mora = eng.basis;
                    return Ok(sb);
                }
            }
        }
    };
    sb.dense = Some(AnyDense::build(&k, n, &seeds));
    Ok(sb)
}

impl StandardBasis {
    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn generators(&self) -> &[Poly] {
        &self.generators
    }

    pub fn bound(&self) -> u32 {
        self.bound
    }

    /// Basis elements; once a power `M^N` is certified they are truncated below degree `N`.
    pub fn elements(&self) -> Vec<Poly> {
        match &self.dense {
            Some(d) => d.elements(&self.field),
            None => self.mora.iter().map(|g| g.to_poly(&self.field)).collect(),
        }
    }

    /// Minimal generators of the lead ideal.
    pub fn lead_monomials(&self) -> Vec<Mono> {
        let mut leads: Vec<Mono> = match &self.dense {
            Some(d) => {
                let n = d.truncation();
                let mut l = d.leads();
                l.extend((0..=n).map(|i| (i, n - i)));
                l
            }
            None => self.mora.iter().map(|g| g.lead().unwrap().0).collect(),
        };
        leads.sort();
        leads.dedup();
        let all = leads.clone();
        leads.retain(|m| !all.iter().any(|l| l != m && divides(*l, *m)));
        leads
    }

    /// Degree `N` with `M^N` in the ideal, once certified.
    pub fn truncation_degree(&self) -> Option<u32> {
        self.dense.as_ref().map(|d| d.truncation())
    }

    pub fn is_unit_ideal(&self) -> bool {
        self.truncation_degree() == Some(0)
    }

    /// Monomials outside the lead ideal (a `k`-basis of the quotient).
    pub fn standard_monomials(&self) -> Option<Vec<Mono>> {
        self.dense.as_ref().map(|d| d.standard_monomials())
    }

    pub fn colength(&self) -> Colength {
        match self.standard_monomials() {
            Some(v) => Colength::Finite(v.len() as u64),
            None => Colength::Infinite,
        }
    }

    /// Whether `h` lies in the ideal.
    pub fn contains(&self, h: &Poly) -> Result<bool> {
        if h.field() != &self.field {
            return Err(Error::FieldMismatch);
        }
        if let Some(d) = &self.dense {
            return Ok(d.contains(h));
        }
        let eng = Engine { k: &self.field, bound: self.bound, trunc: None, basis: self.mora.clone() };
        let h = LPoly::from_poly(h, None);
        eng.check_bound(&h)?;
        Ok(eng.reduce_lead(h)?.is_zero())
    }

    /// Fully reduced normal form, a combination of standard monomials;
    /// requires finite colength.
    pub fn normal_form(&self, h: &Poly) -> Result<Poly> {
        if h.field() != &self.field {
            return Err(Error::FieldMismatch);
        }
        match &self.dense {
            Some(d) => Ok(d.normal_form(h, &self.field)),
            None => Err(Error::NotPrimary),
        }
    }

    /// Smallest `l` with `M^l` contained in the ideal.
    pub fn primary_exponent(&self) -> Result<u32> {
        let n = self.truncation_degree().ok_or(Error::NotPrimary)?;
        for l in 0..n {
            let mut all = true;
            for i in 0..=l {
                if !self.contains(&Poly::monomial(&self.field, self.field.one(), i, l - i))? {
                    all = false;
                    break;
                }
            }
            if all {
                return Ok(l);
            }
        }
        Ok(n)
    }
}

pub fn colength(sb: &StandardBasis) -> Colength {
    sb.colength()
}

pub fn membership(h: &Poly, sb: &StandardBasis) -> Result<bool> {
    sb.contains(h)
}

pub fn primary_exponent(sb: &StandardBasis) -> Result<u32> {
    sb.primary_exponent()
}

/// Default degree cap for generators of total degree `d`.
pub fn default_bound(gens: &[Poly]) -> u32 {
    let d = gens.iter().map(|g| g.total_degree()).max().unwrap_or(1);
    (8 * d).max(64)
}

/// Standard basis with the default cap, doubled once on exhaustion.
pub fn standard_basis_auto(gens: &[Poly]) -> Result<StandardBasis> {
    let b = default_bound(gens);
    match standard_basis(gens, b) {
        Err(Error::BoundExhausted(_)) => standard_basis(gens, 2 * b),
        r => r,
    }
}

/// Products of `n` generators, truncated below `trunc`.
pub fn ideal_power(gens: &[Poly], n: u32, trunc: Option<u32>) -> Vec<Poly> {
    let k = gens[0].field();
    let cut = |p: Poly| match trunc {
        Some(t) => p.truncate(t),
        None => p,
    };
    let mut layer: Vec<(usize, Poly)> = vec![(0, Poly::one(k))];
    for _ in 0..n {
        let mut next = Vec::new();
        for (start, p) in &layer {
            for (i, g) in gens.iter().enumerate().skip(*start) {
                let q = match trunc {
                    Some(t) => p.mul_truncated(g, t),
                    None => p * g,
                };
                next.push((i, cut(q)));
            }
        }
        layer = next;
    }
    layer.into_iter().map(|(_, p)| p).collect()
}

/// The tangent ideal `T(f) = ⟨f, f_X, f_Y⟩`.
pub fn tangent_ideal(f: &Poly) -> Vec<Poly> {
    vec![f.clone(), f.derivative(Var::X), f.derivative(Var::Y)]
}

/// Standard bases of `I, I^2, I^3, ...` for an `M`-primary `I`. Each power is
/// computed modulo `M^N` with `N = min(N_a + N_b)` over `a + b = e`, where
/// `M^{N_a} ⊂ I^a` was certified for the lower powers.
pub struct PowerTower {
    gens: Vec<Poly>,
    corners: Vec<u32>,
}

impl PowerTower {
    pub fn new(gens: &[Poly]) -> Result<PowerTower> {
        let sb = standard_basis_auto(gens)?;
        let n1 = sb.truncation_degree().ok_or(Error::NotPrimary)?;
        Ok(PowerTower { gens: gens.to_vec(), corners: vec![0, n1] })
    }

    /// Certified `N` with `M^N ⊂ I^e` for every power computed so far.
    pub fn corners(&self) -> &[u32] {
        &self.corners
    }

    pub fn power(&mut self, e: u32) -> Result<StandardBasis> {
        let e = e as usize;
        while self.corners.len() <= e {
            let m = self.corners.len();
            let hint = (1..m).map(|a| self.corners[a] + self.corners[m - a]).min().unwrap();
            let sb = standard_basis_with_hint(&ideal_power(&self.gens, m as u32, Some(hint)), hint, Some(hint))?;
            self.corners.push(sb.truncation_degree().unwrap_or(hint));
            if m == e {
                return Ok(sb);
            }
        }
        let hint = self.corners[e];
        standard_basis_with_hint(&ideal_power(&self.gens, e as u32, Some(hint)), hint, Some(hint))
    }
}

/// Colengths `L(1), ..., L(n)` of the powers of an `M`-primary ideal.
pub fn power_colengths(gens: &[Poly], n: u32) -> Result<Vec<u64>> {
    let mut tower = PowerTower::new(gens)?;
    (1..=n).map(|e| tower.power(e)?.colength().finite().ok_or(Error::NotPrimary)).collect()
}

/// Powers tried before the second differences must have settled.
pub const E0_MAX_POWER: u32 = 10;

/// Hilbert–Samuel multiplicity from the settled second difference of
/// `n ↦ colength(I^n)`, reported after three consecutive equal values.
pub fn hilbert_samuel_e0(gens: &[Poly]) -> Result<u64> {
    let mut tower = PowerTower::new(gens)?;
    if tower.corners()[1] == 0 {
        return Ok(0);
    }
    let mut lens: Vec<i64> = vec![0];
    let mut d2: Vec<i64> = Vec::new();
    for e in 1..=E0_MAX_POWER {
        lens.push(tower.power(e)?.colength().finite().ok_or(Error::NotPrimary)? as i64);
        if e >= 2 {
            let m = (e - 1) as usize;
            d2.push(lens[m + 1] - 2 * lens[m] + lens[m - 1]);
            if d2.len() >= 3 && d2[d2.len() - 3..].iter().all(|&v| v == d2[d2.len() - 1]) {
                return Ok(d2[d2.len() - 1] as u64);
            }
        }
    }
    Err(Error::BoundExhausted(E0_MAX_POWER))
}

/// Outcome of the search for `l` with `f^l ∈ M·T(f)^l`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MuStability {
    StableAt(u32),
    UnknownUpTo(u32),
}

pub fn mu_stability(f: &Poly, lmax: u32) -> Result<MuStability> {
    let k = f.field();
    let t = tangent_ideal(f);
    let sb = standard_basis_auto(&t)?;
    let n1 = sb.truncation_degree().ok_or(Error::NotIsolated)?;
    if n1 == 0 {
        return Ok(MuStability::StableAt(1));
    }
    let (x, y) = (Poly::x(k), Poly::y(k));
    for l in 1..=lmax {
        let hint = l * n1 + 1;
        let mut gens = Vec::new();
        for g in ideal_power(&t, l, Some(hint)) {
            gens.push((&g * &x).truncate(hint));
            gens.push((&g * &y).truncate(hint));
        }
        let sbl = standard_basis_with_hint(&gens, hint, Some(hint))?;
        if sbl.contains(&f.pow(l).truncate(hint))? {
            return Ok(MuStability::StableAt(l));
        }
    }
    Ok(MuStability::UnknownUpTo(lmax))
}
