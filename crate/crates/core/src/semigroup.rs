//! Value semigroups of plane branches.

use std::fmt;

use num_integer::Integer;

use crate::algebra::series::UniSeries;
use crate::branch::{BlowupChain, Parametrization};
use crate::error::{Error, Result};

/// A semigroup `⟨v_0, ..., v_g⟩ ⊂ N` with finite complement.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ValueSemigroup {
    gens: Vec<u64>,
    /// Membership below `limit`; every integer `>= limit` belongs.
    members: Vec<bool>,
}

fn gcd_all(v: &[u64]) -> u64 {
    v.iter().fold(0, |a, &b| a.gcd(&b))
}

/// Membership table for `⟨gens⟩` on `0..limit`.
fn membership_table(gens: &[u64], limit: usize) -> Vec<bool> {
    let mut t = vec![false; limit];
    if limit > 0 {
        t[0] = true;
    }
    for x in 1..limit {
        t[x] = gens.iter().any(|&g| g as usize <= x && t[x - g as usize]);
    }
    t
}

impl ValueSemigroup {
    /// Minimal generating set from any generating set with gcd 1.
    pub fn new(mut gens: Vec<u64>) -> Result<ValueSemigroup> {
        gens.retain(|&g| g != 0);
        gens.sort_unstable();
        gens.dedup();
        if gens.is_empty() || gcd_all(&gens) != 1 {
            return Err(Error::InvalidInput(format!("generators {gens:?} do not have gcd 1")));
        }
        let limit = (gens[0] * gens[gens.len() - 1] + 1) as usize;
        let mut minimal: Vec<u64> = Vec::new();
        for &g in &gens {
            let t = membership_table(&minimal, g as usize + 1);
            if !t[g as usize] {
                minimal.push(g);
            }
        }
        let members = membership_table(&minimal, limit);
        let mut s = ValueSemigroup { gens: minimal, members };
        let c = s.conductor_by_gaps();
        s.members.truncate(c as usize);
        Ok(s)
    }

    pub fn generators(&self) -> &[u64] {
        &self.gens
    }

    /// `g`, the number of generators after `v_0`.
    pub fn genus(&self) -> usize {
        self.gens.len() - 1
    }

    /// `e_i = gcd(v_0, ..., v_i)`.
    pub fn e(&self, i: usize) -> u64 {
        gcd_all(&self.gens[..=i])
    }

    /// `n_i = e_{i−1}/e_i` for `i >= 1`.
    pub fn n(&self, i: usize) -> u64 {
        self.e(i - 1) / self.e(i)
    }

    pub fn contains(&self, x: u64) -> bool {
        (x as usize) >= self.members.len() || self.members[x as usize]
    }

    /// Smallest `α` with `α + N ⊂ S`.
    pub fn conductor_by_gaps(&self) -> u64 {
        match self.members.iter().rposition(|&b| !b) {
            Some(f) => f as u64 + 1,
            None => 0,
        }
    }

    /// `c = Σ (n_i − 1) v_i − v_0 + 1`; meaningful for branch semigroups.
    pub fn conductor(&self) -> u64 {
        let g = self.genus();
        if g == 0 {
            return 0;
        }
        let s: u64 = (1..=g).map(|i| (self.n(i) - 1) * self.gens[i]).sum();
        s + 1 - self.gens[0]
    }

    /// `v_{i+1} > n_i v_i` for every `i`.
    pub fn is_strongly_increasing(&self) -> bool {
        (1..self.genus()).all(|i| self.gens[i + 1] > self.n(i) * self.gens[i])
    }

    /// `n_i v_i ∈ ⟨v_0, ..., v_{i−1}⟩` for every `i >= 1`.
    pub fn is_nice(&self) -> bool {
        (1..=self.genus()).all(|i| {
            let target = self.n(i) * self.gens[i];
            membership_table(&self.gens[..i], target as usize + 1)[target as usize]
        })
    }

    /// `z ∈ S ⇔ c − 1 − z ∉ S` for `0 <= z < c`.
    pub fn is_symmetric(&self) -> bool {
        let c = self.conductor_by_gaps();
        (0..c).all(|z| self.contains(z) != self.contains(c - 1 - z))
    }

    /// The unique `x = Σ x_i v_i` with `0 <= x_i < n_i` for `i >= 1`.
    pub fn canonical_representation(&self, x: u64) -> Option<Vec<u64>> {
        let g = self.genus();
        let mut coeffs = vec![0u64; g + 1];
        let mut rest = x as i128;
        for j in (1..=g).rev() {
            let (ej, ej1) = (self.e(j) as i128, self.e(j - 1) as i128);
            let nj = ej1 / ej;
            let vj = self.gens[j] as i128;
            // x_j · (v_j/e_j) ≡ rest/e_j (mod n_j)
            let inv = mod_inverse((vj / ej).rem_euclid(nj), nj)?;
            let xj = ((rest / ej).rem_euclid(nj) * inv).rem_euclid(nj);
            coeffs[j] = xj as u64;
            rest -= xj * vj;
        }
        let v0 = self.gens[0] as i128;
        if rest < 0 || rest % v0 != 0 {
            return None;
        }
        coeffs[0] = (rest / v0) as u64;
        Some(coeffs)
    }

    pub fn is_tame(&self, p: u64) -> bool {
        p == 0 || self.gens.iter().all(|v| v % p != 0)
    }

    /// `S \ (S + c − 1)` in increasing order; it has exactly `c` elements.
    pub fn sweep_set(&self) -> Vec<u64> {
        let c = self.conductor_by_gaps();
        if c == 0 {
            return vec![0];
        }
        let mut out: Vec<u64> = (0..c).map(|i| if self.contains(i) { i } else { i + c - 1 }).collect();
        out.sort_unstable();
        out
    }

    /// Least element of each residue class modulo `v_0`, increasing.
    pub fn apery_set(&self) -> Vec<u64> {
        let v0 = self.gens[0];
        let mut out: Vec<u64> = (0..v0).map(|r| (0..).map(|k| r + k * v0).find(|&s| self.contains(s)).unwrap()).collect();
        out.sort_unstable();
        out
    }

    /// Elements of `S` below `bound`.
    pub fn elements_below(&self, bound: u64) -> Vec<u64> {
        (0..bound).filter(|&x| self.contains(x)).collect()
    }
}

fn mod_inverse(a: i128, m: i128) -> Option<i128> {
    if m == 1 {
        return Some(0);
    }
    let g = a.extended_gcd(&m);
    (g.gcd == 1).then(|| g.x.rem_euclid(m))
}

impl fmt::Display for ValueSemigroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.gens.iter().map(|v| v.to_string()).collect();
        write!(f, "⟨{}⟩", parts.join(","))
    }
}

pub fn conductor(s: &ValueSemigroup) -> u64 {
    s.conductor()
}

pub fn canonical_representation(s: &ValueSemigroup, x: u64) -> Result<Vec<u64>> {
    s.canonical_representation(x).ok_or(Error::NotInSemigroup(x))
}

pub fn is_tame(s: &ValueSemigroup, p: u64) -> bool {
    s.is_tame(p)
}

pub fn sweep_set(s: &ValueSemigroup) -> Vec<u64> {
    s.sweep_set()
}

pub fn apery_set(s: &ValueSemigroup) -> Vec<u64> {
    s.apery_set()
}

/// Multiplicities produced by Euclid's algorithm on `(a, b)`, each quotient
/// giving that many copies of the divisor; also returns the gcd.
fn euclid_stream(mut a: u64, mut b: u64) -> (Vec<u64>, u64) {
    let mut out = Vec::new();
    while b > 0 {
        for _ in 0..a / b {
            out.push(b);
        }
        (a, b) = (b, a % b);
    }
    (out, a)
}

/// Multiplicity sequence (entries `>= 2`) of a branch with characteristic
/// exponents `β_0, ..., β_g`.
pub fn multiplicities_from_characteristic(betas: &[u64]) -> Vec<u64> {
    let mut seq = Vec::new();
    let mut e = betas[0];
    for (i, w) in betas.windows(2).enumerate() {
        let d = if i == 0 { w[1] } else { w[1] - w[0] };
        let (stream, g) = euclid_stream(e, d % e);
        let q = d / e;
        seq.extend(std::iter::repeat_n(e, q as usize));
        seq.extend(stream);
        e = g;
    }
    seq.retain(|&m| m >= 2);
    seq
}

/// Characteristic exponents from the multiplicity sequence (entries `>= 2`).
pub fn characteristic_from_multiplicities(seq: &[u64]) -> Result<Vec<u64>> {
    let Some(&n) = seq.first() else { return Ok(vec![1]) };
    let at = |i: usize| seq.get(i).copied().unwrap_or(1);
    let mut betas = vec![n];
    let mut e = n;
    let mut pos = 0usize;
    while e > 1 {
        let start = pos;
        while at(pos) == e && pos < seq.len() {
            pos += 1;
        }
        let q = (pos - start) as u64;
        let r = at(pos);
        if r >= e || (betas.len() == 1 && q == 0) {
            return Err(Error::SemigroupMismatch(format!("multiplicity sequence {seq:?} is not a branch sequence")));
        }
        let base = if betas.len() == 1 { 0 } else { betas[betas.len() - 1] };
        betas.push(base + q * e + r);
        let (stream, g) = euclid_stream(e, r);
        for m in stream {
            if at(pos) != m && !(m == 1 && pos >= seq.len()) {
                return Err(Error::SemigroupMismatch(format!("multiplicity sequence {seq:?} breaks at position {pos}")));
            }
            pos += 1;
        }
        e = g;
    }
    if pos < seq.len() {
        return Err(Error::SemigroupMismatch(format!("multiplicity sequence {seq:?} has trailing entries")));
    }
    Ok(betas)
}

/// Semigroup generators from characteristic exponents:
/// `v_0 = β_0`, `v_1 = β_1`, `v_{i+1} = n_i v_i + β_{i+1} − β_i`.
pub fn generators_from_characteristic(betas: &[u64]) -> Vec<u64> {
    let mut v = vec![betas[0]];
    if betas.len() == 1 {
        return v;
    }
    v.push(betas[1]);
    let mut e_prev = betas[0];
    for i in 1..betas.len() - 1 {
        let e = e_prev.gcd(&betas[i]);
        let n = e_prev / e;
        v.push(n * v[i] + betas[i + 1] - betas[i]);
        e_prev = e;
    }
    v
}

pub fn semigroup_from_multiplicities(seq: &[u64]) -> Result<ValueSemigroup> {
    let betas = characteristic_from_multiplicities(seq)?;
    ValueSemigroup::new(generators_from_characteristic(&betas))
}

/// Some `a` with `Σ a_i vals[i] = w`, if any.
fn represent(w: u64, vals: &[u64]) -> Option<Vec<u64>> {
    let w = w as usize;
    let mut from: Vec<Option<usize>> = vec![None; w + 1];
    let mut reach = vec![false; w + 1];
    reach[0] = true;
    for x in 1..=w {
        for (i, &v) in vals.iter().enumerate() {
            let v = v as usize;
            if v <= x && reach[x - v] {
                reach[x] = true;
                from[x] = Some(i);
                break;
            }
        }
    }
    if !reach[w] {
        return None;
    }
    let mut a = vec![0u64; vals.len()];
    let mut x = w;
    while x > 0 {
        let i = from[x].unwrap();
        a[i] += 1;
        x -= vals[i] as usize;
    }
    Some(a)
}

fn monomial(gens: &[UniSeries], a: &[u64], prec: usize) -> UniSeries {
    let k = gens[0].field();
    let mut acc = UniSeries::one(k, prec);
    for (g, &e) in gens.iter().zip(a) {
        if e > 0 {
            acc = acc.mul(&g.pow(e));
        }
    }
    acc
}

/// Cancels leading terms against monomials in `gens` until the value leaves
/// the semigroup they generate.
fn subduce(mut h: UniSeries, gens: &[UniSeries], vals: &[u64]) -> Result<UniSeries> {
    let k = h.field().clone();
    loop {
        let o = h.order().ok_or_else(|| Error::PrecisionExhausted("subduction reached the working precision".into()))?;
        let Some(a) = represent(o as u64, vals) else { return Ok(h) };
        let m = monomial(gens, &a, h.precision());
        let c = k.div(&h.coeff(o), &m.coeff(o))?;
        h = h.sub(&m.scale(&c));
    }
}

/// Generators of `{ ord_t u(x(t), y(t)) }` by subduction of tête-à-têtes.
pub fn semigroup_by_subduction(par: &Parametrization) -> Result<Vec<u64>> {
    let (mut x, mut y) = (par.x_of_t.clone(), par.y_of_t.clone());
    let vanish = || Error::PrecisionExhausted("parametrization vanishes".into());
    if y.order().ok_or_else(vanish)? < x.order().ok_or_else(vanish)? {
        std::mem::swap(&mut x, &mut y);
    }
    let v0 = x.order().unwrap() as u64;
    if v0 == 1 {
        return Ok(vec![1]);
    }
    let mut gens = vec![x];
    let mut vals = vec![v0];
    let mut candidate = y;
    loop {
        let h = subduce(candidate, &gens, &vals)?;
        let v = h.order().unwrap() as u64;
        let e_prev = gcd_all(&vals);
        gens.push(h.clone());
        vals.push(v);
        let e = gcd_all(&vals);
        if e == 1 {
            return Ok(vals);
        }
        let n = e_prev / e;
        let target = n * v;
        let last = vals.len() - 1;
        let a = represent(target, &vals[..last])
            .ok_or_else(|| Error::SemigroupMismatch(format!("{target} is not generated by {:?}", &vals[..last])))?;
        let hn = h.pow(n);
        let m = monomial(&gens[..last], &a, hn.precision());
        let o = target as usize;
        let c = par.field().div(&hn.coeff(o), &m.coeff(o))?;
        candidate = hn.sub(&m.scale(&c));
    }
}

/// The value semigroup of a branch, computed twice (subduction on the
/// parametrization, reconstruction from the multiplicity sequence); the two
/// must agree.
pub fn semigroup_of(par: &Parametrization, chain: &BlowupChain) -> Result<ValueSemigroup> {
    let seq: Vec<u64> = chain.multiplicity_sequence().iter().map(|&m| m as u64).collect();
    let from_seq = semigroup_from_multiplicities(&seq)?;
    let top = *from_seq.generators().last().unwrap();
    let mut prec = (2 * top + from_seq.conductor() + 16) as usize;
    let mut par = if par.precision() < prec { par.refine(prec)? } else { par.clone() };
    let gens = loop {
        match semigroup_by_subduction(&par) {
            Err(Error::PrecisionExhausted(_)) if prec < 1 << 16 => {
                prec *= 2;
                par = par.refine(prec)?;
            }
            r => break r?,
        }
    };
    if gens != from_seq.generators() {
        return Err(Error::SemigroupMismatch(format!(
            "subduction gives {gens:?}, multiplicity sequence {seq:?} gives {}",
            from_seq
        )));
    }
    Ok(from_seq)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(g: &[u64]) -> ValueSemigroup {
        ValueSemigroup::new(g.to_vec()).unwrap()
    }

    #[test]
    fn conductors() {
        assert_eq!(s(&[2, 3]).conductor(), 2);
        assert_eq!(s(&[4, 6, 25]).conductor(), 28);
        assert_eq!(s(&[4, 6, 25]).conductor_by_gaps(), 28);
        assert_eq!(s(&[3, 11]).conductor(), 20);
        // ⟨n, mp⟩ with n = 3, m = 2, p = 5
        assert_eq!(s(&[3, 10]).conductor(), 2 * 9);
    }

    #[test]
    fn structure() {
        let sg = s(&[4, 6, 25]);
        assert!(sg.is_strongly_increasing() && sg.is_nice() && sg.is_symmetric());
        assert_eq!(sg.e(1), 2);
        assert_eq!(sg.n(2), 2);
        assert_eq!(s(&[6, 4, 8, 25]).generators(), &[4, 6, 25]);
    }

    #[test]
    fn canonical() {
        let sg = s(&[4, 6, 25]);
        assert_eq!(sg.canonical_representation(10), Some(vec![1, 1, 0]));
        assert_eq!(sg.canonical_representation(0), Some(vec![0, 0, 0]));
        assert_eq!(sg.canonical_representation(5), None);
        assert_eq!(canonical_representation(&sg, 5), Err(Error::NotInSemigroup(5)));
    }

    #[test]
    fn tameness() {
        assert!(!s(&[4, 6, 25]).is_tame(5));
        assert!(s(&[4, 6, 25]).is_tame(7));
        assert!(!s(&[3, 11]).is_tame(3));
        assert!(s(&[3, 11]).is_tame(0));
    }

    #[test]
    fn sweep_and_apery() {
        assert_eq!(s(&[2, 3]).sweep_set(), vec![0, 2]);
        assert_eq!(s(&[4, 6, 25]).sweep_set().len(), 28);
        assert_eq!(s(&[2, 3]).apery_set(), vec![0, 3]);
        assert_eq!(s(&[3, 11]).apery_set(), vec![0, 11, 22]);
    }

    #[test]
    fn multiplicity_round_trip() {
        assert_eq!(multiplicities_from_characteristic(&[4, 6, 19]), vec![4, 2, 2, 2, 2, 2, 2, 2, 2]);
        assert_eq!(characteristic_from_multiplicities(&[4, 2, 2, 2, 2, 2, 2, 2, 2]).unwrap(), vec![4, 6, 19]);
        assert_eq!(generators_from_characteristic(&[4, 6, 19]), vec![4, 6, 25]);
        assert_eq!(semigroup_from_multiplicities(&[3, 3, 3, 2]).unwrap(), s(&[3, 11]));
        assert_eq!(semigroup_from_multiplicities(&[2]).unwrap(), s(&[2, 3]));
        assert!(characteristic_from_multiplicities(&[3, 2, 2]).is_err());
    }

    fn of(k: &crate::Field, t: &[(i64, u32, u32)]) -> ValueSemigroup {
        let f = crate::algebra::Poly::from_int_terms(k, t);
        let (chain, par) = crate::branch::hn_expand(&f, 64).unwrap();
        semigroup_of(&par, &chain).unwrap()
    }

    #[test]
    fn branches() {
        let k3 = crate::Field::prime(3).unwrap();
        assert_eq!(of(&k3, &[(1, 0, 3), (-1, 11, 0)]), s(&[3, 11]));
        assert_eq!(of(&k3, &[(1, 0, 3), (-1, 11, 0), (1, 8, 1)]), s(&[3, 11]));
        let k5 = crate::Field::prime(5).unwrap();
        // (Y^2 - X^3 + X^2 Y)^2 - X^11 Y
        let g = [(1, 0, 4), (-2, 3, 2), (2, 2, 3), (1, 6, 0), (-2, 5, 1), (1, 4, 2), (-1, 11, 1)];
        assert_eq!(of(&k5, &g), s(&[4, 6, 25]));
        // (Y^2 - X^3)^2 - X^11 Y
        let f = [(1, 0, 4), (-2, 3, 2), (1, 6, 0), (-1, 11, 1)];
        assert_eq!(of(&k5, &f), s(&[4, 6, 25]));
        let q = crate::Field::rationals();
        assert_eq!(of(&q, &f), s(&[4, 6, 25]));
        assert_eq!(of(&q, &[(1, 1, 0), (1, 0, 2)]), s(&[1]));
    }
}
