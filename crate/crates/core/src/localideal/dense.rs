//! Buchberger completion inside `k[X, Y]/M^N`, where the local order is a
//! finite well-order. Polynomials are reduced in a dense accumulator indexed
//! by monomial position: degree by degree, larger `X`-exponent first.

use std::collections::{BTreeSet, HashSet};

use crate::algebra::poly::{Mono, Poly};
use crate::field::{Elem, Field};

pub(crate) trait Ops: Clone {
    type T: Clone + PartialEq + std::fmt::Debug;
    fn zero(&self) -> Self::T;
    fn one(&self) -> Self::T;
    fn is_zero(&self, a: &Self::T) -> bool;
    fn mul(&self, a: &Self::T, b: &Self::T) -> Self::T;
    /// `acc − a·b`
    fn sub_mul(&self, acc: &Self::T, a: &Self::T, b: &Self::T) -> Self::T;
    fn inv(&self, a: &Self::T) -> Self::T;
    fn from_elem(&self, e: &Elem) -> Self::T;
    fn to_elem(&self, a: &Self::T) -> Elem;
}

#[derive(Clone, Debug)]
pub(crate) struct PrimeOps {
    p: u64,
}

impl Ops for PrimeOps {
    type T = u64;
    fn zero(&self) -> u64 {
        0
    }
    fn one(&self) -> u64 {
        1
    }
    fn is_zero(&self, a: &u64) -> bool {
        *a == 0
    }
    fn mul(&self, a: &u64, b: &u64) -> u64 {
        a * b % self.p
    }
    fn sub_mul(&self, acc: &u64, a: &u64, b: &u64) -> u64 {
        let t = a * b % self.p;
        if *acc >= t {
            acc - t
        } else {
            acc + self.p - t
        }
    }
    fn inv(&self, a: &u64) -> u64 {
        let (mut e, mut base, mut acc) = (self.p - 2, *a, 1u64);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * base % self.p;
            }
            base = base * base % self.p;
            e >>= 1;
        }
        acc
    }
    fn from_elem(&self, e: &Elem) -> u64 {
        match e {
            Elem::Fin(v) => *v,
            Elem::Rat(_) => unreachable!("rational coefficient in a prime field"),
        }
    }
    fn to_elem(&self, a: &u64) -> Elem {
        Elem::Fin(*a)
    }
}

#[derive(Clone, Debug)]
pub(crate) struct FieldOps {
    k: Field,
}

impl Ops for FieldOps {
    type T = Elem;
    fn zero(&self) -> Elem {
        self.k.zero()
    }
    fn one(&self) -> Elem {
        self.k.one()
    }
    fn is_zero(&self, a: &Elem) -> bool {
        self.k.is_zero(a)
    }
    fn mul(&self, a: &Elem, b: &Elem) -> Elem {
        self.k.mul(a, b)
    }
    fn sub_mul(&self, acc: &Elem, a: &Elem, b: &Elem) -> Elem {
        self.k.sub(acc, &self.k.mul(a, b))
    }
    fn inv(&self, a: &Elem) -> Elem {
        self.k.inv(a).expect("nonzero pivot")
    }
    fn from_elem(&self, e: &Elem) -> Elem {
        e.clone()
    }
    fn to_elem(&self, a: &Elem) -> Elem {
        a.clone()
    }
}

fn idx(m: Mono) -> usize {
    let d = (m.0 + m.1) as usize;
    d * (d + 1) / 2 + (d - m.0 as usize)
}

fn total(n: u32) -> usize {
    let n = n as usize;
    n * (n + 1) / 2
}

fn divides(a: Mono, b: Mono) -> bool {
    a.0 <= b.0 && a.1 <= b.1
}

/// Monic polynomial, terms sorted by position (lead first).
type Row<T> = Vec<(Mono, T)>;

#[derive(Clone, Debug)]
pub(crate) struct Dense<O: Ops> {
    ops: O,
    n: u32,
    monos: Vec<Mono>,
    basis: Vec<Row<O::T>>,
    /// `reducer[pos]` is one plus the index of a basis element whose lead divides the monomial.
    reducer: Vec<usize>,
}

impl<O: Ops> Dense<O> {
    fn new(ops: O, n: u32) -> Self {
        let mut monos = Vec::with_capacity(total(n));
        for d in 0..n {
            for i in (0..=d).rev() {
                monos.push((i, d - i));
            }
        }
        let reducer = vec![0; monos.len()];
        Dense { ops, n, monos, basis: Vec::new(), reducer }
    }

    pub(crate) fn truncation(&self) -> u32 {
        self.n
    }

    fn lead(&self, r: usize) -> Mono {
        self.basis[r][0].0
    }

    fn row_from_poly(&self, p: &Poly) -> Vec<O::T> {
        let mut acc = vec![self.ops.zero(); self.monos.len()];
        for (m, c) in p.terms() {
            if m.0 + m.1 < self.n {
                acc[idx(*m)] = self.ops.from_elem(c);
            }
        }
        acc
    }

    /// Reduces `acc` from position `start`. Top reduction stops at the first
    /// irreducible term; full reduction clears every reducible term.
    fn reduce(&self, acc: &mut [O::T], start: usize, full: bool) -> Option<usize> {
        let mut first = None;
        for pos in start..acc.len() {
            if self.ops.is_zero(&acc[pos]) {
                continue;
            }
            let r = self.reducer[pos];
            if r == 0 {
                if !full {
                    return Some(pos);
                }
                first.get_or_insert(pos);
                continue;
            }
            let g = &self.basis[r - 1];
            let c = acc[pos].clone();
            let m = self.monos[pos];
            let s = (m.0 - g[0].0 .0, m.1 - g[0].0 .1);
            for (gm, gc) in g {
                let t = (gm.0 + s.0, gm.1 + s.1);
                if t.0 + t.1 < self.n {
                    let q = idx(t);
                    acc[q] = self.ops.sub_mul(&acc[q], &c, gc);
                }
            }
        }
        first
    }

    fn extract(&self, acc: &[O::T], from: usize) -> Row<O::T> {
        let inv = self.ops.inv(&acc[from]);
        (from..acc.len())
            .filter(|&q| !self.ops.is_zero(&acc[q]))
            .map(|q| (self.monos[q], self.ops.mul(&acc[q], &inv)))
            .collect()
    }

    fn insert(&mut self, row: Row<O::T>) {
        let lead = row[0].0;
        let len = row.len();
        self.basis.push(row);
        let id = self.basis.len();
        for q in idx(lead)..self.monos.len() {
            if divides(lead, self.monos[q]) {
                let cur = self.reducer[q];
                if cur == 0 || self.basis[cur - 1].len() > len {
                    self.reducer[q] = id;
                }
            }
        }
    }

    /// Smallest degree all of whose monomials are reducible.
    fn corner(&self) -> u32 {
        (0..self.n)
            .find(|&d| (0..=d).all(|i| self.reducer[idx((i, d - i))] != 0))
            .unwrap_or(self.n)
    }

    fn retruncate(&mut self, n: u32) {
        let old = std::mem::take(&mut self.basis);
        *self = Dense::new(self.ops.clone(), n);
        for mut row in old {
            row.retain(|(m, _)| m.0 + m.1 < n);
            if !row.is_empty() {
                self.insert(row);
            }
        }
    }

    fn pair_key(&self, i: usize, j: usize) -> (u32, usize, usize) {
        let (a, b) = (self.lead(i), self.lead(j));
        (a.0.max(b.0) + a.1.max(b.1), i, j)
    }

    fn spoly(&self, i: usize, j: usize) -> (Vec<O::T>, usize) {
        let (a, b) = (self.lead(i), self.lead(j));
        let l = (a.0.max(b.0), a.1.max(b.1));
        let mut acc = vec![self.ops.zero(); self.monos.len()];
        let one = self.ops.one();
        let neg_one = self.ops.sub_mul(&self.ops.zero(), &one, &one);
        for (row, lead, factor) in [(&self.basis[i], a, &neg_one), (&self.basis[j], b, &one)] {
            let s = (l.0 - lead.0, l.1 - lead.1);
            for (m, c) in row {
                let t = (m.0 + s.0, m.1 + s.1);
                if t.0 + t.1 < self.n {
                    let q = idx(t);
                    acc[q] = self.ops.sub_mul(&acc[q], factor, c);
                }
            }
        }
        (acc, idx(l).min(self.monos.len()))
    }

    /// Completes the basis with the product and chain criteria.
    fn complete(&mut self) {
        loop {
            let mut queue = BTreeSet::new();
            let mut pending = HashSet::new();
            for j in 0..self.basis.len() {
                for i in 0..j {
                    queue.insert(self.pair_key(i, j));
                    pending.insert((i, j));
                }
            }
            let mut restart = false;
            while let Some((deg, i, j)) = queue.pop_first() {
                pending.remove(&(i, j));
                if deg >= self.n {
                    continue;
                }
                let (a, b) = (self.lead(i), self.lead(j));
                if a.0.min(b.0) == 0 && a.1.min(b.1) == 0 {
                    continue;
                }
                let l = (a.0.max(b.0), a.1.max(b.1));
                let chain = (0..self.basis.len()).any(|t| {
                    t != i
                        && t != j
                        && divides(self.lead(t), l)
                        && !pending.contains(&(i.min(t), i.max(t)))
                        && !pending.contains(&(j.min(t), j.max(t)))
                });
                if chain {
                    continue;
                }
                let (mut acc, start) = self.spoly(i, j);
                let Some(pos) = self.reduce(&mut acc, start, false) else { continue };
                let row = self.extract(&acc, pos);
                self.insert(row);
                let c = self.corner();
                if c < self.n {
                    self.retruncate(c);
                    restart = true;
                    break;
                }
                let n = self.basis.len() - 1;
                for t in 0..n {
                    queue.insert(self.pair_key(t, n));
                    pending.insert((t, n));
                }
            }
            if !restart {
                return;
            }
        }
    }

    pub(crate) fn build(ops: O, n: u32, gens: &[Poly]) -> Self {
        let mut d = Dense::new(ops, n);
        for g in gens {
            let mut acc = d.row_from_poly(g);
            if let Some(pos) = d.reduce(&mut acc, 0, false) {
                let row = d.extract(&acc, pos);
                d.insert(row);
            }
        }
        let c = d.corner();
        if c < d.n {
            d.retruncate(c);
        }
        d.complete();
        d
    }

    pub(crate) fn leads(&self) -> Vec<Mono> {
        self.basis.iter().map(|r| r[0].0).collect()
    }

    pub(crate) fn standard_monomials(&self) -> Vec<Mono> {
        (0..self.monos.len()).filter(|&q| self.reducer[q] == 0).map(|q| self.monos[q]).collect()
    }

    pub(crate) fn contains(&self, h: &Poly) -> bool {
        let mut acc = self.row_from_poly(h);
        self.reduce(&mut acc, 0, false).is_none()
    }

    pub(crate) fn normal_form(&self, h: &Poly, k: &Field) -> Poly {
        let mut acc = self.row_from_poly(h);
        self.reduce(&mut acc, 0, true);
        Poly::from_terms(
            k,
            (0..acc.len()).filter(|&q| !self.ops.is_zero(&acc[q])).map(|q| (self.monos[q], self.ops.to_elem(&acc[q]))),
        )
    }

    pub(crate) fn elements(&self, k: &Field) -> Vec<Poly> {
        self.basis
            .iter()
            .map(|r| Poly::from_terms(k, r.iter().map(|(m, c)| (*m, self.ops.to_elem(c)))))
            .collect()
    }
}

/// Dense engine over the fastest available coefficient type.
#[derive(Clone, Debug)]
pub(crate) enum AnyDense {
    Prime(Dense<PrimeOps>),
    General(Dense<FieldOps>),
}

macro_rules! dispatch {
    ($self:expr, $d:ident => $body:expr) => {
        match $self {
            AnyDense::Prime($d) => $body,
            AnyDense::General($d) => $body,
        }
    };
}

impl AnyDense {
    pub(crate) fn build(k: &Field, n: u32, gens: &[Poly]) -> AnyDense {
        if k.degree() == 1 && !k.is_rational() {
            AnyDense::Prime(Dense::build(PrimeOps { p: k.characteristic() }, n, gens))
        } else {
            AnyDense::General(Dense::build(FieldOps { k: k.clone() }, n, gens))
        }
    }

    pub(crate) fn truncation(&self) -> u32 {
        dispatch!(self, d => d.truncation())
    }

    pub(crate) fn leads(&self) -> Vec<Mono> {
        dispatch!(self, d => d.leads())
    }

    pub(crate) fn standard_monomials(&self) -> Vec<Mono> {
        dispatch!(self, d => d.standard_monomials())
    }

    pub(crate) fn contains(&self, h: &Poly) -> bool {
        dispatch!(self, d => d.contains(h))
    }

    pub(crate) fn normal_form(&self, h: &Poly, k: &Field) -> Poly {
        dispatch!(self, d => d.normal_form(h, k))
    }

    pub(crate) fn elements(&self, k: &Field) -> Vec<Poly> {
        dispatch!(self, d => d.elements(k))
    }
}
