//! Sparse bivariate polynomials in `X`, `Y`.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use crate::algebra::series::UniSeries;
use crate::error::{Error, Result};
use crate::field::{Elem, Field};

/// Exponent pair `(i, j)` of `X^i Y^j`.
pub type Mono = (u32, u32);

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Var {
    X,
    Y,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RingOp {
    Add,
    Sub,
    Mul,
}

/// Exact sparse polynomial over a [`Field`]; zero coefficients are never stored.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Poly {
    field: Field,
    terms: BTreeMap<Mono, Elem>,
}

impl Poly {
    pub fn zero(field: &Field) -> Poly {
        Poly { field: field.clone(), terms: BTreeMap::new() }
    }

    pub fn constant(field: &Field, c: Elem) -> Poly {
        Poly::monomial(field, c, 0, 0)
    }

    pub fn one(field: &Field) -> Poly {
        Poly::constant(field, field.one())
    }

    pub fn monomial(field: &Field, c: Elem, i: u32, j: u32) -> Poly {
        let mut p = Poly::zero(field);
        if !field.is_zero(&c) {
            p.terms.insert((i, j), c);
        }
        p
    }

    pub fn x(field: &Field) -> Poly {
        Poly::monomial(field, field.one(), 1, 0)
    }

    pub fn y(field: &Field) -> Poly {
        Poly::monomial(field, field.one(), 0, 1)
    }

    pub fn var(field: &Field, v: Var) -> Poly {
        match v {
            Var::X => Poly::x(field),
            Var::Y => Poly::y(field),
        }
    }

    /// Builds a polynomial from terms, merging repeated monomials.
    pub fn from_terms<I: IntoIterator<Item = (Mono, Elem)>>(field: &Field, terms: I) -> Poly {
        let mut p = Poly::zero(field);
        for (m, c) in terms {
            p.add_term(m, &c);
        }
        p
    }

    /// Convenience constructor from integer coefficients.
    pub fn from_int_terms(field: &Field, terms: &[(i64, u32, u32)]) -> Poly {
        Poly::from_terms(field, terms.iter().map(|&(c, i, j)| ((i, j), field.from_i64(c))))
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Mono, &Elem)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, i: u32, j: u32) -> Elem {
        self.terms.get(&(i, j)).cloned().unwrap_or_else(|| self.field.zero())
    }

    /// Adds `c · X^i Y^j` in place.
    pub fn add_term(&mut self, m: Mono, c: &Elem) {
        if self.field.is_zero(c) {
            return;
        }
        let k = &self.field;
        match self.terms.get_mut(&m) {
            Some(v) => {
                let s = k.add(v, c);
                if k.is_zero(&s) {
                    self.terms.remove(&m);
                } else {
                    *v = s;
                }
            }
            None => {
                self.terms.insert(m, c.clone());
            }
        }
    }

    /// Largest total degree (0 for the zero polynomial).
    pub fn total_degree(&self) -> u32 {
        self.terms.keys().map(|(i, j)| i + j).max().unwrap_or(0)
    }

    /// Smallest total degree of a term, the order at the origin (`None` for 0).
    pub fn order(&self) -> Option<u32> {
        self.terms.keys().map(|(i, j)| i + j).min()
    }

    pub fn deg_y(&self) -> Option<u32> {
        self.terms.keys().map(|&(_, j)| j).max()
    }

    pub fn deg_x(&self) -> Option<u32> {
        self.terms.keys().map(|&(i, _)| i).max()
    }

    pub fn constant_term(&self) -> Elem {
        self.coeff(0, 0)
    }

    pub fn is_unit_at_origin(&self) -> bool {
        !self.field.is_zero(&self.constant_term())
    }

    fn check(&self, other: &Poly) -> Result<()> {
        if self.field != other.field {
            Err(Error::FieldMismatch)
        } else {
            Ok(())
        }
    }

    /// Checked ring operation.
    pub fn ring_op(&self, other: &Poly, op: RingOp) -> Result<Poly> {
        self.check(other)?;
        Ok(match op {
            RingOp::Add => self + other,
            RingOp::Sub => self - other,
            RingOp::Mul => self * other,
        })
    }

    pub fn scale(&self, c: &Elem) -> Poly {
        let k = &self.field;
        if k.is_zero(c) {
            return Poly::zero(k);
        }
        Poly {
            field: k.clone(),
            terms: self.terms.iter().map(|(m, v)| (*m, k.mul(v, c))).collect(),
        }
    }

    pub fn mul_monomial(&self, i: u32, j: u32) -> Poly {
        Poly {
            field: self.field.clone(),
            terms: self.terms.iter().map(|(&(a, b), v)| ((a + i, b + j), v.clone())).collect(),
        }
    }

    pub fn pow(&self, mut e: u32) -> Poly {
        let mut acc = Poly::one(&self.field);
        let mut base = self.clone();
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    /// Product truncated to terms of total degree `< bound`.
    pub fn mul_truncated(&self, other: &Poly, bound: u32) -> Poly {
        let k = &self.field;
        let mut out = Poly::zero(k);
        for (&(a, b), u) in &self.terms {
            if a + b >= bound {
                continue;
            }
            for (&(c, d), v) in &other.terms {
                if a + b + c + d < bound {
                    out.add_term((a + c, b + d), &k.mul(u, v));
                }
            }
        }
        out
    }

    /// Drops every term of total degree `>= bound`.
    pub fn truncate(&self, bound: u32) -> Poly {
        Poly {
            field: self.field.clone(),
            terms: self.terms.iter().filter(|((i, j), _)| i + j < bound).map(|(m, v)| (*m, v.clone())).collect(),
        }
    }

    /// Drops every term whose X-exponent is `>= bound`.
    pub fn truncate_x(&self, bound: u32) -> Poly {
        Poly {
            field: self.field.clone(),
            terms: self.terms.iter().filter(|((i, _), _)| *i < bound).map(|(m, v)| (*m, v.clone())).collect(),
        }
    }

    /// Degree-`d` homogeneous component.
    pub fn homogeneous_part(&self, d: u32) -> Poly {
        Poly {
            field: self.field.clone(),
            terms: self.terms.iter().filter(|((i, j), _)| i + j == d).map(|(m, v)| (*m, v.clone())).collect(),
        }
    }

    /// Formal partial derivative.
    pub fn derivative(&self, var: Var) -> Poly {
        self.hasse(var, 1)
    }

    /// `r`-th Hasse derivative: `X^i Y^j ↦ C(j, r) X^i Y^(j-r)` for `var = Y`.
    pub fn hasse(&self, var: Var, r: u32) -> Poly {
        let k = &self.field;
        let mut out = Poly::zero(k);
        for (&(i, j), c) in &self.terms {
            let e = match var {
                Var::X => i,
                Var::Y => j,
            };
            if e < r {
                continue;
            }
            let b = k.binomial(e as u64, r as u64);
            let m = match var {
                Var::X => (i - r, j),
                Var::Y => (i, j - r),
            };
            out.add_term(m, &k.mul(c, &b));
        }
        out
    }

    /// `f(Y, X)`.
    pub fn swap_xy(&self) -> Poly {
        Poly {
            field: self.field.clone(),
            terms: self.terms.iter().map(|(&(i, j), v)| ((j, i), v.clone())).collect(),
        }
    }

    /// Coefficients of `Y^0, Y^1, ...` as dense polynomials in `X`.
    pub fn y_coefficients(&self) -> Vec<Vec<Elem>> {
        let k = &self.field;
        let dy = self.deg_y().unwrap_or(0) as usize;
        let mut out: Vec<Vec<Elem>> = vec![Vec::new(); dy + 1];
        for (&(i, j), c) in &self.terms {
            let row = &mut out[j as usize];
            if row.len() <= i as usize {
                row.resize(i as usize + 1, k.zero());
            }
            row[i as usize] = c.clone();
        }
        out
    }

    /// Coefficient of `Y^j` as a polynomial in `X` (embedded in `k[X, Y]`).
    pub fn y_coeff(&self, j: u32) -> Poly {
        Poly {
            field: self.field.clone(),
            terms: self.terms.iter().filter(|((_, b), _)| *b == j).map(|(&(a, _), v)| ((a, 0), v.clone())).collect(),
        }
    }

    /// Monic in `Y`: the top `Y`-coefficient is exactly 1.
    pub fn is_monic_in_y(&self) -> bool {
        match self.deg_y() {
            None => false,
            Some(d) => {
                let lead = self.y_coeff(d);
                lead.num_terms() == 1 && self.field.is_one(&lead.coeff(0, 0))
            }
        }
    }

    /// Division by a polynomial monic in `Y`: `self = q·b + r`, `deg_Y r < deg_Y b`.
    pub fn divrem_y(&self, b: &Poly) -> Result<(Poly, Poly)> {
        self.check(b)?;
        if !b.is_monic_in_y() {
            return Err(Error::LeadingCoefficientNotUnit);
        }
        let db = b.deg_y().unwrap();
        let k = &self.field;
        let mut rem = self.clone();
        let mut quot = Poly::zero(k);
        while let Some(dr) = rem.deg_y() {
            if dr < db || rem.is_zero() {
                break;
            }
            let lead = rem.y_coeff(dr).mul_monomial(0, dr - db);
            quot = &quot + &lead;
            rem = &rem - &(&lead * b);
        }
        Ok((quot, rem))
    }

    /// `f(x(t), y(t))` truncated at the smaller of the two precisions.
    pub fn eval_series(&self, x: &UniSeries, y: &UniSeries) -> UniSeries {
        let k = &self.field;
        let prec = x.precision().min(y.precision());
        let x = x.with_precision(prec);
        let y = y.with_precision(prec);
        if self.is_zero() {
            return UniSeries::zero(k, prec);
        }
        let coeffs = self.y_coefficients();
        let max_i = coeffs.iter().map(|c| c.len()).max().unwrap_or(1);
        let mut xpow = Vec::with_capacity(max_i);
        xpow.push(UniSeries::one(k, prec));
        for i in 1..max_i {
            let next = xpow[i - 1].mul(&x);
            xpow.push(next);
        }
        let eval_x = |row: &Vec<Elem>| {
            let mut acc = UniSeries::zero(k, prec);
            for (i, c) in row.iter().enumerate() {
                if !k.is_zero(c) {
                    acc = acc.add(&xpow[i].scale(c));
                }
            }
            acc
        };
        let mut acc = UniSeries::zero(k, prec);
        for row in coeffs.iter().rev() {
            acc = acc.mul(&y).add(&eval_x(row));
        }
        acc
    }

    /// `f(a(X,Y), b(X,Y))` truncated below total degree `bound`.
    pub fn compose(&self, a: &Poly, b: &Poly, bound: u32) -> Poly {
        let k = &self.field;
        if self.is_zero() {
            return Poly::zero(k);
        }
        let max_i = self.deg_x().unwrap_or(0) as usize;
        let max_j = self.deg_y().unwrap_or(0) as usize;
        let mut apow = vec![Poly::one(k)];
        for i in 1..=max_i {
            let next = apow[i - 1].mul_truncated(a, bound);
            apow.push(next);
        }
        let mut bpow = vec![Poly::one(k)];
        for j in 1..=max_j {
            let next = bpow[j - 1].mul_truncated(b, bound);
            bpow.push(next);
        }
        let mut out = Poly::zero(k);
        for (&(i, j), c) in &self.terms {
            let t = apow[i as usize].mul_truncated(&bpow[j as usize], bound).scale(c);
            out = &out + &t;
        }
        out
    }

    /// Evaluates at a field point.
    pub fn eval(&self, x: &Elem, y: &Elem) -> Elem {
        let k = &self.field;
        let mut acc = k.zero();
        for (&(i, j), c) in &self.terms {
            let t = k.mul(c, &k.mul(&k.pow(x, i as u64), &k.pow(y, j as u64)));
            acc = k.add(&acc, &t);
        }
        acc
    }

    /// Maps coefficients into another field of the same characteristic by
    /// reinterpreting prime-field residues (used for extension escalation).
    pub fn embed_prime_coefficients(&self, target: &Field) -> Result<Poly> {
        if self.field.degree() != 1 || self.field.characteristic() != target.characteristic() {
            return Err(Error::FieldMismatch);
        }
        Ok(Poly { field: target.clone(), terms: self.terms.clone() })
    }
}

impl Add for &Poly {
    type Output = Poly;
    fn add(self, rhs: &Poly) -> Poly {
        assert!(self.field == rhs.field, "field mismatch");
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(*m, c);
        }
        out
    }
}

impl Sub for &Poly {
    type Output = Poly;
    fn sub(self, rhs: &Poly) -> Poly {
        assert!(self.field == rhs.field, "field mismatch");
        let mut out = self.clone();
        let k = &self.field;
        for (m, c) in &rhs.terms {
            out.add_term(*m, &k.neg(c));
        }
        out
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        let k = &self.field;
        Poly { field: k.clone(), terms: self.terms.iter().map(|(m, v)| (*m, k.neg(v))).collect() }
    }
}

impl Mul for &Poly {
    type Output = Poly;
    fn mul(self, rhs: &Poly) -> Poly {
        assert!(self.field == rhs.field, "field mismatch");
        let k = &self.field;
        let mut out = Poly::zero(k);
        for (&(a, b), u) in &self.terms {
            for (&(c, d), v) in &rhs.terms {
                out.add_term((a + c, b + d), &k.mul(u, v));
            }
        }
        out
    }
}

impl fmt::Display for Poly {
    /// Prints in the parser's grammar, highest total degree first.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let k = &self.field;
        let mut mons: Vec<(&Mono, &Elem)> = self.terms.iter().collect();
        mons.sort_by(|(a, _), (b, _)| (b.0 + b.1, b.1).cmp(&(a.0 + a.1, a.1)));
        let mut first = true;
        for ((i, j), c) in mons {
            let (negative, body) = k.signed_repr(c);
            let mut factors = Vec::new();
            let unit = body == "1";
            if !unit || (*i == 0 && *j == 0) {
                factors.push(body);
            }
            for (v, e) in [("X", *i), ("Y", *j)] {
                match e {
                    0 => {}
                    1 => factors.push(v.to_string()),
                    _ => factors.push(format!("{v}^{e}")),
                }
            }
            let text = factors.join("*");
            match (first, negative) {
                (true, true) => write!(f, "-{text}")?,
                (true, false) => write!(f, "{text}")?,
                (false, true) => write!(f, " - {text}")?,
                (false, false) => write!(f, " + {text}")?,
            }
            first = false;
        }
        Ok(())
    }
}

/// The pairing `[f, g] = f_X·g_Y − f_Y·g_X`.
pub fn bracket(f: &Poly, g: &Poly) -> Poly {
    &(&f.derivative(Var::X) * &g.derivative(Var::Y)) - &(&f.derivative(Var::Y) * &g.derivative(Var::X))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gf(p: u64) -> Field {
        Field::prime(p).unwrap()
    }

    #[test]
    fn square_of_cusp_over_f5() {
        let k = gf(5);
        let f = Poly::from_int_terms(&k, &[(1, 0, 2), (-1, 3, 0)]);
        let expected = Poly::from_int_terms(&k, &[(1, 0, 4), (3, 3, 2), (1, 6, 0)]);
        assert_eq!(f.pow(2), expected);
        assert_eq!(&f * &Poly::one(&k), f);
    }

    #[test]
    fn freshmans_dream() {
        for p in [2u64, 3, 5, 7] {
            let k = gf(p);
            let s = &Poly::x(&k) + &Poly::y(&k);
            let expected = Poly::from_int_terms(&k, &[(1, p as u32, 0), (1, 0, p as u32)]);
            assert_eq!(s.pow(p as u32), expected);
        }
    }

    #[test]
    fn ring_op_rejects_mixed_fields() {
        let a = Poly::x(&gf(5));
        let b = Poly::x(&gf(7));
        assert_eq!(a.ring_op(&b, RingOp::Add), Err(Error::FieldMismatch));
    }

    #[test]
    fn derivative_of_y_to_the_p_vanishes() {
        for p in [3u32, 5, 7] {
            let k = gf(p as u64);
            let f = Poly::from_int_terms(&k, &[(1, 0, p), (1, p + 1, 0)]);
            assert!(f.derivative(Var::Y).is_zero());
            assert_eq!(f.derivative(Var::X), Poly::from_int_terms(&k, &[(1, p, 0)]));
        }
    }

    #[test]
    fn three_lines_partials_share_factor() {
        let k = gf(3);
        let f = Poly::from_int_terms(&k, &[(1, 2, 1), (1, 1, 2)]);
        let fx = f.derivative(Var::X);
        let fy = f.derivative(Var::Y);
        assert_eq!(fx, Poly::from_int_terms(&k, &[(2, 1, 1), (1, 0, 2)]));
        assert_eq!(fy, Poly::from_int_terms(&k, &[(1, 2, 0), (2, 1, 1)]));
        // both vanish along Y = X
        let one = k.one();
        let two = k.from_i64(2);
        assert!(k.is_zero(&fx.eval(&one, &one)) && k.is_zero(&fy.eval(&two, &two)));
        assert!(Poly::constant(&k, k.from_i64(4)).derivative(Var::X).is_zero());
    }

    #[test]
    fn hasse_derivatives() {
        let k = gf(3);
        let y5 = Poly::monomial(&k, k.one(), 0, 5);
        assert_eq!(y5.hasse(Var::Y, 2), Poly::monomial(&k, k.one(), 0, 3));
        let y3 = Poly::monomial(&k, k.one(), 0, 3);
        assert_eq!(y3.hasse(Var::Y, 3), Poly::one(&k));
        let f = Poly::from_int_terms(&k, &[(1, 0, 4), (2, 3, 2), (1, 5, 1)]);
        assert_eq!(f.hasse(Var::Y, 1), f.derivative(Var::Y));
    }

    #[test]
    fn cusp_parametrization_substitution() {
        let k = gf(7);
        let f = Poly::from_int_terms(&k, &[(1, 0, 2), (-1, 3, 0)]);
        let x = UniSeries::monomial(&k, 2, 40);
        let y = UniSeries::monomial(&k, 3, 40);
        assert_eq!(f.eval_series(&x, &y).order(), None);
        assert_eq!(Poly::y(&k).eval_series(&x, &y).order(), Some(3));
    }

    #[test]
    fn linear_change_preserves_degree() {
        let k = gf(5);
        let f = Poly::from_int_terms(&k, &[(1, 0, 4), (3, 3, 2), (1, 6, 0), (-1, 11, 1)]);
        let g = f.compose(&Poly::x(&k), &(&Poly::y(&k) + &Poly::x(&k)), 100);
        assert_eq!(g.total_degree(), f.total_degree());
        let back = g.compose(&Poly::x(&k), &(&Poly::y(&k) - &Poly::x(&k)), 100);
        assert_eq!(back, f);
    }

    #[test]
    fn y_division() {
        let k = gf(5);
        let y3 = Poly::monomial(&k, k.one(), 0, 3);
        let b = Poly::from_int_terms(&k, &[(1, 0, 2), (-1, 3, 0)]);
        let (q, r) = y3.divrem_y(&b).unwrap();
        assert_eq!(q, Poly::y(&k));
        assert_eq!(r, Poly::monomial(&k, k.one(), 3, 1));
        let (q, r) = b.divrem_y(&b).unwrap();
        assert_eq!(q, Poly::one(&k));
        assert!(r.is_zero());
        let not_monic = Poly::from_int_terms(&k, &[(2, 0, 2)]);
        assert_eq!(y3.divrem_y(&not_monic), Err(Error::LeadingCoefficientNotUnit));
    }

    #[test]
    fn bracket_identities() {
        let k = gf(7);
        let f = Poly::from_int_terms(&k, &[(1, 0, 2), (-1, 3, 0)]);
        assert_eq!(bracket(&f, &Poly::x(&k)), -&f.derivative(Var::Y));
        assert!(bracket(&f, &f).is_zero());
        assert_eq!(bracket(&f, &Poly::y(&k)), Poly::from_int_terms(&k, &[(-3, 2, 0)]));
    }

    #[test]
    fn display_is_readable() {
        let k = Field::rationals();
        let f = Poly::from_int_terms(&k, &[(1, 0, 2), (-1, 3, 0), (2, 0, 0)]);
        assert_eq!(f.to_string(), "-X^3 + Y^2 + 2");
    }
}
