//! Truncated univariate power series `Σ c_i t^i mod t^prec`.

use std::fmt;

use crate::error::{Error, Result};
use crate::field::{Elem, Field};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UniSeries {
    field: Field,
    coeffs: Vec<Elem>,
}

impl UniSeries {
    pub fn zero(field: &Field, prec: usize) -> UniSeries {
        UniSeries { field: field.clone(), coeffs: vec![field.zero(); prec] }
    }

    pub fn one(field: &Field, prec: usize) -> UniSeries {
        UniSeries::constant(field, field.one(), prec)
    }

    pub fn constant(field: &Field, c: Elem, prec: usize) -> UniSeries {
        let mut s = UniSeries::zero(field, prec);
        if prec > 0 {
            s.coeffs[0] = c;
        }
        s
    }

    /// `t^e mod t^prec`.
    pub fn monomial(field: &Field, e: usize, prec: usize) -> UniSeries {
        let mut s = UniSeries::zero(field, prec);
        if e < prec {
            s.coeffs[e] = field.one();
        }
        s
    }

    /// Coefficients beyond `prec` are dropped, missing ones are zero.
    pub fn from_coeffs(field: &Field, mut coeffs: Vec<Elem>, prec: usize) -> UniSeries {
        coeffs.resize(prec, field.zero());
        UniSeries { field: field.clone(), coeffs }
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    /// Number of known coefficients.
    pub fn precision(&self) -> usize {
        self.coeffs.len()
    }

    pub fn coeffs(&self) -> &[Elem] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> Elem {
        self.coeffs.get(i).cloned().unwrap_or_else(|| self.field.zero())
    }

    pub fn set_coeff(&mut self, i: usize, c: Elem) {
        if i < self.coeffs.len() {
            self.coeffs[i] = c;
        }
    }

    /// Truncates, or pads with zeros; padding is only meaningful for exact series.
    pub fn with_precision(&self, prec: usize) -> UniSeries {
        UniSeries::from_coeffs(&self.field, self.coeffs.clone(), prec)
    }

    /// Index of the first nonzero coefficient, `None` if zero to the known precision.
    pub fn order(&self) -> Option<usize> {
        self.coeffs.iter().position(|c| !self.field.is_zero(c))
    }

    pub fn is_zero(&self) -> bool {
        self.order().is_none()
    }

    pub fn add(&self, o: &UniSeries) -> UniSeries {
        let k = &self.field;
        let prec = self.precision().min(o.precision());
        UniSeries { field: k.clone(), coeffs: (0..prec).map(|i| k.add(&self.coeffs[i], &o.coeffs[i])).collect() }
    }

    pub fn sub(&self, o: &UniSeries) -> UniSeries {
        let k = &self.field;
        let prec = self.precision().min(o.precision());
        UniSeries { field: k.clone(), coeffs: (0..prec).map(|i| k.sub(&self.coeffs[i], &o.coeffs[i])).collect() }
    }

    pub fn neg(&self) -> UniSeries {
        let k = &self.field;
        UniSeries { field: k.clone(), coeffs: self.coeffs.iter().map(|c| k.neg(c)).collect() }
    }

    pub fn scale(&self, c: &Elem) -> UniSeries {
        let k = &self.field;
        UniSeries { field: k.clone(), coeffs: self.coeffs.iter().map(|a| k.mul(a, c)).collect() }
    }

    /// Product. A factor of order `o` lets the other factor lose `o` terms of
    /// precision without harm, so the result keeps the best valid precision.
    pub fn mul(&self, o: &UniSeries) -> UniSeries {
        let k = &self.field;
        let oa = self.order().unwrap_or(self.precision());
        let ob = o.order().unwrap_or(o.precision());
        let prec = (self.precision() + ob).min(o.precision() + oa);
        let mut out = vec![k.zero(); prec];
        for (i, a) in self.coeffs.iter().enumerate().skip(oa) {
            if i >= prec {
                break;
            }
            if k.is_zero(a) {
                continue;
            }
            for (j, b) in o.coeffs.iter().enumerate().skip(ob) {
                if i + j >= prec {
                    break;
                }
                if !k.is_zero(b) {
                    out[i + j] = k.add(&out[i + j], &k.mul(a, b));
                }
            }
        }
        UniSeries { field: k.clone(), coeffs: out }
    }

    pub fn pow(&self, mut e: u64) -> UniSeries {
        let mut acc = UniSeries::one(&self.field, self.precision());
        let mut base = self.clone();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    /// Multiplicative inverse of a unit.
    pub fn inverse(&self) -> Result<UniSeries> {
        let k = &self.field;
        let prec = self.precision();
        if prec == 0 || k.is_zero(&self.coeffs[0]) {
            return Err(Error::NotAUnit);
        }
        let inv0 = k.inv(&self.coeffs[0])?;
        let mut r = vec![k.zero(); prec];
        r[0] = inv0.clone();
        for n in 1..prec {
            let mut acc = k.zero();
            for j in 1..=n {
                if !k.is_zero(&self.coeffs[j]) {
                    acc = k.add(&acc, &k.mul(&self.coeffs[j], &r[n - j]));
                }
            }
            r[n] = k.neg(&k.mul(&acc, &inv0));
        }
        Ok(UniSeries { field: k.clone(), coeffs: r })
    }

    /// `self / t^e`; the first `e` coefficients must vanish.
    pub fn shift_down(&self, e: usize) -> UniSeries {
        let e = e.min(self.precision());
        UniSeries { field: self.field.clone(), coeffs: self.coeffs[e..].to_vec() }
    }

    /// `self · t^e`.
    pub fn shift_up(&self, e: usize) -> UniSeries {
        let mut coeffs = vec![self.field.zero(); e];
        coeffs.extend(self.coeffs.iter().cloned());
        UniSeries { field: self.field.clone(), coeffs }
    }

    /// Formal derivative `d/dt`; one coefficient of precision is lost.
    pub fn derivative(&self) -> UniSeries {
        let k = &self.field;
        let coeffs = (1..self.precision()).map(|i| k.mul(&self.coeffs[i], &k.from_i64(i as i64))).collect();
        UniSeries { field: k.clone(), coeffs }
    }

    /// Composition `self(inner(t))` for `inner` without constant term.
    pub fn compose(&self, inner: &UniSeries) -> Result<UniSeries> {
        let k = &self.field;
        if inner.precision() > 0 && !k.is_zero(&inner.coeffs[0]) {
            return Err(Error::InvalidInput("inner series must vanish at 0".into()));
        }
        let o = inner.order().unwrap_or(inner.precision()).max(1);
        let prec = inner.precision().min(self.precision().saturating_mul(o));
        let inner = inner.with_precision(prec);
        let mut acc = UniSeries::zero(k, prec);
        for c in self.coeffs.iter().rev() {
            acc = acc.mul(&inner).with_precision(prec).add(&UniSeries::constant(k, c.clone(), prec));
        }
        Ok(acc)
    }

    /// An `n`-th root. Series of order `o` need `n | o`; in characteristic `p`
    /// the `p`-part of `n` is taken coefficientwise through the Frobenius.
    pub fn nth_root(&self, n: u64) -> Result<UniSeries> {
        let k = &self.field;
        if n == 0 {
            return Err(Error::InvalidInput("zeroth root".into()));
        }
        let p = k.characteristic();
        if p != 0 && n % p == 0 {
            let mut coeffs = Vec::new();
            let prec = self.precision();
            for i in 0..prec.div_ceil(p as usize) {
                coeffs.push(k.frobenius_root(&self.coeff(i * p as usize))?);
            }
            for (i, c) in self.coeffs.iter().enumerate() {
                if i % p as usize != 0 && !k.is_zero(c) {
                    return Err(Error::NoRootInField(format!("series is not a {p}-th power")));
                }
            }
            // known coefficients below prec determine the root below ceil(prec/p)
            let s = UniSeries { field: k.clone(), coeffs };
            return s.nth_root(n / p);
        }
        let Some(o) = self.order() else {
            return Ok(UniSeries::zero(k, self.precision()));
        };
        if o as u64 % n != 0 {
            return Err(Error::NoRootInField(format!("order {o} is not divisible by {n}")));
        }
        let u = self.shift_down(o);
        let prec = u.precision();
        let r0 = k.nth_root(&u.coeffs[0], n)?;
        let mut r = UniSeries::constant(k, r0, prec);
        let n_elem = k.from_i64(n as i64);
        let mut correct = 1usize;
        while correct < prec {
            correct *= 2;
            let rn1 = r.pow(n - 1);
            let err = rn1.mul(&r).sub(&u);
            let denom = rn1.scale(&n_elem).inverse()?;
            r = r.sub(&err.mul(&denom)).with_precision(prec);
        }
        Ok(r.shift_up(o / n as usize))
    }
}

impl fmt::Display for UniSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let k = &self.field;
        let mut parts = Vec::new();
        for (i, c) in self.coeffs.iter().enumerate() {
            if k.is_zero(c) {
                continue;
            }
            let c = k.display(c);
            parts.push(match i {
                0 => c,
                1 => format!("{c}*t"),
                _ => format!("{c}*t^{i}"),
            });
        }
        if parts.is_empty() {
            parts.push("0".into());
        }
        write!(f, "{} + O(t^{})", parts.join(" + "), self.precision())
    }
}
