//! Polynomials in `Y` whose coefficients are truncated series in `X`.

use crate::algebra::poly::Poly;
use crate::algebra::series::UniSeries;
use crate::error::{Error, Result};
use crate::field::Field;

/// `Σ_j A_j(X) Y^j`; `coeffs[j]` is the coefficient of `Y^j`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct YPoly {
    field: Field,
    coeffs: Vec<UniSeries>,
    prec: usize,
}

impl YPoly {
    pub fn new(field: &Field, mut coeffs: Vec<UniSeries>, prec: usize) -> YPoly {
        for c in coeffs.iter_mut() {
            *c = c.with_precision(prec);
        }
        let mut p = YPoly { field: field.clone(), coeffs, prec };
        p.trim();
        p
    }

    /// Reads an exact polynomial as an element of `k[[X]][Y]` mod `X^prec`.
    pub fn from_poly(f: &Poly, prec: usize) -> YPoly {
        let k = f.field();
        let coeffs = f
            .y_coefficients()
            .into_iter()
            .map(|row| UniSeries::from_coeffs(k, row, prec))
            .collect();
        YPoly::new(k, coeffs, prec)
    }

    pub fn to_poly(&self) -> Poly {
        let k = &self.field;
        let mut out = Poly::zero(k);
        for (j, a) in self.coeffs.iter().enumerate() {
            for (i, c) in a.coeffs().iter().enumerate() {
                out.add_term((i as u32, j as u32), c);
            }
        }
        out
    }

    fn trim(&mut self) {
        while self.coeffs.last().is_some_and(|c| c.is_zero()) {
            self.coeffs.pop();
        }
    }

    pub fn precision(&self) -> usize {
        self.prec
    }

    pub fn coeffs(&self) -> &[UniSeries] {
        &self.coeffs
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn sub(&self, o: &YPoly) -> YPoly {
        let prec = self.prec.min(o.prec);
        let n = self.coeffs.len().max(o.coeffs.len());
        let zero = UniSeries::zero(&self.field, prec);
        let coeffs = (0..n)
            .map(|j| self.coeffs.get(j).unwrap_or(&zero).sub(o.coeffs.get(j).unwrap_or(&zero)))
            .collect();
        YPoly::new(&self.field, coeffs, prec)
    }

    pub fn mul(&self, o: &YPoly) -> YPoly {
        let prec = self.prec.min(o.prec);
        if self.coeffs.is_empty() || o.coeffs.is_empty() {
            return YPoly::new(&self.field, Vec::new(), prec);
        }
        let mut coeffs = vec![UniSeries::zero(&self.field, prec); self.coeffs.len() + o.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in o.coeffs.iter().enumerate() {
                coeffs[i + j] = coeffs[i + j].add(&a.mul(b).with_precision(prec));
            }
        }
        YPoly::new(&self.field, coeffs, prec)
    }
}

/// Division `a = q·b + r` with `deg_Y r < deg_Y b`; the leading coefficient
/// of `b` must be a unit series.
pub fn y_poly_divide(a: &YPoly, b: &YPoly) -> Result<(YPoly, YPoly)> {
    if a.field != b.field {
        return Err(Error::FieldMismatch);
    }
    let k = &a.field;
    let prec = a.prec.min(b.prec);
    let db = b.degree().ok_or(Error::DivisionByZero)?;
    let lead_inv = b.coeffs[db].inverse().map_err(|_| Error::LeadingCoefficientNotUnit)?;
    let mut rem: Vec<UniSeries> = a.coeffs.iter().map(|c| c.with_precision(prec)).collect();
    let nq = rem.len().saturating_sub(db);
    let mut quot = vec![UniSeries::zero(k, prec); nq];
    for d in (db..rem.len()).rev() {
        let c = rem[d].mul(&lead_inv).with_precision(prec);
        for (j, bj) in b.coeffs.iter().enumerate() {
            let idx = d - db + j;
            rem[idx] = rem[idx].sub(&c.mul(bj).with_precision(prec));
        }
        quot[d - db] = c;
    }
    rem.truncate(db);
    Ok((YPoly::new(k, quot, prec), YPoly::new(k, rem, prec)))
}
