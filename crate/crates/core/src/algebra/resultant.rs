//! `Res_Y(f, g) ∈ k[X]` by fraction-free elimination on the Sylvester matrix.

use crate::algebra::poly::Poly;
use crate::error::{Error, Result};
use crate::field::{Elem, Field};

/// Dense univariate polynomial, lowest coefficient first, no trailing zeros.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UPoly {
    field: Field,
    coeffs: Vec<Elem>,
}

impl UPoly {
    pub fn new(field: &Field, mut coeffs: Vec<Elem>) -> UPoly {
        while coeffs.last().is_some_and(|c| field.is_zero(c)) {
            coeffs.pop();
        }
        UPoly { field: field.clone(), coeffs }
    }

    pub fn coeffs(&self) -> &[Elem] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    /// Order of vanishing at `X = 0`.
    pub fn order(&self) -> Option<usize> {
        self.coeffs.iter().position(|c| !self.field.is_zero(c))
    }

    pub fn neg(&self) -> UPoly {
        UPoly { field: self.field.clone(), coeffs: self.coeffs.iter().map(|c| self.field.neg(c)).collect() }
    }

    pub fn sub(&self, o: &UPoly) -> UPoly {
        let k = &self.field;
        let n = self.coeffs.len().max(o.coeffs.len());
        let z = k.zero();
        let c = (0..n)
            .map(|i| k.sub(self.coeffs.get(i).unwrap_or(&z), o.coeffs.get(i).unwrap_or(&z)))
            .collect();
        UPoly::new(k, c)
    }

    pub fn mul(&self, o: &UPoly) -> UPoly {
        let k = &self.field;
        if self.is_zero() || o.is_zero() {
            return UPoly::new(k, Vec::new());
        }
        let mut c = vec![k.zero(); self.coeffs.len() + o.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if k.is_zero(a) {
                continue;
            }
            for (j, b) in o.coeffs.iter().enumerate() {
                c[i + j] = k.add(&c[i + j], &k.mul(a, b));
            }
        }
        UPoly::new(k, c)
    }

    /// Quotient of an exact division.
    pub fn div_exact(&self, d: &UPoly) -> Result<UPoly> {
        let k = &self.field;
        let dd = d.degree().ok_or(Error::DivisionByZero)?;
        let lead_inv = k.inv(&d.coeffs[dd])?;
        let mut rem = self.coeffs.clone();
        if rem.len() <= dd {
            return if self.is_zero() {
                Ok(self.clone())
            } else {
                Err(Error::InvalidInput("inexact polynomial division".into()))
            };
        }
        let mut q = vec![k.zero(); rem.len() - dd];
        for i in (dd..rem.len()).rev() {
            let c = k.mul(&rem[i], &lead_inv);
            if k.is_zero(&c) {
                continue;
            }
            for (j, dj) in d.coeffs.iter().enumerate() {
                rem[i - dd + j] = k.sub(&rem[i - dd + j], &k.mul(&c, dj));
            }
            q[i - dd] = c;
        }
        if rem.iter().any(|c| !k.is_zero(c)) {
            return Err(Error::InvalidInput("inexact polynomial division".into()));
        }
        Ok(UPoly::new(k, q))
    }
}

/// Determinant of a square matrix over `k[X]` (Bareiss).
fn bareiss_det(field: &Field, mut m: Vec<Vec<UPoly>>) -> Result<UPoly> {
    let n = m.len();
    if n == 0 {
        return Ok(UPoly::new(field, vec![field.one()]));
    }
    let mut prev = UPoly::new(field, vec![field.one()]);
    let mut negate = false;
    for kk in 0..n {
        if m[kk][kk].is_zero() {
            match (kk + 1..n).find(|&r| !m[r][kk].is_zero()) {
                Some(r) => {
                    m.swap(kk, r);
                    negate = !negate;
                }
                None => return Ok(UPoly::new(field, Vec::new())),
            }
        }
        for i in kk + 1..n {
            for j in kk + 1..n {
                let t = m[kk][kk].mul(&m[i][j]).sub(&m[i][kk].mul(&m[kk][j]));
                m[i][j] = t.div_exact(&prev)?;
            }
        }
        prev = m[kk][kk].clone();
    }
    let det = m[n - 1][n - 1].clone();
    Ok(if negate { det.neg() } else { det })
}

/// `Res_Y(f, g)` as a polynomial in `X`.
pub fn resultant_y(f: &Poly, g: &Poly) -> Result<UPoly> {
    if f.field() != g.field() {
        return Err(Error::FieldMismatch);
    }
    let k = f.field();
    if f.is_zero() || g.is_zero() {
        return Err(Error::CommonFactor);
    }
    let fc: Vec<UPoly> = f.y_coefficients().into_iter().map(|c| UPoly::new(k, c)).collect();
    let gc: Vec<UPoly> = g.y_coefficients().into_iter().map(|c| UPoly::new(k, c)).collect();
    let m = fc.len() - 1;
    let n = gc.len() - 1;
    let size = m + n;
    let zero = UPoly::new(k, Vec::new());
    let mut mat = vec![vec![zero.clone(); size]; size];
    // rows hold coefficients from the top Y-degree down
    for r in 0..n {
        for (j, c) in fc.iter().rev().enumerate() {
            mat[r][r + j] = c.clone();
        }
    }
    for r in 0..m {
        for (j, c) in gc.iter().rev().enumerate() {
            mat[n + r][r + j] = c.clone();
        }
    }
    bareiss_det(k, mat)
}

/// Intersection multiplicity at the origin via `ord_X Res_Y(f, g)`; valid
/// when `f` is monic in `Y` and all its `Y`-roots vanish at `X = 0`.
pub fn intersection_via_resultant(f: &Poly, g: &Poly) -> Result<u64> {
    let r = resultant_y(f, g)?;
    r.order().map(|o| o as u64).ok_or(Error::CommonFactor)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn resultant_of_cusp_and_line() {
        let k = Field::prime(7).unwrap();
        let f = Poly::from_int_terms(&k, &[(1, 0, 2), (-1, 3, 0)]);
        let g = Poly::y(&k);
        let r = resultant_y(&f, &g).unwrap();
        assert_eq!(r.order(), Some(3));
        let h = Poly::from_int_terms(&k, &[(1, 0, 3), (-1, 5, 0)]);
        // I(Y^2 - X^3, Y^3 - X^5) = min(2·5, 3·3) = 9
        assert_eq!(intersection_via_resultant(&f, &h).unwrap(), 9);
    }

    #[test]
    fn common_factor_gives_zero() {
        let k = Field::prime(5).unwrap();
        let f = Poly::from_int_terms(&k, &[(1, 0, 2), (-1, 3, 0)]);
        let g = &f * &Poly::from_int_terms(&k, &[(1, 0, 1), (1, 1, 0)]);
        assert_eq!(intersection_via_resultant(&f, &g), Err(Error::CommonFactor));
    }

    #[test]
    fn constant_in_y() {
        let k = Field::rationals();
        let f = Poly::from_int_terms(&k, &[(1, 0, 2), (-1, 1, 0)]);
        let g = Poly::from_int_terms(&k, &[(1, 3, 0)]);
        assert_eq!(resultant_y(&f, &g).unwrap().order(), Some(6));
    }
}
