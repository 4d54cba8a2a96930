//! Normal forms reached by coordinate changes alone: Levinson preparation
//! and monic Weierstrass polynomials.

use crate::algebra::{Poly, UniSeries, YPoly};
use crate::branch::{tangent_data, Tangent};
use crate::error::{Error, Result};
use crate::field::{Elem, Field};

/// `Φ: X ↦ image_x, Y ↦ image_y`, images kept below total degree `prec`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RecordedAutomorphism {
    field: Field,
    pub image_x: Poly,
    pub image_y: Poly,
    prec: u32,
}

impl RecordedAutomorphism {
    pub fn identity(k: &Field, prec: u32) -> RecordedAutomorphism {
        RecordedAutomorphism { field: k.clone(), image_x: Poly::x(k), image_y: Poly::y(k), prec }
    }

    /// Checks that the images vanish at the origin with invertible linear part.
    pub fn new(image_x: Poly, image_y: Poly, prec: u32) -> Result<RecordedAutomorphism> {
        let k = image_x.field().clone();
        if !k.is_zero(&image_x.constant_term()) || !k.is_zero(&image_y.constant_term()) {
            return Err(Error::InvalidInput("automorphism must fix the origin".into()));
        }
        let phi = RecordedAutomorphism { field: k, image_x, image_y, prec };
        phi.linear_inverse()?;
        Ok(phi)
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn precision(&self) -> u32 {
        self.prec
    }

    fn linear_part(&self) -> [[Elem; 2]; 2] {
        let (a, b) = (&self.image_x, &self.image_y);
        [[a.coeff(1, 0), a.coeff(0, 1)], [b.coeff(1, 0), b.coeff(0, 1)]]
    }

    fn linear_inverse(&self) -> Result<[[Elem; 2]; 2]> {
        let k = &self.field;
        let [[a, b], [c, d]] = self.linear_part();
        let det = k.sub(&k.mul(&a, &d), &k.mul(&b, &c));
        let inv = k.inv(&det).map_err(|_| Error::InvalidInput("linear part is singular".into()))?;
        Ok([[k.mul(&d, &inv), k.neg(&k.mul(&b, &inv))], [k.neg(&k.mul(&c, &inv)), k.mul(&a, &inv)]])
    }

    /// `Φ ∘ Ψ`, i.e. `f ↦ (f ∘ Φ) ∘ Ψ`.
    pub fn then(&self, psi: &RecordedAutomorphism) -> RecordedAutomorphism {
        let prec = self.prec.min(psi.prec);
        RecordedAutomorphism {
            field: self.field.clone(),
            image_x: self.image_x.compose(&psi.image_x, &psi.image_y, prec),
            image_y: self.image_y.compose(&psi.image_x, &psi.image_y, prec),
            prec,
        }
    }

    /// `Φ^{-1}` to the same precision, by fixed-point iteration on the
    /// nonlinear part.
    pub fn inverse(&self) -> Result<RecordedAutomorphism> {
        let k = &self.field;
        let l = self.linear_inverse()?;
        let lin = |px: &Poly, py: &Poly, row: usize| &px.scale(&l[row][0]) + &py.scale(&l[row][1]);
        let (x, y) = (Poly::x(k), Poly::y(k));
        let mut psi = RecordedAutomorphism { field: k.clone(), image_x: lin(&x, &y, 0), image_y: lin(&x, &y, 1), prec: self.prec };
        // each round fixes one more total degree of Φ(Ψ) = id
        for _ in 0..self.prec {
            let comp = self.then(&psi);
            let ex = &comp.image_x - &x;
            let ey = &comp.image_y - &y;
            if ex.is_zero() && ey.is_zero() {
                break;
            }
            psi.image_x = &psi.image_x - &lin(&ex, &ey, 0);
            psi.image_y = &psi.image_y - &lin(&ex, &ey, 1);
        }
        Ok(psi)
    }
}

/// `f ∘ Φ` below the precision of `Φ`.
pub fn apply_automorphism(phi: &RecordedAutomorphism, f: &Poly) -> Result<Poly> {
    if f.field() != phi.field() {
        return Err(Error::FieldMismatch);
    }
    Ok(f.compose(&phi.image_x, &phi.image_y, phi.prec))
}

/// Coordinate change `Y ↦ Y + h(X, Y)` bringing `f` to
/// `A_0(X) Y^r + ... + A_r(X)` with `A_0(0) ≠ 0` and `A_i(0) = 0` for `i >= 1`,
/// where `Y^r` is the lowest pure power of `Y` in `f`. Exact below total
/// degree `prec`.
pub fn levinson_prepare(f: &Poly, prec: u32) -> Result<(RecordedAutomorphism, Poly)> {
    let k = f.field().clone();
    let r = (1..=f.deg_y().unwrap_or(0)).find(|&j| !k.is_zero(&f.coeff(0, j))).ok_or(Error::NoPureYTerm)?;
    if !k.is_zero(&f.coeff(0, 0)) {
        return Err(Error::InvalidInput("polynomial does not vanish at the origin".into()));
    }
    let p = k.characteristic();
    if p != 0 && r as u64 % p == 0 {
        return Err(Error::CharacteristicDividesR(r));
    }
    // Under the weight X ↦ r+1, Y ↦ 1, f_Y has the single lowest term r·α·Y^{r−1},
    // so each round pushes the lightest offending weight strictly up.
    let pivot = k.inv(&k.mul(&k.from_i64(r as i64), &f.coeff(0, r)))?;
    let (x, y) = (Poly::x(&k), Poly::y(&k));
    let mut h = Poly::zero(&k);
    loop {
        let g = f.compose(&x, &(&y + &h), prec);
        let bad: Vec<((u32, u32), Elem)> = g.terms().filter(|((_, j), _)| *j > r).map(|(m, c)| (*m, c.clone())).collect();
        if bad.is_empty() {
            let phi = RecordedAutomorphism { field: k.clone(), image_x: x, image_y: &y + &h, prec };
            return Ok((phi, g));
        }
        for ((i, j), c) in bad {
            h.add_term((i, j - r + 1), &k.neg(&k.mul(&c, &pivot)));
        }
    }
}

/// Linear change sending the tangent line of `f` to `Y = 0`.
fn straighten_tangent(f: &Poly, prec: u32) -> Result<RecordedAutomorphism> {
    let k = f.field();
    let (x, y) = (Poly::x(k), Poly::y(k));
    match tangent_data(f)? {
        Tangent::Line { line, .. } if k.is_zero(&line.b) => RecordedAutomorphism::new(y, x, prec),
        Tangent::Line { line, .. } => {
            // aX + bY ↦ Y
            let binv = k.inv(&line.b)?;
            let img = &y.scale(&binv) - &x.scale(&k.mul(&line.a, &binv));
            RecordedAutomorphism::new(x, img, prec)
        }
        Tangent::Split { .. } => Err(Error::Reducible("tangent cone is not a power of a line".into())),
    }
}

/// Coordinates in which `f` becomes `Y^n + B_1(X) Y^{n−1} + ... + B_n(X)` with
/// `ord B_i > i`, `n = mult(f)`. Coefficients are exact below `X^prec`.
pub fn weierstrass_by_coords(f: &Poly, prec: u32) -> Result<(RecordedAutomorphism, YPoly)> {
    let k = f.field().clone();
    let n = f.order().ok_or_else(|| Error::InvalidInput("zero polynomial".into()))?;
    let p = k.characteristic();
    if p != 0 && n as u64 % p == 0 {
        return Err(Error::CharacteristicDividesMultiplicity(n));
    }
    let total = prec + n + 1;
    let lin = straighten_tangent(f, total)?;
    let f1 = apply_automorphism(&lin, f)?;
    let (lev, f2) = levinson_prepare(&f1, total)?;
    let a0 = UniSeries::from_coeffs(&k, (0..prec).map(|i| f2.coeff(i, n)).collect(), prec as usize);
    let u = a0.inverse()?.nth_root(n as u64)?;
    let mut u_poly = Poly::zero(&k);
    for (i, c) in u.coeffs().iter().enumerate() {
        u_poly.add_term((i as u32, 0), c);
    }
    let scale = RecordedAutomorphism::new(Poly::x(&k), &Poly::y(&k) * &u_poly, total)?;
    let phi = lin.then(&lev).then(&scale);
    let g = apply_automorphism(&scale, &f2)?.truncate_x(prec);
    let w = YPoly::from_poly(&g, prec as usize);
    debug_assert!(is_weierstrass(&w));
    Ok((phi, w))
}

/// Monic in `Y` with `ord B_i > i`.
pub fn is_weierstrass(w: &YPoly) -> bool {
    let Some(n) = w.degree() else { return false };
    let k = w.coeffs()[0].field();
    let lead = &w.coeffs()[n];
    if !k.is_one(&lead.coeff(0)) || lead.order() != Some(0) || lead.coeffs().iter().skip(1).any(|c| !k.is_zero(c)) {
        return false;
    }
    (1..=n).all(|i| w.coeffs()[n - i].order().is_none_or(|o| o > i))
}

/// Random automorphism with small integer coefficients up to `degree`.
pub fn random_automorphism<R: rand::Rng>(k: &Field, rng: &mut R, degree: u32, prec: u32) -> RecordedAutomorphism {
    let rand_elem = |rng: &mut R| k.from_i64(rng.gen_range(-3..=3));
    loop {
        let mut ix = Poly::zero(k);
        let mut iy = Poly::zero(k);
        for d in 1..=degree {
            for i in 0..=d {
                ix.add_term((i, d - i), &rand_elem(rng));
                iy.add_term((i, d - i), &rand_elem(rng));
            }
        }
        if let Ok(phi) = RecordedAutomorphism::new(ix, iy, prec) {
            return phi;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::invariants::milnor_number;
    use rand::SeedableRng;

    fn poly(k: &Field, t: &[(i64, u32, u32)]) -> Poly {
        Poly::from_int_terms(k, t)
    }

    #[test]
    fn prepared_input_is_fixed() {
        let k = Field::prime(5).unwrap();
        let f = poly(&k, &[(1, 0, 2), (-1, 3, 0)]);
        let (phi, g) = levinson_prepare(&f, 20).unwrap();
        assert_eq!(phi, RecordedAutomorphism::identity(&k, 20));
        assert_eq!(g, f);
    }

    #[test]
    fn levinson_shape() {
        let k = Field::prime(5).unwrap();
        let f = poly(&k, &[(1, 0, 2), (1, 1, 1), (1, 3, 0), (1, 1, 4), (2, 0, 5)]);
        let (phi, g) = levinson_prepare(&f, 30).unwrap();
        assert!(g.deg_y().unwrap() <= 2);
        assert!(!k.is_zero(&g.coeff(0, 2)));
        assert!(k.is_zero(&g.coeff(0, 1)) && k.is_zero(&g.coeff(0, 0)));
        assert_eq!(apply_automorphism(&phi, &f).unwrap(), g);
        let k3 = Field::prime(3).unwrap();
        assert_eq!(
            levinson_prepare(&poly(&k3, &[(1, 0, 3), (1, 4, 0)]), 20).unwrap_err(),
            Error::CharacteristicDividesR(3)
        );
        assert_eq!(levinson_prepare(&poly(&k3, &[(1, 1, 1)]), 20).unwrap_err(), Error::NoPureYTerm);
    }

    #[test]
    fn weierstrass_forms() {
        let k = Field::prime(5).unwrap();
        let f = poly(&k, &[(1, 0, 2), (-1, 3, 0), (1, 1, 2), (-1, 4, 0)]);
        let (phi, w) = weierstrass_by_coords(&f, 24).unwrap();
        assert!(is_weierstrass(&w));
        assert_eq!(w.degree(), Some(2));
        assert_eq!(milnor_number(&w.to_poly()).unwrap(), milnor_number(&f).unwrap());
        assert_eq!(milnor_number(&apply_automorphism(&phi, &f).unwrap()).unwrap().finite(), Some(2));
        let k13 = Field::prime(13).unwrap();
        let h = poly(&k13, &[(1, 0, 3), (-1, 11, 0), (1, 8, 1)]);
        let (_, wh) = weierstrass_by_coords(&h, 30).unwrap();
        assert_eq!(wh.to_poly(), h);
        // tangent X − Y needs the rotation
        let t = poly(&k13, &[(1, 2, 0), (-2, 1, 1), (1, 0, 2), (1, 3, 0)]);
        let (_, wt) = weierstrass_by_coords(&t, 30).unwrap();
        assert!(is_weierstrass(&wt));
        assert_eq!(wt.to_poly().homogeneous_part(2), poly(&k13, &[(1, 0, 2)]));
    }

    #[test]
    fn inverse_law() {
        let k = Field::prime(7).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        let phi = random_automorphism(&k, &mut rng, 3, 12);
        let psi = phi.inverse().unwrap();
        let f = poly(&k, &[(1, 0, 2), (-1, 3, 0), (2, 2, 2)]);
        let back = apply_automorphism(&psi, &apply_automorphism(&phi, &f).unwrap()).unwrap();
        assert_eq!(back, f.truncate(12));
        assert_eq!(milnor_number(&apply_automorphism(&phi, &f).unwrap()).unwrap(), milnor_number(&f).unwrap());
    }
}
