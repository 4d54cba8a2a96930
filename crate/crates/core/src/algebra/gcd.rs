//! Greatest common divisors in `k[X,Y]` through primitive remainder
//! sequences in `k[X][Y]`.

use super::Poly;
use crate::field::{Elem, Field};

type U = Vec<Elem>;

fn trim(k: &Field, a: &mut U) {
    while a.last().is_some_and(|c| k.is_zero(c)) {
        a.pop();
    }
}

fn umul(k: &Field, a: &U, b: &U) -> U {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![k.zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if k.is_zero(x) {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            out[i + j] = k.add(&out[i + j], &k.mul(x, y));
        }
    }
    trim(k, &mut out);
    out
}

fn usub(k: &Field, a: &U, b: &U) -> U {
    let n = a.len().max(b.len());
    let z = k.zero();
    let mut out: U = (0..n).map(|i| k.sub(a.get(i).unwrap_or(&z), b.get(i).unwrap_or(&z))).collect();
    trim(k, &mut out);
    out
}

/// Quotient and remainder by a nonzero divisor.
fn udivrem(k: &Field, a: &U, b: &U) -> (U, U) {
    let mut r = a.clone();
    if r.len() < b.len() {
        return (Vec::new(), r);
    }
    let inv = k.inv(b.last().unwrap()).expect("nonzero leading coefficient");
    let mut q = vec![k.zero(); r.len() - b.len() + 1];
    while r.len() >= b.len() && !r.is_empty() {
        let shift = r.len() - b.len();
        let c = k.mul(r.last().unwrap(), &inv);
        for (j, y) in b.iter().enumerate() {
            r[shift + j] = k.sub(&r[shift + j], &k.mul(&c, y));
        }
        q[shift] = c;
        trim(k, &mut r);
    }
    trim(k, &mut q);
    (q, r)
}

fn ugcd(k: &Field, a: &U, b: &U) -> U {
    let (mut a, mut b) = (a.clone(), b.clone());
    while !b.is_empty() {
        let (_, r) = udivrem(k, &a, &b);
        a = b;
        b = r;
    }
    if let Some(l) = a.last() {
        let inv = k.inv(l).unwrap();
        a = a.iter().map(|c| k.mul(c, &inv)).collect();
    }
    a
}

fn content(k: &Field, a: &[U]) -> U {
    a.iter().fold(Vec::new(), |g, c| if c.is_empty() { g } else { ugcd(k, &g, c) })
}

fn primitive(k: &Field, a: &[U]) -> Vec<U> {
    let c = content(k, a);
    a.iter().map(|x| if x.is_empty() { Vec::new() } else { udivrem(k, x, &c).0 }).collect()
}

fn trim_y(a: &mut Vec<U>) {
    while a.last().is_some_and(|c| c.is_empty()) {
        a.pop();
    }
}

/// `lc(b)^{δ+1} a mod b` in `k[X][Y]`.
fn prem(k: &Field, a: &[U], b: &[U]) -> Vec<U> {
    let mut r = a.to_vec();
    let lb = b.last().unwrap().clone();
    while r.len() >= b.len() && !r.is_empty() {
        let shift = r.len() - b.len();
        let lr = r.last().unwrap().clone();
        let mut next: Vec<U> = r.iter().map(|c| umul(k, c, &lb)).collect();
        for (j, y) in b.iter().enumerate() {
            next[shift + j] = usub(k, &next[shift + j], &umul(k, &lr, y));
        }
        trim_y(&mut next);
        r = next;
    }
    r
}

fn to_rows(p: &Poly) -> Vec<U> {
    let k = p.field();
    let mut rows = p.y_coefficients();
    for r in rows.iter_mut() {
        trim(k, r);
    }
    trim_y(&mut rows);
    rows
}

fn from_rows(k: &Field, rows: &[U]) -> Poly {
    let mut out = Poly::zero(k);
    for (j, row) in rows.iter().enumerate() {
        for (i, c) in row.iter().enumerate() {
            out.add_term((i as u32, j as u32), c);
        }
    }
    out
}

/// `gcd(a, b)`, normalized so that its leading coefficient in `X` of the
/// top `Y`-coefficient is 1; `gcd(0, 0) = 0`.
pub fn gcd(a: &Poly, b: &Poly) -> Poly {
    let k = a.field();
    let (ra, rb) = (to_rows(a), to_rows(b));
    if ra.is_empty() {
        return from_rows(k, &primitive_scaled(k, &rb));
    }
    if rb.is_empty() {
        return from_rows(k, &primitive_scaled(k, &ra));
    }
    let c = ugcd(k, &content(k, &ra), &content(k, &rb));
    let (mut x, mut y) = (primitive(k, &ra), primitive(k, &rb));
    if x.len() < y.len() {
        std::mem::swap(&mut x, &mut y);
    }
    while !y.is_empty() {
        let r = prem(k, &x, &y);
        x = y;
        y = if r.is_empty() { r } else { primitive(k, &r) };
    }
    let g: Vec<U> = if x.len() <= 1 { vec![c] } else { x.iter().map(|u| umul(k, u, &c)).collect() };
    from_rows(k, &primitive_scaled(k, &g))
}

/// Same polynomial, scaled to a monic leading coefficient.
fn primitive_scaled(k: &Field, a: &[U]) -> Vec<U> {
    let Some(l) = a.last().and_then(|r| r.last()) else { return a.to_vec() };
    let inv = k.inv(l).unwrap();
    a.iter().map(|r| r.iter().map(|c| k.mul(c, &inv)).collect()).collect()
}

/// `a` and `b` share a factor that vanishes at the origin.
pub fn common_factor_at_origin(a: &Poly, b: &Poly) -> bool {
    let g = gcd(a, b);
    g.total_degree() > 0 && g.field().is_zero(&g.coeff(0, 0))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn poly(k: &Field, t: &[(i64, u32, u32)]) -> Poly {
        Poly::from_int_terms(k, t)
    }

    #[test]
    fn gcds() {
        let k = Field::prime(7).unwrap();
        let a = poly(&k, &[(1, 0, 1), (-1, 1, 0)]);
        let b = poly(&k, &[(1, 0, 2), (1, 3, 0), (1, 0, 0)]);
        let c = poly(&k, &[(1, 2, 1), (3, 0, 0)]);
        assert_eq!(gcd(&(&a * &b), &(&a * &c)), a);
        assert_eq!(gcd(&b, &c).total_degree(), 0);
        let x = Poly::x(&k);
        assert_eq!(gcd(&(&x * &b), &(&x.pow(2) * &c)), x);
    }

    #[test]
    fn certificates() {
        let k = Field::prime(3).unwrap();
        let f = poly(&k, &[(1, 2, 1), (1, 1, 2)]);
        use crate::algebra::Var;
        assert!(common_factor_at_origin(&f.derivative(Var::X), &f.derivative(Var::Y)));
        let k7 = Field::prime(7).unwrap();
        let g = poly(&k7, &[(1, 0, 2), (-1, 3, 0)]);
        assert!(!common_factor_at_origin(&g.derivative(Var::X), &g.derivative(Var::Y)));
        let k5 = Field::prime(5).unwrap();
        let h = poly(&k5, &[(1, 0, 1), (1, 0, 0)]);
        assert!(!common_factor_at_origin(&(&h * &Poly::x(&k5)).derivative(Var::Y), &h));
    }
}
