//! Exact coefficient fields: prime fields `GF(p)`, extensions `GF(p^k)` and
//! the rationals `QQ`.
//!
//! A [`Field`] is a cheap, shareable handle. Elements are plain [`Elem`]
//! values and all arithmetic goes through the owning field, so the hot
//! polynomial loops never carry a field pointer per coefficient. The
//! [`FieldElement`] wrapper pairs an element with its field for checked use.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Largest supported characteristic; keeps products of residues inside `u64`.
pub const MAX_CHARACTERISTIC: u64 = (1 << 31) - 1;

/// A field element. Finite-field elements pack their residue polynomial
/// `d_0 + d_1 u + ... + d_{k-1} u^{k-1}` as the base-`p` integer `Σ d_i p^i`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Elem {
    Fin(u64),
    Rat(BigRational),
}

#[derive(Debug, PartialEq, Eq)]
struct Inner {
    p: u64,
    k: u32,
    /// Monic modulus, low to high, length `k + 1`. Empty for prime fields and `QQ`.
    modulus: Vec<u64>,
    /// `p^k`, or 0 for `QQ`.
    q: u64,
}

/// Handle to a coefficient field.
#[derive(Clone, Debug)]
pub struct Field(Arc<Inner>);

impl PartialEq for Field {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || self.0 == other.0
    }
}

impl Eq for Field {}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

// Dense polynomials over F_p, low to high, used only for modulus search.
mod fp_poly {
    pub fn trim(a: &mut Vec<u64>) {
        while a.last() == Some(&0) {
            a.pop();
        }
    }

    pub fn rem(a: &[u64], m: &[u64], p: u64) -> Vec<u64> {
        let mut r = a.to_vec();
        trim(&mut r);
        let dm = m.len() - 1;
        let inv_lead = super::pow_mod(m[dm], p - 2, p);
        while r.len() > dm {
            let top = r.len() - 1;
            let c = r[top] * inv_lead % p;
            for (i, &mi) in m.iter().enumerate() {
                let idx = top - dm + i;
                r[idx] = (r[idx] + p - c * mi % p) % p;
            }
            trim(&mut r);
        }
        r
    }

    pub fn mul_mod(a: &[u64], b: &[u64], m: &[u64], p: u64) -> Vec<u64> {
        if a.is_empty() || b.is_empty() {
            return Vec::new();
        }
        let mut out = vec![0u64; a.len() + b.len() - 1];
        for (i, &x) in a.iter().enumerate() {
            for (j, &y) in b.iter().enumerate() {
                out[i + j] = (out[i + j] + x * y) % p;
            }
        }
        rem(&out, m, p)
    }

    pub fn gcd(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
        let mut a = a.to_vec();
        let mut b = b.to_vec();
        trim(&mut a);
        trim(&mut b);
        while !b.is_empty() {
            let r = rem(&a, &b, p);
            a = b;
            b = r;
        }
        a
    }

    /// Ben-Or irreducibility test for a monic polynomial of degree >= 1.
    pub fn is_irreducible(f: &[u64], p: u64) -> bool {
        let k = f.len() - 1;
        let x = vec![0, 1];
        let mut power = x.clone();
        for _ in 1..=k / 2 {
            // power <- power^p mod f
            let mut acc = vec![1u64];
            let mut base = power.clone();
            let mut e = p;
            while e > 0 {
                if e & 1 == 1 {
                    acc = mul_mod(&acc, &base, f, p);
                }
                base = mul_mod(&base, &base, f, p);
                e >>= 1;
            }
            power = acc;
            let mut diff = power.clone();
            diff.resize(diff.len().max(2), 0);
            diff[1] = (diff[1] + p - 1) % p;
            let g = gcd(f, &diff, p);
            if g.len() > 1 {
                return false;
            }
        }
        true
    }
}

fn pow_mod(mut b: u64, mut e: u64, p: u64) -> u64 {
    let mut acc = 1 % p;
    b %= p;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * b % p;
        }
        b = b * b % p;
        e >>= 1;
    }
    acc
}

impl Field {
    /// The rationals.
    pub fn rationals() -> Field {
        Field(Arc::new(Inner { p: 0, k: 1, modulus: Vec::new(), q: 0 }))
    }

    /// The prime field `GF(p)`.
    pub fn prime(p: u64) -> Result<Field> {
        if !is_prime(p) || p > MAX_CHARACTERISTIC {
            return Err(Error::InvalidField(format!("{p} is not a supported prime")));
        }
        Ok(Field(Arc::new(Inner { p, k: 1, modulus: Vec::new(), q: p })))
    }

    /// `GF(p^k)` with the lowest irreducible monic modulus, enumerating
    /// candidates by the base-`p` integer of their lower coefficients.
    pub fn extension(p: u64, k: u32) -> Result<Field> {
        if k == 1 {
            return Field::prime(p);
        }
        if k == 0 {
            return Err(Error::InvalidField("extension degree must be positive".into()));
        }
        if !is_prime(p) {
            return Err(Error::InvalidField(format!("{p} is not prime")));
        }
        let q = p
            .checked_pow(k)
            .filter(|&q| q <= 1 << 40)
            .ok_or_else(|| Error::InvalidField(format!("GF({p}^{k}) is too large")))?;
        for n in 0..q {
            let mut coeffs = Vec::with_capacity(k as usize + 1);
            let mut m = n;
            for _ in 0..k {
                coeffs.push(m % p);
                m /= p;
            }
            coeffs.push(1);
            if coeffs[0] != 0 && fp_poly::is_irreducible(&coeffs, p) {
                return Field::with_modulus(p, coeffs);
            }
        }
        Err(Error::InvalidField(format!("no irreducible polynomial of degree {k} over GF({p})")))
    }

    /// `GF(p^k)` with an explicit monic modulus (low to high, length `k + 1`).
    pub fn with_modulus(p: u64, modulus: Vec<u64>) -> Result<Field> {
        if !is_prime(p) || p > MAX_CHARACTERISTIC {
            return Err(Error::InvalidField(format!("{p} is not a supported prime")));
        }
        if modulus.len() < 2 || *modulus.last().unwrap() != 1 || modulus.iter().any(|&c| c >= p) {
            return Err(Error::InvalidField("modulus must be monic with reduced coefficients".into()));
        }
        let k = (modulus.len() - 1) as u32;
        if k == 1 {
            return Field::prime(p);
        }
        if !fp_poly::is_irreducible(&modulus, p) {
            return Err(Error::InvalidField("modulus is reducible".into()));
        }
        let q = p
            .checked_pow(k)
            .ok_or_else(|| Error::InvalidField("field too large".into()))?;
        Ok(Field(Arc::new(Inner { p, k, modulus, q })))
    }

    /// Characteristic (0 for `QQ`).
    pub fn characteristic(&self) -> u64 {
        self.0.p
    }

    pub fn degree(&self) -> u32 {
        self.0.k
    }

    /// Number of elements, `None` for `QQ`.
    pub fn order(&self) -> Option<u64> {
        if self.0.p == 0 {
            None
        } else {
            Some(self.0.q)
        }
    }

    pub fn modulus(&self) -> &[u64] {
        &self.0.modulus
    }

    pub fn is_rational(&self) -> bool {
        self.0.p == 0
    }

    pub fn zero(&self) -> Elem {
        if self.0.p == 0 {
            Elem::Rat(BigRational::zero())
        } else {
            Elem::Fin(0)
        }
    }

    pub fn one(&self) -> Elem {
        if self.0.p == 0 {
            Elem::Rat(BigRational::one())
        } else {
            Elem::Fin(1)
        }
    }

    pub fn is_zero(&self, a: &Elem) -> bool {
        match a {
            Elem::Fin(v) => *v == 0,
            Elem::Rat(r) => r.is_zero(),
        }
    }

    pub fn is_one(&self, a: &Elem) -> bool {
        match a {
            Elem::Fin(v) => *v == 1,
            Elem::Rat(r) => r.is_one(),
        }
    }

    /// Image of an integer.
    pub fn from_i64(&self, n: i64) -> Elem {
        let p = self.0.p;
        if p == 0 {
            Elem::Rat(BigRational::from_integer(BigInt::from(n)))
        } else {
            Elem::Fin(n.rem_euclid(p as i64) as u64)
        }
    }

    /// Image of an arbitrary-precision integer.
    pub fn from_bigint(&self, n: &BigInt) -> Elem {
        let p = self.0.p;
        if p == 0 {
            Elem::Rat(BigRational::from_integer(n.clone()))
        } else {
            let r = n.mod_floor(&BigInt::from(p));
            Elem::Fin(r.to_u64().unwrap())
        }
    }

    /// Rational number `num/den`; fails in characteristic `p` when `p | den`.
    pub fn from_ratio(&self, num: i64, den: i64) -> Result<Elem> {
        let d = self.from_i64(den);
        let n = self.from_i64(num);
        self.div(&n, &d)
    }

    fn digits(&self, v: u64) -> Vec<u64> {
        let p = self.0.p;
        let mut out = Vec::with_capacity(self.0.k as usize);
        let mut m = v;
        for _ in 0..self.0.k {
            out.push(m % p);
            m /= p;
        }
        out
    }

    fn pack(&self, d: &[u64]) -> u64 {
        let p = self.0.p;
        d.iter().rev().fold(0u64, |acc, &x| acc * p + x)
    }

    /// Constructs the element `Σ d_i u^i` of `GF(p^k)` from residue digits.
    pub fn from_digits(&self, d: &[u64]) -> Result<Elem> {
        if self.0.p == 0 || d.len() > self.0.k as usize || d.iter().any(|&x| x >= self.0.p) {
            return Err(Error::InvalidInput("digits do not describe an element".into()));
        }
        let mut full = d.to_vec();
        full.resize(self.0.k as usize, 0);
        Ok(Elem::Fin(self.pack(&full)))
    }

    /// The class of the generator `u` of an extension field.
    pub fn generator(&self) -> Elem {
        if self.0.k == 1 || self.0.p == 0 {
            return self.one();
        }
        Elem::Fin(self.0.p)
    }

    #[inline]
    pub fn add(&self, a: &Elem, b: &Elem) -> Elem {
        match (a, b) {
            (Elem::Fin(x), Elem::Fin(y)) => {
                let p = self.0.p;
                if self.0.k == 1 {
                    let s = x + y;
                    Elem::Fin(if s >= p { s - p } else { s })
                } else {
                    let dx = self.digits(*x);
                    let dy = self.digits(*y);
                    let d: Vec<u64> = dx.iter().zip(&dy).map(|(a, b)| (a + b) % p).collect();
                    Elem::Fin(self.pack(&d))
                }
            }
            (Elem::Rat(x), Elem::Rat(y)) => Elem::Rat(x + y),
            _ => panic!("mixed field elements"),
        }
    }

    #[inline]
    pub fn neg(&self, a: &Elem) -> Elem {
        match a {
            Elem::Fin(x) => {
                let p = self.0.p;
                if self.0.k == 1 {
                    Elem::Fin(if *x == 0 { 0 } else { p - x })
                } else {
                    let d: Vec<u64> = self.digits(*x).iter().map(|&v| (p - v) % p).collect();
                    Elem::Fin(self.pack(&d))
                }
            }
            Elem::Rat(x) => Elem::Rat(-x),
        }
    }

    #[inline]
    pub fn sub(&self, a: &Elem, b: &Elem) -> Elem {
        match (a, b) {
            (Elem::Fin(x), Elem::Fin(y)) if self.0.k == 1 => {
                let p = self.0.p;
                Elem::Fin(if x >= y { x - y } else { x + p - y })
            }
            _ => self.add(a, &self.neg(b)),
        }
    }

    #[inline]
    pub fn mul(&self, a: &Elem, b: &Elem) -> Elem {
        match (a, b) {
            (Elem::Fin(x), Elem::Fin(y)) => {
                let p = self.0.p;
                if self.0.k == 1 {
                    Elem::Fin(x * y % p)
                } else {
                    let dx = self.digits(*x);
                    let dy = self.digits(*y);
                    let k = self.0.k as usize;
                    let mut prod = vec![0u64; 2 * k - 1];
                    for (i, &a) in dx.iter().enumerate() {
                        if a == 0 {
                            continue;
                        }
                        for (j, &b) in dy.iter().enumerate() {
                            prod[i + j] = (prod[i + j] + a * b) % p;
                        }
                    }
                    let m = &self.0.modulus;
                    for top in (k..prod.len()).rev() {
                        let c = prod[top];
                        if c == 0 {
                            continue;
                        }
                        for i in 0..k {
                            prod[top - k + i] = (prod[top - k + i] + p - c * m[i] % p) % p;
                        }
                        prod[top] = 0;
                    }
                    prod.truncate(k);
                    Elem::Fin(self.pack(&prod))
                }
            }
            (Elem::Rat(x), Elem::Rat(y)) => Elem::Rat(x * y),
            _ => panic!("mixed field elements"),
        }
    }

    pub fn pow(&self, a: &Elem, mut e: u64) -> Elem {
        let mut acc = self.one();
        let mut base = a.clone();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            e >>= 1;
            if e > 0 {
                base = self.mul(&base, &base);
            }
        }
        acc
    }

    pub fn inv(&self, a: &Elem) -> Result<Elem> {
        if self.is_zero(a) {
            return Err(Error::DivisionByZero);
        }
        Ok(match a {
            Elem::Fin(x) if self.0.k == 1 => Elem::Fin(pow_mod(*x, self.0.p - 2, self.0.p)),
            Elem::Fin(_) => self.pow(a, self.0.q - 2),
            Elem::Rat(r) => Elem::Rat(r.recip()),
        })
    }

    pub fn div(&self, a: &Elem, b: &Elem) -> Result<Elem> {
        Ok(self.mul(a, &self.inv(b)?))
    }

    /// The `p`-th root `b` with `b^p = a`, computed as `a^(p^(k-1))`.
    pub fn frobenius_root(&self, a: &Elem) -> Result<Elem> {
        if self.0.p == 0 {
            return Err(Error::UnsupportedInCharZero);
        }
        let mut b = a.clone();
        for _ in 1..self.0.k {
            b = self.pow(&b, self.0.p);
        }
        Ok(b)
    }

    /// Some `b` with `b^n = a`, if one exists in the field.
    pub fn nth_root(&self, a: &Elem, n: u64) -> Result<Elem> {
        if n == 0 {
            return Err(Error::InvalidInput("zeroth root".into()));
        }
        if n == 1 || self.is_zero(a) || self.is_one(a) {
            return Ok(a.clone());
        }
        match a {
            Elem::Rat(r) => {
                let num = int_nth_root(r.numer(), n);
                let den = int_nth_root(r.denom(), n);
                match (num, den) {
                    (Some(x), Some(y)) => Ok(Elem::Rat(BigRational::new(x, y))),
                    _ => Err(Error::NoRootInField(format!("{r} has no rational {n}-th root"))),
                }
            }
            Elem::Fin(_) => {
                let p = self.0.p;
                let mut n = n;
                let mut b = a.clone();
                while n % p == 0 {
                    b = self.frobenius_root(&b)?;
                    n /= p;
                }
                let order = self.0.q - 1;
                let g = n.gcd(&order);
                if g == 1 {
                    let e = mod_inverse(n % order, order).expect("coprime exponent");
                    return Ok(self.pow(&b, e));
                }
                if self.pow(&b, order / g) != self.one() {
                    return Err(Error::NoRootInField(format!(
                        "{} is not an {n}-th power in {self}",
                        self.display(a)
                    )));
                }
                if self.0.q > 1 << 22 {
                    return Err(Error::NoRootInField("root search space too large".into()));
                }
                for v in 1..self.0.q {
                    let c = Elem::Fin(v);
                    if self.pow(&c, n) == b {
                        return Ok(c);
                    }
                }
                Err(Error::NoRootInField(format!("{} has no {n}-th root", self.display(a))))
            }
        }
    }

    /// Binomial coefficient `C(n, r)` mapped into the field (Lucas' theorem in
    /// positive characteristic).
    pub fn binomial(&self, n: u64, r: u64) -> Elem {
        if r > n {
            return self.zero();
        }
        let p = self.0.p;
        if p == 0 {
            let mut acc = BigInt::one();
            for i in 0..r {
                acc = acc * BigInt::from(n - i) / BigInt::from(i + 1);
            }
            return Elem::Rat(BigRational::from_integer(acc));
        }
        let (mut n, mut r) = (n, r);
        let mut acc = 1u64;
        while r > 0 || n > 0 {
            let (nd, rd) = (n % p, r % p);
            if rd > nd {
                return Elem::Fin(0);
            }
            // small binomial mod p via multiplicative formula
            let mut num = 1u64;
            let mut den = 1u64;
            for i in 0..rd {
                num = num * ((nd - i) % p) % p;
                den = den * ((i + 1) % p) % p;
            }
            acc = acc * num % p * pow_mod(den, p - 2, p) % p;
            n /= p;
            r /= p;
        }
        Elem::Fin(acc)
    }

    /// Deterministic pseudo-random element from a 64-bit word (test helper).
    pub fn element_from_word(&self, w: u64) -> Elem {
        if self.0.p == 0 {
            let num = (w % 19) as i64 - 9;
            let den = (w / 19 % 5) as i64 + 1;
            Elem::Rat(BigRational::new(BigInt::from(num), BigInt::from(den)))
        } else {
            Elem::Fin(w % self.0.q)
        }
    }

    /// Elements enumerated `0, 1, 2, ...` by their packed index (finite fields),
    /// or `0, 1, -1, 2, -2, ...` over `QQ`.
    pub fn enumerate(&self, i: u64) -> Elem {
        if self.0.p == 0 {
            let v = if i % 2 == 1 { (i as i64 + 1) / 2 } else { -(i as i64) / 2 };
            self.from_i64(v)
        } else {
            Elem::Fin(i % self.0.q)
        }
    }

    pub fn display(&self, a: &Elem) -> String {
        match a {
            Elem::Rat(r) => r.to_string(),
            Elem::Fin(v) if self.0.k == 1 => v.to_string(),
            Elem::Fin(v) => {
                let d = self.digits(*v);
                let mut parts = Vec::new();
                for (i, &c) in d.iter().enumerate().rev() {
                    if c == 0 {
                        continue;
                    }
                    let mon = match i {
                        0 => String::new(),
                        1 => "u".to_string(),
                        _ => format!("u^{i}"),
                    };
                    parts.push(match (c, i) {
                        (_, 0) => c.to_string(),
                        (1, _) => mon,
                        _ => format!("{c}*{mon}"),
                    });
                }
                if parts.is_empty() {
                    "0".into()
                } else if parts.len() == 1 {
                    parts.pop().unwrap()
                } else {
                    format!("({})", parts.join("+"))
                }
            }
        }
    }

    /// True when the element is an integer constant `n` with `|n|` small
    /// (used for printing signs).
    pub(crate) fn signed_repr(&self, a: &Elem) -> (bool, String) {
        match a {
            Elem::Rat(r) if r.is_negative() => (true, (-r).to_string()),
            Elem::Rat(r) => (false, r.to_string()),
            Elem::Fin(_) => (false, self.display(a)),
        }
    }
}

fn mod_inverse(a: u64, m: u64) -> Option<u64> {
    let (g, x, _) = ext_gcd(a as i128, m as i128);
    if g != 1 {
        return None;
    }
    Some(x.rem_euclid(m as i128) as u64)
}

fn ext_gcd(a: i128, b: i128) -> (i128, i128, i128) {
    if b == 0 {
        (a, 1, 0)
    } else {
        let (g, x, y) = ext_gcd(b, a % b);
        (g, y, x - (a / b) * y)
    }
}

fn int_nth_root(n: &BigInt, k: u64) -> Option<BigInt> {
    if n.is_negative() {
        if k % 2 == 0 {
            return None;
        }
        return int_nth_root(&-n, k).map(|r| -r);
    }
    let r = n.nth_root(k as u32);
    if num_traits::pow(r.clone(), k as usize) == *n {
        Some(r)
    } else {
        None
    }
}

impl fmt::Display for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.0.p, self.0.k) {
            (0, _) => write!(f, "QQ"),
            (p, 1) => write!(f, "GF({p})"),
            (p, k) => write!(f, "GF({p}^{k})"),
        }
    }
}

impl FromStr for Field {
    type Err = Error;

    /// Accepts `GF(p)`, `GF(p^k)` and `QQ` (case-insensitive, spaces ignored).
    fn from_str(s: &str) -> Result<Field> {
        let t: String = s.chars().filter(|c| !c.is_whitespace()).collect::<String>().to_uppercase();
        if t == "QQ" || t == "Q" {
            return Ok(Field::rationals());
        }
        let inner = t
            .strip_prefix("GF(")
            .and_then(|r| r.strip_suffix(')'))
            .ok_or_else(|| Error::InvalidField(s.to_string()))?;
        let (p, k) = match inner.split_once('^') {
            Some((a, b)) => (a.parse::<u64>(), b.parse::<u32>()),
            None => (inner.parse::<u64>(), Ok(1)),
        };
        match (p, k) {
            (Ok(p), Ok(k)) => Field::extension(p, k),
            _ => Err(Error::InvalidField(s.to_string())),
        }
    }
}

/// An element together with its field, for checked arithmetic.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FieldElement {
    pub field: Field,
    pub value: Elem,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
    Div,
}

impl FieldElement {
    pub fn new(field: &Field, value: Elem) -> Self {
        FieldElement { field: field.clone(), value }
    }

    pub fn arith(&self, other: &FieldElement, op: ArithOp) -> Result<FieldElement> {
        if self.field != other.field {
            return Err(Error::FieldMismatch);
        }
        let k = &self.field;
        let value = match op {
            ArithOp::Add => k.add(&self.value, &other.value),
            ArithOp::Sub => k.sub(&self.value, &other.value),
            ArithOp::Mul => k.mul(&self.value, &other.value),
            ArithOp::Div => k.div(&self.value, &other.value)?,
        };
        Ok(FieldElement { field: k.clone(), value })
    }

    pub fn frobenius_root(&self) -> Result<FieldElement> {
        Ok(FieldElement { field: self.field.clone(), value: self.field.frobenius_root(&self.value)? })
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.field.display(&self.value))
    }
}
