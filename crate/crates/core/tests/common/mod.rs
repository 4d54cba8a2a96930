#![allow(dead_code)]

use std::path::PathBuf;

use algebroid::algebra::Poly;
use algebroid::cli::corpus::Entry;
use algebroid::invariants::{
    analyze_branch, check_delgado_with, check_gorenstein_with, conductor_ideal_check_with, milnor_number,
    tjurina_number,
};
use algebroid::cli::{parse_expression, parse_field};
use algebroid::{Elem, Field};
use rand::Rng;

pub fn poly(k: &Field, t: &[(i64, u32, u32)]) -> Poly {
    Poly::from_int_terms(k, t)
}

pub fn parse(k: &Field, s: &str) -> Poly {
    parse_expression(s, k).unwrap().poly
}

pub fn corpus_path() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../corpus/branches.jsonl")
}

/// Corpus entries with their field and factors.
pub fn corpus() -> Vec<(Entry, Field, Vec<Poly>)> {
    let text = std::fs::read_to_string(corpus_path()).unwrap();
    text.lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(|l| {
            let e: Entry = serde_json::from_str(l).unwrap();
            let k = parse_field(&e.field).unwrap();
            let texts = e.factors.clone().unwrap_or_else(|| vec![e.expr.clone().unwrap()]);
            let fs = texts.iter().map(|t| parse(&k, t)).collect();
            (e, k, fs)
        })
        .collect()
}

pub fn product(fs: &[Poly]) -> Poly {
    fs.iter().skip(1).fold(fs[0].clone(), |a, b| &a * b)
}

/// Corpus branches (single irreducible factor).
pub fn corpus_branches() -> Vec<(String, Poly)> {
    corpus()
        .into_iter()
        .filter(|(e, _, fs)| fs.len() == 1 && e.expected.get("irreducible") != Some(&serde_json::json!(false)))
        .map(|(e, _, fs)| (e.id.unwrap(), fs[0].clone()))
        .collect()
}

fn rank(k: &Field, mut rows: Vec<Vec<Elem>>) -> usize {
    let cols = rows.first().map_or(0, |r| r.len());
    let mut r = 0;
    for col in 0..cols {
        let Some(piv) = (r..rows.len()).find(|&i| !k.is_zero(&rows[i][col])) else { continue };
        rows.swap(r, piv);
        let inv = k.inv(&rows[r][col]).unwrap();
        let pivot_row: Vec<Elem> = rows[r].iter().map(|x| k.mul(x, &inv)).collect();
        rows[r] = pivot_row;
        for i in r + 1..rows.len() {
            if !k.is_zero(&rows[i][col]) {
                let f = rows[i][col].clone();
                for j in col..cols {
                    let t = k.mul(&f, &rows[r][j]);
                    rows[i][j] = k.sub(&rows[i][j], &t);
                }
            }
        }
        r += 1;
    }
    r
}

/// `dim k[X,Y] / (I + M^d)` from the span of all `m·g` truncated below degree `d`.
pub fn truncated_colength(gens: &[Poly], d: u32) -> u64 {
    let k = gens[0].field().clone();
    let monos: Vec<(u32, u32)> = (0..d).flat_map(|t| (0..=t).map(move |i| (i, t - i))).collect();
    let index = |m: (u32, u32)| monos.iter().position(|&x| x == m);
    let mut rows = Vec::new();
    for g in gens {
        for &(a, b) in &monos {
            let mut row = vec![k.zero(); monos.len()];
            let mut any = false;
            for (&(i, j), c) in g.terms() {
                if let Some(ix) = index((i + a, j + b)) {
                    row[ix] = c.clone();
                    any = true;
                }
            }
            if any {
                rows.push(row);
            }
        }
    }
    monos.len() as u64 - rank(&k, rows) as u64
}

/// Colength of an `M`-primary ideal: the first `d >= start` where
/// `I + M^d` and `I + M^{d+1}` have the same colength, so `M^d ⊂ I`.
pub fn macaulay_colength(gens: &[Poly], start: u32, cap: u32) -> Option<u64> {
    let mut prev = truncated_colength(gens, start);
    for d in start..cap {
        let next = truncated_colength(gens, d + 1);
        if next == prev {
            return Some(prev);
        }
        prev = next;
    }
    None
}

/// Membership table of `⟨gens⟩` up to `bound`.
pub fn members(gens: &[u64], bound: u64) -> Vec<bool> {
    let mut m = vec![false; bound as usize + 1];
    m[0] = true;
    for x in 1..=bound as usize {
        m[x] = gens.iter().any(|&g| g as usize <= x && m[x - g as usize]);
    }
    m
}

/// `#(S ∖ (S + c − 1))` and `c` by plain set arithmetic.
pub fn sweep_count_oracle(gens: &[u64]) -> (u64, u64) {
    let bound = gens.iter().product::<u64>() * 2 + 10;
    let m = members(gens, bound);
    let c = (0..=bound as usize).rev().find(|&x| !m[x]).map_or(0, |g| g as u64 + 1);
    let shifted = |x: u64| x + 1 >= c && m[(x + 1 - c) as usize];
    let count = (0..bound).filter(|&x| m[x as usize] && !shifted(x)).count() as u64;
    (count, c)
}

fn coprime(a: u64, b: u64) -> bool {
    num_integer::gcd(a, b) == 1
}

/// `Y^n − c X^m` plus random terms above the Newton edge: an irreducible
/// branch with semigroup `⟨n, m⟩`.
pub fn random_monomial_branch<R: Rng>(k: &Field, rng: &mut R) -> (Poly, Vec<u64>) {
    let (n, m) = loop {
        let n = rng.gen_range(2..=5u64);
        let m = rng.gen_range(n + 1..=13u64);
        if coprime(n, m) {
            break (n, m);
        }
    };
    let c = k.from_i64(rng.gen_range(1..k.characteristic().min(50) as i64));
    let mut f = &Poly::monomial(k, k.one(), 0, n as u32) - &Poly::monomial(k, c, m as u32, 0);
    for _ in 0..rng.gen_range(0..4) {
        let j = rng.gen_range(0..n);
        let lo = (n * m - j * m) / n + 1;
        let i = rng.gen_range(lo..=lo + 3);
        let coeff = k.from_i64(rng.gen_range(-5..=5));
        f = &f + &Poly::monomial(k, coeff, i as u32, j as u32);
    }
    (f, vec![n, m])
}

/// `(Y^2 − X^3)^2 − c X^a Y` with semigroup `⟨4, 6, 2a + 3⟩`.
pub fn random_genus_two<R: Rng>(k: &Field, rng: &mut R) -> (Poly, Vec<u64>) {
    let a = rng.gen_range(5..=9u32);
    let c = k.from_i64(rng.gen_range(1..5));
    let base = poly(k, &[(1, 0, 2), (-1, 3, 0)]);
    let f = &base.pow(2) - &Poly::monomial(k, c, a, 1);
    (f, vec![4, 6, 2 * a as u64 + 3])
}

/// `f(X + b Y^2, Y + a X)`: a change of coordinates kept exact.
pub fn random_coordinates<R: Rng>(f: &Poly, rng: &mut R) -> Poly {
    let k = f.field();
    let a = k.from_i64(rng.gen_range(-3..=3));
    let b = k.from_i64(rng.gen_range(-3..=3));
    let x = &Poly::x(k) + &Poly::monomial(k, b, 0, 2);
    let y = &Poly::y(k) + &Poly::monomial(k, a, 1, 0);
    let bound = 2 * f.total_degree() + 2;
    f.compose(&x, &y, bound)
}

/// A random branch with its expected generators, over one of the listed primes.
pub fn random_branch<R: Rng>(rng: &mut R, primes: &[u64]) -> (Poly, Vec<u64>) {
    let p = primes[rng.gen_range(0..primes.len())];
    let k = Field::prime(p).unwrap();
    let (f, gens) = if rng.gen_bool(0.7) { random_monomial_branch(&k, rng) } else { random_genus_two(&k, rng) };
    let f = if rng.gen_bool(0.5) { random_coordinates(&f, rng) } else { f };
    (f, gens)
}

/// Generators `v_0 < ... < v_g` of a random plane-branch semigroup:
/// `v_{i+1} > n_i v_i` and `gcd(v_0, ..., v_i) = e_i`.
pub fn random_branch_semigroup<R: Rng>(rng: &mut R) -> Vec<u64> {
    let g = rng.gen_range(1..=3usize);
    let ns: Vec<u64> = (0..g).map(|_| rng.gen_range(2..=3)).collect();
    let e = |i: usize| ns[i..].iter().product::<u64>();
    let mut v = vec![e(0)];
    for i in 0..g {
        let floor = if i == 0 { v[0] } else { ns[i - 1] * v[i] };
        let step = e(i + 1);
        let v_next = loop {
            let a = floor / step + rng.gen_range(1..=6);
            if num_integer::gcd(a, ns[i]) == 1 && a * step > floor {
                break a * step;
            }
        };
        v.push(v_next);
    }
    v
}

pub fn test_polys(f: &Poly) -> Vec<Poly> {
    let k = f.field();
    vec![
        Poly::x(k),
        Poly::y(k),
        poly(k, &[(1, 0, 1), (2, 2, 0)]),
        poly(k, &[(1, 0, 2), (-1, 3, 0)]),
        poly(k, &[(1, 1, 1), (1, 0, 3), (3, 5, 0)]),
    ]
}

/// Gorenstein, Delgado (with the bracket bound) and the conductor checks.
pub fn all_identities(f: &Poly) -> Result<(), String> {
    let b = analyze_branch(f).map_err(|e| e.to_string())?;
    let g = check_gorenstein_with(f, &b).unwrap();
    if !g.passed {
        return Err(format!("gorenstein {:?}", g.witness));
    }
    let tau = tjurina_number(f).unwrap();
    let mu = milnor_number(f).unwrap();
    let c = conductor_ideal_check_with(f, &b, tau, mu).unwrap();
    if !c.passed {
        return Err(format!("conductor {:?}", c.witness));
    }
    for h in test_polys(f) {
        if b.valuation(&h).unwrap().finite().is_none() {
            continue;
        }
        let d = check_delgado_with(f, &h, &b).unwrap();
        if !d.passed {
            return Err(format!("delgado with {h}: {:?}", d.witness));
        }
    }
    Ok(())
}
