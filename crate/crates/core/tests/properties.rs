mod common;

use algebroid::algebra::Poly;
use algebroid::branch::Valuation;
use algebroid::cli::parse_expression;
use algebroid::invariants::{analyze_branch, milnor_number, tjurina_number};
use algebroid::keytheorem::{
    approximate_root, bracket_values, build_tower, verify_key_theorem, vmodule_decompose, vmodule_recompose,
    weierstrass_form,
};
use algebroid::localideal::Colength;
use algebroid::prep::{apply_automorphism, is_weierstrass, random_automorphism, weierstrass_by_coords};
use algebroid::semigroup::ValueSemigroup;
use algebroid::Field;
use common::*;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn check_sweep(gens: &[u64]) -> Result<(), TestCaseError> {
    let s = ValueSemigroup::new(gens.to_vec()).unwrap();
    let (count, c) = sweep_count_oracle(gens);
    prop_assert_eq!(count, c, "{:?}", gens);
    prop_assert_eq!(s.conductor(), c);
    prop_assert_eq!(s.conductor_by_gaps(), c);
    prop_assert_eq!(s.sweep_set().len() as u64, c);
    prop_assert!(s.is_symmetric());
    prop_assert!(s.is_strongly_increasing());
    Ok(())
}

#[test]
fn sweep_count_on_computed_semigroups() {
    for (id, f) in corpus_branches() {
        let s = analyze_branch(&f).unwrap().semigroup;
        let (count, c) = sweep_count_oracle(s.generators());
        assert_eq!((count, s.sweep_set().len() as u64), (c, c), "{id}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn sweep_count_on_random_semigroups(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        check_sweep(&random_branch_semigroup(&mut rng))?;
    }

    #[test]
    fn canonical_representation_realizes(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let gens = random_branch_semigroup(&mut rng);
        let s = ValueSemigroup::new(gens.clone()).unwrap();
        let top = s.conductor() + 40;
        let m = members(&gens, top);
        for x in 0..top {
            let rep = s.canonical_representation(x);
            prop_assert_eq!(rep.is_some(), m[x as usize], "{}", x);
            if let Some(r) = rep {
                prop_assert_eq!(r.iter().zip(&gens).map(|(a, b)| a * b).sum::<u64>(), x);
                for i in 1..gens.len() {
                    prop_assert!(r[i] < s.n(i));
                }
            }
        }
    }

    #[test]
    fn print_parse_round_trip(
        terms in prop::collection::vec((-20i64..20, 0u32..8, 0u32..8), 0..10),
        p in prop::sample::select(vec![2u64, 3, 5, 7, 101]),
    ) {
        let k = Field::prime(p).unwrap();
        let f = Poly::from_int_terms(&k, &terms);
        prop_assert_eq!(parse_expression(&f.to_string(), &k).unwrap().poly, f);
    }

    #[test]
    fn print_parse_round_trip_integers(terms in prop::collection::vec((-20i64..20, 0u32..6, 0u32..6), 0..8)) {
        let k = Field::rationals();
        let f = Poly::from_int_terms(&k, &terms);
        prop_assert_eq!(parse_expression(&f.to_string(), &k).unwrap().poly, f);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(20))]

    #[test]
    fn mu_and_tau_are_invariant(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (f, _) = random_branch(&mut rng, &[5, 7, 11, 13, 101]);
        let k = f.field().clone();
        let mu = milnor_number(&f).unwrap();
        let tau = tjurina_number(&f).unwrap().finite().unwrap();
        // beyond the determinacy degree 2·max(μ, τ) − ord + 2
        let prec = 2 * mu.finite().unwrap_or(tau).max(tau) as u32 + 2;
        let phi = random_automorphism(&k, &mut rng, 2, prec);
        let g = apply_automorphism(&phi, &f).unwrap();
        prop_assert_eq!(milnor_number(&g).unwrap(), mu, "{} -> {}", f, g);
        let unit = poly(&k, &[(1, 0, 0), (1, 1, 0), (rng.gen_range(1..4), 0, 2)]);
        let ug = &unit * &g;
        prop_assert_eq!(tjurina_number(&ug).unwrap(), Colength::Finite(tau), "{} -> {}", f, ug);
    }

    #[test]
    fn weierstrass_form_keeps_semigroup(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (f, gens) = random_branch(&mut rng, &[5, 7, 11, 13, 101]);
        let p = f.field().characteristic();
        prop_assume!(gens[0] % p != 0);
        let (_, w) = weierstrass_by_coords(&f, 40).unwrap();
        prop_assert!(is_weierstrass(&w));
        prop_assert_eq!(w.to_poly().deg_y(), Some(gens[0] as u32));
        let (wp, s) = weierstrass_form(&f).unwrap();
        prop_assert_eq!(s.generators(), &gens[..]);
        prop_assert_eq!(analyze_branch(&wp).unwrap().semigroup, s);
    }

    #[test]
    fn key_theorem_on_random_tame_branches(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (f, gens) = random_branch(&mut rng, &[7, 11, 13, 101]);
        let p = f.field().characteristic();
        prop_assume!(gens.iter().all(|v| v % p != 0));
        let v = verify_key_theorem(&f).unwrap();
        prop_assert!(v.passed, "{}: {:?}", f, v);
        prop_assert_eq!(v.mu, Colength::Finite(v.conductor));
    }

    #[test]
    fn approximate_roots_cut_the_degree(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let k = Field::prime(101).unwrap();
        let d = rng.gen_range(1..=4u32);
        let n = d * rng.gen_range(1..=3u32);
        let mut f = Poly::monomial(&k, k.one(), 0, n);
        for _ in 0..6 {
            let j = rng.gen_range(0..n);
            f = &f + &Poly::monomial(&k, k.from_i64(rng.gen_range(-9..=9)), rng.gen_range(0..6), j);
        }
        let g = approximate_root(&f, d).unwrap();
        prop_assert_eq!(g.deg_y(), Some(n / d));
        let rest = &f - &g.pow(d);
        prop_assert!(rest.deg_y().is_none_or(|e| e < n - n / d), "{} {}", f, g);
    }
}

#[test]
fn bracket_inequality_on_towers() {
    let cases = [
        (7, "(Y^2-X^3)^2-Y*X^11"),
        (5, "(Y^2-X^3)^2-Y*X^11"),
        (5, "(Y^2-X^3+X^2*Y)^2-Y*X^11"),
        (13, "(Y^2-X^3)^2-X^6*Y"),
        (5, "(Y^2-X^3)^2-X^11*Y+X^9*Y"),
        (11, "Y^3-X^11"),
        (7, "Y^2-X^7"),
    ];
    let mut strict = 0;
    for (p, e) in cases {
        let k = Field::prime(p).unwrap();
        let f = parse(&k, e);
        let s = analyze_branch(&f).unwrap().semigroup;
        let t = build_tower(&f, &s).unwrap();
        for (v, iv, bound) in bracket_values(&t).unwrap_or_else(|e| panic!("{f} over GF({p}): {e:?}")) {
            assert!(iv >= Valuation::Finite(bound), "{e} over GF({p})");
            assert_eq!(iv == Valuation::Finite(bound), v % p != 0, "{e} over GF({p}), v = {v}");
            strict += (iv > Valuation::Finite(bound)) as u32;
        }
    }
    assert!(strict >= 3);
}

#[test]
fn vmodule_round_trip() {
    let k = Field::prime(7).unwrap();
    let f = parse(&k, "(Y^2-X^3)^2-Y*X^11");
    let s = analyze_branch(&f).unwrap().semigroup;
    let t = build_tower(&f, &s).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..20 {
        let mut h = Poly::zero(&k);
        for _ in 0..8 {
            let c = k.from_i64(rng.gen_range(-3..=3));
            h = &h + &Poly::monomial(&k, c, rng.gen_range(0..9), rng.gen_range(0..4));
        }
        let d = vmodule_decompose(&h, &t).unwrap();
        assert_eq!(vmodule_recompose(&d, &t), h);
        for (j, a) in &d.coeffs {
            assert!(j[0] < 2 && j[1] < 2 && a.deg_y().unwrap_or(0) == 0);
        }
        assert_eq!(&(&t.roots()[1] * &d.h2) + &d.h1, h);
        assert!(d.h1.deg_y().is_none_or(|e| e < 2));
    }
}
