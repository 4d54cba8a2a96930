mod common;

use algebroid::invariants::{analyze_branch, milnor_number, tjurina_number};
use algebroid::localideal::Colength;
use common::*;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[test]
fn identities_on_corpus() {
    for (id, f) in corpus_branches() {
        if let Err(e) = all_identities(&f) {
            panic!("{id}: {e}");
        }
    }
}

#[test]
fn tau_at_least_half_conductor_and_mu_at_least_c() {
    for (id, f) in corpus_branches() {
        let c = analyze_branch(&f).unwrap().conductor();
        let Colength::Finite(tau) = tjurina_number(&f).unwrap() else { panic!("{id}: τ infinite") };
        assert!(2 * tau >= c, "{id}");
        if let Colength::Finite(mu) = milnor_number(&f).unwrap() {
            assert!(mu >= c, "{id}");
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(50))]

    #[test]
    fn identities_on_random_branches(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (f, gens) = random_branch(&mut rng, &[5, 7, 11, 13, 101]);
        let b = analyze_branch(&f).unwrap();
        prop_assert_eq!(b.semigroup.generators(), &gens[..]);
        let r = all_identities(&f);
        prop_assert!(r.is_ok(), "{}: {:?}", f, r);
    }

    #[test]
    fn identities_on_wild_branches(seed in any::<u64>()) {
        // p = 3 divides generators of many ⟨n, m⟩ with n <= 5
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let k = algebroid::Field::prime(3).unwrap();
        let (f, _) = random_monomial_branch(&k, &mut rng);
        let r = all_identities(&f);
        prop_assert!(r.is_ok(), "{}: {:?}", f, r);
    }
}
