mod common;

use proptest::prelude::*;

use common::*;
use toposval::genval::valuation_from_truth_set;
use toposval::omega::Omega;
use toposval::presheaf::Section;

fn config() -> ProptestConfig {
    ProptestConfig { cases: 64, ..ProptestConfig::default() }
}

proptest! {
    #![proptest_config(config())]

    #[test]
    fn pullback_is_functorial(seed in any::<u64>()) {
        let mut rng = rng(seed);
        let rc = random_category(&mut rng, 5, 12);
        let cat = &*rc.cat;
        let omega = Omega::new(rc.cat.clone());
        prop_assert!(omega.presheaf().validate().is_empty());
        for f in cat.morphisms() {
            for s in omega.at(cat.cod(f)).sieves() {
                let fs = cat.pullback_sieve(s, f).unwrap();
                prop_assert!(omega.at(cat.dom(f)).index_of(&fs).is_ok());
                for &g in cat.into(cat.dom(f)) {
                    let fg = cat.compose(g, f).unwrap();
                    prop_assert_eq!(cat.pullback_sieve(&fs, g).unwrap(), cat.pullback_sieve(s, fg).unwrap());
                }
            }
        }
    }

    #[test]
    fn pullback_preserves_heyting_operations(seed in any::<u64>()) {
        let mut rng = rng(seed);
        let rc = random_category(&mut rng, 4, 10);
        let cat = &*rc.cat;
        let omega = Omega::new(rc.cat.clone());
        for f in cat.morphisms() {
            let (above, below) = (omega.at(cat.cod(f)), omega.at(cat.dom(f)));
            let pb = |s: &toposval::Sieve| cat.pullback_sieve(s, f).unwrap();
            for s in above.sieves() {
                for t in above.sieves() {
                    prop_assert_eq!(pb(&above.meet(s, t).unwrap()), below.meet(&pb(s), &pb(t)).unwrap());
                    prop_assert_eq!(pb(&above.join(s, t).unwrap()), below.join(&pb(s), &pb(t)).unwrap());
                    prop_assert_eq!(pb(&above.implies(s, t).unwrap()), below.implies(&pb(s), &pb(t)).unwrap());
                }
            }
        }
    }

    #[test]
    fn characteristic_maps_are_natural(seed in any::<u64>()) {
        let mut rng = rng(seed);
        let rc = random_category(&mut rng, 4, 12);
        let x = random_presheaf(&mut rng, &rc, 1, 4);
        let omega = Omega::new(rc.cat.clone());
        let k = random_subobject(&mut rng, &x);
        let chi = k.characteristic_morphism(&omega).unwrap();
        prop_assert!(chi.check_natural().is_empty());
    }

    #[test]
    fn truth_set_valuations_satisfy_the_axioms(seed in any::<u64>()) {
        let mut rng = rng(seed);
        let rc = random_category(&mut rng, 4, 12);
        let g = chain_propositions(random_presheaf(&mut rng, &rc, 1, 4));
        let truth = closed_truth_set(&mut rng, &g);
        let built = valuation_from_truth_set(g, |a, d| truth[a.0][d]);
        prop_assert!(built.report.is_empty());
        let nu = built.valuation;
        prop_assert!(nu.check_func().is_empty());
        for a in nu.base().objects() {
            for d in 0..nu.over().size(a) {
                prop_assert_eq!(nu.is_totally_true(a, d), truth[a.0][d]);
            }
        }
    }

    #[test]
    fn section_search_matches_brute_force(seed in any::<u64>()) {
        let mut rng = rng(seed);
        let rc = random_category(&mut rng, 4, 10);
        let x = random_presheaf(&mut rng, &rc, 1, 3);
        let cat = x.base();
        let sizes: Vec<usize> = cat.objects().map(|a| x.size(a)).collect();
        let mut brute = Vec::new();
        let total: usize = sizes.iter().product();
        for mut code in 0..total {
            let choice: Vec<usize> = sizes.iter().map(|&k| { let c = code % k; code /= k; c }).collect();
            let s = Section::global(choice);
            if x.check_section(&s).is_empty() {
                brute.push(s);
            }
        }
        let mut found = x.global_sections();
        let key = |s: &Section| s.choices().to_vec();
        found.sort_by_key(key);
        brute.sort_by_key(key);
        prop_assert_eq!(found, brute);
    }

    #[test]
    fn classical_microstates_are_sections(seed in any::<u64>()) {
        let mut rng = rng(seed);
        let rc = random_classical(&mut rng, 5, 6);
        let x = rc.cat.value_presheaf();
        for state in rc.cat.space().states() {
            let gamma = rc.cat.section_from_microstate(state).unwrap();
            prop_assert!(x.check_section(&gamma).is_empty());
        }
    }
}
