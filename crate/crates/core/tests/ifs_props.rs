mod common;

use common::*;
use fracdim::cantor::{cantor_prefractal, cantor_to_ifs, pi_product, prop37_spec};
use fracdim::ifs::{
    apply_level, attractor_hull, compose_chain, cylinder_decomposition, moran_exponent, natural_measure_weight,
    pullback_approximation, verify_mosc, words_of_length,
};
use fracdim::sets::LineSet;
use fracdim::{hausdorff_distance, CantorSpec, IndexedSystem, IntervalSet, OpenSet, Scalar};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(150))]

    #[test]
    fn chain_is_iterated_levels(sys in system(4, true), seed in interval_set(3), k in 0usize..3, n in 0usize..4) {
        let mut step = seed.clone();
        for j in (k..k + n).rev() {
            step = apply_level(&sys, j, &step).unwrap();
        }
        prop_assert_eq!(compose_chain(&sys, k, k + n, &seed).unwrap(), step);
    }

    #[test]
    fn chain_splits_at_any_level(sys in system(3, true), seed in interval_set(2), k in 0usize..2, a in 0usize..3, b in 0usize..3) {
        let (m, l) = (k + a, k + a + b);
        let inner = compose_chain(&sys, m, l, &seed).unwrap();
        prop_assert_eq!(compose_chain(&sys, k, l, &seed).unwrap(), compose_chain(&sys, k, m, &inner).unwrap());
    }

    #[test]
    fn each_level_contracts(sys in system(3, true), a in interval_set(3), b in interval_set(3), k in 0usize..3) {
        let before = hausdorff_distance(&a, &b).unwrap();
        let after = hausdorff_distance(&apply_level(&sys, k, &a).unwrap(), &apply_level(&sys, k, &b).unwrap()).unwrap();
        let ratio = sys.level(k + 1).unwrap().iter().map(|f| f.ratio().clone()).max().unwrap();
        prop_assert!(after <= ratio * before);
    }

    #[test]
    fn pullback_stays_within_its_bound(sys in system(4, true), seed in interval_set(3), k in 0usize..3, m in 1usize..6) {
        let p = pullback_approximation(&sys, k, m, &seed).unwrap();
        prop_assert_eq!(p.decay.len(), m);
        for (d, bound) in p.decay.iter().zip(&p.bounds) {
            prop_assert!(d <= bound);
        }
        prop_assert_eq!(p.set, compose_chain(&sys, k, k + m, &seed).unwrap());
    }

    #[test]
    fn seeds_are_forgotten(sys in system(3, true), a in interval_set(3), b in interval_set(3), m in 1usize..6) {
        let ka = compose_chain(&sys, 0, m, &a).unwrap();
        let kb = compose_chain(&sys, 0, m, &b).unwrap();
        let shrink = sys.sigma_star_upper().pow(m as i32);
        prop_assert!(hausdorff_distance(&ka, &kb).unwrap() <= shrink * hausdorff_distance(&a, &b).unwrap());
    }

    #[test]
    fn cylinders_tile_the_attractor(level in separated_level(), num in 1i64..40) {
        let sys = IndexedSystem::autonomous(level).unwrap();
        let cert = verify_mosc(&sys, &[OpenSet::unit()], &Scalar::one());
        prop_assert!(cert.passed);
        let delta = Scalar::new(num, 40);
        let words = cylinder_decomposition(&sys, 0, &delta, &cert.eta).unwrap();
        let threshold = &delta / &cert.eta;
        let hull = attractor_hull(&sys).unwrap();
        let mut images = Vec::new();
        for w in &words {
            prop_assert!(w.ratio <= threshold);
            if !w.is_empty() {
                prop_assert!(w.truncation(&sys).unwrap().ratio > threshold);
            }
            images.push(w.similarity(&sys).unwrap().image(&hull));
        }
        images.sort_by(|a, b| a.lo().cmp(b.lo()));
        for pair in images.windows(2) {
            prop_assert!(pair[0].hi() <= pair[1].lo());
        }
        let ratios: Vec<Scalar> = sys.level(1).unwrap().iter().map(|f| f.ratio().clone()).collect();
        let s = moran_exponent(&ratios).unwrap();
        let total: f64 = words.iter().map(|w| natural_measure_weight(w, s).weight).sum();
        prop_assert!((total - 1.0).abs() < 1e-9, "{total}");
    }

    #[test]
    fn words_of_each_length_carry_full_mass(level in separated_level(), n in 0usize..6) {
        let sys = IndexedSystem::autonomous(level).unwrap();
        let ratios: Vec<Scalar> = sys.level(1).unwrap().iter().map(|f| f.ratio().clone()).collect();
        let s = moran_exponent(&ratios).unwrap();
        let words = words_of_length(&sys, 0, n).unwrap();
        prop_assert_eq!(words.len(), ratios.len().pow(n as u32));
        let total: f64 = words.iter().map(|w| natural_measure_weight(w, s).weight).sum();
        prop_assert!((total - 1.0).abs() < 1e-9);
    }

    #[test]
    fn prefractals_nest_and_shift(c in (3i64..=9).prop_map(|d| Scalar::new(1, d)), k in 0usize..4, n in 0usize..6) {
        let spec = CantorSpec::constant(c, 16).unwrap();
        let now = cantor_prefractal(&spec, k, n).unwrap();
        let next = cantor_prefractal(&spec, k, n + 1).unwrap();
        prop_assert!(next.is_subset_of(&now));
        prop_assert_eq!(now.len(), 1 << n);
        prop_assert_eq!(now.length(), Scalar::from_integer(1 << n) * pi_product(&spec, k, n).unwrap().value);
        prop_assert_eq!(&now, &cantor_prefractal(&spec, 0, n).unwrap());
    }

    #[test]
    fn prefractal_is_a_chain_image(k in 0usize..6, n in 0usize..7) {
        let spec = prop37_spec(16);
        let sys = cantor_to_ifs(&spec);
        let chain = compose_chain(&sys, k, k + n, &IntervalSet::unit()).unwrap();
        prop_assert_eq!(cantor_prefractal(&spec, k, n).unwrap(), chain);
    }
}

#[test]
fn block_prefractals_depend_on_the_start_level() {
    let spec = prop37_spec(16);
    let a = cantor_prefractal(&spec, 0, 3).unwrap();
    let b = cantor_prefractal(&spec, 1, 3).unwrap();
    assert_ne!(a, b);
    assert_eq!(a.min_point(), Some(&Scalar::zero()));
    assert_eq!(b.max_point(), Some(&Scalar::one()));
}
