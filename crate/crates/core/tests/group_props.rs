//! SU(n): defect invariance, the torus reduction and agreement with S³.

use geoblock::compact_groups::{
    center, classify_group_config, defect, group_blocking_set, group_geodesics,
    random_special_unitary, su2_to_s3, BiInvariantMetric, GroupConfiguration, UnitaryMatrix,
};
use geoblock::rank_one::{classify, RankOneSpace};
use geoblock::Certificate;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn frobenius(a: &UnitaryMatrix, b: &UnitaryMatrix) -> f64 {
    (a.matrix() - b.matrix()).norm()
}

/// Regular with overwhelming probability; singular and central pairs mixed in.
fn random_config(n: usize, rng: &mut ChaCha8Rng) -> GroupConfiguration {
    let k1 = random_special_unitary(n, rng);
    let k2 = match rng.gen_range(0..6) {
        0 => k1.clone(),
        1 => {
            let z = &center(n)[rng.gen_range(0..n)];
            z.mul(&k1)
        }
        _ => random_special_unitary(n, rng),
    };
    GroupConfiguration::new(k1, k2).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn defect_is_invariant(seed in any::<u64>(), n in 2usize..=4) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let cfg = random_config(n, &mut rng);
        let g = random_special_unitary(n, &mut rng);
        let h = random_special_unitary(n, &mut rng);
        let moved = GroupConfiguration::new(
            g.mul(cfg.k1()).mul(&h.adjoint()),
            g.mul(cfg.k2()).mul(&h.adjoint()),
        )
        .unwrap();
        prop_assert_eq!(defect(&cfg).unwrap(), defect(&moved).unwrap());
    }

    #[test]
    fn central_translates_have_full_defect(seed in any::<u64>(), n in 2usize..=5) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let k = random_special_unitary(n, &mut rng);
        for z in center(n) {
            let cfg = GroupConfiguration::new(k.clone(), z.mul(&k)).unwrap();
            prop_assert_eq!(defect(&cfg).unwrap(), n * n - 1 - (n - 1));
        }
    }

    #[test]
    fn torus_geodesics_are_group_geodesics(seed in any::<u64>(), n in 2usize..=3) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let cfg = GroupConfiguration::new(
            random_special_unitary(n, &mut rng),
            random_special_unitary(n, &mut rng),
        )
        .unwrap();
        prop_assume!(defect(&cfg).unwrap() == 0);
        let fam = group_geodesics(&cfg, 12.0, BiInvariantMetric::default()).unwrap();
        prop_assert!(!fam.is_empty());
        for g in fam.geodesics.iter().take(6) {
            prop_assert!(frobenius(&fam.point_at(g, 0.0), cfg.k1()) <= 1e-8);
            prop_assert!(frobenius(&fam.point_at(g, 1.0), cfg.k2()) <= 1e-8);
            let samples: Vec<UnitaryMatrix> = (0..=100).map(|i| fam.point_at(g, i as f64 / 100.0)).collect();
            let steps: Vec<f64> = samples.windows(2).map(|w| frobenius(&w[0], &w[1])).collect();
            let first = steps[0];
            prop_assert!(first > 0.0);
            for s in &steps {
                prop_assert!((s - first).abs() <= 1e-8, "speed {} vs {}", s, first);
            }
        }
    }

    #[test]
    fn su2_agrees_with_the_three_sphere(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let cfg = random_config(2, &mut rng);
        let group = classify_group_config(&cfg).unwrap();
        let s3 = RankOneSpace::sphere(3).unwrap();
        let sphere = classify(&s3, &su2_to_s3(cfg.k1()).unwrap(), &su2_to_s3(cfg.k2()).unwrap()).unwrap();
        prop_assert_eq!(group.status, sphere.status);
        if defect(&cfg).unwrap() == 0 {
            let b = group.blocking.unwrap();
            prop_assert_eq!(b.len(), 2);
            prop_assert_eq!(b.certificate(), &Certificate::Universal);
        }
    }

    #[test]
    fn blocking_points_are_square_roots(seed in any::<u64>(), n in 2usize..=4) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let cfg = GroupConfiguration::new(
            random_special_unitary(n, &mut rng),
            random_special_unitary(n, &mut rng),
        )
        .unwrap();
        prop_assume!(defect(&cfg).unwrap() == 0);
        let (_, set) = group_blocking_set(&cfg).unwrap();
        prop_assert_eq!(set.len(), 1 << (n - 1));
        for b in set.points() {
            // (k1⁻¹ b)² = k1⁻¹ k2
            let r = cfg.k1().adjoint().mul(b);
            prop_assert!(frobenius(&r.mul(&r), cfg.relative()) <= 1e-8);
        }
    }
}
