//! Transfer of families and blocking sets along torus covers and S^n → RP^n.

use std::sync::Arc;

use geoblock::blocking::{BlockingSet, Provenance};
use geoblock::coverings::{Covering, ProjectiveCover, ProjectivePoint, TorusCover};
use geoblock::lattice::{int, rat, Lattice, LengthBound, Rational, RationalVector};
use geoblock::rank_one::random_point;
use geoblock::torus::{connecting_geodesics, midpoint_set, segments_between, TorusConfiguration};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn coordinate() -> impl Strategy<Value = Rational> {
    (0i64..30, 1i64..=10).prop_map(|(p, q)| rat(p % q, q))
}

fn covers() -> Vec<(usize, Vec<Vec<i64>>)> {
    vec![
        (1, vec![vec![2]]),
        (1, vec![vec![3]]),
        (2, vec![vec![2, 0], vec![0, 1]]),
        (2, vec![vec![2, 0], vec![0, 2]]),
        (2, vec![vec![1, 1], vec![-1, 1]]),
    ]
}

fn cover_case() -> impl Strategy<Value = (TorusCover, TorusConfiguration, LengthBound)> {
    (0..covers().len()).prop_flat_map(|i| {
        let (n, m) = covers()[i].clone();
        (
            Just(m),
            prop::collection::vec(coordinate(), n),
            prop::collection::vec(coordinate(), n),
            1i64..=(if n == 1 { 10 } else { 5 }),
        )
            .prop_map(move |(m, x, y, l)| {
                let lower = Arc::new(Lattice::standard(n));
                let cover = TorusCover::sublattice(Arc::clone(&lower), &m).unwrap();
                let cfg = TorusConfiguration::from_vectors(&RationalVector::new(x), &RationalVector::new(y), &lower).unwrap();
                (cover, cfg, LengthBound::new(int(l)).unwrap())
            })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn preimage_identity_and_degree_bookkeeping((cover, cfg, bound) in cover_case()) {
        let r = cover.verify_preimage_identity(&cfg, &bound).unwrap();
        prop_assert!(r.holds(), "{:?}", r);
        // Σ over fiber pairs, each avoiding both full fibers
        let mut avoid = cover.fiber(cfg.x()).unwrap();
        avoid.extend(cover.fiber(cfg.y()).unwrap());
        let total: usize = cover
            .fiber_pairs(&cfg)
            .unwrap()
            .iter()
            .map(|(a, b)| segments_between(a, b, &bound, &avoid).unwrap().len())
            .sum();
        prop_assert_eq!(total, cover.degree() * r.downstairs);
        prop_assert_eq!(r.lifted, total);
    }

    #[test]
    fn security_transfers_both_ways((cover, cfg, bound) in cover_case()) {
        let down = midpoint_set(&cfg);
        prop_assert!(geoblock::torus::certify_bounded(&cfg, &down, &bound).unwrap().is_ok());
        let up = cover.lift_blocking(&down).unwrap();
        prop_assert_eq!(up.len(), cover.degree() * down.len());
        prop_assert!(cover.certify_lifted(&cfg, &up, &bound).unwrap().is_some());

        let mut pts = vec![];
        for c in cover.fiber_configurations(&cfg).unwrap() {
            pts.extend(midpoint_set(&c).points().iter().cloned());
        }
        let projected = cover.project_blocking(&BlockingSet::new(pts, Provenance::CanonicalMidpoint)).unwrap();
        prop_assert!(cover.certify_projected(&cfg, &projected, &bound).unwrap().is_some());
    }

    #[test]
    fn projective_transfer(seed in any::<u64>(), n in 2usize..=4) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let pc = ProjectiveCover::new(n).unwrap();
        let x = ProjectivePoint::new(random_point(n + 1, &mut rng));
        let y = ProjectivePoint::new(random_point(n + 1, &mut rng));
        let r = pc.verify_preimage_identity(&x, &y, Some(2.0 * std::f64::consts::PI)).unwrap();
        prop_assert!(r.holds(), "{:?}", r);
        prop_assert_eq!(r.downstairs, 2);
        let b = pc.blocking_from_fibers(&x, &y).unwrap();
        prop_assert!(b.len() <= 4);
        prop_assert!(pc.certify_downstairs(&x, &y, &b, None).unwrap().is_some());
        let up = pc.lift_blocking(&b).unwrap();
        prop_assert!(pc.certify_lifted(&x, &y, &up, None).unwrap());
    }
}

#[test]
fn a_non_blocking_set_does_not_lift_to_a_blocking_one() {
    let lower = Arc::new(Lattice::standard(1));
    let cover = TorusCover::sublattice(Arc::clone(&lower), &[vec![2]]).unwrap();
    let cfg = TorusConfiguration::from_vectors(&RationalVector::zeros(1), &RationalVector::new(vec![rat(1, 3)]), &lower).unwrap();
    let bound = LengthBound::new(int(3)).unwrap();
    let half = BlockingSet::new(vec![midpoint_set(&cfg).points()[0].clone()], Provenance::Manual);
    assert!(geoblock::torus::certify_bounded(&cfg, &half, &bound).unwrap().is_err());
    let up = cover.lift_blocking(&half).unwrap();
    assert!(cover.certify_lifted(&cfg, &up, &bound).unwrap().is_none());
    assert!(!connecting_geodesics(&cfg, &bound).is_empty());
}
