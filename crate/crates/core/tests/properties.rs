use std::sync::Arc;

use freeze_core::verify::is_valid_witness;
use freeze_core::{
    apply_iso, apply_iso_to_set, c1_freezing_set, cn_freezing_set, mandatory_points,
    oracle_verify, verify_freezing, verify_freezing_with, CubeDecomposition, CubeSpec,
    DigitalImage, FreezeStatus, LatticeIso, Point, PruneRules, VerifyConfig,
};
use proptest::prelude::*;

fn cube(lo: &[i64], hi: &[i64]) -> CubeSpec {
    CubeSpec::new(lo.to_vec(), hi.to_vec()).unwrap()
}

fn image(u: usize, pts: &[&[i64]]) -> Arc<DigitalImage> {
    Arc::new(DigitalImage::from_points(u, pts.iter().map(|c| Point::new(c.to_vec()))).unwrap())
}

fn subset(x: &DigitalImage, mask: u64) -> Vec<Point> {
    (0..x.len())
        .filter(|i| mask >> i & 1 == 1)
        .map(|i| x.point(i).clone())
        .collect()
}

fn small_images() -> Vec<Arc<DigitalImage>> {
    let ring: &[&[i64]] = &[&[0, 0], &[0, 1], &[0, 2], &[1, 0], &[1, 2], &[2, 0], &[2, 1], &[2, 2]];
    let punctured: &[&[i64]] = &[
        &[0, 0, 0], &[0, 0, 1], &[0, 1, 0], &[0, 1, 1], &[1, 0, 0], &[1, 0, 1], &[1, 1, 0],
    ];
    vec![
        image(1, ring),
        image(2, ring),
        image(1, punctured),
        image(2, punctured),
        image(3, punctured),
        image(1, &[&[0, 0], &[1, 0], &[2, 0], &[0, 1], &[0, 2], &[1, 2], &[2, 2], &[2, 1], &[3, 1]]),
        image(2, &[&[0, 0], &[1, 1], &[2, 2], &[3, 1], &[4, 0], &[2, 0]]),
        image(1, &[&[0], &[1], &[2], &[3], &[4], &[5], &[6], &[7], &[8]]),
        image(1, &[&[0, 0], &[0, 1], &[5, 5], &[5, 6], &[6, 6]]),
        Arc::new(cube(&[0, 0], &[3, 1]).to_image(2).unwrap()),
        Arc::new(cube(&[0, 0, 0], &[2, 1, 0]).to_image(3).unwrap()),
    ]
}

#[test]
fn search_matches_oracle_on_every_subset() {
    for x in small_images() {
        for mask in 0..1u64 << x.len() {
            let a = subset(&x, mask);
            let fast = verify_freezing(&x, &a).unwrap();
            let slow = oracle_verify(&x, &a).unwrap();
            assert_eq!(fast.status, slow.status, "{:?} with {a:?}", x.points());
            if let Some(w) = &fast.witness {
                assert!(is_valid_witness(&x, &x.indices_of(&a).unwrap(), w));
            }
        }
    }
}

#[test]
fn every_rule_combination_matches_oracle_on_cube() {
    let x = Arc::new(cube(&[0, 0, 0], &[1, 1, 1]).to_image(1).unwrap());
    for mask in 0..1u64 << x.len() {
        let a = subset(&x, mask);
        let expected = oracle_verify(&x, &a).unwrap().status;
        for rules in PruneRules::every_combination() {
            let cfg = VerifyConfig { rules, ..Default::default() };
            assert_eq!(verify_freezing_with(&x, &a, &cfg).unwrap().status, expected);
        }
    }
}

#[test]
fn missing_mandatory_point_means_not_frozen() {
    for x in small_images() {
        let mandatory = mandatory_points(&x);
        for m in &mandatory {
            let a: Vec<Point> = x.points().iter().filter(|p| *p != m).cloned().collect();
            let out = verify_freezing(&x, &a).unwrap();
            assert_eq!(out.status, FreezeStatus::NotFrozen);
            // answered by the close-neighbor map, not by search
            assert_eq!(out.stats.nodes, 0);
        }
    }
}

#[test]
fn boundary_freezes_under_every_adjacency() {
    let hole = cube(&[1, 1, 1], &[2, 2, 1]);
    let shapes = vec![
        cube(&[0, 0], &[4, 3]).to_image(1).unwrap(),
        DigitalImage::new(3, 1, cube(&[0, 0, 0], &[3, 3, 2]).points().into_iter().filter(|p| !hole.contains(p))).unwrap(),
        DigitalImage::new(2, 1, cube(&[0, 0], &[5, 5]).points().into_iter().filter(|p| p.coords()[0] <= 2 || p.coords()[1] <= 2)).unwrap(),
    ];
    for shape in shapes {
        for u in 1..=shape.dim() {
            let x = Arc::new(shape.with_adjacency(u).unwrap());
            assert!(verify_freezing(&x, &x.boundary()).unwrap().is_frozen(), "u={u}");
        }
    }
}

#[test]
fn union_constructions_freeze() {
    let l_shape = CubeDecomposition::new(vec![cube(&[0, 0], &[5, 2]), cube(&[0, 2], &[2, 6])]).unwrap();
    let step = CubeDecomposition::new(vec![
        cube(&[0, 0, 0], &[3, 3, 1]),
        cube(&[2, 2, 1], &[5, 4, 3]),
    ])
    .unwrap();
    let thin = CubeDecomposition::new(vec![cube(&[0, 0], &[6, 0]), cube(&[6, 0], &[6, 4]), cube(&[3, 4], &[6, 4])]).unwrap();
    for d in [&l_shape, &step, &thin] {
        let x = Arc::new(d.image(1).unwrap());
        assert!(verify_freezing(&x, &c1_freezing_set(d).unwrap()).unwrap().is_frozen());
        let xn = Arc::new(d.image(d.dim()).unwrap());
        assert!(verify_freezing(&xn, &cn_freezing_set(d).unwrap()).unwrap().is_frozen());
    }
    // cubes meeting only diagonally are c_n- but not c_1-connected
    let diag = CubeDecomposition::new(vec![cube(&[0, 0], &[2, 2]), cube(&[3, 3], &[5, 5])]).unwrap();
    assert!(c1_freezing_set(&diag).is_err());
    let x = Arc::new(diag.image(2).unwrap());
    assert!(verify_freezing(&x, &cn_freezing_set(&diag).unwrap()).unwrap().is_frozen());
}

#[test]
fn corners_freeze_larger_boxes() {
    for (lo, hi) in [(vec![0, 0, 0], vec![3, 2, 4]), (vec![-2, 1], vec![7, 3]), (vec![0; 4], vec![2; 4])] {
        let k = CubeSpec::new(lo, hi).unwrap();
        let x = Arc::new(k.to_image(1).unwrap());
        assert!(verify_freezing(&x, &k.corners()).unwrap().is_frozen());
    }
}

/// Seven of the eight corners of [0,2]^3 under c_1. Reported, not asserted:
/// whichever way it comes out must be the same for every omitted corner, and a
/// negative answer must come with a valid map.
#[test]
fn seven_of_eight_corners_experiment() {
    let k = cube(&[0, 0, 0], &[2, 2, 2]);
    let x = Arc::new(k.to_image(1).unwrap());
    let mut statuses = Vec::new();
    for omit in k.corners() {
        let a: Vec<Point> = k.corners().into_iter().filter(|c| *c != omit).collect();
        let out = verify_freezing(&x, &a).unwrap();
        if let Some(w) = &out.witness {
            assert!(is_valid_witness(&x, &x.indices_of(&a).unwrap(), w));
        }
        statuses.push(out.status);
    }
    assert!(statuses.windows(2).all(|w| w[0] == w[1]));
    println!("7 of 8 corners of [0,2]^3 under c1: {}", statuses[0]);
}

fn iso_strategy(dim: usize) -> impl Strategy<Value = LatticeIso> {
    (
        Just((0..dim).collect::<Vec<usize>>()).prop_shuffle(),
        proptest::collection::vec(any::<bool>(), dim),
        proptest::collection::vec(-6i64..=6, dim),
    )
        .prop_map(|(p, r, t)| LatticeIso::new(p, r, t).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn status_is_invariant_under_isos(
        (idx, t) in (0usize..11).prop_flat_map(|i| (Just(i), iso_strategy(small_images()[i].dim()))),
        mask in any::<u64>(),
    ) {
        let x = &small_images()[idx];
        let a = subset(x, mask);
        let tx = Arc::new(apply_iso(&t, x).unwrap());
        let ta = apply_iso_to_set(&t, &a).unwrap();
        prop_assert_eq!(verify_freezing(x, &a).unwrap().status, verify_freezing(&tx, &ta).unwrap().status);
    }

    #[test]
    fn freezing_is_monotone(idx in 0usize..11, small in any::<u64>(), extra in any::<u64>()) {
        let x = &small_images()[idx];
        let a = subset(x, small);
        let bigger = subset(x, small | extra);
        if verify_freezing(x, &a).unwrap().is_frozen() {
            prop_assert!(verify_freezing(x, &bigger).unwrap().is_frozen());
        }
    }

    #[test]
    fn corners_on_translated_boxes(lo in proptest::collection::vec(-10i64..10, 2), ext in proptest::collection::vec(0i64..6, 2)) {
        let hi: Vec<i64> = lo.iter().zip(&ext).map(|(a, e)| a + e).collect();
        let k = CubeSpec::new(lo, hi).unwrap();
        let x = Arc::new(k.to_image(1).unwrap());
        let out = verify_freezing(&x, &k.corners()).unwrap();
        prop_assert!(out.is_frozen());
    }
}
