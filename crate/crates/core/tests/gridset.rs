use std::f64::consts::TAU;

use perimetry_core::geom::sphere_quadrature;
use perimetry_core::gridset::{Edges, DEFAULT_VOXEL_CAP, MIN_OFFSET_VOXELS};
use perimetry_core::{GridSet, Shape, StructuringElement, Vector};
use proptest::prelude::*;

fn blob() -> impl Strategy<Value = GridSet> {
    prop::collection::vec(((0.2..0.8f64, 0.2..0.8f64), 0.03..0.25f64), 1..=4).prop_map(|discs| {
        GridSet::from_fn(vec![0.0, 0.0], 1.0 / 48.0, &[48, 48], DEFAULT_VOXEL_CAP, |x| {
            discs.iter().any(|((cx, cy), r)| (x[0] - cx).powi(2) + (x[1] - cy).powi(2) <= r * r)
        })
        .unwrap()
    })
}

fn centres_contained(outer: &GridSet, inner: &GridSet) -> bool {
    let h = outer.spacing();
    inner.iter_set().all(|idx| {
        let c = inner.voxel_center(&idx);
        let j: Vec<i64> = c.iter().zip(outer.origin()).map(|(x, o)| ((x - o) / h).floor() as i64).collect();
        outer.get_signed(&j)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn dilation_contains_and_is_monotone(g in blob(), a in 0.0..TAU, b in 0.0..TAU, steps in MIN_OFFSET_VOXELS..12.0) {
        let r = steps * g.spacing();
        let one = StructuringElement::new(vec![Vector::from_angle(a)]).unwrap();
        let two = StructuringElement::new(vec![Vector::from_angle(a), Vector::from_angle(b)]).unwrap();
        let d1 = g.dilate(&one, r).unwrap();
        let d2 = g.dilate(&two, r).unwrap();
        prop_assert!(centres_contained(&d1, &g));
        prop_assert!(centres_contained(&d2, &d1));
        prop_assert!(d2.count() >= d1.count() && d1.count() >= g.count());
    }

    #[test]
    fn dilation_commutes_with_voxel_shifts(g in blob(), sx in -6i64..6, sy in -6i64..6) {
        let q = StructuringElement::parse("0.125,0;0,-0.25;-0.1,0.1").unwrap();
        let a = g.translate_voxels(&[sx, sy]).dilate(&q, 1.0).unwrap();
        let b = g.dilate(&q, 1.0).unwrap().translate_voxels(&[sx, sy]);
        prop_assert!(a.same_set_as(&b));
    }

    #[test]
    fn shift_loss_bounded_by_exits(g in blob(), axis in 0usize..2, positive: bool, s in 1usize..30) {
        let loss = g.shift_loss(axis, s, positive);
        let direct = g
            .iter_set()
            .filter(|idx| {
                let mut j: Vec<i64> = idx.iter().map(|&i| i as i64).collect();
                j[axis] += if positive { -(s as i64) } else { s as i64 };
                !g.get_signed(&j)
            })
            .count() as u64;
        prop_assert_eq!(loss, direct);
        prop_assert!(loss <= s as u64 * g.exits(axis, positive));
        prop_assert_eq!(g.shift_loss(axis, 1, positive), g.exits(axis, positive));
    }

    #[test]
    fn entries_equal_exits(g in blob(), axis in 0usize..2) {
        prop_assert_eq!(g.exits(axis, true), g.exits(axis, false));
    }

    #[test]
    fn save_and_load_round_trip(g in blob()) {
        let dir = tempfile::tempdir().unwrap();
        let stem = dir.path().join("g");
        g.save(&stem).unwrap();
        let back = GridSet::load(&dir.path().join("g.json")).unwrap();
        prop_assert!(back.same_set_as(&g));
        prop_assert_eq!(back.dims(), g.dims());
    }
}

#[test]
fn rasterized_perimeters_within_three_percent() {
    let dirs = sphere_quadrature(2, 64).unwrap();
    for (shape, want) in [(Shape::unit_cube(2).unwrap(), 4.0), (Shape::ball(vec![0.0, 0.0], 1.0).unwrap(), TAU)] {
        let g = GridSet::rasterize(&shape, 0.005, 0.01).unwrap();
        let est = g.perimeter_estimate_with(&dirs, Edges::Closed).unwrap();
        assert!((est - want).abs() < 0.03 * want, "{est} vs {want}");
    }
}

#[test]
fn voxel_volume_of_dilated_rectangle() {
    // A rectangle of 10×6 voxels shifted by (4, 0) voxels covers 14×6.
    let h = 0.1;
    let g = GridSet::from_fn(vec![0.0, 0.0], h, &[20, 20], DEFAULT_VOXEL_CAP, |x| x[0] < 1.0 && x[1] < 0.6).unwrap();
    assert_eq!(g.count(), 60);
    let d = g.dilate(&StructuringElement::parse("1,0").unwrap(), 0.4).unwrap();
    assert_eq!(d.count(), 84);
}
