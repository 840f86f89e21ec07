use std::f64::consts::PI;

use perimetry_core::dilation::{
    covariogram, derivative_report, dilation_excess, ring_lower_bound, union_volume, ExcessMethod, RSchedule, SamplerConfig,
};
use perimetry_core::{Shape, StructuringElement, Vector};
use proptest::prelude::*;

type Boxes = Vec<(Vec<f64>, Vec<f64>)>;

fn boxes(n: usize, max: usize) -> impl Strategy<Value = Boxes> {
    prop::collection::vec(
        (prop::collection::vec(-1.0..1.0f64, n), prop::collection::vec(0.05..1.0f64, n)).prop_map(|(lo, side)| {
            let hi = lo.iter().zip(&side).map(|(l, s)| l + s).collect();
            (lo, hi)
        }),
        1..=max,
    )
}

/// Inclusion–exclusion over all subsets; intersections of boxes are boxes.
fn inclusion_exclusion(b: &Boxes) -> f64 {
    let n = b[0].0.len();
    let mut total = 0.0;
    for mask in 1u32..(1 << b.len()) {
        let mut lo = vec![f64::NEG_INFINITY; n];
        let mut hi = vec![f64::INFINITY; n];
        let mut k = 0;
        for (i, (l, h)) in b.iter().enumerate() {
            if mask >> i & 1 == 1 {
                k += 1;
                for d in 0..n {
                    lo[d] = lo[d].max(l[d]);
                    hi[d] = hi[d].min(h[d]);
                }
            }
        }
        let vol: f64 = lo.iter().zip(&hi).map(|(l, h)| (h - l).max(0.0)).product();
        total += if k % 2 == 1 { vol } else { -vol };
    }
    total
}

/// `λ(D ∩ (D + y))` for discs of radius `r` at distance `d`.
fn lens(r: f64, d: f64) -> f64 {
    if d >= 2.0 * r {
        0.0
    } else {
        2.0 * r * r * (d / (2.0 * r)).acos() - 0.5 * d * (4.0 * r * r - d * d).sqrt()
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn union_volume_matches_inclusion_exclusion_2d(b in boxes(2, 6)) {
        let want = inclusion_exclusion(&b);
        prop_assert!((union_volume(&b).unwrap() - want).abs() < 1e-12);
    }

    #[test]
    fn union_volume_matches_inclusion_exclusion_3d(b in boxes(3, 5)) {
        let want = inclusion_exclusion(&b);
        prop_assert!((union_volume(&b).unwrap() - want).abs() < 1e-12);
    }

    #[test]
    fn exact_box_excess(
        side in prop::collection::vec(0.1..2.0f64, 2),
        q in prop::collection::vec(prop::collection::vec(-1.0..1.0f64, 2), 1..=4),
        r in 0.01..0.5f64,
    ) {
        let a = Shape::axis_box(&[0.0, 0.0], &side).unwrap();
        let qq = StructuringElement::new(q.iter().cloned().map(Vector::new).collect()).unwrap();
        let cfg = SamplerConfig { method: ExcessMethod::Exact, ..Default::default() };
        let g = dilation_excess(&a, &qq, r, &cfg).unwrap();
        let mut translates: Boxes = vec![(vec![0.0, 0.0], side.clone())];
        for p in &q {
            let lo = vec![r * p[0], r * p[1]];
            let hi = vec![side[0] + r * p[0], side[1] + r * p[1]];
            translates.push((lo, hi));
        }
        let want = inclusion_exclusion(&translates) - side[0] * side[1];
        prop_assert!((g.value - want).abs() < 1e-12, "{} vs {}", g.value, want);
        prop_assert!(g.is_exact());
    }

    #[test]
    fn excess_is_monotone_in_q(
        q in prop::collection::vec(prop::collection::vec(-1.0..1.0f64, 3), 1..=3),
        extra in prop::collection::vec(-1.0..1.0f64, 3),
        r in 0.01..0.3f64,
    ) {
        let a = Shape::unit_cube(3).unwrap();
        let small = StructuringElement::new(q.iter().cloned().map(Vector::new).collect()).unwrap();
        let mut big = q.clone();
        big.push(extra);
        let big = StructuringElement::new(big.into_iter().map(Vector::new).collect()).unwrap();
        let cfg = SamplerConfig::default();
        let (gs, gb) = (dilation_excess(&a, &small, r, &cfg).unwrap(), dilation_excess(&a, &big, r, &cfg).unwrap());
        prop_assert!(gs.value <= gb.value + 1e-12);
    }

    #[test]
    fn rectangle_derivative_is_exact(a in 0.2..2.0f64, b in 0.2..2.0f64, q in prop::collection::vec(-1.0..1.0f64, 2)) {
        let shape = Shape::axis_box(&[0.0, 0.0], &[a, b]).unwrap();
        let qq = StructuringElement::new(vec![Vector::new(q.clone())]).unwrap();
        let rep = derivative_report(&shape, &qq, &RSchedule::default(), &SamplerConfig::default()).unwrap();
        // The translate sticks out by slabs of widths r|q₁| and r|q₂|.
        let want = b * q[0].abs() + a * q[1].abs();
        prop_assert!((rep.rhs_exact - want).abs() < 1e-12);
        prop_assert!((rep.extrapolated.value - want).abs() < 1e-6 * want.max(1.0));
    }
}

#[test]
fn disc_translate_excess_against_lens() {
    let a = Shape::ball(vec![0.0, 0.0], 1.0).unwrap();
    for (k, (ux, uy, r)) in [(1.0, 0.0, 0.1), (0.6, 0.8, 0.5), (0.0, 1.0, 1.5)].into_iter().enumerate() {
        let q = StructuringElement::new(vec![Vector::new(vec![ux, uy])]).unwrap();
        let cfg = SamplerConfig { method: ExcessMethod::MonteCarlo, samples: 400_000, seed: k as u64 };
        let g = dilation_excess(&a, &q, r, &cfg).unwrap();
        let want = PI - lens(1.0, r);
        assert!(g.agrees_with(want, 4.0), "r={r}: {} ± {} vs {want}", g.value, g.std_err);
    }
}

#[test]
fn covariogram_of_disc_and_box() {
    let disc = Shape::ball(vec![0.0, 0.0], 1.0).unwrap();
    let c = covariogram(&disc, &Vector::new(vec![0.3, 0.4]), &SamplerConfig::default()).unwrap();
    assert!((c.value - lens(1.0, 0.5)).abs() < 1e-12);
    let b = Shape::axis_box(&[0.0, 0.0, 0.0], &[1.0, 2.0, 3.0]).unwrap();
    let c = covariogram(&b, &Vector::new(vec![0.5, -1.0, 0.0]), &SamplerConfig::default()).unwrap();
    assert!((c.value - 0.5 * 1.0 * 3.0).abs() < 1e-12);
}

#[test]
fn ring_bounds_follow_the_formula() {
    for m in 1..=20usize {
        let mf = m as f64;
        let want = PI * (1.0 / (mf * mf) - 1.0 / ((mf + 1.0) * (mf + 1.0))) * 2f64.powi(m as i32 - 1);
        assert!((ring_lower_bound(m) - want).abs() < 1e-12 * want);
    }
    assert!((ring_lower_bound(12) - 6.6095).abs() < 1e-4);
    assert!((ring_lower_bound(14) - 16.92).abs() < 5e-3);
}
