use std::f64::consts::{PI, TAU};

use perimetry_core::boolean::{
    analytic_contact, analytic_specific_perimeter, analytic_volume_fraction, contact_distribution, contact_estimates,
    perimeter_consistency, simulate_indexed, specific_perimeter, volume_fraction, BooleanModelSpec, BooleanSampling, GrainLaw, Window,
};
use perimetry_core::{StructuringElement, Vector};
use proptest::prelude::*;

fn discs() -> BooleanModelSpec {
    BooleanModelSpec::discs(0.1, 5.0, 0.2)
}

fn boxes() -> BooleanModelSpec {
    BooleanModelSpec { intensity: 10.0, grain: GrainLaw::FixedBox { half_extents: vec![0.1, 0.05], angle: 0.0 }, ..discs() }
}

fn mean_and_err(v: &[f64]) -> (f64, f64) {
    let n = v.len() as f64;
    let m = v.iter().sum::<f64>() / n;
    let var = v.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (n - 1.0);
    (m, (var / n).sqrt())
}

#[test]
fn raster_coverage_matches_closed_form() {
    let spec = discs();
    let want = 1.0 - (-5.0 * PI * 0.01f64).exp();
    assert!((analytic_volume_fraction(&spec) - want).abs() < 1e-15);
    let k = 64;
    let covered: Vec<f64> = (0..100)
        .map(|i| {
            let z = simulate_indexed(&spec, 3, i).unwrap();
            let hits = (0..k * k).filter(|j| z.contains(&[((j % k) as f64 + 0.5) / k as f64, ((j / k) as f64 + 0.5) / k as f64])).count();
            hits as f64 / (k * k) as f64
        })
        .collect();
    let (m, se) = mean_and_err(&covered);
    assert!((m - want).abs() < 3.0 * se, "{m} ± {se} vs {want}");
}

#[test]
fn germ_counts_are_poisson() {
    let spec = discs();
    let area = 1.4f64 * 1.4;
    let counts: Vec<f64> = (0..1000).map(|i| simulate_indexed(&spec, 11, i).unwrap().grains.len() as f64).collect();
    let (m, se) = mean_and_err(&counts);
    let want = 5.0 * area;
    assert!((m - want).abs() < 3.0 * se, "{m} ± {se} vs {want}");
    // Poisson: variance equals the mean.
    let var = counts.iter().map(|c| (c - m).powi(2)).sum::<f64>() / 999.0;
    assert!((var / want - 1.0).abs() < 0.15, "variance {var}");
    for g in simulate_indexed(&spec, 11, 0).unwrap().grains {
        assert!(g.center().iter().all(|&c| (-0.2..=1.2).contains(&c)));
    }
}

#[test]
fn vanishing_intensity() {
    let spec = BooleanModelSpec { intensity: 1e-9, ..discs() };
    let cfg = BooleanSampling { realizations: 200, ..Default::default() };
    assert_eq!(volume_fraction(&spec, &cfg).unwrap().value, 0.0);
    // p̄ ≈ γ E λ(K) and P̄ ≈ γ E S(K) as γ → 0.
    let small = BooleanModelSpec { intensity: 1e-3, ..discs() };
    assert!((analytic_volume_fraction(&small) / (1e-3 * PI * 0.01) - 1.0).abs() < 1e-4);
    assert!((analytic_specific_perimeter(&small) / (1e-3 * TAU * 0.1) - 1.0).abs() < 1e-4);
}

#[test]
fn disjoint_windows_agree() {
    let cfg = BooleanSampling { realizations: 2000, seed: 5, ..Default::default() };
    let a = discs();
    let b = BooleanModelSpec { window: Window { min: vec![5.0, -3.0], max: vec![6.0, -2.0] }, ..discs() };
    let (pa, pb) = (volume_fraction(&a, &cfg).unwrap(), volume_fraction(&b, &cfg).unwrap());
    assert!(pa.z_score(&pb).abs() < 3.0, "{} vs {}", pa.value, pb.value);
    let want = analytic_volume_fraction(&a);
    assert!(pa.agrees_with(want, 3.0) && pb.agrees_with(want, 3.0));
}

#[test]
fn specific_perimeter_matches_grid_and_closed_form() {
    let cfg = BooleanSampling { realizations: 40, seed: 9, ..Default::default() };
    for spec in [discs(), boxes()] {
        let c = perimeter_consistency(&spec, &cfg, 0.002).unwrap();
        assert!(c.z.abs() < 3.0, "exact {} vs grid {}", c.exact.value, c.grid.value);
    }
    let cfg = BooleanSampling { realizations: 2000, seed: 9, ..Default::default() };
    let (gamma, a, b) = (10.0f64, 0.1, 0.05);
    let want = (-gamma * 4.0 * a * b).exp() * gamma * 4.0 * (a + b);
    assert!((analytic_specific_perimeter(&boxes()) - want).abs() < 1e-12);
    let p = specific_perimeter(&boxes(), &cfg).unwrap();
    assert!(p.agrees_with(want, 3.0), "{} ± {} vs {want}", p.value, p.std_err);
}

#[test]
fn contact_is_zero_at_origin_and_ignores_the_origin_in_q() {
    let cfg = BooleanSampling { realizations: 100, seed: 2, ..Default::default() };
    let q = StructuringElement::parse("0.6,0.8;-1,0").unwrap();
    let h = contact_distribution(&discs(), &q, &[0.0, 0.004], &cfg).unwrap();
    assert_eq!(h[0].1.value, 0.0);
    assert_eq!(h, contact_distribution(&discs(), &q.with_origin(), &[0.0, 0.004], &cfg).unwrap());
}

#[test]
fn box_contact_matches_closed_form() {
    let cfg = BooleanSampling { realizations: 3000, seed: 4, ..Default::default() };
    let q = StructuringElement::parse("0,1").unwrap();
    let r = [0.001, 0.004];
    let c = contact_estimates(&boxes(), &q, &r, &cfg).unwrap();
    for (k, &rk) in r.iter().enumerate() {
        // A translate by r e₂ of a 0.2 × 0.1 box adds a 0.2 × r strip.
        let want = {
            let s = (-10.0f64 * 0.02).exp();
            s * (1.0 - (-10.0 * 0.2 * rk).exp())
        };
        let analytic = analytic_contact(&boxes(), &q, rk).unwrap().unwrap();
        assert!((analytic - want).abs() < 1e-12);
        assert!(c.f[k].agrees_with(want, 3.0), "r={rk}: {} ± {} vs {want}", c.f[k].value, c.f[k].std_err);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn contact_grows_with_r(angle in 0.0..TAU, seed in 0u64..1000) {
        let cfg = BooleanSampling { realizations: 200, seed, ..Default::default() };
        let q = StructuringElement::new(vec![Vector::from_angle(angle)]).unwrap();
        let r = [0.0025, 0.005, 0.01, 0.02];
        let h = contact_distribution(&discs(), &q, &r, &cfg).unwrap();
        for w in h.windows(2) {
            prop_assert!(w[1].1.value >= w[0].1.value - 3.0 * w[0].1.std_err.hypot(w[1].1.std_err));
        }
        // The disc closed form is isotropic.
        let want = analytic_contact(&discs(), &q, 0.01).unwrap().unwrap();
        let ref_q = StructuringElement::parse("1,0").unwrap();
        prop_assert!((want - analytic_contact(&discs(), &ref_q, 0.01).unwrap().unwrap()).abs() < 1e-12);
    }

    #[test]
    fn same_seed_same_realization(seed in any::<u64>(), index in 0u64..1000) {
        let a = simulate_indexed(&discs(), seed, index).unwrap();
        let b = simulate_indexed(&discs(), seed, index).unwrap();
        prop_assert_eq!(a, b);
    }
}
