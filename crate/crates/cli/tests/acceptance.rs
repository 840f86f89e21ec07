//! Acceptance criteria, one `[PASS]`/`[FAIL]` line each. Runs as a plain
//! binary (`harness = false`) and exits nonzero if any criterion fails.
//!
//! Every measured quantity is compared against an oracle computed here,
//! independently of the library code path that produced it.

use std::f64::consts::{PI, TAU};
use std::path::Path;
use std::process::{Command, ExitCode};
use std::time::Instant;

use perimetry_core::boolean::{self, empirical_rose, hprime_check, BooleanModelSpec, BooleanSampling, GrainLaw};
use perimetry_core::checks::{random_blob, random_polygon, random_q};
use perimetry_core::dilation::{
    counterexample, covariogram_derivative, derivative_report, qvariation, ring_lower_bound, CounterexampleConfig, RSchedule, SamplerConfig,
};
use perimetry_core::geom::{circumradius, inradius_in_span, span_basis, sphere_quadrature};
use perimetry_core::gridset::{Edges, MIN_OFFSET_VOXELS};
use perimetry_core::sampling::stream_rng;
use perimetry_core::{GridSet, Shape, StructuringElement, Vector};
use rand::Rng;

type Verdict = Result<String, String>;

const SEED: u64 = 20_240_601;

fn check(ok: bool, detail: String) -> Verdict {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn q(text: &str) -> StructuringElement {
    StructuringElement::parse(text).expect("valid Q")
}

/// `λ(⋃ₛ (C + s))` for the unit cube `C` and shifts `s`, by inclusion–exclusion
/// over subsets: the intersection of translates is a box of side
/// `1 − (max − min)` per axis.
fn cube_translates_union(shifts: &[Vec<f64>]) -> f64 {
    let n = shifts[0].len();
    let mut total = 0.0;
    for mask in 1u32..(1 << shifts.len()) {
        let members: Vec<&Vec<f64>> = shifts.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, s)| s).collect();
        let vol: f64 = (0..n)
            .map(|k| {
                let lo = members.iter().map(|s| s[k]).fold(f64::INFINITY, f64::min);
                let hi = members.iter().map(|s| s[k]).fold(f64::NEG_INFINITY, f64::max);
                (1.0 - (hi - lo)).max(0.0)
            })
            .product();
        let sign = if members.len() % 2 == 1 { 1.0 } else { -1.0 };
        total += sign * vol;
    }
    total
}

fn criterion_1() -> Verdict {
    let mut notes = Vec::new();
    let mut ok = true;
    let cases =
        [(Shape::unit_cube(2).unwrap(), q("0,0;1,0"), 1.0, 0.01), (Shape::unit_cube(3).unwrap(), q("1,0,0;0,1,0;0,0,1"), 3.0, 0.05)];
    for (a, qq, want, tol) in cases {
        let t = Instant::now();
        let rep = derivative_report(&a, &qq, &RSchedule::default(), &SamplerConfig::default()).map_err(|e| e.to_string())?;
        let secs = t.elapsed().as_secs_f64();
        // Every ratio against the slab / inclusion–exclusion volume.
        let mut shifts = vec![vec![0.0; a.dim()]];
        let worst = rep
            .r_values
            .iter()
            .zip(&rep.ratios)
            .map(|(&r, e)| {
                shifts.truncate(1);
                shifts.extend(qq.points().iter().map(|p| p.coords().iter().map(|c| c * r).collect()));
                let oracle = (cube_translates_union(&shifts) - 1.0) / r;
                (e.value - oracle).abs()
            })
            .fold(0.0, f64::max);
        let d = (rep.extrapolated.value - want).abs();
        ok &= d <= tol && (rep.rhs_exact - want).abs() < 1e-12 && worst < 1e-9 && secs < 30.0;
        notes.push(format!(
            "n={}: limit {:.6} (rhs {}), max ratio error vs inclusion-exclusion {worst:.1e}, {secs:.2}s",
            a.dim(),
            rep.extrapolated.value,
            rep.rhs_exact
        ));
    }
    check(ok, notes.join("; "))
}

fn criterion_2() -> Verdict {
    let t = Instant::now();
    let a = Shape::ball(vec![0.0, 0.0], 1.0).unwrap();
    let rep = derivative_report(&a, &q("1,0;-1,0"), &RSchedule::default(), &SamplerConfig { seed: SEED, ..Default::default() })
        .map_err(|e| e.to_string())?;
    let secs = t.elapsed().as_secs_f64();
    // ∫ h(Q, ν)⁺ dS over the unit circle: ∫₀^{2π} |cos θ| dθ = 4.
    let oracle = 4.0;
    let rel = (rep.extrapolated.value - oracle).abs() / oracle;
    check(
        rel <= 0.01 && (rep.rhs_exact - oracle).abs() < 1e-5 && secs < 60.0,
        format!("limit {:.5} ± {:.5} vs 4, relative error {rel:.2e}, {secs:.2}s", rep.extrapolated.value, rep.extrapolated.std_err),
    )
}

fn criterion_3() -> Verdict {
    let a = Shape::unit_cube(2).unwrap();
    let s = a.surface_measure(0).unwrap();
    let mut notes = Vec::new();
    let mut ok = true;
    let d = 0.5f64.sqrt();
    for (u, want, tol) in [(vec![1.0, 0.0], -1.0, 0.01), (vec![d, d], -2f64.sqrt(), 0.02)] {
        let u = Vector::new(u);
        let rep = covariogram_derivative(&a, &u, &RSchedule::default(), &SamplerConfig::default()).map_err(|e| e.to_string())?;
        // C(r u) = (1 − r|u₁|)(1 − r|u₂|) on the unit square.
        let oracle_slope = -(u.coords()[0].abs() + u.coords()[1].abs());
        let cosine = -0.5 * s.cosine_transform(&u).unwrap();
        ok &= (rep.extrapolated.value - want).abs() <= tol
            && (rep.extrapolated.value - cosine).abs() <= tol
            && (cosine - oracle_slope).abs() < 1e-12
            && (rep.cosine_rhs - cosine).abs() < 1e-12;
        notes.push(format!("u={:?}: slope {:.6}, -cosine/2 = {cosine:.6}", u.coords(), rep.extrapolated.value));
    }
    check(ok, notes.join("; "))
}

fn criterion_4() -> Verdict {
    let mut rng = stream_rng(SEED, 4);
    let dirs = sphere_quadrature(2, 64).unwrap();
    let (mut worst_sum, mut worst_vol, mut worst_per) = (0.0f64, 0.0f64, 0.0f64);
    let mut failures = Vec::new();
    for i in 0..100 {
        let a = random_polygon(&mut rng);
        let s = a.surface_measure(0).unwrap();
        let sum = s.vector_sum().norm();
        worst_sum = worst_sum.max(sum);
        if sum > 1e-9 {
            failures.push(format!("polygon {i}: |Σwν| = {sum:e}"));
        }
        // At least 40 voxels across the thickness 2λ/P (the inradius of a
        // triangle), and never coarser than 1/200.
        let p = a.perimeter();
        let h = (2.0 * a.volume() / p / 40.0).min(0.005);
        let g = GridSet::rasterize(&a, h, 2.0 * h).unwrap();
        // Discrete Minkowski relation: along every grid line, entries equal exits.
        for axis in 0..2 {
            if g.exits(axis, true) != g.exits(axis, false) {
                failures.push(format!("polygon {i}: axis {axis} entries ≠ exits"));
            }
        }
        // Voxel-centre rasterization errs only within h/√2 of the boundary:
        // |Δλ| ≤ λ((A ⊕ B) ∖ (A ⊖ B)) ≤ 2·(h/√2)·P + π h²/2.
        let dv = (g.volume() - a.volume()).abs();
        let vol_bound = 2f64.sqrt() * h * p + PI * h * h / 2.0;
        worst_vol = worst_vol.max(dv / vol_bound);
        if dv > vol_bound {
            failures.push(format!("polygon {i}: rasterized area off by {dv:e} > {vol_bound:e}"));
        }
        let est = g.perimeter_estimate_with(&dirs, Edges::Closed).unwrap();
        let rel = (est - p).abs() / p;
        worst_per = worst_per.max(rel);
        if rel > 0.03 {
            failures.push(format!("polygon {i}: grid perimeter {est:.4} vs {p:.4}"));
        }
    }
    let detail = format!(
        "100 polygons: max |Σwν| {worst_sum:.1e}, area error ≤ {:.0}% of band bound, max perimeter error {:.2}%",
        100.0 * worst_vol,
        100.0 * worst_per
    );
    if failures.is_empty() {
        Ok(detail)
    } else {
        Err(format!("{detail}; {}", failures.join("; ")))
    }
}

fn criterion_5() -> Verdict {
    let mut rng = stream_rng(SEED, 5);
    let quad = sphere_quadrature(2, 256).unwrap();
    let mut violations = Vec::new();
    let mut min_gap = f64::INFINITY;
    for i in 0..100 {
        let a = random_polygon(&mut rng);
        let s = a.surface_measure(0).unwrap();
        let qq = random_q(&mut rng, 2, 6);
        let v = qvariation(&s, &qq).unwrap();
        // Independent V^Q: sum over edges of length × max over q of (−q·ν)⁺.
        let direct: f64 =
            s.atoms().iter().map(|at| at.weight * qq.points().iter().map(|p| (-p.dot(&at.normal)).max(0.0)).fold(0.0, f64::max)).sum();
        let (inr, _) = inradius_in_span(&qq, &quad).unwrap();
        let lower = inr * s.projected_variation(&span_basis(&qq));
        let upper = circumradius(&qq) * a.perimeter();
        min_gap = min_gap.min((v - lower).min(upper - v));
        if lower > v + 1e-12 || v > upper + 1e-12 || (v - direct).abs() > 1e-12 {
            violations.push(format!("pair {i}: {lower} ≤ {v} ≤ {upper}"));
        }
    }
    check(violations.is_empty(), format!("100 pairs, {} violations, min slack {min_gap:.2e} {}", violations.len(), violations.join("; ")))
}

fn criterion_6() -> Verdict {
    let mut rng = stream_rng(SEED, 6);
    let mut worst = 0.0f64;
    let mut fails = Vec::new();
    for i in 0..10 {
        let a = random_polygon(&mut rng);
        let s = a.surface_measure(0).unwrap();
        let qq = random_q(&mut rng, 2, 6);
        let m = 10_000;
        let vals: Vec<f64> = (0..m).map(|_| qvariation(&s, &qq.rotated(rng.random_range(0.0..TAU)).unwrap()).unwrap()).collect();
        let mean = vals.iter().sum::<f64>() / m as f64;
        let sd = (vals.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (m as f64 - 1.0)).sqrt();
        let sigma = sd / (m as f64).sqrt();
        // b(conv(Q ∪ {0})) in the plane is the hull perimeter over π.
        let want = 0.5 * hull_perimeter(&qq) / PI * a.perimeter();
        let z = (mean - want) / sigma;
        worst = worst.max(z.abs());
        if z.abs() > 3.0 {
            fails.push(format!("pair {i}: {mean:.5} ± {sigma:.5} vs {want:.5}"));
        }
    }
    check(fails.is_empty(), format!("10 pairs × 10⁴ rotations, max |z| = {worst:.2} {}", fails.join("; ")))
}

/// Perimeter of conv(Q ∪ {0}) by gift wrapping.
fn hull_perimeter(q: &StructuringElement) -> f64 {
    let mut pts: Vec<[f64; 2]> = q.points().iter().map(|p| [p.coords()[0], p.coords()[1]]).collect();
    pts.push([0.0, 0.0]);
    pts.sort_by(|a, b| a.partial_cmp(b).unwrap());
    pts.dedup();
    if pts.len() < 2 {
        return 0.0;
    }
    let start = 0;
    let mut hull = vec![start];
    let mut cur = start;
    loop {
        let mut next = (cur + 1) % pts.len();
        for j in 0..pts.len() {
            let (o, a, b) = (pts[cur], pts[next], pts[j]);
            let cross = (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0]);
            let farther = (b[0] - o[0]).hypot(b[1] - o[1]) > (a[0] - o[0]).hypot(a[1] - o[1]);
            if cross < 0.0 || (cross == 0.0 && farther) {
                next = j;
            }
        }
        cur = next;
        if cur == start || hull.len() > pts.len() {
            break;
        }
        hull.push(cur);
    }
    (0..hull.len())
        .map(|i| {
            let (a, b) = (pts[hull[i]], pts[hull[(i + 1) % hull.len()]]);
            (a[0] - b[0]).hypot(a[1] - b[1])
        })
        .sum()
}

fn criterion_7() -> Verdict {
    let t = Instant::now();
    let rep = counterexample(&CounterexampleConfig { m_max: 20, seed: SEED, ..Default::default() }).map_err(|e| e.to_string())?;
    let secs = t.elapsed().as_secs_f64();
    let at = |m: usize| rep.points.iter().find(|p| p.m == m).ok_or(format!("no ratio at m = {m}"));
    let (r6, r12) = (at(6)?.ratio.value, at(12)?.ratio.value);
    let mut bad = Vec::new();
    for p in &rep.points {
        let mf = p.m as f64;
        let oracle = PI * (mf.powi(-2) - (mf + 1.0).powi(-2)) * 2f64.powi(p.m as i32 - 1);
        if (p.lower_bound - oracle).abs() > 1e-12 * oracle || (ring_lower_bound(p.m) - oracle).abs() > 1e-12 * oracle {
            bad.push(format!("m={}: bound {} vs {oracle}", p.m, p.lower_bound));
        }
        // The ring alone carries at least the analytic bound.
        if p.ring_ratio.value + 3.0 * p.ring_ratio.std_err < p.lower_bound
            || p.ratio.value < p.ring_ratio.value - 3.0 * p.ring_ratio.std_err
        {
            bad.push(format!("m={}: ratio {:.3}, ring {:.3}, bound {:.3}", p.m, p.ratio.value, p.ring_ratio.value, p.lower_bound));
        }
    }
    check(
        r12 / r6 >= 4.0 && r12 > rep.vq_bound && bad.is_empty() && secs < 300.0,
        format!(
            "ratio(12)/ratio(6) = {:.2}, ratio(12) = {r12:.1} > V bound {:.3}, {} bounds reproduced, {secs:.1}s {}",
            r12 / r6,
            rep.vq_bound,
            rep.points.len(),
            bad.join("; ")
        ),
    )
}

fn discs() -> BooleanModelSpec {
    BooleanModelSpec::discs(0.1, 5.0, 0.2)
}

fn criterion_8() -> Verdict {
    let t = Instant::now();
    let spec = discs();
    let cfg = BooleanSampling { realizations: 10_000, seed: SEED, ..Default::default() };
    let rep = hprime_check(&spec, &q("1,0"), None, &cfg).map_err(|e| e.to_string())?;
    let secs = t.elapsed().as_secs_f64();
    let (gamma, radius) = (5.0, 0.1);
    let p_bar = 1.0 - (-gamma * PI * radius * radius).exp();
    let big_p = (-gamma * PI * radius * radius).exp() * gamma * TAU * radius;
    let vf = &rep.contact.volume_fraction;
    let sp = &rep.specific_perimeter;
    let mw = rep.mean_width_form.ok_or("no mean-width form")?;
    // Slope against the measured P̄/π with combined σ, and against the closed form.
    let z_measured = (rep.slope.value - mw.value) / rep.slope.std_err.hypot(mw.std_err);
    let z_closed = (rep.slope.value - big_p / PI) / rep.slope.std_err;
    let z_p = (vf.value - p_bar) / vf.std_err;
    let z_big = (sp.value - big_p) / sp.std_err;
    let oracles_agree = (rep.analytic.volume_fraction - p_bar).abs() < 1e-12 && (rep.analytic.specific_perimeter - big_p).abs() < 1e-9;
    check(
        [z_measured, z_closed, z_p, z_big].iter().all(|z| z.abs() <= 3.0) && oracles_agree && secs < 600.0,
        format!(
            "slope {:.4} ± {:.4} vs P̄/π {:.4} (z {z_measured:.2}; closed form {:.4}, z {z_closed:.2}); p̄ {:.5} vs {p_bar:.5} (z {z_p:.2}); P̄ {:.4} vs {big_p:.4} (z {z_big:.2}); {secs:.1}s",
            rep.slope.value,
            rep.slope.std_err,
            mw.value,
            big_p / PI,
            vf.value,
            sp.value
        ),
    )
}

fn criterion_9() -> Verdict {
    let t = Instant::now();
    let (a, b, gamma) = (0.1, 0.05, 10.0);
    let spec = BooleanModelSpec { intensity: gamma, grain: GrainLaw::FixedBox { half_extents: vec![a, b], angle: 0.0 }, ..discs() };
    let cfg = BooleanSampling { realizations: 10_000, seed: SEED, ..Default::default() };
    let rep = hprime_check(&spec, &q("0,1"), None, &cfg).map_err(|e| e.to_string())?;
    // Face-area law: faces with normal ±e₂ have length 2a out of 4(a + b).
    let rose_minus_e2 = a / (2.0 * (a + b));
    let big_p = (-gamma * 4.0 * a * b).exp() * gamma * 4.0 * (a + b);
    let closed = big_p * rose_minus_e2;
    let z_measured = rep.z_rose;
    let z_closed = (rep.slope.value - closed) / rep.slope.std_err;
    let rose =
        empirical_rose(&spec, &BooleanSampling { realizations: 2000, seed: SEED, ..Default::default() }).map_err(|e| e.to_string())?;
    let declared = boolean::rose(&spec).map_err(|e| e.to_string())?;
    let w = declared.integrate(|v| if v.coords()[1] < -0.5 { 1.0 } else { 0.0 }).map_err(|e| e.to_string())?;
    let secs = t.elapsed().as_secs_f64();
    check(
        z_measured.abs() <= 3.0 && z_closed.abs() <= 3.0 && rose.tv_distance < 0.02 && (w - rose_minus_e2).abs() < 1e-12 && secs < 600.0,
        format!(
            "slope {:.4} ± {:.4} vs P̄·R*(-e2) {:.4} (z {z_measured:.2}; closed form {closed:.4}, z {z_closed:.2}); rose TV {:.4}; {secs:.1}s",
            rep.slope.value, rep.slope.std_err, rep.rose_form.value, rose.tv_distance
        ),
    )
}

fn criterion_10() -> Verdict {
    let mut rng = stream_rng(SEED, 10);
    let mut bad = Vec::new();
    for t in 0..500 {
        let g = random_blob(&mut rng);
        let h = g.spacing();
        // Discrete inequality along a random axis direction.
        let axis = rng.random_range(0..2);
        let positive = rng.random::<bool>();
        let s = rng.random_range(1..24usize);
        let (loss, exits) = (g.shift_loss(axis, s, positive), g.exits(axis, positive));
        let loss_direct = brute_shift_loss(&g, axis, s, positive);
        if loss > s as u64 * exits || loss != loss_direct {
            bad.push(format!("triple {t}: loss {loss} (direct {loss_direct}) vs {s}·{exits}"));
        }
        // Monotonicity: G ⊆ G ⊕ r{u} ⊆ G ⊕ r{u, v}.
        let u = Vector::from_angle(rng.random_range(0.0..TAU));
        let v = Vector::from_angle(rng.random_range(0.0..TAU));
        let r = rng.random_range(MIN_OFFSET_VOXELS..16.0) * h;
        let small = g.dilate(&StructuringElement::new(vec![u.clone()]).unwrap(), r).unwrap();
        let large = g.dilate(&StructuringElement::new(vec![u, v]).unwrap(), r).unwrap();
        if !(contains(&small, &g) && contains(&large, &small)) {
            bad.push(format!("triple {t}: dilation not monotone at r = {r}"));
        }
    }
    check(bad.is_empty(), format!("500 triples, {} violations {}", bad.len(), bad.join("; ")))
}

/// `#(G ∖ (G + s·eₐ))` by direct voxel lookup.
fn brute_shift_loss(g: &GridSet, axis: usize, s: usize, positive: bool) -> u64 {
    g.iter_set()
        .filter(|idx| {
            let mut j: Vec<i64> = idx.iter().map(|&i| i as i64).collect();
            j[axis] += if positive { -(s as i64) } else { s as i64 };
            !g.get_signed(&j)
        })
        .count() as u64
}

/// Every voxel centre of `inner` lies in a set voxel of `outer`.
fn contains(outer: &GridSet, inner: &GridSet) -> bool {
    let h = outer.spacing();
    inner.iter_set().all(|idx| {
        let c = inner.voxel_center(&idx);
        let j: Vec<i64> = c.iter().zip(outer.origin()).map(|(x, o)| ((x - o) / h).floor() as i64).collect();
        outer.get_signed(&j)
    })
}

fn criterion_11() -> Verdict {
    let bin = env!("CARGO_BIN_EXE_perimetry");
    let configs = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs");
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let disc = configs.join("disc.json");
    let discs = configs.join("discs.json");
    let boxes = configs.join("boxes.json");
    let runs: Vec<(&str, Vec<String>)> = vec![
        (
            "derivative",
            vec![
                "derivative".into(),
                "--shape".into(),
                disc.display().to_string(),
                "--q".into(),
                "1,0;-1,0".into(),
                "--samples".into(),
                "200000".into(),
            ],
        ),
        (
            "covariogram",
            vec![
                "covariogram".into(),
                "--shape".into(),
                disc.display().to_string(),
                "--u".into(),
                "0,1".into(),
                "--samples".into(),
                "200000".into(),
            ],
        ),
        (
            "contact",
            vec![
                "contact".into(),
                "--spec".into(),
                discs.display().to_string(),
                "--q".into(),
                "1,0".into(),
                "--realizations".into(),
                "500".into(),
            ],
        ),
        (
            "contact",
            vec![
                "contact".into(),
                "--spec".into(),
                boxes.display().to_string(),
                "--q".into(),
                "0,1".into(),
                "--realizations".into(),
                "500".into(),
            ],
        ),
        ("counterexample", vec!["counterexample".into(), "--m-max".into(), "12".into(), "--samples".into(), "1024".into()]),
        ("suite", vec!["suite".into(), "smoke".into()]),
    ];
    let mut notes = Vec::new();
    for (k, (stem, args)) in runs.iter().enumerate() {
        let mut outputs = Vec::new();
        for (threads, rep) in [("1", 0), ("4", 0), ("4", 1)] {
            let out = dir.path().join(format!("{k}-{threads}-{rep}"));
            let status = Command::new(bin)
                .args(args)
                .args(["--seed", "11", "--threads", "4", "--out-dir"])
                .arg(&out)
                .env("PERIMETRY_THREADS", threads)
                .output()
                .map_err(|e| e.to_string())?;
            if !status.status.success() {
                return Err(format!("{stem} exited with {:?}: {}", status.status.code(), String::from_utf8_lossy(&status.stderr)));
            }
            outputs.push(std::fs::read(out.join(format!("{stem}.csv"))).map_err(|e| e.to_string())?);
        }
        if outputs.iter().any(|o| o != &outputs[0]) {
            return Err(format!("{stem}: CSV differs across reruns / worker counts"));
        }
        let text = String::from_utf8_lossy(&outputs[0]);
        if !text.starts_with("# config_sha256=") || !text.contains("\n# seed=11\n") {
            return Err(format!("{stem}: CSV lacks provenance lines"));
        }
        notes.push(format!("{stem} ({} bytes)", outputs[0].len()));
    }
    Ok(format!("byte-identical at 1 and 4 workers and on rerun: {}", notes.join(", ")))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Verdict); 11] = [
        ("dilation derivative on polytopes", criterion_1),
        ("dilation derivative on the disc", criterion_2),
        ("covariogram derivative", criterion_3),
        ("Minkowski relation and rasterization", criterion_4),
        ("Q-variation ladder", criterion_5),
        ("rotation averaging", criterion_6),
        ("counterexample growth", criterion_7),
        ("Boolean model, isotropic discs", criterion_8),
        ("Boolean model, boxes", criterion_9),
        ("discrete shift inequality and monotone dilation", criterion_10),
        ("determinism", criterion_11),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let verdict = f();
        let secs = t.elapsed().as_secs_f64();
        let (tag, detail) = match verdict {
            Ok(d) => ("PASS", d),
            Err(d) => {
                failed += 1;
                ("FAIL", d)
            }
        };
        println!("[{tag}] {:>2}. {name} ({secs:.1}s): {detail}", i + 1);
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
