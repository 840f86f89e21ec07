//! Invariant batteries run by `perimetry suite`.

use std::f64::consts::{PI, TAU};
use std::time::Instant;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::boolean::{self, BooleanModelSpec, BooleanSampling, GrainLaw, Window};
use crate::dilation::{self, counterexample, dilation_rhs, qvariation, CounterexampleConfig, SamplerConfig};
use crate::geom::{circumradius, inradius_in_span, mean_width, span_basis, sphere_quadrature, StructuringElement, Vector};
use crate::gridset::{GridSet, DEFAULT_VOXEL_CAP};
use crate::sampling::stream_rng;
use crate::shapes::{Atom, Shape, SurfaceMeasure};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Level {
    Smoke,
    Full,
}

/// Deliberate corruptions used to confirm that a battery detects them.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Fault {
    /// One surface atom gets a normal of length 1.5.
    CorruptSurfaceMeasure,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckResult {
    pub name: String,
    pub passed: bool,
    pub detail: String,
    pub seconds: f64,
}

struct Ctx {
    level: Level,
    faults: Vec<Fault>,
    seed: u64,
}

impl Ctx {
    fn pick(&self, smoke: usize, full: usize) -> usize {
        match self.level {
            Level::Smoke => smoke,
            Level::Full => full,
        }
    }

    fn rng(&self, stream: u64) -> ChaCha8Rng {
        stream_rng(self.seed, stream)
    }
}

type Outcome = std::result::Result<String, String>;

/// Runs every battery for `level`; `faults` are injected where they apply.
pub fn run_suite(level: Level, faults: &[Fault], seed: u64) -> Vec<CheckResult> {
    let ctx = Ctx { level, faults: faults.to_vec(), seed };
    let mut checks: Vec<(&str, fn(&Ctx) -> Outcome)> = vec![
        ("geom.support-pos", support_pos),
        ("geom.mean-width", mean_width_check),
        ("geom.circumradius", circumradius_check),
        ("shapes.surface-measure-valid", surface_measures_valid),
        ("shapes.minkowski-relation", minkowski_relation),
        ("shapes.cube-mass", cube_mass),
        ("gridset.dilation-monotone", dilation_monotone),
        ("gridset.shift-equivariance", shift_equivariance),
        ("gridset.shift-loss-bound", shift_loss_bound),
        ("dilation.cosine-identity", cosine_identity),
        ("dilation.ladder", ladder),
        ("dilation.translation-invariance", translation_invariance),
        ("dilation.origin-invariance", origin_invariance),
        ("dilation.rotation-average", rotation_average),
        ("boolean.rose-mass", rose_mass),
        ("boolean.isotropic-consistency", isotropic_consistency),
        ("boolean.contact-trivial", contact_trivial),
        ("boolean.contact-monotone", contact_monotone),
        ("boolean.reproducible", reproducible),
        ("boolean.window-growth", window_growth),
    ];
    if level == Level::Full {
        checks.push(("boolean.perimeter-consistency", perimeter_paths));
        checks.push(("boolean.volume-fraction", volume_fraction_oracle));
        checks.push(("dilation.counterexample-growth", counterexample_growth));
    }
    checks
        .into_iter()
        .map(|(name, f)| {
            let t = Instant::now();
            let out = f(&ctx);
            let seconds = t.elapsed().as_secs_f64();
            let (passed, detail) = match out {
                Ok(d) => (true, d),
                Err(d) => (false, d),
            };
            CheckResult { name: name.to_string(), passed, detail, seconds }
        })
        .collect()
}

fn fail<T>(msg: impl Into<String>) -> std::result::Result<T, String> {
    Err(msg.into())
}

fn e<T, E: std::fmt::Display>(r: std::result::Result<T, E>) -> std::result::Result<T, String> {
    r.map_err(|e| e.to_string())
}

/// Convex polygon: hull of 3..=12 random points in [−1, 1]².
pub fn random_polygon(rng: &mut impl Rng) -> Shape {
    loop {
        let k = rng.random_range(3..=12);
        let pts: Vec<Vec<f64>> = (0..k).map(|_| vec![rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)]).collect();
        if let Ok(s) = Shape::polytope(pts) {
            if s.volume() > 1e-3 {
                return s;
            }
        }
    }
}

/// 1..=`max` random points in [−1, 1]ⁿ.
pub fn random_q(rng: &mut impl Rng, n: usize, max: usize) -> StructuringElement {
    let k = rng.random_range(1..=max);
    let pts = (0..k).map(|_| Vector::new((0..n).map(|_| rng.random_range(-1.0..1.0)).collect())).collect();
    StructuringElement::new(pts).expect("nonempty")
}

/// Random blob: union of a few discs rasterized at spacing 1/64.
pub fn random_blob(rng: &mut impl Rng) -> GridSet {
    let discs: Vec<([f64; 2], f64)> = (0..rng.random_range(1..=4))
        .map(|_| ([rng.random_range(0.25..0.75), rng.random_range(0.25..0.75)], rng.random_range(0.05..0.25)))
        .collect();
    GridSet::from_fn(vec![0.0, 0.0], 1.0 / 64.0, &[64, 64], DEFAULT_VOXEL_CAP, |x| {
        discs.iter().any(|(c, r)| (x[0] - c[0]).powi(2) + (x[1] - c[1]).powi(2) <= r * r)
    })
    .expect("small grid")
}

fn support_pos(ctx: &Ctx) -> Outcome {
    let mut rng = ctx.rng(1);
    let trials = ctx.pick(200, 2000);
    for _ in 0..trials {
        let q = random_q(&mut rng, 3, 6);
        let u = Vector::new((0..3).map(|_| rng.random_range(-1.0..1.0)).collect());
        let (h, hp) = (e(q.support(&u))?, e(q.support_pos(&u))?);
        if hp != h.max(0.0) || hp != e(q.with_origin().support(&u))? {
            return fail(format!("h = {h}, h+ = {hp} for u = {u:?}"));
        }
    }
    Ok(format!("{trials} random (Q, u)"))
}

fn mean_width_check(_: &Ctx) -> Outcome {
    let quad = e(sphere_quadrature(2, 4096))?;
    let seg = e(StructuringElement::parse("1,0"))?;
    let b = e(mean_width(&seg, &quad))?;
    if (b - 2.0 / PI).abs() > 1e-6 {
        return fail(format!("segment mean width {b}"));
    }
    Ok(format!("segment b = {b:.9}"))
}

fn circumradius_check(ctx: &Ctx) -> Outcome {
    let mut rng = ctx.rng(2);
    let trials = ctx.pick(200, 2000);
    for _ in 0..trials {
        let q = random_q(&mut rng, 3, 8);
        let r = circumradius(&q);
        let far = q.points().iter().map(|p| p.norm()).fold(0.0, f64::max);
        // The ball is no larger than the one centred at 0, and at least half the diameter.
        let diam = q
            .with_origin()
            .points()
            .iter()
            .flat_map(|a| q.with_origin().points().iter().map(move |b| (a - b).norm()).collect::<Vec<_>>())
            .fold(0.0, f64::max);
        if r > far + 1e-12 || r < 0.5 * diam - 1e-12 {
            return fail(format!("radius {r} outside [{}, {far}]", 0.5 * diam));
        }
    }
    Ok(format!("{trials} random Q"))
}

fn measures(ctx: &Ctx, stream: u64, count: usize) -> std::result::Result<Vec<SurfaceMeasure>, String> {
    let mut rng = ctx.rng(stream);
    let mut out: Vec<SurfaceMeasure> =
        (0..count).map(|_| e(random_polygon(&mut rng).surface_measure(0))).collect::<std::result::Result<_, _>>()?;
    if ctx.faults.contains(&Fault::CorruptSurfaceMeasure) {
        let mut atoms = out[0].atoms().to_vec();
        atoms[0] = Atom { normal: &atoms[0].normal * 1.5, weight: atoms[0].weight };
        out[0] = SurfaceMeasure::new_unchecked(atoms);
    }
    Ok(out)
}

fn surface_measures_valid(ctx: &Ctx) -> Outcome {
    let count = ctx.pick(20, 100);
    for (i, s) in measures(ctx, 3, count)?.iter().enumerate() {
        if let Err(err) = s.validate() {
            return fail(format!("polygon {i}: {err}"));
        }
    }
    Ok(format!("{count} random polygons"))
}

fn minkowski_relation(ctx: &Ctx) -> Outcome {
    let count = ctx.pick(20, 100);
    let mut worst = 0.0f64;
    for s in measures(ctx, 3, count)? {
        worst = worst.max(s.vector_sum().norm());
    }
    let disc = e(e(Shape::ball(vec![0.0, 0.0], 1.0))?.surface_measure(1024))?;
    let disc_sum = disc.vector_sum().norm();
    if worst > 1e-9 || disc_sum > 1e-9 {
        return fail(format!("|Σ w ν| = {worst:e} (polygons), {disc_sum:e} (disc)"));
    }
    Ok(format!("max |Σ w ν| = {worst:.1e} over {count} polygons"))
}

fn cube_mass(_: &Ctx) -> Outcome {
    for n in 1..=3 {
        let m = e(e(Shape::unit_cube(n))?.surface_measure(0))?.total_mass();
        if m != 2.0 * n as f64 {
            return fail(format!("n = {n}: mass {m}"));
        }
    }
    Ok("2n for n = 1, 2, 3".into())
}

fn dilation_monotone(ctx: &Ctx) -> Outcome {
    let mut rng = ctx.rng(4);
    let trials = ctx.pick(30, 200);
    for t in 0..trials {
        let g = random_blob(&mut rng);
        let q = random_q(&mut rng, 2, 3);
        let r = rng.random_range(0.1..0.3) / q.max_norm().max(0.1);
        let d = match g.dilate(&q, r) {
            Ok(d) => d,
            Err(crate::Error::OffsetResolution { .. }) => continue,
            Err(err) => return fail(err.to_string()),
        };
        let h = g.spacing();
        let contained = g.iter_set().all(|idx| {
            let c = g.voxel_center(&idx);
            let j: Vec<i64> = c.iter().zip(d.origin()).map(|(x, o)| ((x - o) / h).floor() as i64).collect();
            d.get_signed(&j)
        });
        // A superset Q ∪ {extra} must dilate to a superset.
        let mut pts = q.points().to_vec();
        pts.push(Vector::new(vec![rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)]));
        let bigger = e(StructuringElement::new(pts))?;
        let grows = match g.dilate(&bigger, r) {
            Ok(b) => b.count() >= d.count(),
            Err(_) => true,
        };
        if !contained || d.count() < g.count() || !grows {
            return fail(format!("trial {t}: contained {contained}, counts {} -> {}", g.count(), d.count()));
        }
    }
    Ok(format!("{trials} random blobs"))
}

fn shift_equivariance(ctx: &Ctx) -> Outcome {
    let mut rng = ctx.rng(5);
    let trials = ctx.pick(10, 50);
    for t in 0..trials {
        let g = random_blob(&mut rng);
        let q = e(StructuringElement::parse("0.25,0;0,-0.125"))?;
        let shift = [rng.random_range(-8..8i64), rng.random_range(-8..8i64)];
        let a = e(g.translate_voxels(&shift).dilate(&q, 1.0))?;
        let b = e(g.dilate(&q, 1.0))?.translate_voxels(&shift);
        if !a.same_set_as(&b) {
            return fail(format!("trial {t}: shift {shift:?}"));
        }
    }
    Ok(format!("{trials} random shifts"))
}

fn shift_loss_bound(ctx: &Ctx) -> Outcome {
    let mut rng = ctx.rng(6);
    let trials = ctx.pick(100, 500);
    for t in 0..trials {
        let g = random_blob(&mut rng);
        let axis = rng.random_range(0..2);
        let positive = rng.random::<bool>();
        let s = rng.random_range(1..20usize);
        let (loss, exits) = (g.shift_loss(axis, s, positive), g.exits(axis, positive));
        if loss > s as u64 * exits {
            return fail(format!("trial {t}: loss {loss} > {s}·{exits}"));
        }
    }
    Ok(format!("{trials} random (grid, axis, r)"))
}

fn cosine_identity(ctx: &Ctx) -> Outcome {
    let mut rng = ctx.rng(7);
    let count = ctx.pick(20, 100);
    for s in measures(ctx, 8, count)? {
        let u = Vector::from_angle(rng.random_range(0.0..TAU));
        let (a, b) = (2.0 * e(qvariation(&s, &e(StructuringElement::new(vec![u.clone()]))?))?, e(s.cosine_transform(&u))?);
        if (a - b).abs() > 1e-9 * b.max(1.0) {
            return fail(format!("2 V^u = {a}, cosine transform = {b}"));
        }
    }
    Ok(format!("{count} polygons"))
}

fn ladder(ctx: &Ctx) -> Outcome {
    let mut rng = ctx.rng(9);
    let count = ctx.pick(30, 100);
    let quad = e(sphere_quadrature(2, 256))?;
    for t in 0..count {
        let a = random_polygon(&mut rng);
        let s = e(a.surface_measure(0))?;
        let q = random_q(&mut rng, 2, 6);
        let v = e(qvariation(&s, &q))?;
        let (inr, _) = e(inradius_in_span(&q, &quad))?;
        let vl = s.projected_variation(&span_basis(&q));
        let upper = circumradius(&q) * a.perimeter();
        if inr * vl > v + 1e-12 || v > upper + 1e-12 {
            return fail(format!("pair {t}: {} ≤ {v} ≤ {upper} violated", inr * vl));
        }
    }
    Ok(format!("{count} (polygon, Q) pairs, zero violations"))
}

fn translation_invariance(ctx: &Ctx) -> Outcome {
    let mut rng = ctx.rng(10);
    let count = ctx.pick(20, 100);
    for s in measures(ctx, 11, count)? {
        let q = random_q(&mut rng, 2, 5).with_origin();
        let x = q.points()[rng.random_range(0..q.len())].clone();
        let shifted = e(q.translated(&-&x))?;
        let (a, b) = (e(dilation_rhs(&s, &shifted))?, e(dilation_rhs(&s, &q))? - x.dot(&s.vector_sum()));
        if (a - b).abs() > 1e-9 {
            return fail(format!("{a} vs {b}"));
        }
    }
    Ok(format!("{count} polygons"))
}

fn origin_invariance(ctx: &Ctx) -> Outcome {
    let mut rng = ctx.rng(12);
    let trials = ctx.pick(20, 100);
    for _ in 0..trials {
        let lo = [rng.random_range(-1.0..0.0), rng.random_range(-1.0..0.0)];
        let a = e(Shape::axis_box(&lo, &[lo[0] + rng.random_range(0.1..1.0), lo[1] + rng.random_range(0.1..1.0)]))?;
        let q = random_q(&mut rng, 2, 4);
        let r = rng.random_range(0.01..0.2);
        let cfg = SamplerConfig::default();
        let (g1, g2) = (e(dilation::dilation_excess(&a, &q, r, &cfg))?, e(dilation::dilation_excess(&a, &q.with_origin(), r, &cfg))?);
        let s = e(a.surface_measure(0))?;
        let (h1, h2) = (e(dilation_rhs(&s, &q))?, e(dilation_rhs(&s, &q.with_origin()))?);
        if (g1.value - g2.value).abs() > 1e-12 || (h1 - h2).abs() > 1e-12 {
            return fail(format!("G {} vs {}, rhs {h1} vs {h2}", g1.value, g2.value));
        }
    }
    Ok(format!("{trials} boxes"))
}

fn rotation_average(ctx: &Ctx) -> Outcome {
    let mut rng = ctx.rng(13);
    let (pairs, rotations) = (ctx.pick(2, 10), ctx.pick(2000, 10_000));
    let mut worst = 0.0f64;
    for t in 0..pairs {
        let a = random_polygon(&mut rng);
        let s = e(a.surface_measure(0))?;
        let q = random_q(&mut rng, 2, 6);
        let vals: Vec<f64> = (0..rotations)
            .map(|_| e(q.rotated(rng.random_range(0.0..TAU))).and_then(|qr| e(qvariation(&s, &qr))))
            .collect::<std::result::Result<_, _>>()?;
        let est = boolean_mean(&vals);
        let want = 0.5 * e(boolean::planar_mean_width(&q))? * a.perimeter();
        let z = (est.0 - want) / est.1;
        worst = worst.max(z.abs());
        if z.abs() > 3.0 {
            return fail(format!("pair {t}: mean {} ± {} vs {want}", est.0, est.1));
        }
    }
    Ok(format!("{pairs} pairs × {rotations} rotations, max |z| = {worst:.2}"))
}

fn boolean_mean(v: &[f64]) -> (f64, f64) {
    let m = v.len() as f64;
    let mean = v.iter().sum::<f64>() / m;
    let var = v.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (m - 1.0);
    (mean, (var / m).sqrt())
}

fn disc_model() -> BooleanModelSpec {
    BooleanModelSpec::discs(0.1, 5.0, 0.2)
}

fn box_model() -> BooleanModelSpec {
    BooleanModelSpec { intensity: 10.0, grain: GrainLaw::FixedBox { half_extents: vec![0.1, 0.05], angle: 0.0 }, ..disc_model() }
}

fn rose_mass(_: &Ctx) -> Outcome {
    for spec in [disc_model(), box_model()] {
        let m = e(boolean::rose(&spec))?.mass();
        if (m - 1.0).abs() > 1e-12 {
            return fail(format!("rose mass {m}"));
        }
    }
    Ok("disc and box models".into())
}

fn isotropic_consistency(ctx: &Ctx) -> Outcome {
    let mut rng = ctx.rng(14);
    let rose = e(boolean::rose(&disc_model()))?;
    let trials = ctx.pick(20, 100);
    let mut worst = 0.0f64;
    for _ in 0..trials {
        let q = random_q(&mut rng, 2, 6);
        let (a, b) = (e(rose.support_integral(&q))?, 0.5 * e(boolean::planar_mean_width(&q))?);
        worst = worst.max((a - b).abs());
    }
    if worst > 1e-6 {
        return fail(format!("max difference {worst:e}"));
    }
    Ok(format!("{trials} random Q, max difference {worst:.1e}"))
}

fn contact_trivial(ctx: &Ctx) -> Outcome {
    let cfg = BooleanSampling { realizations: ctx.pick(50, 500), seed: ctx.seed, ..Default::default() };
    let spec = disc_model();
    let q = e(StructuringElement::parse("1,0"))?;
    let h = e(boolean::contact_distribution(&spec, &q, &[0.0, 0.01], &cfg))?;
    let h0 = e(boolean::contact_distribution(&spec, &StructuringElement::origin(2), &[0.01], &cfg))?;
    let hq = e(boolean::contact_distribution(&spec, &q.with_origin(), &[0.0, 0.01], &cfg))?;
    if h[0].1.value != 0.0 || h0[0].1.value != 0.0 || h != hq {
        return fail(format!("H(0) = {}, H_{{0}} = {}, Q ∪ {{0}} differs: {}", h[0].1.value, h0[0].1.value, h != hq));
    }
    Ok("H(0) = 0, H_{0} = 0, Q ∪ {0} identical".into())
}

fn contact_monotone(ctx: &Ctx) -> Outcome {
    let cfg = BooleanSampling { realizations: ctx.pick(200, 2000), seed: ctx.seed, ..Default::default() };
    let r = [0.0025, 0.005, 0.01, 0.02, 0.04];
    let h = e(boolean::contact_distribution(&disc_model(), &e(StructuringElement::parse("1,0;0,1"))?, &r, &cfg))?;
    for w in h.windows(2) {
        if w[1].1.value < w[0].1.value - 3.0 * w[0].1.std_err.hypot(w[1].1.std_err) {
            return fail(format!("H({}) = {} < H({}) = {}", w[1].0, w[1].1.value, w[0].0, w[0].1.value));
        }
    }
    Ok(format!("{} radii", r.len()))
}

fn reproducible(ctx: &Ctx) -> Outcome {
    let cfg = BooleanSampling { realizations: ctx.pick(100, 1000), seed: ctx.seed, ..Default::default() };
    let q = e(StructuringElement::parse("1,0"))?;
    let run = || boolean::contact_estimates(&disc_model(), &q, &[0.005, 0.01], &cfg);
    let single = e(rayon::ThreadPoolBuilder::new().num_threads(1).build())?.install(run);
    let many = e(rayon::ThreadPoolBuilder::new().num_threads(4).build())?.install(run);
    if e(single)? != e(many)? {
        return fail("1 and 4 workers disagree");
    }
    Ok("1 and 4 workers bit-identical".into())
}

fn window_growth(ctx: &Ctx) -> Outcome {
    let n = ctx.pick(300, 3000);
    let small = disc_model();
    let large = BooleanModelSpec { window: Window { min: vec![0.0, 0.0], max: vec![2.0, 2.0] }, ..small.clone() };
    let cfg = BooleanSampling { realizations: n, seed: ctx.seed, ..Default::default() };
    let (a, b) = (e(boolean::specific_perimeter(&small, &cfg))?, e(boolean::specific_perimeter(&large, &cfg))?);
    let z = a.z_score(&b);
    if z.abs() > 3.0 {
        return fail(format!("P̄ {} vs {}, z = {z:.2}", a.value, b.value));
    }
    Ok(format!("side 1: {:.4}, side 2: {:.4}, z = {z:.2}", a.value, b.value))
}

fn perimeter_paths(ctx: &Ctx) -> Outcome {
    let cfg = BooleanSampling { realizations: 100, seed: ctx.seed, ..Default::default() };
    for spec in [disc_model(), box_model()] {
        let c = e(boolean::perimeter_consistency(&spec, &cfg, 0.002))?;
        if c.z.abs() > 3.0 {
            return fail(format!("exact {} vs grid {}, z = {:.2}", c.exact.value, c.grid.value, c.z));
        }
    }
    Ok("disc and box models, 100 shared realizations".into())
}

fn volume_fraction_oracle(ctx: &Ctx) -> Outcome {
    let cfg = BooleanSampling { realizations: 5000, seed: ctx.seed, ..Default::default() };
    for spec in [disc_model(), box_model()] {
        let p = e(boolean::volume_fraction(&spec, &cfg))?;
        let want = boolean::analytic_volume_fraction(&spec);
        if !p.agrees_with(want, 3.0) {
            return fail(format!("p̄ {} ± {} vs {want}", p.value, p.std_err));
        }
    }
    Ok("disc and box models".into())
}

fn counterexample_growth(ctx: &Ctx) -> Outcome {
    let rep = e(counterexample(&CounterexampleConfig { m_max: 12, seed: ctx.seed, ..Default::default() }))?;
    let at = |m: usize| rep.points.iter().find(|p| p.m == m).map(|p| p.ratio.value);
    let (Some(r6), Some(r12)) = (at(6), at(12)) else { return fail("missing ratios") };
    if r12 / r6 < 4.0 || r12 <= rep.vq_bound || rep.points.iter().any(|p| p.ratio.value < p.lower_bound) {
        return fail(format!("ratio(12)/ratio(6) = {:.2}, ratio(12) = {r12:.2}, bound {:.3}", r12 / r6, rep.vq_bound));
    }
    Ok(format!("ratio(12)/ratio(6) = {:.2}", r12 / r6))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn injected_fault_is_reported() {
        let ctx = Ctx { level: Level::Smoke, faults: vec![Fault::CorruptSurfaceMeasure], seed: 1 };
        assert!(surface_measures_valid(&ctx).is_err());
        let clean = Ctx { faults: vec![], ..ctx };
        assert!(surface_measures_valid(&clean).is_ok());
    }
}
