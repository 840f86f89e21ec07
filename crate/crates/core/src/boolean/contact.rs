//! Contact distribution functions and the first-order check of their slope
//! at zero.
//!
//! `F(r) = λ({x ∈ W : x ∉ Z, x + rq ∈ Z for some q ∈ Q}) / λ(W)` is sampled
//! on the union of grain shells of width `d = r_max·max|q|`, which contains
//! every such `x`. A point is drawn from a shell chosen with probability
//! proportional to its volume and weighted by one over the number of shells
//! covering it, which makes the union estimate unbiased. The same points
//! serve every `r`.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::analytic::AnalyticOracles;
use super::perimeter::{specific_perimeter, specific_perimeter_grid};
use super::{analytic_contact, covered_fraction, mean_estimate, per_realization, planar_mean_width, rose};
use super::{BooleanModelSpec, BooleanSampling, Realization, Window};
use crate::error::{ensure_dim, Error, Result};
use crate::geom::StructuringElement;
use crate::sampling::Estimate;

struct Sample {
    f: Vec<f64>,
    p: f64,
}

fn validate_radii(r: &[f64]) -> Result<()> {
    if r.is_empty() || r.iter().any(|v| !(v.is_finite() && *v >= 0.0)) {
        return Err(Error::InvalidInput("radii must be a nonempty list of nonnegative numbers".into()));
    }
    Ok(())
}

fn shell_estimate(z: &Realization, w: &Window, q: &StructuringElement, r: &[f64], shells: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
    let mut f = vec![0.0; r.len()];
    let r_max = r.iter().copied().fold(0.0, f64::max);
    let d = r_max * q.max_norm();
    let qs: Vec<&[f64]> = q.points().iter().filter(|p| !p.is_zero()).map(|p| p.coords()).collect();
    if d == 0.0 || qs.is_empty() || shells == 0 {
        return f;
    }
    let grains = z.near(w, d);
    let mut cumulative = Vec::with_capacity(grains.len());
    let mut total = 0.0;
    for g in &grains {
        total += g.shell_volume(d);
        cumulative.push(total);
    }
    if total == 0.0 {
        return f;
    }
    let n = w.min.len();
    let (mut x, mut y) = ([0.0; 3], [0.0; 3]);
    for _ in 0..shells {
        let u = total * rng.random::<f64>();
        let j = cumulative.partition_point(|c| *c <= u).min(grains.len() - 1);
        grains[j].sample_shell(d, rng, &mut x);
        let x = &x[..n];
        if !w.contains(x) || grains.iter().any(|g| g.contains(x)) {
            continue;
        }
        let cover = grains.iter().filter(|g| g.in_shell(x, d)).count().max(1) as f64;
        for (k, &rk) in r.iter().enumerate() {
            let hit = qs.iter().any(|qp| {
                for i in 0..n {
                    y[i] = x[i] + rk * qp[i];
                }
                grains.iter().any(|g| g.contains(&y[..n]))
            });
            if hit {
                f[k] += 1.0 / cover;
            }
        }
    }
    let scale = total / shells as f64 / w.volume();
    f.iter_mut().for_each(|v| *v *= scale);
    f
}

fn contact_samples(spec: &BooleanModelSpec, q: &StructuringElement, r: &[f64], cfg: &BooleanSampling) -> Result<Vec<Sample>> {
    spec.validate()?;
    cfg.validate()?;
    ensure_dim(spec.dim, q.dim())?;
    validate_radii(r)?;
    let r_max = r.iter().copied().fold(0.0, f64::max);
    spec.check_margin(r_max * q.max_norm())?;
    let w = &spec.window;
    Ok(per_realization(spec, cfg, |z, rng| {
        let p = covered_fraction(z, w, cfg.points, rng);
        Sample { f: shell_estimate(z, w, q, r, cfg.shell_samples, rng), p }
    }))
}

/// `H_Q(r)` and `(1 − p̄) H_Q(r)` at each radius, with p̄ from the same
/// realizations.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ContactEstimates {
    pub r_values: Vec<f64>,
    pub h: Vec<Estimate>,
    /// `(1 − p̄) H_Q(r) = P(0 ∉ Z, rQ ∩ Z ≠ ∅)`.
    pub f: Vec<Estimate>,
    pub volume_fraction: Estimate,
}

fn summarize(r: &[f64], q: &StructuringElement, samples: &[Sample]) -> Result<ContactEstimates> {
    let p: Vec<f64> = samples.iter().map(|s| s.p).collect();
    let p_bar = mean_estimate(&p);
    if p_bar.value >= 1.0 - 3.0 * p_bar.std_err {
        return Err(Error::DegenerateConditioning { p_bar: p_bar.value, std_err: p_bar.std_err });
    }
    let void = 1.0 - p_bar.value;
    let trivial = q.is_origin_only();
    let (mut h, mut f) = (Vec::with_capacity(r.len()), Vec::with_capacity(r.len()));
    for (k, &rk) in r.iter().enumerate() {
        if rk == 0.0 || trivial {
            h.push(Estimate::exact(0.0));
            f.push(Estimate::exact(0.0));
            continue;
        }
        let fk: Vec<f64> = samples.iter().map(|s| s.f[k]).collect();
        let fe = mean_estimate(&fk);
        // Delta method for F̄ / (1 − p̄), paired per realization.
        let g: Vec<f64> = samples.iter().zip(&p).map(|(s, pi)| s.f[k] / void + fe.value * (pi - p_bar.value) / (void * void)).collect();
        let ge = mean_estimate(&g);
        h.push(Estimate { value: fe.value / void, ..ge });
        f.push(fe);
    }
    Ok(ContactEstimates { r_values: r.to_vec(), h, f, volume_fraction: p_bar })
}

pub fn contact_estimates(spec: &BooleanModelSpec, q: &StructuringElement, r: &[f64], cfg: &BooleanSampling) -> Result<ContactEstimates> {
    let samples = contact_samples(spec, q, r, cfg)?;
    summarize(r, q, &samples)
}

/// `(r, H_Q(r))` pairs.
pub fn contact_distribution(
    spec: &BooleanModelSpec,
    q: &StructuringElement,
    r: &[f64],
    cfg: &BooleanSampling,
) -> Result<Vec<(f64, Estimate)>> {
    let c = contact_estimates(spec, q, r, cfg)?;
    Ok(c.r_values.into_iter().zip(c.h).collect())
}

/// How P̄ was measured for the right-hand side.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum PerimeterPath {
    Census,
    Grid { h: f64, realizations: usize },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HPrimeReport {
    pub contact: ContactEstimates,
    /// Slope `a` and curvature `c` of `(1 − p̄) H_Q(r) ≈ a r + c r²`.
    pub slope: Estimate,
    pub curvature: Estimate,
    pub specific_perimeter: Estimate,
    pub perimeter_path: PerimeterPath,
    /// P̄ ∫ h(−Q, v)⁺ ℛ*(dv) with the measured P̄.
    pub rose_form: Estimate,
    /// ½ b(conv(Q ∪ {0})) P̄ for isotropic planar models.
    pub mean_width_form: Option<Estimate>,
    pub z_rose: f64,
    pub z_mean_width: Option<f64>,
    pub analytic: AnalyticOracles,
    /// Closed-form `(1 − p̄) H_Q(r)` at the schedule, when available.
    pub analytic_f: Option<Vec<f64>>,
}

/// `{0.02, 0.01, 0.005, 0.0025}` times the grain radius scale, shrunk so
/// that `r·max|q|` stays within that range.
pub fn default_schedule(spec: &BooleanModelSpec, q: &StructuringElement) -> Vec<f64> {
    let s = spec.radius_scale() / q.max_norm().max(1.0);
    [0.02, 0.01, 0.005, 0.0025].iter().map(|f| f * s).collect()
}

/// Coefficients `α, β` with `a = Σ αₖ Fₖ`, `c = Σ βₖ Fₖ` for the weighted
/// fit of `F = a r + c r²` with weights `1/r`.
fn fit_weights(r: &[f64]) -> Option<(Vec<f64>, Vec<f64>)> {
    let (mut s2, mut s3, mut s4) = (0.0, 0.0, 0.0);
    for &x in r {
        let w = 1.0 / x;
        s2 += w * x * x;
        s3 += w * x * x * x;
        s4 += w * x * x * x * x;
    }
    let det = s2 * s4 - s3 * s3;
    if !(det > 1e-300 * s2 * s4) {
        return None;
    }
    let alpha = r.iter().map(|&x| (s4 * x - s3 * x * x) / (x * det)).collect();
    let beta = r.iter().map(|&x| (s2 * x * x - s3 * x) / (x * det)).collect();
    Some((alpha, beta))
}

/// Slope of `(1 − p̄) H_Q` at 0 against `P̄ ∫ h(−Q, v)⁺ ℛ*(dv)` and, for
/// isotropic planar models, against `½ b(conv(Q ∪ {0})) P̄`.
pub fn hprime_check(
    spec: &BooleanModelSpec,
    q: &StructuringElement,
    schedule: Option<&[f64]>,
    cfg: &BooleanSampling,
) -> Result<HPrimeReport> {
    let r: Vec<f64> = match schedule {
        Some(s) => s.to_vec(),
        None => default_schedule(spec, q),
    };
    validate_radii(&r)?;
    if r.contains(&0.0) {
        return Err(Error::InvalidInput("the slope schedule needs positive radii".into()));
    }
    let (alpha, beta) =
        fit_weights(&r).ok_or_else(|| Error::InvalidInput("the slope schedule needs at least two distinct radii".into()))?;
    let samples = contact_samples(spec, q, &r, cfg)?;
    let contact = summarize(&r, q, &samples)?;
    let combine = |c: &[f64]| -> Estimate {
        if q.is_origin_only() {
            return Estimate::exact(0.0);
        }
        let v: Vec<f64> = samples.iter().map(|s| s.f.iter().zip(c).map(|(f, a)| f * a).sum()).collect();
        mean_estimate(&v)
    };
    let (slope, curvature) = (combine(&alpha), combine(&beta));

    let (specific_perimeter, perimeter_path) = if spec.dim == 2 {
        (specific_perimeter(spec, cfg)?, PerimeterPath::Census)
    } else {
        let h = spec.radius_scale() / 16.0;
        let sub = BooleanSampling { realizations: cfg.realizations.min(GRID_REALIZATIONS), ..*cfg };
        (specific_perimeter_grid(spec, &sub, h)?, PerimeterPath::Grid { h, realizations: sub.realizations })
    };
    let rose_integral = rose(spec)?.support_integral(q)?;
    let times = |e: Estimate, c: f64| Estimate { value: e.value * c, std_err: (e.std_err * c).abs().max(f64::MIN_POSITIVE), ..e };
    let rose_form = times(specific_perimeter, rose_integral);
    let mean_width_form = match rose(spec)?.is_uniform() && spec.dim == 2 {
        true => Some(times(specific_perimeter, 0.5 * planar_mean_width(q)?)),
        false => None,
    };
    let analytic_f = r.iter().map(|&x| analytic_contact(spec, q, x)).collect::<Result<Option<Vec<f64>>>>()?;
    Ok(HPrimeReport {
        z_rose: slope.z_score(&rose_form),
        z_mean_width: mean_width_form.map(|m| slope.z_score(&m)),
        contact,
        slope,
        curvature,
        specific_perimeter,
        perimeter_path,
        rose_form,
        mean_width_form,
        analytic: AnalyticOracles::new(spec, q)?,
        analytic_f,
    })
}

/// Realizations rasterized when P̄ needs the grid path.
const GRID_REALIZATIONS: usize = 32;

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fit_weights_reproduce_quadratics() {
        let r = [0.02, 0.01, 0.005, 0.0025];
        let (a, c) = fit_weights(&r).unwrap();
        let f: Vec<f64> = r.iter().map(|x| 0.8 * x - 3.0 * x * x).collect();
        let slope: f64 = a.iter().zip(&f).map(|(a, f)| a * f).sum();
        let curv: f64 = c.iter().zip(&f).map(|(a, f)| a * f).sum();
        assert!((slope - 0.8).abs() < 1e-12 && (curv + 3.0).abs() < 1e-9);
        assert!(fit_weights(&[0.1]).is_none());
    }

    #[test]
    fn trivial_structuring_elements() {
        let s = BooleanModelSpec::discs(0.1, 5.0, 0.2);
        let cfg = BooleanSampling { realizations: 20, ..Default::default() };
        let q0 = StructuringElement::origin(2);
        let c = contact_distribution(&s, &q0, &[0.0, 0.01], &cfg).unwrap();
        assert!(c.iter().all(|(_, h)| h.is_exact() && h.value == 0.0));
        let q = StructuringElement::parse("1,0").unwrap();
        let c = contact_distribution(&s, &q, &[0.0, 0.01], &cfg).unwrap();
        assert_eq!(c[0].1, Estimate::exact(0.0));
        assert!(c[1].1.value > 0.0);
        assert!(matches!(contact_distribution(&s, &q, &[0.2], &cfg), Err(Error::MarginTooSmall { .. })));
    }

    #[test]
    fn disc_contact_matches_closed_form() {
        let s = BooleanModelSpec::discs(0.1, 5.0, 0.2);
        let q = StructuringElement::parse("1,0").unwrap();
        let r = [0.05, 0.02];
        let cfg = BooleanSampling { realizations: 2000, seed: 3, ..Default::default() };
        let c = contact_estimates(&s, &q, &r, &cfg).unwrap();
        for (k, &x) in r.iter().enumerate() {
            let want = analytic_contact(&s, &q, x).unwrap().unwrap();
            assert!(c.f[k].agrees_with(want, 4.0), "r={x}: {:?} vs {want}", c.f[k]);
        }
    }
}
