//! Dilation excess `G(rQ, 1_A) = λ((A ⊕ rQ) ∖ A)`, its first-order slope at
//! `r = 0`, Q-variations and covariograms.

mod counterexample;
mod covariogram;

use serde::{Deserialize, Serialize};

use crate::error::{ensure_dim, Error, Result};
use crate::geom::StructuringElement;
use crate::gridset::GridSet;
use crate::sampling::{derive_seed, linear_fit, stratified_volume, Cell, Estimate, Method, StratifiedConfig};
use crate::shapes::{Shape, SurfaceMeasure};

pub use counterexample::{counterexample, ring_lower_bound, CounterexampleConfig, CounterexampleReport, RatioPoint, RingParams, SparseSet};
pub use covariogram::{covariogram, covariogram_derivative, CovariogramDerivative};

/// Atoms used when a ball's surface measure is needed for a right-hand side.
pub const DEFAULT_BALL_ATOMS: usize = 4096;

/// Coordinate-compression cells allowed for the exact union-of-boxes path.
const MAX_EXACT_CELLS: usize = 1 << 22;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum ExcessMethod {
    /// Exact for axis-aligned boxes, Monte Carlo otherwise.
    Auto,
    Exact,
    MonteCarlo,
    Grid {
        h: f64,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SamplerConfig {
    pub method: ExcessMethod,
    /// Monte Carlo samples per evaluation.
    pub samples: u64,
    pub seed: u64,
}

impl Default for SamplerConfig {
    fn default() -> Self {
        Self { method: ExcessMethod::Auto, samples: 1_000_000, seed: 0 }
    }
}

/// `λ((A ⊕ rQ) ∖ A)`.
pub fn dilation_excess(a: &Shape, q: &StructuringElement, r: f64, cfg: &SamplerConfig) -> Result<Estimate> {
    ensure_dim(a.dim(), q.dim())?;
    if !(r >= 0.0 && r.is_finite()) {
        return Err(Error::InvalidInput(format!("dilation radius must be nonnegative, got {r}")));
    }
    if r == 0.0 || q.is_origin_only() {
        return Ok(Estimate::exact(0.0));
    }
    match cfg.method {
        ExcessMethod::Auto => match box_excess(a, q, r) {
            Some(v) => Ok(Estimate::exact(v)),
            None => Ok(monte_carlo_excess(a, q, r, cfg.samples, cfg.seed)),
        },
        ExcessMethod::Exact => box_excess(a, q, r)
            .map(Estimate::exact)
            .ok_or_else(|| Error::ExactPathUnavailable("dilation excess of a shape other than an axis-aligned box".into())),
        ExcessMethod::MonteCarlo => Ok(monte_carlo_excess(a, q, r, cfg.samples, cfg.seed)),
        ExcessMethod::Grid { h } => grid_excess(a, q, r, h),
    }
}

/// Union of the translates `A + r·q` minus `A`, for an axis-aligned box `A`,
/// by coordinate compression.
fn box_excess(a: &Shape, q: &StructuringElement, r: f64) -> Option<f64> {
    let (lo, hi) = a.as_axis_box()?;
    let boxes: Vec<(Vec<f64>, Vec<f64>)> = std::iter::once((lo.clone(), hi.clone()))
        .chain(q.points().iter().map(|p| {
            let s: Vec<f64> = p.coords().iter().map(|c| r * c).collect();
            (lo.iter().zip(&s).map(|(a, b)| a + b).collect(), hi.iter().zip(&s).map(|(a, b)| a + b).collect())
        }))
        .collect();
    let v = union_volume(&boxes)?;
    Some((v - a.volume()).max(0.0))
}

/// Volume of a union of axis-aligned boxes; `None` if the compressed grid
/// would be too large.
pub fn union_volume(boxes: &[(Vec<f64>, Vec<f64>)]) -> Option<f64> {
    let n = boxes.first()?.0.len();
    let cuts: Vec<Vec<f64>> = (0..n)
        .map(|k| {
            let mut c: Vec<f64> = boxes.iter().flat_map(|(l, h)| [l[k], h[k]]).collect();
            c.sort_by(f64::total_cmp);
            c.dedup();
            c
        })
        .collect();
    let cells: usize = cuts.iter().map(|c| c.len().saturating_sub(1)).product();
    if cells > MAX_EXACT_CELLS {
        return None;
    }
    let mut idx = vec![0usize; n];
    let mut total = 0.0;
    let mut mid = vec![0.0; n];
    'cells: for _ in 0..cells {
        let mut vol = 1.0;
        for k in 0..n {
            mid[k] = 0.5 * (cuts[k][idx[k]] + cuts[k][idx[k] + 1]);
            vol *= cuts[k][idx[k] + 1] - cuts[k][idx[k]];
        }
        if boxes.iter().any(|(l, h)| (0..n).all(|k| l[k] <= mid[k] && mid[k] <= h[k])) {
            total += vol;
        }
        for k in 0..n {
            idx[k] += 1;
            if idx[k] + 1 < cuts[k].len() {
                continue 'cells;
            }
            idx[k] = 0;
        }
    }
    Some(total)
}

/// Stratified sampling restricted to the shell of points within `r·max|q|`
/// of `A` and outside it.
fn monte_carlo_excess(a: &Shape, q: &StructuringElement, r: f64, samples: u64, seed: u64) -> Estimate {
    let reach = r * q.max_norm();
    let (mut lo, mut hi) = a.bbox();
    lo.iter_mut().for_each(|v| *v -= reach);
    hi.iter_mut().for_each(|v| *v += reach);
    let shifts: Vec<Vec<f64>> = q.points().iter().filter(|p| !p.is_zero()).map(|p| p.coords().iter().map(|c| r * c).collect()).collect();
    let cfg = StratifiedConfig { samples, seed, max_cells: (samples as usize / 32).clamp(64, 1 << 20), min_halfdiag: 0.5 * reach };
    let n = a.dim();
    stratified_volume(
        &lo,
        &hi,
        &cfg,
        |c, hd| {
            let d = a.signed_distance_bound(c);
            if d < -hd || d - hd > reach {
                Cell::Empty
            } else {
                Cell::Mixed
            }
        },
        |x| {
            if a.contains(x) {
                return false;
            }
            let mut y = [0.0; 3];
            shifts.iter().any(|s| {
                for k in 0..n {
                    y[k] = x[k] - s[k];
                }
                a.contains(&y[..n])
            })
        },
    )
}

fn grid_excess(a: &Shape, q: &StructuringElement, r: f64, h: f64) -> Result<Estimate> {
    let g = GridSet::rasterize(a, h, 2.0 * h)?;
    let d = g.dilate(q, r)?;
    let value = d.volume() - g.volume();
    Ok(Estimate::grid(value, h * a.perimeter(), d.voxel_count()))
}

/// `∫ h(Q, ν)⁺ S(dν)`, the first-order coefficient of the dilation excess.
pub fn dilation_rhs(s: &SurfaceMeasure, q: &StructuringElement) -> Result<f64> {
    s.support_integral(q)
}

/// `V^Q = ∫ h(−Q, ν)⁺ S(dν)`.
pub fn qvariation(s: &SurfaceMeasure, q: &StructuringElement) -> Result<f64> {
    s.support_integral(&q.negated())
}

/// Geometric schedule `r₀·ρᵏ`, `k = 0..count`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RSchedule {
    /// First radius; `None` picks `0.2·n·λ(A)/P(A) / max(1, max|q|)`.
    pub r0: Option<f64>,
    pub ratio: f64,
    pub count: usize,
}

impl Default for RSchedule {
    fn default() -> Self {
        Self { r0: None, ratio: 0.5, count: 7 }
    }
}

impl RSchedule {
    pub fn values(&self, a: &Shape, q_norm: f64) -> Result<Vec<f64>> {
        if !(self.ratio > 0.0 && self.ratio < 1.0) || self.count < 2 {
            return Err(Error::InvalidInput(format!(
                "r schedule needs 0 < ratio < 1 and at least 2 radii, got ratio {} and {} radii",
                self.ratio, self.count
            )));
        }
        let r0 = match self.r0 {
            Some(r0) if r0 > 0.0 && r0.is_finite() => r0,
            Some(r0) => return Err(Error::InvalidInput(format!("r0 must be positive, got {r0}"))),
            None => 0.2 * a.dim() as f64 * a.volume() / a.perimeter() / q_norm.max(1.0),
        };
        Ok((0..self.count).map(|k| r0 * self.ratio.powi(k as i32)).collect())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DerivativeReport {
    pub r_values: Vec<f64>,
    pub ratios: Vec<Estimate>,
    pub extrapolated: Estimate,
    /// Fitted `c` in `ratio(r) ≈ L + c·r`.
    pub slope: f64,
    pub rhs_exact: f64,
    /// Number of smallest radii used by the final fit.
    pub fit_points: usize,
    /// Set when no linear fit matched the noise and the estimate fell back
    /// to the smallest-radius ratio with an inflated error.
    pub flagged: bool,
}

/// Ratios `G(r_k Q)/r_k` over the schedule, their extrapolation to `r → 0`,
/// and `∫ h(Q,ν)⁺ S(A; dν)`.
pub fn derivative_report(a: &Shape, q: &StructuringElement, schedule: &RSchedule, cfg: &SamplerConfig) -> Result<DerivativeReport> {
    ensure_dim(a.dim(), q.dim())?;
    let r_values = schedule.values(a, q.max_norm())?;
    let ratios = r_values
        .iter()
        .enumerate()
        .map(|(k, &r)| {
            let c = SamplerConfig { seed: derive_seed(cfg.seed, k as u64), ..*cfg };
            dilation_excess(a, q, r, &c).map(|e| scale(e, 1.0 / r))
        })
        .collect::<Result<Vec<_>>>()?;
    let fit = extrapolate(&r_values, &ratios);
    let rhs_exact = dilation_rhs(&a.surface_measure(DEFAULT_BALL_ATOMS)?, q)?;
    Ok(DerivativeReport {
        r_values,
        ratios,
        extrapolated: fit.value,
        slope: fit.slope,
        rhs_exact,
        fit_points: fit.points,
        flagged: fit.flagged,
    })
}

pub(crate) fn scale(e: Estimate, c: f64) -> Estimate {
    Estimate { value: e.value * c, std_err: e.std_err * c.abs(), ..e }
}

pub(crate) struct Fit {
    pub value: Estimate,
    pub slope: f64,
    pub points: usize,
    pub flagged: bool,
}

/// Extrapolates `y(r)` to `r = 0` with the model `y = L + c·r`.
///
/// Noisy inputs are fitted by weighted least squares; while the residuals
/// exceed three standard errors on average, the largest radius is dropped.
/// If even three points do not fit, the smallest-radius value is returned
/// with the spread of the last three values as its error and the result is
/// flagged. Exact inputs are fitted through the three smallest radii.
pub(crate) fn extrapolate(r: &[f64], y: &[Estimate]) -> Fit {
    let mut idx: Vec<usize> = (0..r.len()).collect();
    idx.sort_by(|&i, &j| r[i].total_cmp(&r[j]));
    let xs: Vec<f64> = idx.iter().map(|&i| r[i]).collect();
    let ys: Vec<f64> = idx.iter().map(|&i| y[i].value).collect();
    let samples: u64 = y.iter().map(|e| e.samples).sum();
    let method = y.iter().map(|e| e.method).find(|m| *m != Method::Exact).unwrap_or(Method::Exact);

    if method == Method::Exact {
        let k = xs.len().min(3);
        return match linear_fit(&xs[..k], &ys[..k], &vec![1.0; k]) {
            Some((a, b, _, _)) => Fit { value: Estimate::exact(a), slope: b, points: k, flagged: false },
            None => Fit { value: Estimate::exact(ys[0]), slope: 0.0, points: 1, flagged: false },
        };
    }

    let sig: Vec<f64> = idx.iter().map(|&i| y[i].std_err.max(1e-300)).collect();
    let w: Vec<f64> = sig.iter().map(|s| 1.0 / (s * s)).collect();
    for k in (3..=xs.len()).rev() {
        if let Some((a, b, var_a, chi2)) = linear_fit(&xs[..k], &ys[..k], &w[..k]) {
            if chi2 <= 9.0 * (k - 2) as f64 {
                let value = Estimate { value: a, std_err: var_a.sqrt(), samples, method };
                return Fit { value, slope: b, points: k, flagged: false };
            }
        }
    }
    let k = xs.len().min(3);
    let spread = ys[..k].iter().map(|v| (v - ys[0]).abs()).fold(0.0, f64::max);
    let value = Estimate { value: ys[0], std_err: sig[0].hypot(spread), samples, method };
    Fit { value, slope: 0.0, points: 1, flagged: true }
}
