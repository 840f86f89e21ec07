//! Estimates with uncertainty, keyed random streams and a stratified volume
//! integrator.
//!
//! Every random draw comes from a ChaCha8 stream selected by `(seed, stream)`.
//! Work units own their stream, and partial results are reduced in index
//! order, so results do not depend on the number of worker threads.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    Exact,
    Grid,
    MonteCarlo,
}

/// A value with a one-sigma uncertainty. `std_err` is zero exactly when the
/// method is [`Method::Exact`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub value: f64,
    pub std_err: f64,
    pub samples: u64,
    pub method: Method,
}

impl Estimate {
    pub fn exact(value: f64) -> Self {
        Self { value, std_err: 0.0, samples: 0, method: Method::Exact }
    }

    /// A sampled estimate. A vanishing error is floored at the smallest
    /// positive value so it cannot be confused with an exact result.
    pub fn monte_carlo(value: f64, std_err: f64, samples: u64) -> Self {
        Self { value, std_err: std_err.max(f64::MIN_POSITIVE), samples, method: Method::MonteCarlo }
    }

    /// A grid estimate; `scale` is the discretization error scale.
    pub fn grid(value: f64, scale: f64, voxels: u64) -> Self {
        Self { value, std_err: scale.abs().max(f64::MIN_POSITIVE), samples: voxels, method: Method::Grid }
    }

    pub fn is_exact(&self) -> bool {
        self.method == Method::Exact
    }

    /// `(self − other) / σ_joint`, treating the two as independent.
    pub fn z_score(&self, other: &Estimate) -> f64 {
        let s = self.std_err.hypot(other.std_err);
        let d = self.value - other.value;
        if s == 0.0 {
            if d == 0.0 {
                0.0
            } else {
                f64::INFINITY.copysign(d)
            }
        } else {
            d / s
        }
    }

    /// `|value − target| ≤ k·std_err`, or equality up to rounding for exact.
    pub fn agrees_with(&self, target: f64, k: f64) -> bool {
        let tol = k * self.std_err + 1e-12 * target.abs().max(1.0);
        (self.value - target).abs() <= tol
    }
}

/// A ChaCha8 generator for stream `stream` of `seed`.
pub fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Mixes a tag into a seed so that unrelated consumers of the same seed
/// draw from unrelated streams.
pub fn derive_seed(seed: u64, tag: u64) -> u64 {
    // splitmix64 finalizer
    let mut z = seed ^ tag.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Classification of an axis-aligned cell against the integrand.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Cell {
    /// Integrand is 0 everywhere in the cell.
    Empty,
    /// Integrand is 1 everywhere in the cell.
    Full,
    Mixed,
}

#[derive(Clone, Copy, Debug)]
pub struct StratifiedConfig {
    pub samples: u64,
    pub seed: u64,
    /// Upper bound on the number of mixed cells kept after refinement.
    pub max_cells: usize,
    /// Refinement stops once cell half-diagonals drop below this length.
    pub min_halfdiag: f64,
}

/// Volume of `{x ∈ [lo, hi] : inside(x)}`.
///
/// The box is bisected breadth first. `classify(center, halfdiag)` may prune
/// a cell as empty or full; mixed cells are refined until they are small
/// enough or the cell budget is reached. Samples are then spread over the
/// mixed cells in proportion to volume (at least two per cell), jittered
/// uniformly, and each cell draws from its own stream.
pub fn stratified_volume<C, F>(lo: &[f64], hi: &[f64], cfg: &StratifiedConfig, classify: C, inside: F) -> Estimate
where
    C: Fn(&[f64], f64) -> Cell + Sync,
    F: Fn(&[f64]) -> bool + Sync,
{
    let n = lo.len();
    let mut full = 0.0;
    let mut level = vec![(lo.to_vec(), hi.to_vec())];
    let mut mixed: Vec<(Vec<f64>, Vec<f64>)>;
    loop {
        let classes: Vec<Cell> = level
            .par_iter()
            .map(|(l, h)| {
                let c: Vec<f64> = l.iter().zip(h).map(|(a, b)| 0.5 * (a + b)).collect();
                let hd = 0.5 * l.iter().zip(h).map(|(a, b)| (b - a) * (b - a)).sum::<f64>().sqrt();
                classify(&c, hd)
            })
            .collect();
        mixed = Vec::with_capacity(level.len());
        for (cell, class) in level.into_iter().zip(classes) {
            match class {
                Cell::Empty => {}
                Cell::Full => full += cell_volume(&cell.0, &cell.1),
                Cell::Mixed => mixed.push(cell),
            }
        }
        let hd = mixed.first().map(|(l, h)| 0.5 * l.iter().zip(h).map(|(a, b)| (b - a) * (b - a)).sum::<f64>().sqrt());
        let Some(hd) = hd else { break };
        if hd <= cfg.min_halfdiag || mixed.len() * 2 > cfg.max_cells {
            break;
        }
        // All cells at one level share a shape, so the same axis is split.
        let (l0, h0) = &mixed[0];
        let axis = (0..n).max_by(|&i, &j| (h0[i] - l0[i]).total_cmp(&(h0[j] - l0[j]))).unwrap();
        level = mixed
            .drain(..)
            .flat_map(|(l, h)| {
                let mid = 0.5 * (l[axis] + h[axis]);
                let (mut h1, mut l2) = (h.clone(), l.clone());
                h1[axis] = mid;
                l2[axis] = mid;
                [(l, h1), (l2, h)]
            })
            .collect();
    }
    if mixed.is_empty() {
        return Estimate::exact(full);
    }

    let vol_mixed: f64 = mixed.iter().map(|(l, h)| cell_volume(l, h)).sum();
    let per_volume = cfg.samples as f64 / vol_mixed;
    let parts: Vec<(f64, f64, u64)> = mixed
        .par_iter()
        .enumerate()
        .map(|(k, (l, h))| {
            let v = cell_volume(l, h);
            let m = ((per_volume * v).round() as u64).max(2);
            let mut rng = stream_rng(cfg.seed, k as u64);
            let mut x = vec![0.0; n];
            let mut hits = 0u64;
            for _ in 0..m {
                for i in 0..n {
                    x[i] = l[i] + (h[i] - l[i]) * rng.random::<f64>();
                }
                hits += inside(&x) as u64;
            }
            let p = hits as f64 / m as f64;
            // Shrunk proportion keeps the variance positive for 0 or m hits.
            let pt = (hits as f64 + 0.5) / (m as f64 + 1.0);
            (v * p, v * v * pt * (1.0 - pt) / m as f64, m)
        })
        .collect();
    let (mut value, mut var, mut count) = (full, 0.0, 0u64);
    for (a, b, m) in parts {
        value += a;
        var += b;
        count += m;
    }
    Estimate::monte_carlo(value, var.sqrt(), count)
}

pub(crate) fn cell_volume(lo: &[f64], hi: &[f64]) -> f64 {
    lo.iter().zip(hi).map(|(a, b)| b - a).product()
}

/// Weighted least squares for `y = a + b·x`. Returns `(a, b, cov_aa, chi2)`;
/// `chi2` is the weighted residual sum of squares.
pub fn linear_fit(x: &[f64], y: &[f64], w: &[f64]) -> Option<(f64, f64, f64, f64)> {
    let (mut s, mut sx, mut sy, mut sxx, mut sxy) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for ((&xi, &yi), &wi) in x.iter().zip(y).zip(w) {
        s += wi;
        sx += wi * xi;
        sy += wi * yi;
        sxx += wi * xi * xi;
        sxy += wi * xi * yi;
    }
    let det = s * sxx - sx * sx;
    if !(det.abs() > 1e-300) || x.len() < 2 {
        return None;
    }
    let a = (sxx * sy - sx * sxy) / det;
    let b = (s * sxy - sx * sy) / det;
    let chi2 = x.iter().zip(y).zip(w).map(|((&xi, &yi), &wi)| wi * (yi - a - b * xi).powi(2)).sum();
    Some((a, b, sxx / det, chi2))
}
