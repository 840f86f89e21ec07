//! Specific perimeter: boundary census inside the window (exact in the
//! plane) or digital-line estimates on rasterized realizations.

use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use super::{mean_estimate, per_realization, rose, BooleanModelSpec, BooleanSampling, Grain, Realization, RoseOfDirections, Window};
use crate::error::{Error, Result};
use crate::geom::{sphere_quadrature, Vector};
use crate::gridset::{Edges, GridSet, DEFAULT_VOXEL_CAP};
use crate::sampling::Estimate;

/// Angular bins of the empirical rose of ball models.
pub const ROSE_BINS: usize = 16;

/// Boundary of `Z` inside the open window: total length and its
/// distribution over normal directions (angular bins for balls, the four
/// face normals in rose order for boxes).
#[derive(Clone, Debug, Default)]
struct Census {
    length: f64,
    masses: Vec<f64>,
}

fn census(z: &Realization, w: &Window) -> Census {
    let grains = z.near(w, 0.0);
    let mut out = Census::default();
    let Some(first) = grains.first() else { return out };
    match first {
        Grain::Ball { .. } => {
            out.masses = vec![0.0; ROSE_BINS];
            for (i, g) in grains.iter().enumerate() {
                for (a, b) in visible_arcs(i, &grains, w) {
                    let Grain::Ball { radius, .. } = g else { unreachable!() };
                    out.length += radius * (b - a);
                    bin_arc(a, b, *radius, &mut out.masses);
                }
            }
        }
        Grain::Box { .. } => {
            out.masses = vec![0.0; 4];
            // Edge k of the corner cycle carries normal +e₂, −e₁, −e₂, +e₁.
            const ATOM: [usize; 4] = [2, 1, 3, 0];
            for (i, g) in grains.iter().enumerate() {
                let c = g.corners().expect("planar box");
                for k in 0..4 {
                    let (p, e) = (c[k], c[(k + 1) % 4]);
                    let dir = [e[0] - p[0], e[1] - p[1]];
                    let len = dir[0].hypot(dir[1]);
                    let exposed = len * visible_fraction(i, &grains, w, &p, &dir);
                    out.length += exposed;
                    out.masses[ATOM[k]] += exposed;
                }
            }
        }
    }
    out
}

/// Parameter range of the segment `p + t·dir`, `t ∈ [0, 1]`, not covered
/// by other grains and inside the window.
fn visible_fraction(i: usize, grains: &[&Grain], w: &Window, p: &[f64; 2], dir: &[f64; 2]) -> f64 {
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    for k in 0..2 {
        if dir[k] == 0.0 {
            if p[k] <= w.min[k] || p[k] >= w.max[k] {
                return 0.0;
            }
        } else {
            let (a, b) = ((w.min[k] - p[k]) / dir[k], (w.max[k] - p[k]) / dir[k]);
            lo = lo.max(a.min(b));
            hi = hi.min(a.max(b));
        }
    }
    if lo >= hi {
        return 0.0;
    }
    let mut covered: Vec<(f64, f64)> = grains
        .iter()
        .enumerate()
        .filter(|&(j, _)| j != i)
        .filter_map(|(_, g)| g.segment_interval(p, dir))
        .map(|(a, b)| (a.max(lo), b.min(hi)))
        .filter(|(a, b)| a < b)
        .collect();
    covered.sort_by(|a, b| a.0.total_cmp(&b.0));
    let (mut total, mut end) = (0.0, lo);
    for (a, b) in covered {
        if b > end {
            total += b - a.max(end);
            end = b;
        }
    }
    (hi - lo - total).max(0.0)
}

/// Arcs `[a, b] ⊂ [0, 2π)` of circle `i` outside every other disc and
/// inside the window.
fn visible_arcs(i: usize, grains: &[&Grain], w: &Window) -> Vec<(f64, f64)> {
    let Grain::Ball { center: ci, radius: ri } = grains[i] else { unreachable!() };
    let ri = *ri;
    // Excluded arcs as (mid angle, half width).
    let mut excl: Vec<(f64, f64)> = Vec::new();
    for (j, g) in grains.iter().enumerate() {
        let Grain::Ball { center: cj, radius: rj } = g else { unreachable!() };
        if j == i {
            continue;
        }
        let (dx, dy) = (cj[0] - ci[0], cj[1] - ci[1]);
        let d = dx.hypot(dy);
        if d >= ri + rj || d + rj <= ri {
            continue;
        }
        if d + ri <= *rj {
            return vec![];
        }
        let cos = ((ri * ri + d * d - rj * rj) / (2.0 * ri * d)).clamp(-1.0, 1.0);
        excl.push((dy.atan2(dx), cos.acos()));
    }
    for k in 0..2 {
        // Below the lower face: −u_k > (c_k − min_k)/R; above the upper face:
        // u_k > (max_k − c_k)/R.
        for (sign, t) in [(-1.0, (ci[k] - w.min[k]) / ri), (1.0, (w.max[k] - ci[k]) / ri)] {
            if t >= 1.0 {
                continue;
            }
            if t <= -1.0 {
                return vec![];
            }
            let mid = if k == 0 {
                if sign > 0.0 {
                    0.0
                } else {
                    std::f64::consts::PI
                }
            } else {
                sign * std::f64::consts::FRAC_PI_2
            };
            excl.push((mid, t.acos()));
        }
    }
    let mut iv: Vec<(f64, f64)> = Vec::with_capacity(2 * excl.len());
    for (mid, hw) in excl {
        let a = (mid - hw).rem_euclid(TAU);
        let b = a + 2.0 * hw;
        if b > TAU {
            iv.push((a, TAU));
            iv.push((0.0, b - TAU));
        } else {
            iv.push((a, b));
        }
    }
    iv.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut arcs = Vec::new();
    let mut end = 0.0;
    for (a, b) in iv {
        if a > end {
            arcs.push((end, a));
        }
        end = f64::max(end, b);
    }
    if end < TAU {
        arcs.push((end, TAU));
    }
    arcs
}

fn bin_arc(a: f64, b: f64, radius: f64, masses: &mut [f64]) {
    let width = TAU / masses.len() as f64;
    let first = ((a / width) as usize).min(masses.len() - 1);
    for (k, m) in masses.iter_mut().enumerate().skip(first) {
        let (lo, hi) = (k as f64 * width, (k + 1) as f64 * width);
        if lo >= b {
            break;
        }
        *m += radius * (b.min(hi) - a.max(lo)).max(0.0);
    }
}

fn check_planar(spec: &BooleanModelSpec) -> Result<()> {
    if spec.dim != 2 {
        return Err(Error::ExactPathUnavailable(format!("{}-dimensional grains", spec.dim)));
    }
    Ok(())
}

/// P̄(Z): boundary length of `Z` inside the window over the window area,
/// averaged over realizations. Exact per realization in the plane.
pub fn specific_perimeter(spec: &BooleanModelSpec, cfg: &BooleanSampling) -> Result<Estimate> {
    spec.validate()?;
    cfg.validate()?;
    check_planar(spec)?;
    let w = &spec.window;
    let area = w.volume();
    let per = per_realization(spec, cfg, |z, _| census(z, w).length / area);
    Ok(mean_estimate(&per))
}

/// Directions for the digital-line perimeter estimate.
fn grid_quadrature_nodes(n: usize) -> usize {
    if n == 2 {
        32
    } else {
        64
    }
}

fn rasterize_window(z: &Realization, w: &Window, h: f64) -> Result<(GridSet, f64)> {
    let dims: Vec<usize> = w.min.iter().zip(&w.max).map(|(a, b)| ((b - a) / h).round().max(1.0) as usize).collect();
    let grains = z.near(w, h);
    let g = GridSet::from_fn(w.min.clone(), h, &dims, DEFAULT_VOXEL_CAP, |x| grains.iter().any(|g| g.contains(x)))?;
    let vol = dims.iter().map(|&d| d as f64 * h).product();
    Ok((g, vol))
}

/// P̄(Z) from rasterized realizations at spacing `h`, counting only
/// transitions between voxels of the window.
pub fn specific_perimeter_grid(spec: &BooleanModelSpec, cfg: &BooleanSampling, h: f64) -> Result<Estimate> {
    spec.validate()?;
    cfg.validate()?;
    if !(h > 0.0 && h.is_finite()) {
        return Err(Error::InvalidInput(format!("grid spacing must be positive, got {h}")));
    }
    let dirs = sphere_quadrature(spec.dim, grid_quadrature_nodes(spec.dim))?;
    let w = &spec.window;
    let per = per_realization(spec, cfg, |z, _| -> Result<f64> {
        let (g, vol) = rasterize_window(z, w, h)?;
        Ok(g.perimeter_estimate_with(&dirs, Edges::Open)? / vol)
    })
    .into_iter()
    .collect::<Result<Vec<f64>>>()?;
    Ok(mean_estimate(&per))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PerimeterConsistency {
    pub exact: Estimate,
    pub grid: Estimate,
    /// `(exact − grid)` over the joint standard error.
    pub z: f64,
}

/// Exact and grid estimates of P̄ on the same realizations.
pub fn perimeter_consistency(spec: &BooleanModelSpec, cfg: &BooleanSampling, h: f64) -> Result<PerimeterConsistency> {
    let exact = specific_perimeter(spec, cfg)?;
    let grid = specific_perimeter_grid(spec, cfg, h)?;
    Ok(PerimeterConsistency { exact, grid, z: exact.z_score(&grid) })
}

/// Declared rose against the normal distribution of the simulated
/// boundary.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EmpiricalRose {
    pub declared: RoseOfDirections,
    /// Bin centres (balls) or face normals (boxes).
    pub directions: Vec<Vector>,
    pub empirical: Vec<f64>,
    pub expected: Vec<f64>,
    /// Total variation distance between `empirical` and `expected`.
    pub tv_distance: f64,
}

pub fn empirical_rose(spec: &BooleanModelSpec, cfg: &BooleanSampling) -> Result<EmpiricalRose> {
    spec.validate()?;
    cfg.validate()?;
    check_planar(spec)?;
    let declared = rose(spec)?;
    let w = &spec.window;
    let parts = per_realization(spec, cfg, |z, _| census(z, w));
    let (directions, expected): (Vec<Vector>, Vec<f64>) = match &declared {
        RoseOfDirections::Uniform { .. } => {
            (0..ROSE_BINS).map(|k| (Vector::from_angle(TAU * (k as f64 + 0.5) / ROSE_BINS as f64), 1.0 / ROSE_BINS as f64)).unzip()
        }
        RoseOfDirections::Discrete { atoms } => atoms.iter().cloned().unzip(),
    };
    let mut empirical = vec![0.0; expected.len()];
    for c in &parts {
        for (e, m) in empirical.iter_mut().zip(&c.masses) {
            *e += m;
        }
    }
    let total: f64 = empirical.iter().sum();
    if total <= 0.0 {
        return Err(Error::UndefinedRose);
    }
    empirical.iter_mut().for_each(|e| *e /= total);
    let tv_distance = 0.5 * empirical.iter().zip(&expected).map(|(a, b)| (a - b).abs()).sum::<f64>();
    Ok(EmpiricalRose { declared, directions, empirical, expected, tv_distance })
}
