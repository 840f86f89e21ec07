//! Transition counts along axis lines and along digital lines, and the
//! Crofton-style perimeter estimate built from them.

use rayon::prelude::*;

use super::GridSet;
use crate::error::{ensure_dim, Error, Result};
use crate::geom::{unit_ball_volume, SphereQuadrature, Vector};

/// How transitions between a voxel and the outside of the grid are treated.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Edges {
    /// The outside is empty; transitions at the grid boundary count.
    #[default]
    Closed,
    /// Only transitions between two voxels of the grid count, so the result
    /// measures the boundary inside the open window.
    Open,
}

impl GridSet {
    /// Number of 0↔1 transitions along all lines parallel to `axis`, times
    /// h^{n−1}, with the outside of the grid treated as empty.
    pub fn directional_variation(&self, axis: usize) -> f64 {
        self.axis_transitions(axis, Edges::Closed) as f64 * self.h.powi(self.dim() as i32 - 1)
    }

    pub fn axis_transitions(&self, axis: usize, edges: Edges) -> u64 {
        assert!(axis < self.dim(), "axis {axis} out of range");
        if axis == 0 {
            let d0 = self.layout.dims[0];
            let wpr = self.layout.words_per_row;
            (0..self.rows())
                .into_par_iter()
                .map(|r| {
                    let row = self.row(r);
                    let mut carry = 0u64;
                    let mut count = 0u64;
                    for &w in row {
                        count += (w ^ ((w << 1) | carry)).count_ones() as u64;
                        carry = w >> 63;
                    }
                    count += carry;
                    if edges == Edges::Open {
                        count -= row[0] & 1;
                        let last = d0 - 1;
                        count -= (row[last / 64] >> (last % 64)) & 1;
                    }
                    debug_assert!(row.len() == wpr);
                    count
                })
                .sum()
        } else {
            let d1 = self.layout.dims[1];
            let (stride, len, outer) =
                if axis == 1 { (1, d1, self.layout.dims.get(2).copied().unwrap_or(1)) } else { (d1, self.layout.dims[2], 1) };
            // Lines along `axis` are columns of rows; pair up neighbouring rows.
            let starts: Vec<usize> = if axis == 1 { (0..outer).map(|i2| i2 * d1).collect() } else { (0..d1).collect() };
            starts
                .into_par_iter()
                .map(|start| {
                    let at = |k: usize| self.row(start + k * stride);
                    let pop = |r: &[u64]| r.iter().map(|w| w.count_ones() as u64).sum::<u64>();
                    let mut count = 0u64;
                    for k in 1..len {
                        count += at(k).iter().zip(at(k - 1)).map(|(a, b)| (a ^ b).count_ones() as u64).sum::<u64>();
                    }
                    if edges == Edges::Closed {
                        count += pop(at(0)) + pop(at(len - 1));
                    }
                    count
                })
                .sum()
        }
    }

    /// Number of pairs `(x − v, x)` of lattice neighbours along the digital
    /// lines with integer step `v` whose occupancy differs.
    ///
    /// Lines pass through voxel centres and advance by exactly `v`, so every
    /// sample lies on a true straight line. Each voxel lies on one line.
    pub fn lattice_transitions(&self, v: &[i64], edges: Edges) -> u64 {
        let n = self.dim();
        assert_eq!(v.len(), n);
        let dims = &self.layout.dims;
        let d0 = dims[0];
        let d1 = dims.get(1).copied().unwrap_or(1);
        let wpr = self.layout.words_per_row;
        // Positions i0 whose partner i0 − v0 lies inside the row.
        let mut valid = vec![0u64; wpr];
        for i in 0..d0 {
            let j = i as i64 - v[0];
            if j >= 0 && (j as usize) < d0 {
                valid[i / 64] |= 1 << (i % 64);
            }
        }
        let pop = |r: &[u64]| r.iter().map(|w| w.count_ones() as u64).sum::<u64>();
        let source_row = |row: usize| -> Option<usize> {
            let (j1, j2) = ((row % d1) as i64, (row / d1) as i64);
            let i1 = if n >= 2 { j1 - v[1] } else { 0 };
            let i2 = if n == 3 { j2 - v[2] } else { 0 };
            let ok = i1 >= 0 && (i1 as usize) < d1 && i2 >= 0 && (n < 3 || (i2 as usize) < dims[2]);
            ok.then(|| i1 as usize + d1 * i2 as usize)
        };
        let (overlap, open): (u64, u64) = (0..self.rows())
            .into_par_iter()
            .map(|row| {
                let dst = self.row(row);
                let Some(src) = source_row(row) else { return (0, 0) };
                let mut shifted = vec![0u64; wpr];
                super::or_row_shifted(&mut shifted, self.row(src), v[0], d0);
                let both = dst.iter().zip(&shifted).map(|(a, b)| (a & b).count_ones() as u64).sum::<u64>();
                let differ = dst.iter().zip(&shifted).zip(&valid).map(|((a, b), m)| ((a ^ b) & m).count_ones() as u64).sum::<u64>();
                (both, differ)
            })
            .reduce(|| (0, 0), |a, b| (a.0 + b.0, a.1 + b.1));
        match edges {
            // Outside is empty: every occupied voxel is either matched by its
            // successor or contributes one transition, and likewise backwards.
            Edges::Closed => 2 * (pop(&self.bits) - overlap),
            Edges::Open => open,
        }
    }

    /// Estimate of V_u = ∫ |u·ν| dH^{n−1} from the digital lines along the
    /// primitive lattice direction closest to `u`.
    ///
    /// Lines with step `w` cover the cross-section with one line per
    /// h^{n−1}/|w| of area, the Crofton weight of one transition. The count
    /// at step `w` is a finite difference of the covariogram at lag |w|·h, so
    /// it carries an O(|w|·h) error; steps `v` and `2v` are combined to cancel it.
    pub fn variation_along(&self, u: &Vector, edges: Edges) -> Result<f64> {
        ensure_dim(self.dim(), u.dim())?;
        Ok(self.extrapolated_variation(&lattice_direction(u)?, edges))
    }

    fn lattice_variation(&self, w: &[i64], edges: Edges) -> f64 {
        let len = w.iter().map(|&c| (c * c) as f64).sum::<f64>().sqrt();
        let count = self.lattice_transitions(w, edges) as f64;
        let weight = self.h.powi(self.dim() as i32 - 1) / len;
        match edges {
            Edges::Closed => count * weight,
            // Pairs are only seen inside W ∩ (W + w·h); rescale to all of W.
            Edges::Open => {
                let seen: f64 = self.layout.dims.iter().zip(w).map(|(&d, &c)| (d as f64 - c.abs() as f64).max(0.0)).product();
                if seen == 0.0 {
                    0.0
                } else {
                    count * weight * self.voxel_count() as f64 / seen
                }
            }
        }
    }

    fn extrapolated_variation(&self, v: &[i64], edges: Edges) -> f64 {
        let double: Vec<i64> = v.iter().map(|c| 2 * c).collect();
        2.0 * self.lattice_variation(v, edges) - self.lattice_variation(&double, edges)
    }

    /// (2κ_{n−1})⁻¹ Σᵢ wᵢ V_{uᵢ}.
    pub fn perimeter_estimate(&self, dirs: &SphereQuadrature) -> Result<f64> {
        self.perimeter_estimate_with(dirs, Edges::Closed)
    }

    pub fn perimeter_estimate_with(&self, dirs: &SphereQuadrature, edges: Edges) -> Result<f64> {
        ensure_dim(self.dim(), dirs.dim())?;
        let n = self.dim();
        let mut total = 0.0;
        for (u, w) in dirs.iter() {
            total += w * self.extrapolated_variation(&lattice_direction(u)?, edges);
        }
        Ok(total / (2.0 * unit_ball_volume(n - 1)))
    }
}

/// Largest coordinate of the integer steps searched for a lattice
/// direction: 16 in the plane, 8 in space.
fn max_step(n: usize) -> i64 {
    match n {
        1 | 2 => 16,
        _ => 8,
    }
}

fn gcd(a: i64, b: i64) -> i64 {
    if b == 0 {
        a.abs()
    } else {
        gcd(b, a % b)
    }
}

/// Primitive integer vector with the smallest angle to `u`; ties go to the
/// shorter step.
pub fn lattice_direction(u: &Vector) -> Result<Vec<i64>> {
    let u = u.normalized().ok_or_else(|| Error::InvalidInput("direction must be nonzero".into()))?;
    let c = u.coords();
    let n = c.len();
    let m = max_step(n);
    let mut best: (f64, i64, Vec<i64>) = (f64::NEG_INFINITY, 0, vec![]);
    let mut consider = |v: Vec<i64>| {
        if v.iter().copied().fold(0, gcd) != 1 {
            return;
        }
        let len2: i64 = v.iter().map(|x| x * x).sum();
        let cos = v.iter().zip(c).map(|(&a, b)| a as f64 * b).sum::<f64>() / (len2 as f64).sqrt();
        if cos > best.0 + 1e-15 || ((cos - best.0).abs() <= 1e-15 && len2 < best.1) {
            best = (cos, len2, v);
        }
    };
    match n {
        1 => consider(vec![if c[0] >= 0.0 { 1 } else { -1 }]),
        2 => {
            for a in -m..=m {
                for b in -m..=m {
                    consider(vec![a, b]);
                }
            }
        }
        _ => {
            for a in -m..=m {
                for b in -m..=m {
                    for d in -m..=m {
                        consider(vec![a, b, d]);
                    }
                }
            }
        }
    }
    Ok(best.2)
}
