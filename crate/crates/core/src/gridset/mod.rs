//! Voxel indicator sets with bit-packed rows.
//!
//! Axis 0 is the fastest axis. Each row along axis 0 occupies a whole number
//! of `u64` words; bits past `dims[0]` are always zero. Voxel `(i0, i1, i2)`
//! has centre `origin + (i + ½)·h`.

mod io;
mod lines;

use rayon::prelude::*;

use crate::error::{ensure_dim, Error, Result};
use crate::geom::StructuringElement;
use crate::shapes::Shape;

pub use io::GridHeader;
pub use lines::Edges;

/// Default voxel cap, 2³¹.
pub const DEFAULT_VOXEL_CAP: u64 = 1 << 31;

/// Minimum offset length, in voxels, accepted by [`GridSet::dilate`].
pub const MIN_OFFSET_VOXELS: f64 = 4.0;

#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) struct Layout {
    dims: Vec<usize>,
    words_per_row: usize,
}

impl Layout {
    fn new(dims: &[usize]) -> Self {
        Layout { dims: dims.to_vec(), words_per_row: dims[0].div_ceil(64) }
    }

    fn rows(&self) -> usize {
        self.dims[1..].iter().product()
    }

    fn row_of(&self, idx: &[usize]) -> usize {
        match idx.len() {
            1 => 0,
            2 => idx[1],
            _ => idx[1] + self.dims[1] * idx[2],
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct GridSet {
    origin: Vec<f64>,
    h: f64,
    layout: Layout,
    bits: Vec<u64>,
}

fn check_dims(dims: &[usize], cap: u64) -> Result<()> {
    if !(1..=3).contains(&dims.len()) {
        return Err(Error::UnsupportedDimension(dims.len()));
    }
    if dims.contains(&0) {
        return Err(Error::InvalidInput("grid dimensions must be positive".into()));
    }
    let required: u128 = dims.iter().map(|&d| d as u128).product();
    if required > cap as u128 {
        return Err(Error::MemoryCap { required, allowed: cap });
    }
    Ok(())
}

impl GridSet {
    /// All-zero grid.
    pub fn empty(origin: Vec<f64>, h: f64, dims: &[usize], cap: u64) -> Result<Self> {
        ensure_dim(dims.len(), origin.len())?;
        if !(h > 0.0 && h.is_finite()) {
            return Err(Error::InvalidInput(format!("grid spacing must be positive, got {h}")));
        }
        check_dims(dims, cap)?;
        let layout = Layout::new(dims);
        let bits = vec![0u64; layout.words_per_row * layout.rows()];
        Ok(GridSet { origin, h, layout, bits })
    }

    /// Sets each voxel whose centre satisfies `inside`.
    pub fn from_fn(origin: Vec<f64>, h: f64, dims: &[usize], cap: u64, inside: impl Fn(&[f64]) -> bool + Sync) -> Result<Self> {
        let mut g = Self::empty(origin, h, dims, cap)?;
        let wpr = g.layout.words_per_row;
        let (d0, d1) = (g.layout.dims[0], g.layout.dims.get(1).copied().unwrap_or(1));
        let n = g.dim();
        let origin = g.origin.clone();
        g.bits.par_chunks_mut(wpr).enumerate().for_each(|(row, words)| {
            let mut x = vec![0.0; n];
            if n >= 2 {
                x[1] = origin[1] + (row % d1) as f64 * h + 0.5 * h;
            }
            if n == 3 {
                x[2] = origin[2] + (row / d1) as f64 * h + 0.5 * h;
            }
            for i in 0..d0 {
                x[0] = origin[0] + i as f64 * h + 0.5 * h;
                if inside(&x) {
                    words[i / 64] |= 1 << (i % 64);
                }
            }
        });
        Ok(g)
    }

    /// Voxelizes `shape` over its bounding box padded by `margin`.
    pub fn rasterize(shape: &Shape, h: f64, margin: f64) -> Result<Self> {
        Self::rasterize_with_cap(shape, h, margin, DEFAULT_VOXEL_CAP)
    }

    pub fn rasterize_with_cap(shape: &Shape, h: f64, margin: f64, cap: u64) -> Result<Self> {
        if !(margin >= 0.0 && margin.is_finite()) {
            return Err(Error::InvalidInput(format!("margin must be nonnegative, got {margin}")));
        }
        if !(h > 0.0 && h.is_finite()) {
            return Err(Error::InvalidInput(format!("grid spacing must be positive, got {h}")));
        }
        let (lo, hi) = shape.bbox();
        let origin: Vec<f64> = lo.iter().map(|l| l - margin).collect();
        let dims: Vec<f64> = lo.iter().zip(&hi).map(|(l, u)| ((u - l + 2.0 * margin) / h).ceil().max(1.0)).collect();
        let required: f64 = dims.iter().product();
        if required > cap as f64 {
            return Err(Error::MemoryCap { required: required as u128, allowed: cap });
        }
        let dims: Vec<usize> = dims.iter().map(|&d| d as usize).collect();
        Self::from_fn(origin, h, &dims, cap, |x| shape.contains(x))
    }

    pub fn dim(&self) -> usize {
        self.layout.dims.len()
    }

    pub fn dims(&self) -> &[usize] {
        &self.layout.dims
    }

    pub fn spacing(&self) -> f64 {
        self.h
    }

    pub fn origin(&self) -> &[f64] {
        &self.origin
    }

    pub fn voxel_count(&self) -> u64 {
        self.layout.dims.iter().map(|&d| d as u64).product()
    }

    pub fn voxel_center(&self, idx: &[usize]) -> Vec<f64> {
        idx.iter().zip(&self.origin).map(|(&i, o)| o + (i as f64 + 0.5) * self.h).collect()
    }

    fn in_range(&self, idx: &[usize]) -> bool {
        idx.iter().zip(&self.layout.dims).all(|(i, d)| i < d)
    }

    pub fn get(&self, idx: &[usize]) -> bool {
        if !self.in_range(idx) {
            return false;
        }
        let w = self.bits[self.layout.row_of(idx) * self.layout.words_per_row + idx[0] / 64];
        w >> (idx[0] % 64) & 1 == 1
    }

    /// Like [`get`](Self::get) but with signed indices; outside is empty.
    pub fn get_signed(&self, idx: &[i64]) -> bool {
        if idx.iter().zip(&self.layout.dims).any(|(&i, &d)| i < 0 || i as usize >= d) {
            return false;
        }
        let mut u = [0usize; 3];
        for (k, &i) in idx.iter().enumerate() {
            u[k] = i as usize;
        }
        self.get(&u[..idx.len()])
    }

    pub fn set(&mut self, idx: &[usize], value: bool) {
        assert!(self.in_range(idx), "voxel index {idx:?} outside {:?}", self.layout.dims);
        let w = &mut self.bits[self.layout.row_of(idx) * self.layout.words_per_row + idx[0] / 64];
        let mask = 1u64 << (idx[0] % 64);
        if value {
            *w |= mask;
        } else {
            *w &= !mask;
        }
    }

    pub fn count(&self) -> u64 {
        self.bits.iter().map(|w| w.count_ones() as u64).sum()
    }

    pub fn volume(&self) -> f64 {
        self.count() as f64 * self.h.powi(self.dim() as i32)
    }

    pub(crate) fn row(&self, row: usize) -> &[u64] {
        let wpr = self.layout.words_per_row;
        &self.bits[row * wpr..(row + 1) * wpr]
    }

    pub(crate) fn rows(&self) -> usize {
        self.layout.rows()
    }

    /// Same voxels, origin moved by `offset` whole voxels.
    pub fn translate_voxels(&self, offset: &[i64]) -> Self {
        let mut g = self.clone();
        for (o, k) in g.origin.iter_mut().zip(offset) {
            *o += *k as f64 * self.h;
        }
        g
    }

    /// Embeds the grid in a larger one with `before[k]` / `after[k]` empty
    /// voxels added along axis `k`.
    pub fn padded(&self, before: &[usize], after: &[usize]) -> Result<Self> {
        let dims: Vec<usize> = (0..self.dim()).map(|k| self.layout.dims[k] + before[k] + after[k]).collect();
        let origin: Vec<f64> = (0..self.dim()).map(|k| self.origin[k] - before[k] as f64 * self.h).collect();
        let mut out = Self::empty(origin, self.h, &dims, u64::MAX)?;
        let shift: Vec<i64> = before.iter().map(|&b| b as i64).collect();
        out.or_shifted_from(self, &shift);
        Ok(out)
    }

    /// True if the occupied voxels, placed at their physical positions,
    /// coincide (grids must share spacing and be aligned).
    pub fn same_set_as(&self, other: &GridSet) -> bool {
        if self.h != other.h || self.dim() != other.dim() {
            return false;
        }
        let offset: Vec<f64> = (0..self.dim()).map(|k| (other.origin[k] - self.origin[k]) / self.h).collect();
        if offset.iter().any(|o| (o - o.round()).abs() > 1e-6) {
            return false;
        }
        let offset: Vec<i64> = offset.iter().map(|o| o.round() as i64).collect();
        if self.count() != other.count() {
            return false;
        }
        other.iter_set().all(|idx| {
            let mapped: Vec<i64> = idx.iter().zip(&offset).map(|(&i, o)| i as i64 + o).collect();
            self.get_signed(&mapped)
        })
    }

    /// Indices of occupied voxels in storage order.
    pub fn iter_set(&self) -> impl Iterator<Item = Vec<usize>> + '_ {
        let n = self.dim();
        let d1 = self.layout.dims.get(1).copied().unwrap_or(1);
        (0..self.rows()).flat_map(move |row| {
            self.row(row).iter().enumerate().flat_map(move |(w, &word)| {
                let mut word = word;
                std::iter::from_fn(move || {
                    if word == 0 {
                        return None;
                    }
                    let b = word.trailing_zeros() as usize;
                    word &= word - 1;
                    let mut idx = vec![w * 64 + b];
                    if n >= 2 {
                        idx.push(row % d1);
                    }
                    if n == 3 {
                        idx.push(row / d1);
                    }
                    Some(idx)
                })
            })
        })
    }

    /// ORs `src` into `self` with voxel `i` of `src` landing on `i + shift`.
    /// Voxels falling outside `self` are dropped. Grids must share `h`.
    fn or_shifted_from(&mut self, src: &GridSet, shift: &[i64]) {
        let n = self.dim();
        let dst_dims = self.layout.dims.clone();
        let src_dims = src.layout.dims.clone();
        let d1 = dst_dims.get(1).copied().unwrap_or(1);
        let sd1 = src_dims.get(1).copied().unwrap_or(1);
        let wpr = self.layout.words_per_row;
        self.bits.par_chunks_mut(wpr).enumerate().for_each(|(row, dst)| {
            let (j1, j2) = (row % d1, row / d1);
            let i1 = j1 as i64 - if n >= 2 { shift[1] } else { 0 };
            let i2 = j2 as i64 - if n == 3 { shift[2] } else { 0 };
            if i1 < 0 || i2 < 0 || i1 as usize >= sd1 || (n == 3 && i2 as usize >= src_dims[2]) || (n < 3 && i2 != 0) {
                return;
            }
            let src_row = i1 as usize + sd1 * i2 as usize;
            or_row_shifted(dst, src.row(src_row), shift[0], dst_dims[0]);
        });
    }

    /// Union over `q ∈ Q ∪ {0}` of the grid shifted by `round(r·q/h)`; the
    /// output grid grows to hold every shift.
    pub fn dilate(&self, q: &StructuringElement, r: f64) -> Result<GridSet> {
        ensure_dim(self.dim(), q.dim())?;
        if !(r >= 0.0 && r.is_finite()) {
            return Err(Error::InvalidInput(format!("dilation radius must be nonnegative, got {r}")));
        }
        let mut offsets: Vec<Vec<i64>> = vec![vec![0; self.dim()]];
        for p in q.points() {
            if p.is_zero() {
                continue;
            }
            let ratio = r * p.norm() / self.h;
            if ratio < MIN_OFFSET_VOXELS {
                return Err(Error::OffsetResolution { ratio });
            }
            let off: Vec<i64> = p.coords().iter().map(|c| (r * c / self.h).round() as i64).collect();
            if !offsets.contains(&off) {
                offsets.push(off);
            }
        }
        let n = self.dim();
        let lo: Vec<i64> = (0..n).map(|k| offsets.iter().map(|o| o[k]).min().unwrap_or(0)).collect();
        let hi: Vec<i64> = (0..n).map(|k| offsets.iter().map(|o| o[k]).max().unwrap_or(0)).collect();
        let dims: Vec<usize> = (0..n).map(|k| self.layout.dims[k] + (hi[k] - lo[k]) as usize).collect();
        let origin: Vec<f64> = (0..n).map(|k| self.origin[k] + lo[k] as f64 * self.h).collect();
        let mut out = GridSet::empty(origin, self.h, &dims, DEFAULT_VOXEL_CAP.max(self.voxel_count()))?;
        for off in &offsets {
            let shift: Vec<i64> = off.iter().zip(&lo).map(|(o, l)| o - l).collect();
            out.or_shifted_from(self, &shift);
        }
        Ok(out)
    }

    /// Σ_x (1_G(x) − 1_G(x + s·e_axis·sign))⁺ in voxels: occupied voxels
    /// whose shift by `s` steps leaves the set.
    pub fn shift_loss(&self, axis: usize, s: usize, positive: bool) -> u64 {
        let n = self.dim();
        let mut count = 0u64;
        for idx in self.iter_set() {
            let mut j: Vec<i64> = idx.iter().map(|&i| i as i64).collect();
            j[axis] += if positive { s as i64 } else { -(s as i64) };
            if !self.get_signed(&j[..n]) {
                count += 1;
            }
        }
        count
    }

    /// 1→0 transitions met when walking each axis line in the given sense,
    /// with the outside of the grid treated as empty.
    pub fn exits(&self, axis: usize, positive: bool) -> u64 {
        let n = self.dim();
        let mut count = 0u64;
        for idx in self.iter_set() {
            let mut j: Vec<i64> = idx.iter().map(|&i| i as i64).collect();
            j[axis] += if positive { 1 } else { -1 };
            if !self.get_signed(&j[..n]) {
                count += 1;
            }
        }
        count
    }
}

/// `dst |= src << shift` on bit rows of width `width`, with negative shifts
/// moving bits toward index 0. Bits beyond `width` are cleared.
fn or_row_shifted(dst: &mut [u64], src: &[u64], shift: i64, width: usize) {
    let words = dst.len();
    if shift >= 0 {
        let (ws, bs) = ((shift / 64) as usize, (shift % 64) as u32);
        for (k, &w) in src.iter().enumerate() {
            if w == 0 {
                continue;
            }
            let t = k + ws;
            if t < words {
                dst[t] |= w << bs;
            }
            if bs > 0 && t + 1 < words {
                dst[t + 1] |= w >> (64 - bs);
            }
        }
    } else {
        let s = (-shift) as usize;
        let (ws, bs) = (s / 64, (s % 64) as u32);
        for (t, d) in dst.iter_mut().enumerate() {
            let k = t + ws;
            let lo = src.get(k).copied().unwrap_or(0);
            let hi = src.get(k + 1).copied().unwrap_or(0);
            *d |= if bs == 0 { lo } else { (lo >> bs) | (hi << (64 - bs)) };
        }
    }
    let tail = width % 64;
    if tail != 0 {
        dst[words - 1] &= (1u64 << tail) - 1;
    }
}
