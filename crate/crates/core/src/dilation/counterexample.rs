//! A compact planar set of finite perimeter and a countable structuring
//! element `Q ⊂ B(0,1)` for which `G(rQ, 1_A)/r` is unbounded as `r → 0`.
//!
//! Ring `k` is the open annulus `R_k = {1/(k+1) < |x| < 1/k}`. It holds the
//! net `A_k = ε_k Z² ∩ Z_k`, where `Z_k` is `R_k` shrunk by `r_k`, and `A`
//! is the union of the discs `B(a, r_k)`. The structuring element is
//! `Q = {0} ∪ ⋃_j Q_j` with `Q_j = δ_j Z² ∩ B(0, 1/j)`. Every spacing is a
//! power of two, so all lattices involved are nested and a point set like
//! `A_k + rQ_j` never has to be listed: membership reduces to "is there a
//! lattice point in this disc/annulus intersection".
//!
//! The nets are far too large to enumerate (about 10¹³ points in ring 20)
//! and the radii far too small for `f64` positions near the rings (`r_20` is
//! about 10⁻²⁰), so sample points carry 120 fractional bits in an `i128`
//! and every distance at the scale of `r_k` is taken as an exact difference.

use std::f64::consts::{PI, SQRT_2};

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sampling::{stream_rng, Estimate};

const FRAC: u32 = 120;
const COLUMN_CAP: f64 = 65_536.0;
const BAND_POINT_CAP: usize = 4_096;
const BLOCK: u64 = 1024;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CounterexampleConfig {
    pub m_max: usize,
    /// Samples per radial stratum and radius.
    pub samples: u64,
    pub seed: u64,
}

impl Default for CounterexampleConfig {
    fn default() -> Self {
        Self { m_max: 20, samples: 4096, seed: 0 }
    }
}

/// Construction data of ring `k`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RingParams {
    pub k: usize,
    /// Net spacing `ε_k = 2^−eps_exp`.
    pub eps_exp: u32,
    pub eps: f64,
    /// Disc radius `r_k`.
    pub radius: f64,
    /// `Z_k = {zone_inner < |x| < zone_outer}`.
    pub zone_inner: f64,
    pub zone_outer: f64,
    /// Upper bound on `#A_k`.
    pub net_size_bound: f64,
    /// Spacing of `Q_k`: `δ_k = 2^−q_exp`.
    pub q_exp: u32,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RatioPoint {
    pub m: usize,
    pub r: f64,
    pub ratio: Estimate,
    /// `λ(R_m)/(2r)`.
    pub lower_bound: f64,
    /// Excess inside `R_m` alone, divided by `r`.
    pub ring_ratio: Estimate,
    /// Samples whose membership could not be decided within the work caps;
    /// they are counted as outside the excess.
    pub unresolved: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CounterexampleReport {
    pub m_max: usize,
    pub rings: Vec<RingParams>,
    /// `Σ_k #A_k · 2π r_k ≥ P(A)`.
    pub perimeter_bound: f64,
    /// Circumradius of `conv(Q ∪ {0})`.
    pub circumradius: f64,
    /// `circumradius · perimeter_bound ≥ V^{−Q}(1_A)`.
    pub vq_bound: f64,
    pub points: Vec<RatioPoint>,
}

/// The truncated set `A` (rings `1..=m_max`) and structuring element `Q`.
#[derive(Clone, Debug)]
pub struct SparseSet {
    rings: Vec<RingParams>,
}

type Fx = [i128; 2];

fn to_fx(v: f64) -> i128 {
    (v * 2f64.powi(FRAC as i32)) as i128
}

fn from_fx(v: i128) -> f64 {
    v as f64 * 2f64.powi(-(FRAC as i32))
}

fn pow2(e: u32) -> f64 {
    2f64.powi(-(e as i32))
}

/// Smallest `t` with `2^−t ≤ bound`.
fn exponent_below(bound: f64) -> u32 {
    let mut t = (-bound.log2()).ceil().max(0.0) as u32;
    while pow2(t) > bound {
        t += 1;
    }
    while t > 0 && pow2(t - 1) <= bound {
        t -= 1;
    }
    t
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Tri {
    Yes,
    No,
    Unresolved,
}

#[derive(Clone, Copy)]
enum Other {
    Annulus { c: [f64; 2], lo: f64, hi: f64 },
    Disc { c: [f64; 2], r: f64 },
}

impl SparseSet {
    pub fn new(m_max: usize) -> Result<Self> {
        if !(4..=20).contains(&m_max) {
            return Err(Error::InvalidInput(format!("m_max must lie in 4..=20, got {m_max}")));
        }
        let mut rings = Vec::with_capacity(m_max);
        for k in 1..=m_max {
            let kf = k as f64;
            let (inner, outer) = (1.0 / (kf + 1.0), 1.0 / kf);
            let cover = 1.0 / (2f64.powi(k as i32) * kf);
            let eps_exp = exponent_below(cover / 4.0);
            let eps = pow2(eps_exp);
            // Each net point owns an ε-square inside the ring grown by ε/√2.
            let h = eps / SQRT_2;
            let net_size_bound = PI * ((outer + h).powi(2) - (inner - h).powi(2)) / (eps * eps);
            let area = PI * (outer * outer - inner * inner);
            let radius = 0.5
                * ((outer - inner) / 4.0)
                    .min((area / (2.0 * PI * net_size_bound)).sqrt())
                    .min(2f64.powi(-(k as i32)) / (2.0 * PI * net_size_bound));
            let q_exp = exponent_below(radius / 2.0);
            // R_k ⊂ A_k ⊕ B(0, cover) needs r_k + √2·ε_k ≤ cover; the discs
            // B(a, r_k) are disjoint when r_k < ε_k/2.
            debug_assert!(radius + SQRT_2 * eps <= cover && radius < eps / 2.0);
            if q_exp as usize + m_max + 8 > FRAC as usize {
                return Err(Error::InvalidInput("lattice spacing below fixed-point resolution".into()));
            }
            rings.push(RingParams {
                k,
                eps_exp,
                eps,
                radius,
                zone_inner: inner + radius,
                zone_outer: outer - radius,
                net_size_bound,
                q_exp,
            });
        }
        Ok(Self { rings })
    }

    pub fn rings(&self) -> &[RingParams] {
        &self.rings
    }

    pub fn m_max(&self) -> usize {
        self.rings.len()
    }

    pub fn perimeter_bound(&self) -> f64 {
        self.rings.iter().map(|g| g.net_size_bound * 2.0 * PI * g.radius).sum()
    }

    /// `x ∈ A`.
    pub fn contains(&self, x: [f64; 2]) -> bool {
        self.contains_fx(&[to_fx(x[0]), to_fx(x[1])], x)
    }

    /// `x ∈ Q`.
    pub fn q_contains(&self, x: [f64; 2]) -> bool {
        let rho2 = x[0] * x[0] + x[1] * x[1];
        if rho2 == 0.0 {
            return true;
        }
        self.rings.iter().any(|g| {
            let d = pow2(g.q_exp);
            rho2 * (g.k * g.k) as f64 <= 1.0 && x.iter().all(|c| (c / d).fract() == 0.0)
        })
    }

    fn contains_fx(&self, x: &Fx, xf: [f64; 2]) -> bool {
        let rho = xf[0].hypot(xf[1]);
        if rho == 0.0 {
            return true;
        }
        let k0 = (1.0 / rho).floor() as usize;
        (k0.saturating_sub(1).max(1)..=k0 + 1).filter(|&k| k <= self.rings.len()).any(|k| {
            let g = &self.rings[k - 1];
            let shift = FRAC - g.eps_exp;
            let p = [nearest(x[0], shift) << shift, nearest(x[1], shift) << shift];
            let pr = from_fx(p[0]).hypot(from_fx(p[1]));
            pr > g.zone_inner && pr < g.zone_outer && exact_dist(x, &p) <= g.radius
        })
    }

    /// Is `x` in `(A_k ⊕ B(r_k)) + r·Q_j` for the given ring and net?
    fn hit(&self, x: &Fx, xf: [f64; 2], k: usize, j: usize, m: usize) -> Tri {
        let g = &self.rings[k - 1];
        let e_exp = g.eps_exp;
        let q_exp = m as u32 + self.rings[j - 1].q_exp;
        let gq = pow2(q_exp);
        let reach = pow2(m as u32) / j as f64;
        let s = g.radius;
        let zone = Other::Annulus { c: [0.0, 0.0], lo: g.zone_inner, hi: g.zone_outer };

        if s >= gq / SQRT_2 {
            // Each cloud a + rQ_j thickened by s fills B(a, R + s − √2·g).
            let inner = if reach >= gq / SQRT_2 { (reach + s - SQRT_2 * gq).max(s) } else { s };
            let near = region(e_exp, xf, inner, zone);
            if near == Tri::Yes {
                return Tri::Yes;
            }
            match region(e_exp, xf, reach + s, zone) {
                Tri::No => return if near == Tri::No { Tri::No } else { Tri::Unresolved },
                Tri::Unresolved => return Tri::Unresolved,
                Tri::Yes => {}
            }
            // Net points in the band inner < |x − a| ≤ R + s: test the cloud.
            let mut verdict = Tri::No;
            let done = for_lattice_in_disc(e_exp, xf, reach + s, |ia, ja| {
                let a = [(ia as i128) << (FRAC - e_exp), (ja as i128) << (FRAC - e_exp)];
                let ar = from_fx(a[0]).hypot(from_fx(a[1]));
                if !(ar > g.zone_inner && ar < g.zone_outer) {
                    return false;
                }
                let z = [from_fx(x[0] - a[0]), from_fx(x[1] - a[1])];
                let dz = z[0].hypot(z[1]);
                if dz <= inner || dz > reach + s {
                    return false;
                }
                match region(q_exp, [0.0, 0.0], reach, Other::Disc { c: z, r: s }) {
                    Tri::Yes => {
                        verdict = Tri::Yes;
                        true
                    }
                    Tri::Unresolved => {
                        verdict = Tri::Unresolved;
                        false
                    }
                    Tri::No => false,
                }
            });
            return if done.is_none() && verdict != Tri::Yes { Tri::Unresolved } else { verdict };
        }

        // The clouds are sparse: x must lie within s < min(ε, g) of a point
        // p of the finer lattice, and p must split as a + q with a in the
        // zone and q ∈ gZ² ∩ B(0, R).
        let fine = e_exp.max(q_exp);
        let shift = FRAC - fine;
        let base = [x[0] >> shift, x[1] >> shift];
        let mut verdict = Tri::No;
        for di in -1..=2i128 {
            for dj in -1..=2i128 {
                let p = [(base[0] + di) << shift, (base[1] + dj) << shift];
                if exact_dist(x, &p) > s {
                    continue;
                }
                let pf = [from_fx(p[0]), from_fx(p[1])];
                let t = if q_exp >= e_exp {
                    region(e_exp, pf, reach, zone)
                } else {
                    region(q_exp, [0.0, 0.0], reach, Other::Annulus { c: pf, lo: g.zone_inner, hi: g.zone_outer })
                };
                match t {
                    Tri::Yes => return Tri::Yes,
                    Tri::Unresolved => verdict = Tri::Unresolved,
                    Tri::No => {}
                }
            }
        }
        verdict
    }

    /// Classifies one sample for radius `2^−m`: `Some(true)` inside the
    /// excess, `Some(false)` outside, `None` undecided.
    fn in_excess(&self, x: &Fx, m: usize) -> Option<bool> {
        let xf = [from_fx(x[0]), from_fx(x[1])];
        if self.contains_fx(x, xf) {
            return Some(false);
        }
        let r = pow2(m as u32);
        let rho = xf[0].hypot(xf[1]);
        let mut candidates: Vec<(f64, usize)> = self
            .rings
            .iter()
            .map(|g| ((g.zone_inner - rho).max(rho - g.zone_outer).max(0.0), g.k))
            .filter(|&(d, k)| d <= r + self.rings[k - 1].radius)
            .collect();
        candidates.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        let mut unresolved = false;
        for (dist, k) in candidates {
            let s = self.rings[k - 1].radius;
            for j in 1..=self.rings.len() {
                if dist > r / j as f64 + s {
                    break;
                }
                match self.hit(x, xf, k, j, m) {
                    Tri::Yes => return Some(true),
                    Tri::Unresolved => unresolved = true,
                    Tri::No => {}
                }
            }
        }
        if unresolved {
            None
        } else {
            Some(false)
        }
    }
}

fn nearest(v: i128, shift: u32) -> i128 {
    (v + (1i128 << (shift - 1))) >> shift
}

fn exact_dist(x: &Fx, p: &Fx) -> f64 {
    from_fx(x[0] - p[0]).hypot(from_fx(x[1] - p[1]))
}

/// Largest disc inscribed in `B(c, rad) ∩ other`. Both sets are symmetric
/// about the line through their centres and the radius function is concave
/// along each half of it, so the optimum is at a kink or a crossing.
fn fat_radius(c: [f64; 2], rad: f64, other: Other) -> f64 {
    let (c2, ts): ([f64; 2], Vec<f64>) = match other {
        Other::Disc { c: c2, r } => {
            let d = (c[0] - c2[0]).hypot(c[1] - c2[1]);
            (c2, vec![0.0, d, (0.5 * (d + r - rad)).clamp(0.0, d)])
        }
        Other::Annulus { c: c2, lo, hi } => {
            let d = (c[0] - c2[0]).hypot(c[1] - c2[1]);
            let mid = 0.5 * (lo + hi);
            (c2, vec![d, 0.5 * (rad + d + lo), 0.5 * (hi + d - rad), mid, -mid, -0.5 * (rad - d + lo)])
        }
    };
    let d = (c[0] - c2[0]).hypot(c[1] - c2[1]);
    ts.into_iter()
        .map(|t| {
            let own = rad - (t - d).abs();
            let theirs = match other {
                Other::Disc { r, .. } => r - t.abs(),
                Other::Annulus { lo, hi, .. } => (t.abs() - lo).min(hi - t.abs()),
            };
            own.min(theirs)
        })
        .fold(f64::NEG_INFINITY, f64::max)
}

/// Does `2^−l_exp · Z²` meet `B(c, rad) ∩ other`?
fn region(l_exp: u32, c: [f64; 2], rad: f64, other: Other) -> Tri {
    let l = pow2(l_exp);
    let (c2, outer) = match other {
        Other::Disc { c, r } => (c, r),
        Other::Annulus { c, hi, .. } => (c, hi),
    };
    let d = (c[0] - c2[0]).hypot(c[1] - c2[1]);
    if d > rad + outer {
        return Tri::No;
    }
    if let Other::Annulus { lo, .. } = other {
        if d + rad < lo {
            return Tri::No;
        }
    }
    // A closed disc of radius l/√2 always holds a lattice point.
    if fat_radius(c, rad, other) >= l / SQRT_2 * (1.0 + 1e-9) {
        return Tri::Yes;
    }
    let x_lo = ((c[0] - rad).max(c2[0] - outer) / l).ceil();
    let x_hi = ((c[0] + rad).min(c2[0] + outer) / l).floor();
    if x_hi - x_lo > COLUMN_CAP || x_lo.abs().max(x_hi.abs()) > 2f64.powi(52) {
        return Tri::Unresolved;
    }
    let mut i = x_lo;
    while i <= x_hi {
        let xc = i * l;
        let w1 = rad * rad - (xc - c[0]).powi(2);
        let w2 = outer * outer - (xc - c2[0]).powi(2);
        if w1 >= 0.0 && w2 >= 0.0 {
            let (w1, w2) = (w1.sqrt(), w2.sqrt());
            let a = (c[1] - w1).max(c2[1] - w2);
            let b = (c[1] + w1).min(c2[1] + w2);
            let hole = match other {
                Other::Annulus { lo, .. } => {
                    let w3 = lo * lo - (xc - c2[0]).powi(2);
                    (w3 > 0.0).then(|| (c2[1] - w3.sqrt(), c2[1] + w3.sqrt()))
                }
                Other::Disc { .. } => None,
            };
            let hit = match hole {
                None => has_multiple(a, b, l),
                Some((h0, h1)) => has_multiple(a, b.min(h0), l) || has_multiple(a.max(h1), b, l),
            };
            if hit {
                return Tri::Yes;
            }
        }
        i += 1.0;
    }
    Tri::No
}

fn has_multiple(a: f64, b: f64, l: f64) -> bool {
    a <= b && (a / l).ceil() <= (b / l).floor()
}

/// Calls `f(i, j)` for lattice points `(i, j)·2^−l_exp` in `B(c, rad)` until
/// it returns true. `None` if the work cap was hit first.
fn for_lattice_in_disc(l_exp: u32, c: [f64; 2], rad: f64, mut f: impl FnMut(i64, i64) -> bool) -> Option<bool> {
    let l = pow2(l_exp);
    let x_lo = ((c[0] - rad) / l).ceil();
    let x_hi = ((c[0] + rad) / l).floor();
    if x_hi - x_lo > COLUMN_CAP {
        return None;
    }
    let mut seen = 0usize;
    let mut i = x_lo;
    while i <= x_hi {
        let w = rad * rad - (i * l - c[0]).powi(2);
        if w >= 0.0 {
            let w = w.sqrt();
            let (j0, j1) = (((c[1] - w) / l).ceil() as i64, ((c[1] + w) / l).floor() as i64);
            for j in j0..=j1 {
                seen += 1;
                if seen > BAND_POINT_CAP {
                    return None;
                }
                if f(i as i64, j) {
                    return Some(true);
                }
            }
        }
        i += 1.0;
    }
    Some(false)
}

/// `λ(R_m)/(2·2^−m) = π(m⁻² − (m+1)⁻²)·2^(m−1)`.
pub fn ring_lower_bound(m: usize) -> f64 {
    let mf = m as f64;
    PI * (1.0 / (mf * mf) - 1.0 / ((mf + 1.0) * (mf + 1.0))) * 2f64.powi(m as i32 - 1)
}

/// Builds the truncated construction and measures `G(rQ, 1_A)/r` at
/// `r = 2^−m`, `m = 4..=m_max`, by sampling each ring, the outer shell
/// `1 < |x| ≤ 1 + r` and the inner disc separately.
pub fn counterexample(cfg: &CounterexampleConfig) -> Result<CounterexampleReport> {
    let set = SparseSet::new(cfg.m_max)?;
    if cfg.samples < 2 {
        return Err(Error::InvalidInput("counterexample needs at least 2 samples per stratum".into()));
    }
    let m_max = cfg.m_max;
    let points = (4..=m_max)
        .map(|m| {
            let r = pow2(m as u32);
            let mut strata: Vec<(f64, f64)> = (1..=m_max).map(|k| (1.0 / (k as f64 + 1.0), 1.0 / k as f64)).collect();
            strata.push((1.0, 1.0 + r));
            strata.push((0.0, 1.0 / (m_max as f64 + 1.0)));
            let blocks = cfg.samples.div_ceil(BLOCK);
            let units: Vec<(usize, u64)> = (0..strata.len()).flat_map(|s| (0..blocks).map(move |b| (s, b))).collect();
            let counts: Vec<(u64, u64)> = units
                .par_iter()
                .map(|&(s, b)| {
                    let stream = ((m as u64) << 40) | ((s as u64) << 24) | b;
                    let mut rng = stream_rng(cfg.seed, stream);
                    let (a, bb) = strata[s];
                    let (mut hits, mut unresolved) = (0u64, 0u64);
                    for i in b * BLOCK..((b + 1) * BLOCK).min(cfg.samples) {
                        let u = (i as f64 + rng.random::<f64>()) / cfg.samples as f64;
                        let rho = (a * a + (bb * bb - a * a) * u).sqrt();
                        let th = 2.0 * PI * rng.random::<f64>();
                        let jitter = |rng: &mut rand_chacha::ChaCha8Rng| (rng.random::<u128>() >> 60) as i128;
                        let x = [to_fx(rho * th.cos()) + jitter(&mut rng), to_fx(rho * th.sin()) + jitter(&mut rng)];
                        match set.in_excess(&x, m) {
                            Some(true) => hits += 1,
                            Some(false) => {}
                            None => unresolved += 1,
                        }
                    }
                    (hits, unresolved)
                })
                .collect();
            let n = cfg.samples as f64;
            let (mut value, mut var, mut unresolved) = (0.0, 0.0, 0u64);
            let mut ring = (0.0, 0.0);
            for (s, &(a, b)) in strata.iter().enumerate() {
                let area = PI * (b * b - a * a);
                let (h, u) =
                    units.iter().zip(&counts).filter(|((us, _), _)| *us == s).fold((0u64, 0u64), |acc, (_, c)| (acc.0 + c.0, acc.1 + c.1));
                let pt = (h as f64 + 0.5) / (n + 1.0);
                let (v, w) = (area * h as f64 / n, area * area * pt * (1.0 - pt) / n);
                value += v;
                var += w;
                unresolved += u;
                if s + 1 == m {
                    ring = (v, w);
                }
            }
            let total = cfg.samples * strata.len() as u64;
            RatioPoint {
                m,
                r,
                ratio: Estimate::monte_carlo(value / r, var.sqrt() / r, total),
                lower_bound: ring_lower_bound(m),
                ring_ratio: Estimate::monte_carlo(ring.0 / r, ring.1.sqrt() / r, cfg.samples),
                unresolved,
            }
        })
        .collect();
    let perimeter_bound = set.perimeter_bound();
    // Q_1 contains (±1, 0), so conv(Q ∪ {0}) has circumradius exactly 1.
    let circumradius = 1.0;
    Ok(CounterexampleReport {
        m_max,
        rings: set.rings.clone(),
        perimeter_bound,
        circumradius,
        vq_bound: circumradius * perimeter_bound,
        points,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn construction_constraints() {
        let set = SparseSet::new(20).unwrap();
        for g in set.rings() {
            let k = g.k as f64;
            let cover = 1.0 / (2f64.powi(g.k as i32) * k);
            assert!(g.radius + SQRT_2 * g.eps <= cover);
            assert!(g.radius < g.eps / 2.0);
            assert!(g.net_size_bound * PI * g.radius.powi(2) < 0.5 * PI * (1.0 / (k * k) - 1.0 / ((k + 1.0) * (k + 1.0))));
            assert!(SQRT_2 * pow2(g.q_exp) <= g.radius);
        }
        assert!(set.perimeter_bound() <= 0.5);
        assert!(SparseSet::new(3).is_err() && SparseSet::new(21).is_err());
    }

    #[test]
    fn lower_bound_values() {
        assert!((ring_lower_bound(10) - 2.79).abs() < 0.01);
        assert!((ring_lower_bound(14) - 16.92).abs() < 0.01);
    }

    #[test]
    fn membership_of_net_discs() {
        let set = SparseSet::new(6).unwrap();
        let g = &set.rings()[0];
        // (3/4, 0) is a point of ε₁Z² inside the first zone.
        let a = [0.75, 0.0];
        assert!(set.contains(a));
        assert!(set.contains([0.75 + 0.9 * g.radius, 0.0]));
        assert!(!set.contains([0.75 + 1.1 * g.radius, 0.0]));
        assert!(!set.contains([0.75 + 0.5 * g.eps, 0.0]));
        assert!(set.q_contains([1.0, 0.0]) && set.q_contains([0.0, 0.0]));
        assert!(!set.q_contains([1.0, 0.001]));
    }

    #[test]
    fn region_test_cases() {
        // Unit lattice: disc of radius 0.3 around (0.5, 0.5) misses it.
        assert_eq!(region(0, [0.5, 0.5], 0.3, Other::Disc { c: [0.5, 0.5], r: 1.0 }), Tri::No);
        assert_eq!(region(0, [0.5, 0.5], 0.75, Other::Disc { c: [0.5, 0.5], r: 1.0 }), Tri::Yes);
        // Thin annulus around the origin passing through (1, 0).
        let ring = Other::Annulus { c: [0.0, 0.0], lo: 0.99, hi: 1.01 };
        assert_eq!(region(0, [1.0, 0.0], 0.05, ring), Tri::Yes);
        assert_eq!(region(0, [0.0, 0.0], 5.0, Other::Annulus { c: [0.0, 0.0], lo: 1.1, hi: 1.3 }), Tri::No);
        assert_eq!(region(0, [0.7, 0.7], 0.05, ring), Tri::No);
    }

    #[test]
    fn region_matches_brute_force() {
        let mut rng = stream_rng(11, 0);
        for _ in 0..2000 {
            let c = [rng.random_range(-3.0..3.0), rng.random_range(-3.0..3.0)];
            let rad = rng.random_range(0.05..1.5);
            let c2 = [rng.random_range(-3.0..3.0), rng.random_range(-3.0..3.0)];
            let lo = rng.random_range(0.0..2.0);
            let hi = lo + rng.random_range(0.01..1.0);
            let other = Other::Annulus { c: c2, lo, hi };
            let mut brute = false;
            for i in -6..=6 {
                for j in -6..=6 {
                    let p = [i as f64, j as f64];
                    let d1 = (p[0] - c[0]).hypot(p[1] - c[1]);
                    let d2 = (p[0] - c2[0]).hypot(p[1] - c2[1]);
                    brute |= d1 <= rad && d2 >= lo && d2 <= hi;
                }
            }
            let got = region(0, c, rad, other);
            assert_eq!(got == Tri::Yes, brute, "c={c:?} rad={rad} c2={c2:?} lo={lo} hi={hi}");
        }
    }

    #[test]
    fn ratios_grow() {
        let rep = counterexample(&CounterexampleConfig { m_max: 8, samples: 512, seed: 1 }).unwrap();
        assert_eq!(rep.points.len(), 5);
        for p in &rep.points {
            assert!(p.ratio.value + 3.0 * p.ratio.std_err >= p.lower_bound, "{p:?}");
        }
        assert!(rep.points[4].ratio.value > rep.points[0].ratio.value);
    }
}
