//! Grain instances: balls and (in the plane, possibly rotated) boxes.

use std::f64::consts::PI;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::geom::unit_ball_volume;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Grain {
    Ball {
        center: Vec<f64>,
        radius: f64,
    },
    /// Box `center + R(angle)·[−half, half]`; `angle` only in the plane.
    Box {
        center: Vec<f64>,
        half: Vec<f64>,
        angle: f64,
    },
}

impl Grain {
    pub fn center(&self) -> &[f64] {
        match self {
            Grain::Ball { center, .. } | Grain::Box { center, .. } => center,
        }
    }

    /// Largest distance from the centre to a point of the grain.
    pub fn reach(&self) -> f64 {
        match self {
            Grain::Ball { radius, .. } => *radius,
            Grain::Box { half, .. } => half.iter().map(|h| h * h).sum::<f64>().sqrt(),
        }
    }

    pub fn volume(&self) -> f64 {
        match self {
            Grain::Ball { center, radius } => unit_ball_volume(center.len()) * radius.powi(center.len() as i32),
            Grain::Box { half, .. } => half.iter().map(|h| 2.0 * h).product(),
        }
    }

    /// Coordinates of `x` in the grain's frame, relative to its centre.
    fn local(&self, x: &[f64], out: &mut [f64]) {
        let c = self.center();
        for k in 0..x.len() {
            out[k] = x[k] - c[k];
        }
        if let Grain::Box { angle, .. } = self {
            if *angle != 0.0 {
                let (s, co) = angle.sin_cos();
                let (a, b) = (out[0], out[1]);
                out[0] = co * a + s * b;
                out[1] = -s * a + co * b;
            }
        }
    }

    fn rotate_dir(&self, d: &[f64], out: &mut [f64]) {
        out[..d.len()].copy_from_slice(d);
        if let Grain::Box { angle, .. } = self {
            if *angle != 0.0 {
                let (s, co) = angle.sin_cos();
                out[0] = co * d[0] + s * d[1];
                out[1] = -s * d[0] + co * d[1];
            }
        }
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        match self {
            Grain::Ball { center, radius } => center.iter().zip(x).map(|(c, y)| (y - c) * (y - c)).sum::<f64>() <= radius * radius,
            Grain::Box { half, .. } => {
                let mut y = [0.0; 3];
                self.local(x, &mut y);
                half.iter().zip(&y).all(|(h, v)| v.abs() <= *h)
            }
        }
    }

    /// Volume of the shell `(grain ⊕ d) ∖ grain` used for sampling; for
    /// boxes the dilation is by the cube `[−d, d]ⁿ` in the grain frame.
    pub fn shell_volume(&self, d: f64) -> f64 {
        match self {
            Grain::Ball { center, radius } => {
                let n = center.len() as i32;
                unit_ball_volume(center.len()) * ((radius + d).powi(n) - radius.powi(n))
            }
            Grain::Box { half, .. } => half.iter().map(|h| 2.0 * (h + d)).product::<f64>() - half.iter().map(|h| 2.0 * h).product::<f64>(),
        }
    }

    pub fn in_shell(&self, x: &[f64], d: f64) -> bool {
        match self {
            Grain::Ball { center, radius } => {
                let r2 = center.iter().zip(x).map(|(c, y)| (y - c) * (y - c)).sum::<f64>();
                r2 > radius * radius && r2 <= (radius + d) * (radius + d)
            }
            Grain::Box { half, .. } => {
                let mut y = [0.0; 3];
                self.local(x, &mut y);
                let outer = half.iter().zip(&y).all(|(h, v)| v.abs() <= h + d);
                let inner = half.iter().zip(&y).all(|(h, v)| v.abs() <= *h);
                outer && !inner
            }
        }
    }

    /// Uniform point of the shell.
    pub fn sample_shell(&self, d: f64, rng: &mut impl Rng, out: &mut [f64]) {
        match self {
            Grain::Ball { center, radius } => {
                let n = center.len();
                let (a, b) = (radius.powi(n as i32), (radius + d).powi(n as i32));
                let rho = (a + (b - a) * rng.random::<f64>()).powf(1.0 / n as f64);
                let mut dir = [0.0; 3];
                match n {
                    1 => dir[0] = if rng.random::<bool>() { 1.0 } else { -1.0 },
                    2 => {
                        let t = 2.0 * PI * rng.random::<f64>();
                        dir[0] = t.cos();
                        dir[1] = t.sin();
                    }
                    _ => {
                        let z = 2.0 * rng.random::<f64>() - 1.0;
                        let t = 2.0 * PI * rng.random::<f64>();
                        let s = (1.0 - z * z).max(0.0).sqrt();
                        dir[0] = s * t.cos();
                        dir[1] = s * t.sin();
                        dir[2] = z;
                    }
                }
                for k in 0..n {
                    out[k] = center[k] + rho * dir[k];
                }
            }
            Grain::Box { center, half, angle } => {
                let n = center.len();
                let mut y = [0.0; 3];
                loop {
                    for k in 0..n {
                        y[k] = (half[k] + d) * (2.0 * rng.random::<f64>() - 1.0);
                    }
                    if !half.iter().zip(&y).all(|(h, v)| v.abs() <= *h) {
                        break;
                    }
                }
                let (s, co) = angle.sin_cos();
                if n == 2 && *angle != 0.0 {
                    let (a, b) = (y[0], y[1]);
                    y[0] = co * a - s * b;
                    y[1] = s * a + co * b;
                }
                for k in 0..n {
                    out[k] = center[k] + y[k];
                }
            }
        }
    }

    /// Parameters `t ∈ [0, 1]` with `x + t·dir` in the grain, as an interval.
    pub fn segment_interval(&self, x: &[f64], dir: &[f64]) -> Option<(f64, f64)> {
        let n = x.len();
        let (mut y, mut w) = ([0.0; 3], [0.0; 3]);
        self.local(x, &mut y);
        self.rotate_dir(dir, &mut w);
        let (t0, t1) = match self {
            Grain::Ball { radius, .. } => {
                let a: f64 = w[..n].iter().map(|v| v * v).sum();
                let b: f64 = (0..n).map(|k| y[k] * w[k]).sum();
                let c: f64 = y[..n].iter().map(|v| v * v).sum::<f64>() - radius * radius;
                if a == 0.0 {
                    if c > 0.0 {
                        return None;
                    }
                    (0.0, 1.0)
                } else {
                    let disc = b * b - a * c;
                    if disc < 0.0 {
                        return None;
                    }
                    let s = disc.sqrt();
                    ((-b - s) / a, (-b + s) / a)
                }
            }
            Grain::Box { half, .. } => {
                let (mut t0, mut t1) = (f64::NEG_INFINITY, f64::INFINITY);
                for k in 0..n {
                    if w[k] == 0.0 {
                        if y[k].abs() > half[k] {
                            return None;
                        }
                    } else {
                        let (a, b) = ((-half[k] - y[k]) / w[k], (half[k] - y[k]) / w[k]);
                        t0 = t0.max(a.min(b));
                        t1 = t1.min(a.max(b));
                    }
                }
                (t0, t1)
            }
        };
        let (t0, t1) = (t0.max(0.0), t1.min(1.0));
        (t0 <= t1).then_some((t0, t1))
    }

    /// Box corners in counterclockwise order (planar boxes only).
    pub(crate) fn corners(&self) -> Option<[[f64; 2]; 4]> {
        let Grain::Box { center, half, angle } = self else { return None };
        if center.len() != 2 {
            return None;
        }
        let (s, c) = angle.sin_cos();
        let mut out = [[0.0; 2]; 4];
        for (i, (a, b)) in [(1.0, 1.0), (-1.0, 1.0), (-1.0, -1.0), (1.0, -1.0)].iter().enumerate().map(|(i, p)| (i, *p)) {
            let (x, y) = (a * half[0], b * half[1]);
            out[i] = [center[0] + c * x - s * y, center[1] + s * x + c * y];
        }
        Some(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampling::stream_rng;

    #[test]
    fn rotated_box_membership() {
        let g = Grain::Box { center: vec![1.0, 1.0], half: vec![0.5, 0.1], angle: PI / 2.0 };
        assert!(g.contains(&[1.0, 1.45]));
        assert!(!g.contains(&[1.45, 1.0]));
        let c = g.corners().unwrap();
        for p in c {
            assert!(g.contains(&[p[0] * (1.0 - 1e-12) + 1e-12, p[1] * (1.0 - 1e-12) + 1e-12]));
        }
    }

    #[test]
    fn shell_samples_lie_in_shell() {
        let mut rng = stream_rng(5, 0);
        let grains = [
            Grain::Ball { center: vec![0.3, -0.2], radius: 0.1 },
            Grain::Ball { center: vec![0.0, 0.0, 0.0], radius: 0.2 },
            Grain::Box { center: vec![0.0, 0.0], half: vec![0.2, 0.1], angle: 0.7 },
        ];
        for g in &grains {
            let mut x = [0.0; 3];
            for _ in 0..1000 {
                g.sample_shell(0.05, &mut rng, &mut x);
                assert!(g.in_shell(&x[..g.center().len()], 0.05 + 1e-12));
            }
        }
        let b = &grains[2];
        assert!((b.shell_volume(0.05) - (0.5 * 0.3 - 0.4 * 0.2)).abs() < 1e-12);
    }

    #[test]
    fn segment_intervals() {
        let g = Grain::Ball { center: vec![0.0, 0.0], radius: 1.0 };
        let (a, b) = g.segment_interval(&[-2.0, 0.0], &[4.0, 0.0]).unwrap();
        assert!((a - 0.25).abs() < 1e-15 && (b - 0.75).abs() < 1e-15);
        assert!(g.segment_interval(&[-2.0, 1.5], &[4.0, 0.0]).is_none());
        assert!(g.segment_interval(&[2.0, 0.0], &[1.0, 0.0]).is_none());
        let b = Grain::Box { center: vec![0.0, 0.0], half: vec![1.0, 1.0], angle: PI / 4.0 };
        let (s, t) = b.segment_interval(&[-2.0, 0.0], &[4.0, 0.0]).unwrap();
        let h = 2f64.sqrt() / 4.0;
        assert!((s - (0.5 - h)).abs() < 1e-12 && (t - (0.5 + h)).abs() < 1e-12);
        assert!(b.segment_interval(&[2.0, 0.5], &[1.0, 0.0]).is_none());
    }
}
