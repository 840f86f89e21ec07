//! Certified positive-gap test between convex shapes (Gilbert's algorithm on
//! the Minkowski difference, driven by support maps).

use super::Shape;
use crate::geom::dot;

const MAX_ITER: usize = 10_000;

/// A lower bound on `dist(a, b)` for convex `a`, `b`. Positive only when a
/// strict separating hyperplane has been found.
pub(crate) fn gap_lower_bound(a: &Shape, b: &Shape) -> f64 {
    if let (Shape::Ball(p), Shape::Ball(q)) = (a, b) {
        let d: f64 = p.center.iter().zip(&q.center).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt();
        return d - p.radius - q.radius;
    }
    let dim = a.dim();
    let support_diff = |u: &[f64]| -> Vec<f64> {
        let neg: Vec<f64> = u.iter().map(|x| -x).collect();
        let sa = a.support_point(u);
        let sb = b.support_point(&neg);
        sa.iter().zip(&sb).map(|(x, y)| x - y).collect()
    };
    let scale = a.extent().max(b.extent()).max(1e-300);
    let tol = 1e-12 * scale;
    let mut z = support_diff(&vec![1.0; dim]);
    let mut lower = f64::NEG_INFINITY;
    for _ in 0..MAX_ITER {
        let zn = dot(&z, &z).sqrt();
        if zn <= tol {
            return 0.0;
        }
        let neg: Vec<f64> = z.iter().map(|x| -x).collect();
        let s = support_diff(&neg);
        lower = lower.max(dot(&z, &s) / zn);
        if lower > tol || zn - lower <= tol {
            return lower;
        }
        // Closest point to the origin on the segment [z, s].
        let d: Vec<f64> = s.iter().zip(&z).map(|(x, y)| x - y).collect();
        let dd = dot(&d, &d);
        if dd == 0.0 {
            return lower;
        }
        let t = (-dot(&z, &d) / dd).clamp(0.0, 1.0);
        z.iter_mut().zip(&d).for_each(|(x, y)| *x += t * y);
    }
    lower
}
