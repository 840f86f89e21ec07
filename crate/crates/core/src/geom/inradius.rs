//! Relative inradius of `conv(Q ∪ {0})` inside `span Q` by linear programming.
//!
//! The LP maximizes `s` subject to `y·u + s ≤ h(K, u)` over sampled unit
//! directions `u`. That relaxation overestimates the true inradius, so the
//! optimum is pulled down by `L·δ`, where `δ` bounds the chord distance from
//! any unit vector to the nearest sample and `L` bounds `|x − y|` over `K`.
//! `u ↦ h(K,u) − y·u` is `L`-Lipschitz, which makes the result a lower bound.

use minilp::{ComparisonOp, OptimizationDirection, Problem};

use super::{dot, fibonacci_sphere, SphereQuadrature, StructuringElement, Vector};
use crate::error::{ensure_dim, Error, Result};

const RANK_TOL: f64 = 1e-10;

/// Returns `(s, y)`: a certified lower bound on the inradius of
/// `conv(Q ∪ {0})` relative to `span Q`, and the centre of that ball.
pub fn inradius_in_span(q: &StructuringElement, dirs: &SphereQuadrature) -> Result<(f64, Vector)> {
    ensure_dim(q.dim(), dirs.dim())?;
    let n = q.dim();
    let basis = span_basis(q);
    let k = basis.len();
    if k == 0 {
        return Ok((0.0, Vector::zeros(n)));
    }
    if k > 3 {
        return Err(Error::UnsupportedDimension(k));
    }
    // Hull generators in span coordinates, including the origin.
    let mut gens: Vec<Vec<f64>> = q.points().iter().map(|p| basis.iter().map(|b| dot(b, p.coords())).collect()).collect();
    gens.push(vec![0.0; k]);

    let (directions, delta) = span_directions(k, n, dirs)?;
    let (s_lp, y) = solve_lp(&gens, &directions)?;
    let lipschitz = gens.iter().map(|g| g.iter().zip(&y).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt()).fold(0.0, f64::max);
    let s = (s_lp - lipschitz * delta).max(0.0);

    let mut center = vec![0.0; n];
    for (coef, b) in y.iter().zip(&basis) {
        for (c, x) in center.iter_mut().zip(b) {
            *c += coef * x;
        }
    }
    Ok((s, Vector::new(center)))
}

/// Orthonormal basis of span Q by modified Gram–Schmidt.
pub fn span_basis(q: &StructuringElement) -> Vec<Vec<f64>> {
    let scale = q.max_norm().max(f64::MIN_POSITIVE);
    let mut basis: Vec<Vec<f64>> = Vec::new();
    for p in q.points() {
        let mut v = p.coords().to_vec();
        for b in &basis {
            let c = dot(b, &v);
            v.iter_mut().zip(b).for_each(|(x, y)| *x -= c * y);
        }
        let norm = dot(&v, &v).sqrt();
        if norm > RANK_TOL * scale {
            basis.push(v.into_iter().map(|x| x / norm).collect());
        }
    }
    basis
}

/// Sample directions in a `k`-dimensional span and their covering chord `δ`.
fn span_directions(k: usize, n: usize, dirs: &SphereQuadrature) -> Result<(Vec<Vec<f64>>, f64)> {
    match k {
        1 => Ok((vec![vec![1.0], vec![-1.0]], 0.0)),
        2 => {
            let angles: Vec<f64> = if n == 2 {
                dirs.nodes().iter().map(|u| u.coords()[1].atan2(u.coords()[0])).collect()
            } else {
                let m = dirs.len().max(3);
                (0..m).map(|i| std::f64::consts::TAU * i as f64 / m as f64).collect()
            };
            let gap = max_angular_gap(angles.clone());
            if gap >= std::f64::consts::PI {
                return Err(Error::InvalidInput("directions do not surround the origin".into()));
            }
            let delta = 2.0 * (gap / 4.0).sin();
            Ok((angles.iter().map(|t| vec![t.cos(), t.sin()]).collect(), delta))
        }
        _ => {
            let nodes: Vec<Vec<f64>> = dirs.nodes().iter().map(|u| u.coords().to_vec()).collect();
            // The covering angle of a spherical point set has no cheap closed
            // form; estimate it from a dense probe set and pad by 25%.
            let probes = fibonacci_sphere(20_000);
            let worst = probes
                .iter()
                .map(|p| nodes.iter().map(|u| dot(u, p.coords()).clamp(-1.0, 1.0).acos()).fold(f64::INFINITY, f64::min))
                .fold(0.0, f64::max);
            let angle = (1.25 * worst).min(std::f64::consts::PI);
            Ok((nodes, 2.0 * (angle / 2.0).sin()))
        }
    }
}

fn max_angular_gap(mut angles: Vec<f64>) -> f64 {
    if angles.is_empty() {
        return std::f64::consts::TAU;
    }
    angles.sort_by(f64::total_cmp);
    let wrap = angles[0] + std::f64::consts::TAU - angles[angles.len() - 1];
    angles.windows(2).map(|w| w[1] - w[0]).fold(wrap, f64::max)
}

fn solve_lp(gens: &[Vec<f64>], directions: &[Vec<f64>]) -> Result<(f64, Vec<f64>)> {
    let k = gens[0].len();
    let mut lp = Problem::new(OptimizationDirection::Maximize);
    let y: Vec<_> = (0..k).map(|_| lp.add_var(0.0, (f64::NEG_INFINITY, f64::INFINITY))).collect();
    let s = lp.add_var(1.0, (0.0, f64::INFINITY));
    for u in directions {
        let h = gens.iter().map(|g| dot(g, u)).fold(f64::NEG_INFINITY, f64::max);
        let mut row: Vec<_> = y.iter().zip(u).map(|(&v, &c)| (v, c)).collect();
        row.push((s, 1.0));
        lp.add_constraint(row.as_slice(), ComparisonOp::Le, h);
    }
    let solution = lp.solve().map_err(|e| match e {
        minilp::Error::Unbounded => Error::Unbounded,
        other => Error::InvalidInput(format!("inradius LP failed: {other}")),
    })?;
    Ok((solution[s], y.iter().map(|&v| solution[v]).collect()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::sphere_quadrature;

    fn se(points: &[&[f64]]) -> StructuringElement {
        StructuringElement::new(points.iter().map(|p| Vector::from(*p)).collect()).unwrap()
    }

    #[test]
    fn square_inradius() {
        let q = se(&[&[1.0, 1.0], &[1.0, -1.0], &[-1.0, 1.0], &[-1.0, -1.0]]);
        let quad = sphere_quadrature(2, 512).unwrap();
        let (s, y) = inradius_in_span(&q, &quad).unwrap();
        assert!(s <= 1.0 + 1e-12);
        assert!(s > 0.98, "s = {s}");
        assert!(y.norm() < 1e-6);
    }

    #[test]
    fn segment_inradius_is_exact() {
        let quad = sphere_quadrature(2, 64).unwrap();
        let (s, y) = inradius_in_span(&se(&[&[1.0, 0.0]]), &quad).unwrap();
        assert!((s - 0.5).abs() < 1e-12);
        assert!((y.coords()[0] - 0.5).abs() < 1e-12);
        let (s, _) = inradius_in_span(&se(&[&[0.0, 0.0, 0.0], &[0.0, 3.0, 4.0]]), &sphere_quadrature(3, 64).unwrap()).unwrap();
        assert!((s - 2.5).abs() < 1e-12);
    }

    #[test]
    fn origin_only() {
        let quad = sphere_quadrature(2, 16).unwrap();
        let (s, y) = inradius_in_span(&StructuringElement::origin(2), &quad).unwrap();
        assert_eq!(s, 0.0);
        assert!(y.is_zero());
    }

    #[test]
    fn planar_set_in_space() {
        // Triangle (0,0,0),(1,0,0),(0,1,0): inradius (2 − √2)/2.
        let q = se(&[&[1.0, 0.0, 0.0], &[0.0, 1.0, 0.0]]);
        let quad = sphere_quadrature(3, 400).unwrap();
        let (s, _) = inradius_in_span(&q, &quad).unwrap();
        let exact = (2.0 - 2f64.sqrt()) / 2.0;
        assert!(s <= exact + 1e-12 && s > 0.95 * exact, "s = {s}");
    }

    #[test]
    fn cube_inradius_lower_bound() {
        let mut pts = Vec::new();
        for i in 0..8 {
            pts.push(Vector::new((0..3).map(|b| if i >> b & 1 == 1 { 1.0 } else { -1.0 }).collect()));
        }
        let q = StructuringElement::new(pts).unwrap();
        let (s, _) = inradius_in_span(&q, &sphere_quadrature(3, 2000).unwrap()).unwrap();
        assert!(s <= 1.0 + 1e-12 && s > 0.8, "s = {s}");
    }
}
