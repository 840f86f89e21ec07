//! Smallest enclosing ball (Welzl's move-to-front recursion).

use super::{dot, StructuringElement};

#[derive(Clone, Debug, PartialEq)]
pub struct Ball {
    pub center: Vec<f64>,
    pub radius: f64,
}

impl Ball {
    fn contains(&self, p: &[f64], tol: f64) -> bool {
        dist(&self.center, p) <= self.radius + tol
    }
}

fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

/// Radius of the smallest ball containing `conv(Q ∪ {0})`.
pub fn circumradius(q: &StructuringElement) -> f64 {
    let mut points: Vec<Vec<f64>> = q.points().iter().map(|p| p.coords().to_vec()).collect();
    points.push(vec![0.0; q.dim()]);
    enclosing_ball(&points).radius
}

/// Smallest enclosing ball of a finite point set in any dimension.
pub fn enclosing_ball(points: &[Vec<f64>]) -> Ball {
    assert!(!points.is_empty(), "enclosing ball of an empty set");
    let dim = points[0].len();
    let scale = points.iter().flat_map(|p| p.iter()).fold(0.0f64, |m, c| m.max(c.abs())).max(1.0);
    let tol = 1e-12 * scale;
    let mut pts: Vec<Vec<f64>> = points.to_vec();
    let mut boundary = Vec::with_capacity(dim + 1);
    let n = pts.len();
    welzl(&mut pts, n, &mut boundary, dim, tol)
}

fn welzl(pts: &mut Vec<Vec<f64>>, n: usize, boundary: &mut Vec<Vec<f64>>, dim: usize, tol: f64) -> Ball {
    let mut ball = ball_on(boundary, dim, tol);
    if boundary.len() == dim + 1 {
        return ball;
    }
    for i in 0..n {
        if ball.radius < 0.0 || !ball.contains(&pts[i], tol) {
            boundary.push(pts[i].clone());
            ball = welzl(pts, i, boundary, dim, tol);
            boundary.pop();
            // move to front
            let p = pts.remove(i);
            pts.insert(0, p);
        }
    }
    ball
}

/// Smallest ball with every point of `support` on its boundary. Affinely
/// dependent supports fall back to the best ball through a proper subset.
fn ball_on(support: &[Vec<f64>], dim: usize, tol: f64) -> Ball {
    match support.len() {
        0 => Ball { center: vec![0.0; dim], radius: -1.0 },
        1 => Ball { center: support[0].clone(), radius: 0.0 },
        _ => circumsphere(support).unwrap_or_else(|| {
            (0..support.len())
                .map(|skip| {
                    let subset: Vec<Vec<f64>> = support.iter().enumerate().filter(|&(i, _)| i != skip).map(|(_, p)| p.clone()).collect();
                    ball_on(&subset, dim, tol)
                })
                .filter(|b| support.iter().all(|p| b.contains(p, tol)))
                .min_by(|a, b| a.radius.total_cmp(&b.radius))
                .expect("some subset ball covers a dependent support")
        }),
    }
}

/// Circumcenter within the affine hull: c = p₀ + Σ λᵢ vᵢ with
/// 2 vᵢ·(c − p₀) = |vᵢ|².
fn circumsphere(support: &[Vec<f64>]) -> Option<Ball> {
    let p0 = &support[0];
    let v: Vec<Vec<f64>> = support[1..].iter().map(|p| p.iter().zip(p0).map(|(a, b)| a - b).collect()).collect();
    let k = v.len();
    let mut m = vec![vec![0.0; k + 1]; k];
    for i in 0..k {
        for j in 0..k {
            m[i][j] = 2.0 * dot(&v[i], &v[j]);
        }
        m[i][k] = dot(&v[i], &v[i]);
    }
    let lambda = solve(m)?;
    let mut center = p0.clone();
    for (l, vi) in lambda.iter().zip(&v) {
        for (c, x) in center.iter_mut().zip(vi) {
            *c += l * x;
        }
    }
    let radius = dist(&center, p0);
    Some(Ball { center, radius })
}

/// Gaussian elimination with partial pivoting on an augmented matrix.
pub(crate) fn solve(mut m: Vec<Vec<f64>>) -> Option<Vec<f64>> {
    let k = m.len();
    let scale = m.iter().flat_map(|r| r[..k].iter()).fold(0.0f64, |a, x| a.max(x.abs()));
    if scale == 0.0 {
        return if k == 0 { Some(vec![]) } else { None };
    }
    for col in 0..k {
        let pivot = (col..k).max_by(|&a, &b| m[a][col].abs().total_cmp(&m[b][col].abs()))?;
        if m[pivot][col].abs() <= 1e-12 * scale {
            return None;
        }
        m.swap(col, pivot);
        for row in col + 1..k {
            let f = m[row][col] / m[col][col];
            for c in col..=k {
                m[row][c] -= f * m[col][c];
            }
        }
    }
    let mut x = vec![0.0; k];
    for row in (0..k).rev() {
        let s: f64 = (row + 1..k).map(|c| m[row][c] * x[c]).sum();
        x[row] = (m[row][k] - s) / m[row][row];
    }
    Some(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::Vector;

    fn se(points: &[&[f64]]) -> StructuringElement {
        StructuringElement::new(points.iter().map(|p| Vector::from(*p)).collect()).unwrap()
    }

    #[test]
    fn circumradius_examples() {
        assert!((circumradius(&se(&[&[1.0, 0.0]])) - 0.5).abs() < 1e-15);
        assert_eq!(circumradius(&StructuringElement::origin(2)), 0.0);
        let cross = se(&[&[1.0, 0.0], &[-1.0, 0.0], &[0.0, 1.0], &[0.0, -1.0]]);
        assert!((circumradius(&cross) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn triangle_and_tetrahedron() {
        // Acute triangle: circumcircle; obtuse: diameter of the long side.
        let acute = enclosing_ball(&[vec![0.0, 0.0], vec![2.0, 0.0], vec![1.0, 1.5]]);
        assert!((acute.center[0] - 1.0).abs() < 1e-12);
        let r = ((1.0f64).powi(2) + acute.center[1].powi(2)).sqrt();
        assert!((acute.radius - r).abs() < 1e-12);
        let obtuse = enclosing_ball(&[vec![0.0, 0.0], vec![4.0, 0.0], vec![2.0, 0.5]]);
        assert!((obtuse.radius - 2.0).abs() < 1e-12);
        let tet = enclosing_ball(&[vec![1.0, 1.0, 1.0], vec![1.0, -1.0, -1.0], vec![-1.0, 1.0, -1.0], vec![-1.0, -1.0, 1.0]]);
        assert!((tet.radius - 3f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn degenerate_supports() {
        let collinear = enclosing_ball(&[vec![0.0, 0.0], vec![1.0, 0.0], vec![3.0, 0.0], vec![3.0, 0.0]]);
        assert!((collinear.radius - 1.5).abs() < 1e-12);
        let single = enclosing_ball(&[vec![2.0, 2.0]]);
        assert_eq!(single.radius, 0.0);
        let high = enclosing_ball(&[vec![1.0, 0.0, 0.0, 0.0, 0.0], vec![-1.0, 0.0, 0.0, 0.0, 0.0]]);
        assert!((high.radius - 1.0).abs() < 1e-12);
    }
}
