//! Bounded convex polytopes in dimension 1 to 3: hull facets, volume and
//! exact facet areas.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geom::dot;

/// A supporting hyperplane `normal·x = offset` with unit outer normal and the
/// (n−1)-dimensional area of the face it cuts out.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Facet {
    pub normal: Vec<f64>,
    pub offset: f64,
    pub area: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Polytope {
    dim: usize,
    vertices: Vec<Vec<f64>>,
    facets: Vec<Facet>,
    scale: f64,
}

fn scale_of(points: &[Vec<f64>]) -> f64 {
    points.iter().flat_map(|p| p.iter()).fold(0.0f64, |m, c| m.max(c.abs())).max(1e-300)
}

fn sub(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

fn cross(a: &[f64], b: &[f64]) -> [f64; 3] {
    [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

impl Polytope {
    /// Convex hull of a point cloud; must be full-dimensional.
    pub fn from_vertices(points: Vec<Vec<f64>>) -> Result<Self> {
        let dim = points.first().map(Vec::len).ok_or_else(|| Error::InvalidInput("polytope without vertices".into()))?;
        if !(1..=3).contains(&dim) {
            return Err(Error::UnsupportedDimension(dim));
        }
        for p in &points {
            crate::error::ensure_dim(dim, p.len())?;
            if p.iter().any(|c| !c.is_finite()) {
                return Err(Error::InvalidInput("non-finite polytope vertex".into()));
            }
        }
        let scale = scale_of(&points);
        let (vertices, facets) = match dim {
            1 => hull_1d(&points),
            2 => hull_2d(&points, scale),
            _ => hull_3d(&points, scale),
        };
        let poly = Polytope { dim, vertices, facets, scale };
        if poly.facets.len() <= dim || poly.volume() <= 1e-12 * scale.powi(dim as i32) {
            return Err(Error::InvalidInput("polytope is not full-dimensional".into()));
        }
        Ok(poly)
    }

    /// Intersection of half-spaces `normal·x ≤ offset`.
    pub fn from_halfspaces(halfspaces: &[(Vec<f64>, f64)]) -> Result<Self> {
        let dim = halfspaces.first().map(|h| h.0.len()).ok_or(Error::Unbounded)?;
        if !(1..=3).contains(&dim) {
            return Err(Error::UnsupportedDimension(dim));
        }
        let mut planes = Vec::with_capacity(halfspaces.len());
        for (a, b) in halfspaces {
            crate::error::ensure_dim(dim, a.len())?;
            let len = norm(a);
            if !(len > 0.0 && len.is_finite() && b.is_finite()) {
                return Err(Error::InvalidInput("degenerate half-space".into()));
            }
            planes.push((a.iter().map(|x| x / len).collect::<Vec<f64>>(), b / len));
        }
        if has_recession_direction(&planes) {
            return Err(Error::Unbounded);
        }
        let scale = planes.iter().fold(1e-300f64, |m, p| m.max(p.1.abs()));
        let tol = 1e-10 * scale;
        let feasible = |x: &[f64]| planes.iter().all(|(a, b)| dot(a, x) <= b + tol);
        let mut vertices = Vec::new();
        let mut push = |x: Vec<f64>| {
            if x.iter().all(|c| c.is_finite()) && feasible(&x) {
                vertices.push(x);
            }
        };
        let m = planes.len();
        match dim {
            1 => {
                for (a, b) in &planes {
                    push(vec![b / a[0]]);
                }
            }
            2 => {
                for i in 0..m {
                    for j in i + 1..m {
                        if let Some(x) = intersect(&[&planes[i], &planes[j]]) {
                            push(x);
                        }
                    }
                }
            }
            _ => {
                for i in 0..m {
                    for j in i + 1..m {
                        for k in j + 1..m {
                            if let Some(x) = intersect(&[&planes[i], &planes[j], &planes[k]]) {
                                push(x);
                            }
                        }
                    }
                }
            }
        }
        if vertices.is_empty() {
            return Err(Error::InvalidInput("half-spaces have empty intersection".into()));
        }
        Self::from_vertices(vertices)
    }

    /// The axis-aligned box `[lo, hi]`.
    pub fn axis_box(lo: &[f64], hi: &[f64]) -> Result<Self> {
        crate::error::ensure_dim(lo.len(), hi.len())?;
        if lo.iter().zip(hi).any(|(l, h)| !(l < h)) {
            return Err(Error::InvalidInput("box needs lo < hi on every axis".into()));
        }
        let n = lo.len();
        let corners = (0..1usize << n).map(|mask| (0..n).map(|i| if mask >> i & 1 == 1 { hi[i] } else { lo[i] }).collect()).collect();
        Self::from_vertices(corners)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn vertices(&self) -> &[Vec<f64>] {
        &self.vertices
    }

    pub fn facets(&self) -> &[Facet] {
        &self.facets
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        let tol = 1e-12 * self.scale;
        self.facets.iter().all(|f| dot(&f.normal, x) <= f.offset + tol)
    }

    /// Divergence formula: λ(P) = (1/n) Σ A_f · offset_f.
    pub fn volume(&self) -> f64 {
        let c = &self.vertices[0];
        self.facets.iter().map(|f| f.area * (f.offset - dot(&f.normal, c))).sum::<f64>() / self.dim as f64
    }

    pub fn perimeter(&self) -> f64 {
        self.facets.iter().map(|f| f.area).sum()
    }

    pub fn bbox(&self) -> (Vec<f64>, Vec<f64>) {
        let mut lo = vec![f64::INFINITY; self.dim];
        let mut hi = vec![f64::NEG_INFINITY; self.dim];
        for v in &self.vertices {
            for i in 0..self.dim {
                lo[i] = lo[i].min(v[i]);
                hi[i] = hi[i].max(v[i]);
            }
        }
        (lo, hi)
    }

    /// Vertex maximizing `u·x`.
    pub fn support_point(&self, u: &[f64]) -> &[f64] {
        self.vertices.iter().max_by(|a, b| dot(a, u).total_cmp(&dot(b, u))).expect("polytope has vertices")
    }

    /// Max facet violation: exact depth inside, a lower bound on the distance
    /// outside.
    pub fn signed_distance_bound(&self, x: &[f64]) -> f64 {
        self.facets.iter().map(|f| dot(&f.normal, x) - f.offset).fold(f64::NEG_INFINITY, f64::max)
    }

    /// `Some((lo, hi))` if this polytope is an axis-aligned box.
    pub fn as_axis_box(&self) -> Option<(Vec<f64>, Vec<f64>)> {
        if self.facets.len() != 2 * self.dim {
            return None;
        }
        let tol = 1e-12;
        let axis_aligned = self
            .facets
            .iter()
            .all(|f| f.normal.iter().filter(|c| c.abs() > tol).count() == 1 && f.normal.iter().any(|c| (c.abs() - 1.0).abs() <= tol));
        axis_aligned.then(|| self.bbox())
    }

    pub fn translate(&self, y: &[f64]) -> Self {
        let vertices: Vec<Vec<f64>> = self.vertices.iter().map(|v| v.iter().zip(y).map(|(a, b)| a + b).collect()).collect();
        Polytope {
            dim: self.dim,
            scale: scale_of(&vertices),
            vertices,
            facets: self
                .facets
                .iter()
                .map(|f| Facet { normal: f.normal.clone(), offset: f.offset + dot(&f.normal, y), area: f.area })
                .collect(),
        }
    }

    pub fn scale_about_origin(&self, c: f64) -> Self {
        let area_factor = c.powi(self.dim as i32 - 1);
        Polytope {
            dim: self.dim,
            vertices: self.vertices.iter().map(|v| v.iter().map(|a| a * c).collect()).collect(),
            facets: self
                .facets
                .iter()
                .map(|f| Facet { normal: f.normal.clone(), offset: f.offset * c, area: f.area * area_factor })
                .collect(),
            scale: self.scale * c,
        }
    }
}

fn intersect(planes: &[&(Vec<f64>, f64)]) -> Option<Vec<f64>> {
    let m = planes.iter().map(|(a, b)| {
        let mut row = a.clone();
        row.push(*b);
        row
    });
    crate::geom::solve_linear(m.collect())
}

/// True if some nonzero `d` satisfies `a·d ≤ 0` for every normal `a`.
/// Extreme rays of the recession cone lie on one or two constraint planes,
/// so checking those candidates is enough.
fn has_recession_direction(planes: &[(Vec<f64>, f64)]) -> bool {
    let dim = planes[0].0.len();
    let tol = 1e-12;
    let recedes = |d: &[f64]| {
        let len = norm(d);
        len > 1e-9 && planes.iter().all(|(a, _)| dot(a, d) <= tol * len)
    };
    let mut candidates: Vec<Vec<f64>> = Vec::new();
    match dim {
        1 => {
            candidates.push(vec![1.0]);
            candidates.push(vec![-1.0]);
        }
        2 => {
            for (a, _) in planes {
                candidates.push(vec![-a[1], a[0]]);
                candidates.push(vec![a[1], -a[0]]);
            }
        }
        _ => {
            for (i, (a, _)) in planes.iter().enumerate() {
                let helper = if a[0].abs() < 0.9 { [1.0, 0.0, 0.0] } else { [0.0, 1.0, 0.0] };
                let p1 = cross(a, &helper);
                let p2 = cross(a, &p1);
                for p in [p1, p2] {
                    candidates.push(p.to_vec());
                    candidates.push(p.iter().map(|x| -x).collect());
                }
                for (b, _) in &planes[i + 1..] {
                    let c = cross(a, b);
                    candidates.push(c.to_vec());
                    candidates.push(c.iter().map(|x| -x).collect());
                }
            }
        }
    }
    candidates.iter().any(|d| recedes(d))
}

fn hull_1d(points: &[Vec<f64>]) -> (Vec<Vec<f64>>, Vec<Facet>) {
    let lo = points.iter().map(|p| p[0]).fold(f64::INFINITY, f64::min);
    let hi = points.iter().map(|p| p[0]).fold(f64::NEG_INFINITY, f64::max);
    let facets = vec![Facet { normal: vec![1.0], offset: hi, area: 1.0 }, Facet { normal: vec![-1.0], offset: -lo, area: 1.0 }];
    (vec![vec![lo], vec![hi]], facets)
}

/// Counter-clockwise hull vertices (Andrew's monotone chain).
pub(crate) fn convex_hull_2d(points: &[[f64; 2]], tol: f64) -> Vec<[f64; 2]> {
    let mut pts = points.to_vec();
    pts.sort_by(|a, b| a[0].total_cmp(&b[0]).then(a[1].total_cmp(&b[1])));
    pts.dedup();
    if pts.len() < 3 {
        return pts;
    }
    let turn = |o: &[f64; 2], a: &[f64; 2], b: &[f64; 2]| (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0]);
    let mut hull: Vec<[f64; 2]> = Vec::with_capacity(2 * pts.len());
    for pass in 0..2 {
        let start = hull.len();
        let iter: Box<dyn Iterator<Item = &[f64; 2]>> = if pass == 0 { Box::new(pts.iter()) } else { Box::new(pts.iter().rev()) };
        for p in iter {
            while hull.len() >= start + 2 && turn(&hull[hull.len() - 2], &hull[hull.len() - 1], p) <= tol {
                hull.pop();
            }
            hull.push(*p);
        }
        hull.pop();
    }
    hull
}

fn polygon_area(poly: &[[f64; 2]]) -> f64 {
    let m = poly.len();
    (0..m)
        .map(|i| {
            let (a, b) = (poly[i], poly[(i + 1) % m]);
            a[0] * b[1] - a[1] * b[0]
        })
        .sum::<f64>()
        / 2.0
}

fn hull_2d(points: &[Vec<f64>], scale: f64) -> (Vec<Vec<f64>>, Vec<Facet>) {
    let pts: Vec<[f64; 2]> = points.iter().map(|p| [p[0], p[1]]).collect();
    let hull = convex_hull_2d(&pts, 1e-14 * scale * scale);
    let m = hull.len();
    let mut facets = Vec::with_capacity(m);
    if m >= 3 {
        for i in 0..m {
            let (a, b) = (hull[i], hull[(i + 1) % m]);
            let (dx, dy) = (b[0] - a[0], b[1] - a[1]);
            let len = (dx * dx + dy * dy).sqrt();
            let normal = vec![dy / len, -dx / len];
            let offset = normal[0] * a[0] + normal[1] * a[1];
            facets.push(Facet { normal, offset, area: len });
        }
    }
    (hull.iter().map(|p| p.to_vec()).collect(), facets)
}

fn hull_3d(points: &[Vec<f64>], scale: f64) -> (Vec<Vec<f64>>, Vec<Facet>) {
    let mut pts = points.to_vec();
    pts.sort_by(|a, b| a.partial_cmp(b).expect("finite"));
    pts.dedup();
    let tol = 1e-10 * scale;
    let m = pts.len();
    let mut facets: Vec<Facet> = Vec::new();
    for i in 0..m {
        for j in i + 1..m {
            for k in j + 1..m {
                let c = cross(&sub(&pts[j], &pts[i]), &sub(&pts[k], &pts[i]));
                let len = norm(&c);
                if len <= 1e-12 * scale * scale {
                    continue;
                }
                let mut normal: Vec<f64> = c.iter().map(|x| x / len).collect();
                let mut offset = dot(&normal, &pts[i]);
                let above = pts.iter().any(|p| dot(&normal, p) > offset + tol);
                let below = pts.iter().any(|p| dot(&normal, p) < offset - tol);
                if above && below {
                    continue;
                }
                if above {
                    normal.iter_mut().for_each(|x| *x = -*x);
                    offset = -offset;
                }
                let known = facets
                    .iter()
                    .any(|f| f.normal.iter().zip(&normal).all(|(a, b)| (a - b).abs() < 1e-9) && (f.offset - offset).abs() < tol);
                if !known {
                    facets.push(Facet { normal, offset, area: 0.0 });
                }
            }
        }
    }
    let mut on_hull = vec![false; m];
    for f in &mut facets {
        // Orthonormal frame of the facet plane.
        let helper = if f.normal[0].abs() < 0.9 { [1.0, 0.0, 0.0] } else { [0.0, 1.0, 0.0] };
        let e1 = cross(&f.normal, &helper);
        let l1 = norm(&e1);
        let e1: Vec<f64> = e1.iter().map(|x| x / l1).collect();
        let e2 = cross(&f.normal, &e1);
        let planar: Vec<[f64; 2]> = pts
            .iter()
            .enumerate()
            .filter(|(_, p)| (dot(&f.normal, p) - f.offset).abs() <= tol)
            .map(|(idx, p)| {
                on_hull[idx] = true;
                [dot(&e1, p), dot(&e2, p)]
            })
            .collect();
        f.area = polygon_area(&convex_hull_2d(&planar, 1e-14 * scale * scale)).abs();
    }
    facets.retain(|f| f.area > 1e-14 * scale * scale);
    let vertices = pts.into_iter().zip(on_hull).filter_map(|(p, hit)| hit.then_some(p)).collect();
    (vertices, facets)
}
