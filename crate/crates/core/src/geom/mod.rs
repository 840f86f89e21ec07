//! Dimension-generic vectors, finite structuring elements and their support
//! functions, sphere quadrature, mean width, and the enclosing / inscribed
//! ball radii of `conv(Q ∪ {0})`.

mod enclosing;
mod inradius;

use std::ops::{Add, Mul, Neg, Sub};
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::error::{ensure_dim, Error, Result};
use crate::shapes::SurfaceMeasure;

pub(crate) use enclosing::solve as solve_linear;
pub use enclosing::{circumradius, enclosing_ball, Ball as EnclosingBall};
pub use inradius::{inradius_in_span, span_basis};

/// A point or direction in ℝⁿ.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Vector(Vec<f64>);

impl Vector {
    pub fn new(coords: Vec<f64>) -> Self {
        Vector(coords)
    }

    pub fn zeros(dim: usize) -> Self {
        Vector(vec![0.0; dim])
    }

    /// The `axis`-th standard basis vector.
    pub fn basis(dim: usize, axis: usize) -> Self {
        let mut v = vec![0.0; dim];
        v[axis] = 1.0;
        Vector(v)
    }

    pub fn from_angle(theta: f64) -> Self {
        Vector(vec![theta.cos(), theta.sin()])
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[f64] {
        &self.0
    }

    pub fn into_coords(self) -> Vec<f64> {
        self.0
    }

    pub fn dot(&self, other: &Vector) -> f64 {
        dot(&self.0, &other.0)
    }

    pub fn norm(&self) -> f64 {
        self.dot(self).sqrt()
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|c| c.is_finite())
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&c| c == 0.0)
    }

    /// Unit vector in the same direction, `None` for the zero vector.
    pub fn normalized(&self) -> Option<Vector> {
        let n = self.norm();
        (n > 0.0 && n.is_finite()).then(|| self * (1.0 / n))
    }

    /// Rotation by `theta` in the plane; only meaningful for `dim() == 2`.
    pub fn rotated(&self, theta: f64) -> Vector {
        let (s, c) = theta.sin_cos();
        Vector(vec![c * self.0[0] - s * self.0[1], s * self.0[0] + c * self.0[1]])
    }
}

impl From<Vec<f64>> for Vector {
    fn from(v: Vec<f64>) -> Self {
        Vector(v)
    }
}

impl From<&[f64]> for Vector {
    fn from(v: &[f64]) -> Self {
        Vector(v.to_vec())
    }
}

impl<const N: usize> From<[f64; N]> for Vector {
    fn from(v: [f64; N]) -> Self {
        Vector(v.to_vec())
    }
}

impl Add for &Vector {
    type Output = Vector;
    fn add(self, rhs: &Vector) -> Vector {
        Vector(self.0.iter().zip(&rhs.0).map(|(a, b)| a + b).collect())
    }
}

impl Sub for &Vector {
    type Output = Vector;
    fn sub(self, rhs: &Vector) -> Vector {
        Vector(self.0.iter().zip(&rhs.0).map(|(a, b)| a - b).collect())
    }
}

impl Mul<f64> for &Vector {
    type Output = Vector;
    fn mul(self, rhs: f64) -> Vector {
        Vector(self.0.iter().map(|a| a * rhs).collect())
    }
}

impl Neg for &Vector {
    type Output = Vector;
    fn neg(self) -> Vector {
        Vector(self.0.iter().map(|a| -a).collect())
    }
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// A nonempty finite point set Q ⊂ ℝⁿ, deduplicated on construction.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StructuringElement {
    points: Vec<Vector>,
    dim: usize,
}

impl StructuringElement {
    pub fn new(points: Vec<Vector>) -> Result<Self> {
        let first = points.first().ok_or(Error::EmptyStructuringElement)?;
        let dim = first.dim();
        if dim == 0 {
            return Err(Error::UnsupportedDimension(0));
        }
        let mut unique: Vec<Vector> = Vec::with_capacity(points.len());
        for p in points {
            ensure_dim(dim, p.dim())?;
            if !p.is_finite() {
                return Err(Error::InvalidInput("non-finite structuring element point".into()));
            }
            if !unique.contains(&p) {
                unique.push(p);
            }
        }
        Ok(StructuringElement { points: unique, dim })
    }

    /// Parses `"x,y;x,y;..."`, the command line notation.
    pub fn parse(text: &str) -> Result<Self> {
        let mut points = Vec::new();
        for tuple in text.split(';').map(str::trim).filter(|t| !t.is_empty()) {
            let coords = tuple
                .split(',')
                .map(|c| c.trim().parse::<f64>().map_err(|e| Error::InvalidInput(format!("bad coordinate {c:?}: {e}"))))
                .collect::<Result<Vec<f64>>>()?;
            points.push(Vector::new(coords));
        }
        Self::new(points)
    }

    pub fn origin(dim: usize) -> Self {
        StructuringElement { points: vec![Vector::zeros(dim)], dim }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn points(&self) -> &[Vector] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn is_origin_only(&self) -> bool {
        self.points.iter().all(Vector::is_zero)
    }

    pub fn max_norm(&self) -> f64 {
        self.points.iter().map(Vector::norm).fold(0.0, f64::max)
    }

    /// h(Q, u) = max over q ∈ Q of u·q.
    pub fn support(&self, u: &Vector) -> Result<f64> {
        ensure_dim(self.dim, u.dim())?;
        Ok(self.support_unchecked(u.coords()))
    }

    /// h(Q, u)⁺ = h(Q ∪ {0}, u).
    pub fn support_pos(&self, u: &Vector) -> Result<f64> {
        Ok(self.support(u)?.max(0.0))
    }

    pub(crate) fn support_unchecked(&self, u: &[f64]) -> f64 {
        self.points.iter().map(|q| dot(q.coords(), u)).fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn negated(&self) -> Self {
        self.map(|p| -p)
    }

    pub fn with_origin(&self) -> Self {
        let mut points = self.points.clone();
        points.push(Vector::zeros(self.dim));
        StructuringElement::new(points).expect("nonempty by construction")
    }

    pub fn translated(&self, by: &Vector) -> Result<Self> {
        ensure_dim(self.dim, by.dim())?;
        Ok(self.map(|p| p + by))
    }

    pub fn scaled(&self, c: f64) -> Self {
        self.map(|p| p * c)
    }

    /// Planar rotation of every point by `theta`.
    pub fn rotated(&self, theta: f64) -> Result<Self> {
        if self.dim != 2 {
            return Err(Error::UnsupportedDimension(self.dim));
        }
        Ok(self.map(|p| p.rotated(theta)))
    }

    fn map(&self, f: impl Fn(&Vector) -> Vector) -> Self {
        StructuringElement::new(self.points.iter().map(f).collect()).expect("nonempty by construction")
    }
}

/// Volume κₙ of the Euclidean unit ball in ℝⁿ, π^{n/2} / Γ(n/2 + 1).
pub fn unit_ball_volume(n: usize) -> f64 {
    const CACHED: usize = 32;
    static TABLE: OnceLock<[f64; CACHED]> = OnceLock::new();
    let kappa = |n: usize| {
        let half = n as f64 / 2.0;
        std::f64::consts::PI.powf(half) / libm::tgamma(half + 1.0)
    };
    if n < CACHED {
        TABLE.get_or_init(|| std::array::from_fn(kappa))[n]
    } else {
        kappa(n)
    }
}

/// Surface area n·κₙ of the unit sphere S^{n−1}.
pub fn sphere_area(n: usize) -> f64 {
    n as f64 * unit_ball_volume(n)
}

/// Nodes and weights integrating over the unit sphere S^{n−1}.
#[derive(Clone, Debug)]
pub struct SphereQuadrature {
    dim: usize,
    nodes: Vec<Vector>,
    weights: Vec<f64>,
}

impl SphereQuadrature {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn nodes(&self) -> &[Vector] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Vector, f64)> {
        self.nodes.iter().zip(self.weights.iter().copied())
    }

    /// Σ wᵢ f(uᵢ).
    pub fn integrate(&self, mut f: impl FnMut(&Vector) -> f64) -> f64 {
        self.iter().map(|(u, w)| w * f(u)).sum()
    }
}

/// Equal-weight quadrature of S^{n−1}: the two points ±1 for n = 1, `count`
/// uniform angles for n = 2 and a spherical Fibonacci lattice for n = 3.
pub fn sphere_quadrature(n: usize, count: usize) -> Result<SphereQuadrature> {
    if count < 2 {
        return Err(Error::InvalidInput(format!("quadrature needs at least 2 nodes, got {count}")));
    }
    let nodes: Vec<Vector> = match n {
        1 => vec![Vector::new(vec![1.0]), Vector::new(vec![-1.0])],
        2 => (0..count).map(|k| Vector::from_angle(std::f64::consts::TAU * k as f64 / count as f64)).collect(),
        3 => fibonacci_sphere(count),
        _ => return Err(Error::UnsupportedDimension(n)),
    };
    // S⁰ carries counting measure; avoid the rounding of κ₁ from Γ.
    let w = if n == 1 { 1.0 } else { sphere_area(n) / nodes.len() as f64 };
    let weights = vec![w; nodes.len()];
    Ok(SphereQuadrature { dim: n, nodes, weights })
}

pub(crate) fn fibonacci_sphere(count: usize) -> Vec<Vector> {
    let golden = std::f64::consts::PI * (3.0 - 5f64.sqrt());
    (0..count)
        .map(|i| {
            let z = 1.0 - (2 * i + 1) as f64 / count as f64;
            let rho = (1.0 - z * z).max(0.0).sqrt();
            let phi = golden * i as f64;
            let v = Vector::new(vec![rho * phi.cos(), rho * phi.sin(), z]);
            v.normalized().expect("unit by construction")
        })
        .collect()
}

/// Mean width b(conv(Q ∪ {0})) = 2/(nκₙ) ∫ h(Q, u)⁺ du, by quadrature.
pub fn mean_width(q: &StructuringElement, quad: &SphereQuadrature) -> Result<f64> {
    ensure_dim(q.dim(), quad.dim())?;
    let n = q.dim();
    let integral = quad.integrate(|u| q.support_unchecked(u.coords()).max(0.0));
    Ok(2.0 / sphere_area(n) * integral)
}

/// Cosine transform ∫ |u·v| S(dv) of a discrete sphere measure.
pub fn cosine_transform(s: &SurfaceMeasure, u: &Vector) -> Result<f64> {
    s.cosine_transform(u)
}
