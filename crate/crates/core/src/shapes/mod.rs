//! Analytic test sets with exact membership, volume and surface area
//! measure: convex polytopes, balls and finite disjoint unions of them.

mod polytope;
mod separation;

use serde::{Deserialize, Serialize};

use crate::error::{ensure_dim, Error, Result};
use crate::geom::{dot, sphere_area, sphere_quadrature, StructuringElement, Vector};

pub(crate) use polytope::convex_hull_2d;
pub use polytope::{Facet, Polytope};

const UNIT_TOL: f64 = 1e-12;

/// One point mass of a surface area measure: outer unit normal and
/// (n−1)-dimensional area.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Atom {
    pub normal: Vector,
    pub weight: f64,
}

/// Discrete measure on the unit sphere; total mass is the perimeter.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct SurfaceMeasure {
    atoms: Vec<Atom>,
}

impl SurfaceMeasure {
    pub fn new(atoms: Vec<Atom>) -> Result<Self> {
        let s = SurfaceMeasure { atoms };
        s.validate()?;
        Ok(s)
    }

    /// Skips validation. Used to inject deliberately broken measures when
    /// exercising the validators.
    pub fn new_unchecked(atoms: Vec<Atom>) -> Self {
        SurfaceMeasure { atoms }
    }

    pub fn validate(&self) -> Result<()> {
        let Some(first) = self.atoms.first() else { return Ok(()) };
        let dim = first.normal.dim();
        for (i, atom) in self.atoms.iter().enumerate() {
            ensure_dim(dim, atom.normal.dim())?;
            if !((atom.normal.norm() - 1.0).abs() <= UNIT_TOL) {
                return Err(Error::InvalidInput(format!("surface atom {i}: normal has length {} (must be 1)", atom.normal.norm())));
            }
            if !(atom.weight >= 0.0 && atom.weight.is_finite()) {
                return Err(Error::InvalidInput(format!("surface atom {i}: weight {} is not a finite nonnegative number", atom.weight)));
            }
        }
        Ok(())
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn dim(&self) -> Option<usize> {
        self.atoms.first().map(|a| a.normal.dim())
    }

    pub fn total_mass(&self) -> f64 {
        self.atoms.iter().map(|a| a.weight).sum()
    }

    /// Σ wᵢ νᵢ; zero for the boundary of any bounded set.
    pub fn vector_sum(&self) -> Vector {
        let dim = self.dim().unwrap_or(0);
        let mut sum = vec![0.0; dim];
        for a in &self.atoms {
            sum.iter_mut().zip(a.normal.coords()).for_each(|(s, c)| *s += a.weight * c);
        }
        Vector::new(sum)
    }

    /// Atoms with negated normals.
    pub fn reflected(&self) -> Self {
        SurfaceMeasure { atoms: self.atoms.iter().map(|a| Atom { normal: -&a.normal, weight: a.weight }).collect() }
    }

    pub fn scaled(&self, factor: f64) -> Self {
        SurfaceMeasure { atoms: self.atoms.iter().map(|a| Atom { normal: a.normal.clone(), weight: a.weight * factor }).collect() }
    }

    pub fn concat(mut self, other: SurfaceMeasure) -> Self {
        self.atoms.extend(other.atoms);
        self
    }

    fn check_dim(&self, n: usize) -> Result<()> {
        match self.dim() {
            Some(d) => ensure_dim(d, n),
            None => Ok(()),
        }
    }

    /// Σ wᵢ f(νᵢ).
    pub fn integrate(&self, mut f: impl FnMut(&Vector) -> f64) -> f64 {
        self.atoms.iter().map(|a| a.weight * f(&a.normal)).sum()
    }

    /// Σ wᵢ |u·νᵢ|.
    pub fn cosine_transform(&self, u: &Vector) -> Result<f64> {
        self.check_dim(u.dim())?;
        Ok(self.integrate(|v| v.dot(u).abs()))
    }

    /// Σ wᵢ h(Q, νᵢ)⁺.
    pub fn support_integral(&self, q: &StructuringElement) -> Result<f64> {
        self.check_dim(q.dim())?;
        Ok(self.integrate(|v| q.support_unchecked(v.coords()).max(0.0)))
    }

    /// Σ wᵢ |p_L νᵢ| for the subspace L spanned by the orthonormal `basis`.
    pub fn projected_variation(&self, basis: &[Vec<f64>]) -> f64 {
        self.integrate(|v| basis.iter().map(|b| dot(b, v.coords()).powi(2)).sum::<f64>().sqrt())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Ball {
    pub center: Vec<f64>,
    pub radius: f64,
}

/// A bounded test set: convex polytope, ball, or a union of such pieces with
/// pairwise positive gaps.
#[derive(Clone, Debug, PartialEq)]
pub enum Shape {
    Polytope(Polytope),
    Ball(Ball),
    Union(Vec<Shape>),
}

impl Shape {
    pub fn axis_box(lo: &[f64], hi: &[f64]) -> Result<Self> {
        Ok(Shape::Polytope(Polytope::axis_box(lo, hi)?))
    }

    pub fn unit_cube(n: usize) -> Result<Self> {
        Self::axis_box(&vec![0.0; n], &vec![1.0; n])
    }

    pub fn polytope(vertices: Vec<Vec<f64>>) -> Result<Self> {
        Ok(Shape::Polytope(Polytope::from_vertices(vertices)?))
    }

    pub fn ball(center: Vec<f64>, radius: f64) -> Result<Self> {
        if !(1..=3).contains(&center.len()) {
            return Err(Error::UnsupportedDimension(center.len()));
        }
        if !(radius > 0.0 && radius.is_finite()) || center.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidInput(format!("ball radius must be positive and finite, got {radius}")));
        }
        Ok(Shape::Ball(Ball { center, radius }))
    }

    /// Union of shapes whose closures are pairwise at positive distance.
    /// Nested unions are flattened.
    pub fn disjoint_union(members: Vec<Shape>) -> Result<Self> {
        let mut leaves = Vec::new();
        for m in members {
            match m {
                Shape::Union(inner) => leaves.extend(inner),
                other => leaves.push(other),
            }
        }
        let dim = leaves.first().map(Shape::dim).ok_or_else(|| Error::InvalidInput("empty union".into()))?;
        for leaf in &leaves {
            ensure_dim(dim, leaf.dim())?;
        }
        for i in 0..leaves.len() {
            for j in i + 1..leaves.len() {
                let gap = separation::gap_lower_bound(&leaves[i], &leaves[j]);
                let scale = leaves[i].extent().max(leaves[j].extent());
                if !(gap > 1e-9 * scale) {
                    return Err(Error::InvalidInput(format!("union members {i} and {j} are not separated by a positive gap")));
                }
            }
        }
        Ok(Shape::Union(leaves))
    }

    pub fn dim(&self) -> usize {
        match self {
            Shape::Polytope(p) => p.dim(),
            Shape::Ball(b) => b.center.len(),
            Shape::Union(m) => m[0].dim(),
        }
    }

    /// Closed-set membership: boundary points count as inside.
    pub fn contains(&self, x: &[f64]) -> bool {
        match self {
            Shape::Polytope(p) => p.contains(x),
            Shape::Ball(b) => {
                let d2: f64 = b.center.iter().zip(x).map(|(c, y)| (c - y) * (c - y)).sum();
                d2 <= b.radius * b.radius * (1.0 + 1e-14)
            }
            Shape::Union(m) => m.iter().any(|s| s.contains(x)),
        }
    }

    pub fn contains_vec(&self, x: &Vector) -> Result<bool> {
        ensure_dim(self.dim(), x.dim())?;
        Ok(self.contains(x.coords()))
    }

    pub fn volume(&self) -> f64 {
        match self {
            Shape::Polytope(p) => p.volume(),
            Shape::Ball(b) => {
                let n = b.center.len();
                crate::geom::unit_ball_volume(n) * b.radius.powi(n as i32)
            }
            Shape::Union(m) => m.iter().map(Shape::volume).sum(),
        }
    }

    /// Exact perimeter P(A).
    pub fn perimeter(&self) -> f64 {
        match self {
            Shape::Polytope(p) => p.perimeter(),
            Shape::Ball(b) => {
                let n = b.center.len();
                sphere_area(n) * b.radius.powi(n as i32 - 1)
            }
            Shape::Union(m) => m.iter().map(Shape::perimeter).sum(),
        }
    }

    pub fn bbox(&self) -> (Vec<f64>, Vec<f64>) {
        match self {
            Shape::Polytope(p) => p.bbox(),
            Shape::Ball(b) => (b.center.iter().map(|c| c - b.radius).collect(), b.center.iter().map(|c| c + b.radius).collect()),
            Shape::Union(m) => {
                let (mut lo, mut hi) = m[0].bbox();
                for s in &m[1..] {
                    let (l, h) = s.bbox();
                    for i in 0..lo.len() {
                        lo[i] = lo[i].min(l[i]);
                        hi[i] = hi[i].max(h[i]);
                    }
                }
                (lo, hi)
            }
        }
    }

    /// Largest absolute bounding-box coordinate; the scale for tolerances.
    pub(crate) fn extent(&self) -> f64 {
        let (lo, hi) = self.bbox();
        lo.iter().chain(&hi).fold(0.0f64, |m, c| m.max(c.abs()))
    }

    /// Signed distance bound `d`: inside with depth ≥ −d when d < 0, outside
    /// with distance ≥ d when d > 0.
    pub fn signed_distance_bound(&self, x: &[f64]) -> f64 {
        match self {
            Shape::Polytope(p) => p.signed_distance_bound(x),
            Shape::Ball(b) => {
                let d2: f64 = b.center.iter().zip(x).map(|(c, y)| (c - y) * (c - y)).sum();
                d2.sqrt() - b.radius
            }
            Shape::Union(m) => m.iter().map(|s| s.signed_distance_bound(x)).fold(f64::INFINITY, f64::min),
        }
    }

    /// Support point of a convex piece. Unions use the convex hull of their
    /// members, which is all the separation test needs.
    pub(crate) fn support_point(&self, u: &[f64]) -> Vec<f64> {
        match self {
            Shape::Polytope(p) => p.support_point(u).to_vec(),
            Shape::Ball(b) => {
                let len = dot(u, u).sqrt();
                if len == 0.0 {
                    return b.center.clone();
                }
                b.center.iter().zip(u).map(|(c, d)| c + b.radius * d / len).collect()
            }
            Shape::Union(m) => m.iter().map(|s| s.support_point(u)).max_by(|a, b| dot(a, u).total_cmp(&dot(b, u))).expect("nonempty union"),
        }
    }

    /// The box `[lo, hi]` if this shape is a single axis-aligned box.
    pub fn as_axis_box(&self) -> Option<(Vec<f64>, Vec<f64>)> {
        match self {
            Shape::Polytope(p) => p.as_axis_box(),
            _ => None,
        }
    }

    /// Surface area measure. Polytopes give one exact atom per facet; balls
    /// give `ball_atoms` quadrature atoms renormalized to the exact area.
    pub fn surface_measure(&self, ball_atoms: usize) -> Result<SurfaceMeasure> {
        match self {
            Shape::Polytope(p) => {
                SurfaceMeasure::new(p.facets().iter().map(|f| Atom { normal: Vector::new(f.normal.clone()), weight: f.area }).collect())
            }
            Shape::Ball(b) => {
                if ball_atoms < 8 {
                    return Err(Error::InvalidInput(format!("ball_atoms must be at least 8, got {ball_atoms}")));
                }
                let n = b.center.len();
                let quad = sphere_quadrature(n, ball_atoms)?;
                let total = self.perimeter();
                let w = total / quad.len() as f64;
                SurfaceMeasure::new(quad.nodes().iter().map(|u| Atom { normal: u.clone(), weight: w }).collect())
            }
            Shape::Union(m) => {
                let mut s = SurfaceMeasure::default();
                for member in m {
                    s = s.concat(member.surface_measure(ball_atoms)?);
                }
                Ok(s)
            }
        }
    }

    pub fn translate(&self, y: &Vector) -> Result<Self> {
        ensure_dim(self.dim(), y.dim())?;
        Ok(self.translate_unchecked(y.coords()))
    }

    fn translate_unchecked(&self, y: &[f64]) -> Self {
        match self {
            Shape::Polytope(p) => Shape::Polytope(p.translate(y)),
            Shape::Ball(b) => Shape::Ball(Ball { center: b.center.iter().zip(y).map(|(c, d)| c + d).collect(), radius: b.radius }),
            Shape::Union(m) => Shape::Union(m.iter().map(|s| s.translate_unchecked(y)).collect()),
        }
    }

    /// Homothety `x ↦ c·x` about the origin.
    pub fn minkowski_scale(&self, c: f64) -> Result<Self> {
        if !(c > 0.0 && c.is_finite()) {
            return Err(Error::InvalidInput(format!("scale factor must be positive, got {c}")));
        }
        Ok(self.scale_unchecked(c))
    }

    fn scale_unchecked(&self, c: f64) -> Self {
        match self {
            Shape::Polytope(p) => Shape::Polytope(p.scale_about_origin(c)),
            Shape::Ball(b) => Shape::Ball(Ball { center: b.center.iter().map(|x| x * c).collect(), radius: b.radius * c }),
            Shape::Union(m) => Shape::Union(m.iter().map(|s| s.scale_unchecked(c)).collect()),
        }
    }

    /// Convex members (the shape itself unless it is a union).
    pub fn pieces(&self) -> &[Shape] {
        match self {
            Shape::Union(m) => m,
            other => std::slice::from_ref(other),
        }
    }

    pub fn from_json_str(text: &str) -> Result<Self> {
        let desc: ShapeDesc = serde_json::from_str(text)?;
        desc.build()
    }
}

/// JSON description of a [`Shape`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum ShapeDesc {
    /// Either `vertices` (convex hull) or `halfspaces`.
    Polytope {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        vertices: Option<Vec<Vec<f64>>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        halfspaces: Option<Vec<HalfspaceDesc>>,
    },
    Box {
        min: Vec<f64>,
        max: Vec<f64>,
    },
    Ball {
        center: Vec<f64>,
        radius: f64,
    },
    Union {
        members: Vec<ShapeDesc>,
    },
}

/// The half-space `normal·x ≤ offset`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HalfspaceDesc {
    pub normal: Vec<f64>,
    pub offset: f64,
}

impl ShapeDesc {
    pub fn build(&self) -> Result<Shape> {
        match self {
            ShapeDesc::Polytope { vertices: Some(v), halfspaces: None } => Shape::polytope(v.clone()),
            ShapeDesc::Polytope { vertices: None, halfspaces: Some(h) } => {
                Ok(Shape::Polytope(Polytope::from_halfspaces(&h.iter().map(|h| (h.normal.clone(), h.offset)).collect::<Vec<_>>())?))
            }
            ShapeDesc::Polytope { .. } => Err(Error::InvalidInput("polytope needs exactly one of `vertices` or `halfspaces`".into())),
            ShapeDesc::Box { min, max } => Shape::axis_box(min, max),
            ShapeDesc::Ball { center, radius } => Shape::ball(center.clone(), *radius),
            ShapeDesc::Union { members } => Shape::disjoint_union(members.iter().map(ShapeDesc::build).collect::<Result<Vec<_>>>()?),
        }
    }
}
