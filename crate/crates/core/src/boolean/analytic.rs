//! Closed forms for Boolean models with convex grains.

use serde::{Deserialize, Serialize};

use super::{rose, BooleanModelSpec, GrainLaw};
use crate::dilation::{covariogram, union_volume, SamplerConfig};
use crate::error::{ensure_dim, Error, Result};
use crate::geom::{StructuringElement, Vector};
use crate::shapes::{convex_hull_2d, Shape};

/// p̄ = 1 − exp(−γ E λ(Ξ)).
pub fn volume_fraction(spec: &BooleanModelSpec) -> f64 {
    -(-spec.intensity * spec.mean_volume()).exp_m1()
}

/// P̄ = (1 − p̄) γ E S(Ξ).
pub fn specific_perimeter(spec: &BooleanModelSpec) -> f64 {
    (-spec.intensity * spec.mean_volume()).exp() * spec.intensity * spec.mean_surface()
}

/// Mean width of conv(Q ∪ {0}) in the plane: its perimeter over π.
pub fn planar_mean_width(q: &StructuringElement) -> Result<f64> {
    if q.dim() != 2 {
        return Err(Error::UnsupportedDimension(q.dim()));
    }
    let mut pts: Vec<[f64; 2]> = q.points().iter().map(|p| [p.coords()[0], p.coords()[1]]).collect();
    pts.push([0.0, 0.0]);
    let hull = convex_hull_2d(&pts, 0.0);
    let m = hull.len();
    let perimeter: f64 =
        if m < 2 { 0.0 } else { (0..m).map(|i| (hull[(i + 1) % m][0] - hull[i][0]).hypot(hull[(i + 1) % m][1] - hull[i][1])).sum() };
    Ok(perimeter / std::f64::consts::PI)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AnalyticOracles {
    pub volume_fraction: f64,
    pub specific_perimeter: f64,
    /// P̄ ∫ h(−Q, v)⁺ ℛ*(dv).
    pub rose_form: f64,
    /// ½ b(conv(Q ∪ {0})) P̄, for isotropic planar models.
    pub mean_width_form: Option<f64>,
}

impl AnalyticOracles {
    pub fn new(spec: &BooleanModelSpec, q: &StructuringElement) -> Result<Self> {
        ensure_dim(spec.dim, q.dim())?;
        let p_bar = specific_perimeter(spec);
        let r = rose(spec)?;
        let mean_width_form = if r.is_uniform() && spec.dim == 2 { Some(0.5 * planar_mean_width(q)? * p_bar) } else { None };
        Ok(AnalyticOracles {
            volume_fraction: volume_fraction(spec),
            specific_perimeter: p_bar,
            rose_form: p_bar * r.support_integral(q)?,
            mean_width_form,
        })
    }
}

/// `(1 − p̄) H_Q(r) = P(0 ∉ Z, rQ ∩ Z ≠ ∅)` in closed form, when the union
/// of translates of the grain is tractable: balls with one nonzero point
/// in `Q`, boxes with any `Q`.
pub fn analytic_contact(spec: &BooleanModelSpec, q: &StructuringElement, r: f64) -> Result<Option<f64>> {
    spec.validate()?;
    ensure_dim(spec.dim, q.dim())?;
    let mut shifts: Vec<Vector> = q.points().iter().filter(|p| !p.is_zero()).map(|p| p * r).collect();
    shifts.dedup();
    if shifts.is_empty() || r == 0.0 {
        return Ok(Some(0.0));
    }
    // E λ((Ξ ⊕ rQ ∪ {0})) − E λ(Ξ); grains are centrally symmetric.
    let excess = match &spec.grain {
        GrainLaw::FixedDisc { .. } | GrainLaw::DiscRadiusLaw { .. } => {
            if shifts.len() != 1 {
                return Ok(None);
            }
            let (radii, probs) = match &spec.grain {
                GrainLaw::FixedDisc { radius } => (vec![*radius], vec![1.0]),
                GrainLaw::DiscRadiusLaw { radii, probabilities } => (radii.clone(), probabilities.clone()),
                GrainLaw::FixedBox { .. } => unreachable!(),
            };
            let mut e = 0.0;
            for (rad, p) in radii.iter().zip(&probs) {
                let ball = Shape::ball(vec![0.0; spec.dim], *rad)?;
                let c = covariogram(&ball, &shifts[0], &SamplerConfig::default())?;
                e += p * (ball.volume() - c.value);
            }
            e
        }
        GrainLaw::FixedBox { half_extents, angle } => {
            let lo: Vec<f64> = half_extents.iter().map(|h| -h).collect();
            let mut boxes = vec![(lo.clone(), half_extents.clone())];
            for s in &shifts {
                // Into the grain frame.
                let t = if spec.dim == 2 { s.rotated(-angle) } else { s.clone() };
                let t = t.coords();
                boxes.push((lo.iter().zip(t).map(|(a, b)| a + b).collect(), half_extents.iter().zip(t).map(|(a, b)| a + b).collect()));
            }
            let Some(u) = union_volume(&boxes) else { return Ok(None) };
            u - spec.mean_volume()
        }
    };
    Ok(Some((1.0 - volume_fraction(spec)) * -(-spec.intensity * excess).exp_m1()))
}
