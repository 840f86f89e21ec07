use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::{dilation_excess, extrapolate, scale, RSchedule, SamplerConfig, DEFAULT_BALL_ATOMS};
use crate::error::{ensure_dim, Error, Result};
use crate::geom::{StructuringElement, Vector};
use crate::sampling::{derive_seed, Estimate};
use crate::shapes::Shape;

/// `C(A, y) = λ(A ∩ (A + y))`: exact for boxes and balls, otherwise
/// `λ(A) − λ((A + y) ∖ A)` with the excess sampled.
pub fn covariogram(a: &Shape, y: &Vector, cfg: &SamplerConfig) -> Result<Estimate> {
    ensure_dim(a.dim(), y.dim())?;
    if !y.is_finite() {
        return Err(Error::InvalidInput("covariogram shift must be finite".into()));
    }
    if let Some(c) = exact_covariogram(a, y.coords()) {
        return Ok(Estimate::exact(c));
    }
    if y.is_zero() {
        return Ok(Estimate::exact(a.volume()));
    }
    let q = StructuringElement::new(vec![y.clone()])?;
    let g = dilation_excess(a, &q, 1.0, cfg)?;
    Ok(Estimate { value: a.volume() - g.value, ..g })
}

fn exact_covariogram(a: &Shape, y: &[f64]) -> Option<f64> {
    if let Some((lo, hi)) = a.as_axis_box() {
        return Some(lo.iter().zip(&hi).zip(y).map(|((l, h), t)| (h - l - t.abs()).max(0.0)).product());
    }
    let Shape::Ball(b) = a else { return None };
    let d = y.iter().map(|t| t * t).sum::<f64>().sqrt();
    let r = b.radius;
    if d >= 2.0 * r {
        return Some(0.0);
    }
    Some(match y.len() {
        1 => 2.0 * r - d,
        2 => 2.0 * r * r * (d / (2.0 * r)).acos() - 0.5 * d * (4.0 * r * r - d * d).sqrt(),
        _ => PI * (4.0 * r + d) * (2.0 * r - d).powi(2) / 12.0,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CovariogramDerivative {
    pub r_values: Vec<f64>,
    /// `(C(A, r·u) − C(A, 0)) / r` per radius.
    pub slopes: Vec<Estimate>,
    pub extrapolated: Estimate,
    /// `−½ ∫ |u·ν| S(A; dν)`.
    pub cosine_rhs: f64,
    pub flagged: bool,
}

/// One-sided slope of `r ↦ C(A, r·u)` at 0 for a unit vector `u`.
pub fn covariogram_derivative(a: &Shape, u: &Vector, schedule: &RSchedule, cfg: &SamplerConfig) -> Result<CovariogramDerivative> {
    ensure_dim(a.dim(), u.dim())?;
    if !((u.norm() - 1.0).abs() <= 1e-9) {
        return Err(Error::InvalidInput(format!("direction must be a unit vector, |u| = {}", u.norm())));
    }
    let r_values = schedule.values(a, 1.0)?;
    let v0 = a.volume();
    let slopes = r_values
        .iter()
        .enumerate()
        .map(|(k, &r)| {
            if let Some(c) = exact_covariogram(a, (u * r).coords()) {
                return Ok(Estimate::exact((c - v0) / r));
            }
            // C(A, ru) − λ(A) = −λ((A + ru) ∖ A), sampled directly.
            let c = SamplerConfig { seed: derive_seed(cfg.seed, k as u64), ..*cfg };
            let q = StructuringElement::new(vec![u.clone()])?;
            dilation_excess(a, &q, r, &c).map(|e| scale(e, -1.0 / r))
        })
        .collect::<Result<Vec<_>>>()?;
    let fit = extrapolate(&r_values, &slopes);
    let cosine_rhs = -0.5 * a.surface_measure(DEFAULT_BALL_ATOMS)?.cosine_transform(u)?;
    Ok(CovariogramDerivative { r_values, slopes, extrapolated: fit.value, cosine_rhs, flagged: fit.flagged })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn square_covariogram() {
        let sq = Shape::unit_cube(2).unwrap();
        let cfg = SamplerConfig::default();
        for t in [0.0, 0.25, 0.5, 1.0] {
            let c = covariogram(&sq, &Vector::from([t, 0.0]), &cfg).unwrap();
            assert!(c.is_exact() && (c.value - (1.0 - t)).abs() < 1e-15);
        }
    }

    #[test]
    fn disjoint_translates_and_zero_shift() {
        let disc = Shape::ball(vec![0.0, 0.0], 1.0).unwrap();
        let cfg = SamplerConfig::default();
        assert_eq!(covariogram(&disc, &Vector::from([2.0, 0.0]), &cfg).unwrap().value, 0.0);
        assert!((covariogram(&disc, &Vector::from([0.0, 0.0]), &cfg).unwrap().value - PI).abs() < 1e-12);
        let tri = Shape::polytope(vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap();
        assert_eq!(covariogram(&tri, &Vector::from([0.0, 0.0]), &cfg).unwrap(), Estimate::exact(0.5));
    }

    #[test]
    fn sampled_covariogram_of_triangle() {
        // Right triangle with legs 1 shifted along a leg: a similar triangle
        // with legs 1 − t.
        let tri = Shape::polytope(vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap();
        let cfg = SamplerConfig { samples: 200_000, seed: 4, ..Default::default() };
        let c = covariogram(&tri, &Vector::from([0.3, 0.0]), &cfg).unwrap();
        assert!(c.agrees_with(0.5 * 0.7 * 0.7, 3.0), "{c:?}");
    }

    #[test]
    fn square_slopes() {
        let sq = Shape::unit_cube(2).unwrap();
        let cfg = SamplerConfig::default();
        let d = covariogram_derivative(&sq, &Vector::from([1.0, 0.0]), &RSchedule::default(), &cfg).unwrap();
        assert!((d.extrapolated.value + 1.0).abs() < 1e-12 && (d.cosine_rhs + 1.0).abs() < 1e-12);
        let u = Vector::from([1.0, 1.0]).normalized().unwrap();
        let d = covariogram_derivative(&sq, &u, &RSchedule::default(), &cfg).unwrap();
        assert!((d.extrapolated.value + 2f64.sqrt()).abs() < 1e-9, "{d:?}");
        assert!((d.cosine_rhs + 2f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn disc_slope() {
        let disc = Shape::ball(vec![0.0, 0.0], 1.0).unwrap();
        let d = covariogram_derivative(&disc, &Vector::from([0.6, 0.8]), &RSchedule::default(), &SamplerConfig::default()).unwrap();
        assert!((d.extrapolated.value + 2.0).abs() < 1e-4, "{d:?}");
        assert!((d.cosine_rhs + 2.0).abs() < 1e-5);
    }
}
