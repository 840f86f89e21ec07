//! Stationary Boolean models: simulation with plus-sampling, volume
//! fraction, specific perimeter, rose of directions and contact
//! distributions.
//!
//! Realization `i` of a run with seed `s` draws its germs from stream `i`
//! of `s`; measurements on it use stream `i` of a derived seed. Estimators
//! that share a seed therefore see the same realizations.

mod analytic;
mod contact;
mod grain;
mod perimeter;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Poisson};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{ensure_dim, Error, Result};
use crate::geom::{sphere_area, unit_ball_volume, StructuringElement, Vector};
use crate::sampling::{derive_seed, stream_rng, Estimate};

pub use analytic::{
    analytic_contact, planar_mean_width, specific_perimeter as analytic_specific_perimeter, volume_fraction as analytic_volume_fraction,
    AnalyticOracles,
};
pub use contact::{contact_distribution, contact_estimates, default_schedule, hprime_check, ContactEstimates, HPrimeReport, PerimeterPath};
pub use grain::Grain;
pub use perimeter::{
    empirical_rose, perimeter_consistency, specific_perimeter, specific_perimeter_grid, EmpiricalRose, PerimeterConsistency, ROSE_BINS,
};

/// Random grain generator.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum GrainLaw {
    /// Balls of one radius (discs in the plane).
    FixedDisc { radius: f64 },
    /// Balls whose radius takes `radii[i]` with probability `probabilities[i]`.
    DiscRadiusLaw { radii: Vec<f64>, probabilities: Vec<f64> },
    /// Boxes `[−h, h]` with fixed half-extents, rotated by `angle` (plane only).
    FixedBox {
        half_extents: Vec<f64>,
        #[serde(default)]
        angle: f64,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Window {
    pub min: Vec<f64>,
    pub max: Vec<f64>,
}

impl Window {
    pub fn unit(dim: usize) -> Self {
        Window { min: vec![0.0; dim], max: vec![1.0; dim] }
    }

    pub fn volume(&self) -> f64 {
        self.min.iter().zip(&self.max).map(|(a, b)| b - a).product()
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        x.iter().zip(self.min.iter().zip(&self.max)).all(|(v, (a, b))| *a <= *v && *v <= *b)
    }

    fn expanded(&self, by: f64) -> Window {
        Window { min: self.min.iter().map(|v| v - by).collect(), max: self.max.iter().map(|v| v + by).collect() }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BooleanModelSpec {
    pub dim: usize,
    /// Germs per unit volume.
    pub intensity: f64,
    pub grain: GrainLaw,
    pub window: Window,
    /// Germs are placed on `window ⊕ margin`.
    pub margin: f64,
}

impl BooleanModelSpec {
    /// Parses and validates a JSON model description.
    pub fn from_json_str(text: &str) -> Result<Self> {
        let spec: BooleanModelSpec = serde_json::from_str(text)?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn discs(radius: f64, intensity: f64, margin: f64) -> Self {
        BooleanModelSpec { dim: 2, intensity, grain: GrainLaw::FixedDisc { radius }, window: Window::unit(2), margin }
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.dim;
        if !(2..=3).contains(&n) {
            return Err(Error::UnsupportedDimension(n));
        }
        if !(self.intensity > 0.0 && self.intensity.is_finite()) {
            return Err(Error::InvalidInput(format!("intensity must be positive, got {}", self.intensity)));
        }
        ensure_dim(n, self.window.min.len())?;
        ensure_dim(n, self.window.max.len())?;
        if !self.window.min.iter().zip(&self.window.max).all(|(a, b)| a.is_finite() && b.is_finite() && a < b) {
            return Err(Error::InvalidInput("window must satisfy min < max in every coordinate".into()));
        }
        match &self.grain {
            GrainLaw::FixedDisc { radius } => positive("radius", *radius)?,
            GrainLaw::DiscRadiusLaw { radii, probabilities } => {
                if radii.is_empty() || radii.len() != probabilities.len() {
                    return Err(Error::InvalidInput("radius law needs matching nonempty radii and probabilities".into()));
                }
                for r in radii {
                    positive("radius", *r)?;
                }
                if probabilities.iter().any(|p| !(*p >= 0.0 && p.is_finite())) {
                    return Err(Error::InvalidInput("probabilities must be nonnegative".into()));
                }
                let total: f64 = probabilities.iter().sum();
                if (total - 1.0).abs() > 1e-9 {
                    return Err(Error::InvalidInput(format!("probabilities sum to {total}, not 1")));
                }
            }
            GrainLaw::FixedBox { half_extents, angle } => {
                ensure_dim(n, half_extents.len())?;
                for h in half_extents {
                    positive("half extent", *h)?;
                }
                if !angle.is_finite() || (n != 2 && *angle != 0.0) {
                    return Err(Error::InvalidInput("box rotation is only supported in the plane".into()));
                }
            }
        }
        if !(self.margin.is_finite() && self.margin >= 0.0) {
            return Err(Error::InvalidInput(format!("margin must be nonnegative, got {}", self.margin)));
        }
        let reach = self.max_reach();
        if self.margin < reach {
            return Err(Error::MarginTooSmall { margin: self.margin, required: reach });
        }
        Ok(())
    }

    /// Checks the margin against grains that must be seen from points up to
    /// `offset` away from the window.
    pub fn check_margin(&self, offset: f64) -> Result<()> {
        let required = self.max_reach() + offset;
        if self.margin < required {
            return Err(Error::MarginTooSmall { margin: self.margin, required });
        }
        Ok(())
    }

    /// Largest distance from a germ to a point of its grain.
    pub fn max_reach(&self) -> f64 {
        match &self.grain {
            GrainLaw::FixedDisc { radius } => *radius,
            GrainLaw::DiscRadiusLaw { radii, .. } => radii.iter().copied().fold(0.0, f64::max),
            GrainLaw::FixedBox { half_extents, .. } => half_extents.iter().map(|h| h * h).sum::<f64>().sqrt(),
        }
    }

    /// Typical length scale used for default r schedules.
    pub fn radius_scale(&self) -> f64 {
        match &self.grain {
            GrainLaw::FixedDisc { radius } => *radius,
            GrainLaw::DiscRadiusLaw { radii, probabilities } => radii.iter().zip(probabilities).map(|(r, p)| r * p).sum(),
            GrainLaw::FixedBox { half_extents, .. } => half_extents.iter().copied().fold(f64::INFINITY, f64::min),
        }
    }

    /// Mean grain volume.
    pub fn mean_volume(&self) -> f64 {
        let n = self.dim as i32;
        match &self.grain {
            GrainLaw::FixedDisc { radius } => unit_ball_volume(self.dim) * radius.powi(n),
            GrainLaw::DiscRadiusLaw { radii, probabilities } => {
                unit_ball_volume(self.dim) * radii.iter().zip(probabilities).map(|(r, p)| p * r.powi(n)).sum::<f64>()
            }
            GrainLaw::FixedBox { half_extents, .. } => half_extents.iter().map(|h| 2.0 * h).product(),
        }
    }

    /// Mean grain surface area (perimeter in the plane).
    pub fn mean_surface(&self) -> f64 {
        let n = self.dim as i32;
        match &self.grain {
            GrainLaw::FixedDisc { radius } => sphere_area(self.dim) * radius.powi(n - 1),
            GrainLaw::DiscRadiusLaw { radii, probabilities } => {
                sphere_area(self.dim) * radii.iter().zip(probabilities).map(|(r, p)| p * r.powi(n - 1)).sum::<f64>()
            }
            GrainLaw::FixedBox { half_extents, .. } => {
                let v: f64 = half_extents.iter().map(|h| 2.0 * h).product();
                half_extents.iter().map(|h| 2.0 * v / (2.0 * h)).sum()
            }
        }
    }

    pub fn extended_window(&self) -> Window {
        self.window.expanded(self.margin)
    }

    fn draw_grain(&self, center: Vec<f64>, rng: &mut ChaCha8Rng) -> Grain {
        match &self.grain {
            GrainLaw::FixedDisc { radius } => Grain::Ball { center, radius: *radius },
            GrainLaw::DiscRadiusLaw { radii, probabilities } => {
                let u: f64 = rng.random();
                let mut acc = 0.0;
                let mut radius = radii[radii.len() - 1];
                for (r, p) in radii.iter().zip(probabilities) {
                    acc += p;
                    if u < acc {
                        radius = *r;
                        break;
                    }
                }
                Grain::Ball { center, radius }
            }
            GrainLaw::FixedBox { half_extents, angle } => Grain::Box { center, half: half_extents.clone(), angle: *angle },
        }
    }
}

fn positive(what: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidInput(format!("{what} must be positive, got {v}")))
    }
}

/// One germ–grain configuration on the extended window.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Realization {
    pub grains: Vec<Grain>,
    pub seed: u64,
    pub index: u64,
}

impl Realization {
    pub fn contains(&self, x: &[f64]) -> bool {
        self.grains.iter().any(|g| g.contains(x))
    }

    /// Grains that come within `by` of the window.
    pub fn near(&self, w: &Window, by: f64) -> Vec<&Grain> {
        self.grains
            .iter()
            .filter(|g| {
                let (c, r) = (g.center(), g.reach() + by);
                c.iter().zip(w.min.iter().zip(&w.max)).all(|(v, (a, b))| *v >= a - r && *v <= b + r)
            })
            .collect()
    }
}

/// Realization `index` of `seed`; [`simulate`] is index 0.
pub fn simulate_indexed(spec: &BooleanModelSpec, seed: u64, index: u64) -> Result<Realization> {
    spec.validate()?;
    Ok(realize(spec, seed, index))
}

pub fn simulate(spec: &BooleanModelSpec, seed: u64) -> Result<Realization> {
    simulate_indexed(spec, seed, 0)
}

fn realize(spec: &BooleanModelSpec, seed: u64, index: u64) -> Realization {
    let ext = spec.extended_window();
    let mut rng = stream_rng(seed, index);
    let mean = spec.intensity * ext.volume();
    let count = Poisson::new(mean).map(|p| p.sample(&mut rng) as usize).unwrap_or(0);
    let grains = (0..count)
        .map(|_| {
            let center: Vec<f64> = ext.min.iter().zip(&ext.max).map(|(a, b)| a + (b - a) * rng.random::<f64>()).collect();
            spec.draw_grain(center, &mut rng)
        })
        .collect();
    Realization { grains, seed, index }
}

/// Sampling budget shared by the Boolean-model estimators.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct BooleanSampling {
    pub realizations: usize,
    /// Stratified points per realization for the volume fraction.
    pub points: usize,
    /// Shell samples per realization for contact distributions.
    pub shell_samples: usize,
    pub seed: u64,
}

impl Default for BooleanSampling {
    fn default() -> Self {
        BooleanSampling { realizations: 1000, points: 256, shell_samples: 2048, seed: 0 }
    }
}

impl BooleanSampling {
    fn validate(&self) -> Result<()> {
        if self.realizations < 2 {
            return Err(Error::InvalidInput("at least two realizations are needed for an error estimate".into()));
        }
        Ok(())
    }
}

const MEASURE_TAG: u64 = 0x6d65_6173;

/// Runs `f` on every realization in parallel and returns the results in
/// index order.
pub(crate) fn per_realization<T, F>(spec: &BooleanModelSpec, cfg: &BooleanSampling, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(&Realization, &mut ChaCha8Rng) -> T + Sync,
{
    let measure_seed = derive_seed(cfg.seed, MEASURE_TAG);
    (0..cfg.realizations as u64)
        .into_par_iter()
        .map(|i| {
            let z = realize(spec, cfg.seed, i);
            let mut rng = stream_rng(measure_seed, i);
            f(&z, &mut rng)
        })
        .collect()
}

/// Sample mean with its standard error.
pub(crate) fn mean_estimate(values: &[f64]) -> Estimate {
    let m = values.len() as f64;
    let mean = values.iter().sum::<f64>() / m;
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (m - 1.0).max(1.0);
    Estimate::monte_carlo(mean, (var / m).sqrt(), values.len() as u64)
}

/// Fraction of `k^n` jittered stratified points of the window covered.
fn covered_fraction(z: &Realization, w: &Window, points: usize, rng: &mut ChaCha8Rng) -> f64 {
    let n = w.min.len();
    let k = ((points.max(1) as f64).powf(1.0 / n as f64).ceil() as usize).max(1);
    let grains = z.near(w, 0.0);
    let total = k.pow(n as u32);
    let mut x = vec![0.0; n];
    let mut hits = 0usize;
    for cell in 0..total {
        let mut c = cell;
        for d in 0..n {
            let i = c % k;
            c /= k;
            let side = (w.max[d] - w.min[d]) / k as f64;
            x[d] = w.min[d] + side * (i as f64 + rng.random::<f64>());
        }
        hits += grains.iter().any(|g| g.contains(&x)) as usize;
    }
    hits as f64 / total as f64
}

/// p̄ = P(0 ∈ Z), from point-in-union tests on stratified points of the
/// window, averaged over realizations.
pub fn volume_fraction(spec: &BooleanModelSpec, cfg: &BooleanSampling) -> Result<Estimate> {
    spec.validate()?;
    cfg.validate()?;
    let w = spec.window.clone();
    let per = per_realization(spec, cfg, |z, rng| covered_fraction(z, &w, cfg.points, rng));
    Ok(mean_estimate(&per))
}

/// Distribution ℛ* of the outer normal at a typical boundary point.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum RoseOfDirections {
    Uniform {
        dim: usize,
    },
    /// Atoms `(direction, mass)` with unit directions and total mass 1.
    Discrete {
        atoms: Vec<(Vector, f64)>,
    },
}

/// Nodes used to integrate against the uniform rose.
const UNIFORM_NODES_2D: usize = 4096;
const UNIFORM_NODES_3D: usize = 40_000;

impl RoseOfDirections {
    pub fn dim(&self) -> usize {
        match self {
            RoseOfDirections::Uniform { dim } => *dim,
            RoseOfDirections::Discrete { atoms } => atoms.first().map_or(0, |a| a.0.dim()),
        }
    }

    pub fn mass(&self) -> f64 {
        match self {
            RoseOfDirections::Uniform { .. } => 1.0,
            RoseOfDirections::Discrete { atoms } => atoms.iter().map(|a| a.1).sum(),
        }
    }

    /// ∫ f dℛ*, by quadrature for the uniform law.
    pub fn integrate(&self, mut f: impl FnMut(&Vector) -> f64) -> Result<f64> {
        match self {
            RoseOfDirections::Uniform { dim } => {
                let nodes = if *dim == 2 { UNIFORM_NODES_2D } else { UNIFORM_NODES_3D };
                let quad = crate::geom::sphere_quadrature(*dim, nodes)?;
                Ok(quad.integrate(f) / sphere_area(*dim))
            }
            RoseOfDirections::Discrete { atoms } => Ok(atoms.iter().map(|(v, m)| m * f(v)).sum()),
        }
    }

    /// ∫ h(−Q, v)⁺ ℛ*(dv).
    pub fn support_integral(&self, q: &StructuringElement) -> Result<f64> {
        ensure_dim(self.dim(), q.dim())?;
        let neg = q.negated();
        self.integrate(|v| neg.support_unchecked(v.coords()).max(0.0))
    }

    pub fn is_uniform(&self) -> bool {
        matches!(self, RoseOfDirections::Uniform { .. })
    }
}

/// The rose of the model: uniform for balls, the face-normal law weighted
/// by face area for boxes of fixed orientation.
pub fn rose(spec: &BooleanModelSpec) -> Result<RoseOfDirections> {
    spec.validate()?;
    if analytic::specific_perimeter(spec) <= 0.0 {
        return Err(Error::UndefinedRose);
    }
    Ok(match &spec.grain {
        GrainLaw::FixedDisc { .. } | GrainLaw::DiscRadiusLaw { .. } => RoseOfDirections::Uniform { dim: spec.dim },
        GrainLaw::FixedBox { half_extents, angle } => {
            let n = spec.dim;
            let vol: f64 = half_extents.iter().map(|h| 2.0 * h).product();
            let total = spec.mean_surface();
            let mut atoms = Vec::with_capacity(2 * n);
            for k in 0..n {
                let face = vol / (2.0 * half_extents[k]);
                for sign in [1.0, -1.0] {
                    let mut e = Vector::basis(n, k);
                    if n == 2 {
                        e = e.rotated(*angle);
                    }
                    atoms.push((&e * sign, face / total));
                }
            }
            RoseOfDirections::Discrete { atoms }
        }
    })
}
