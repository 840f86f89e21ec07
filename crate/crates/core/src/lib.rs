//! Dilation volumes, Q-variations, covariograms, surface area measures and
//! contact distributions of sets of finite perimeter.

// Negated float comparisons are deliberate: they reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod boolean;
pub mod checks;
pub mod dilation;
pub mod error;
pub mod geom;
pub mod gridset;
pub mod sampling;
pub mod shapes;

pub use error::{Error, Result};
pub use geom::{SphereQuadrature, StructuringElement, Vector};
pub use gridset::GridSet;
pub use sampling::{Estimate, Method};
pub use shapes::{Shape, SurfaceMeasure};
