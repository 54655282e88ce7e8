//! Expected numbers and height distributions of critical points of smooth
//! isotropic Gaussian random fields on Euclidean space and on spheres.

pub mod error;
pub mod euclidean;
pub mod fyodorov;
pub mod goi;
pub mod kacrice;
pub mod mc;
pub mod numeric;
pub mod quad;
pub mod sim;
pub mod special;
pub mod sphere;

pub use error::{Error, Result};
pub use numeric::{EvalOptions, Estimate, Method, NumericConfig};
pub use euclidean::EuclideanModel;
pub use kacrice::{CritModel, CritResult, Regime, Space};
pub use sphere::SphereModel;
