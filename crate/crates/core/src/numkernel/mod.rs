//! Numerical primitives shared by the calculus modules.

pub mod inversion;
pub mod quadrature;
pub mod rng;
pub mod special;

pub use inversion::{check_characteristic, invert_characteristic, invert_samples, trapezoid, DensityGrid, GridSpec, InversionSpec};
pub use quadrature::{integrate, integrate_with_error, QuadResult, QuadratureSpec};
pub use rng::{rng_normal, rng_poisson, RngStream};
pub use special::{gaussian_pdf, normal_cdf, normal_pdf, normal_sf};
