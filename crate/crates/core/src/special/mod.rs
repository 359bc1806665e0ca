//! Bessel functions, gamma factors, quadrature and the integral transforms built on them.

pub mod bessel;
pub mod bump;
pub mod dd;
pub mod gamma;
pub mod hankel;
pub mod mellin;
pub mod quad;
pub mod weber;

pub use bessel::{bessel_j, bessel_j_real, WeightK};
pub use bump::{CompactFn, TestFunction};
pub use gamma::gamma_factor;
pub use hankel::{hankel_inversion_check, hankel_transform, HankelEvaluator, HankelInterpolant};
pub use quad::QuadratureConfig;
