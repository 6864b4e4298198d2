//! Numerical kernel shared by every analytic law: scaled Bessel functions and
//! adaptive quadrature.

mod bessel;
mod quadrature;

pub(crate) use bessel::scaled_i;
pub use bessel::{bessel_i_scaled, MAX_ORDER};
pub(crate) use quadrature::integrate_segments;
pub use quadrature::{integrate_adaptive, QuadratureResult, QuadratureSpec};
