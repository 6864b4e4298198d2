//! Exact laws of a bilateral birth-death process (a double-ended queue) that is
//! hit by catastrophes and restarts from zero after exponential repairs, together
//! with its jump-diffusion approximation.
//!
//! The crate is split by concern:
//!
//! - [`special_math`]: overflow-safe scaled Bessel functions `e^{-x} I_n(x)` and
//!   adaptive Gauss-Kronrod quadrature.
//! - [`discrete`]: transient, steady-state, moment and Laplace-domain laws of the
//!   lattice process `N(t)`.
//! - [`diffusion`]: the same quantities for the Wiener-with-jumps process `X(t)`.
//! - [`simulation`]: exact event-driven Monte Carlo of both processes, used as an
//!   independent oracle.
//! - [`approximation`]: heavy-traffic scaling and the numerical comparison of the
//!   two models.
//!
//! Every computation is a pure function of its inputs.

pub mod approximation;
pub mod diffusion;
pub mod discrete;
mod error;
mod renewal;
pub mod simulation;
pub mod special_math;

pub use approximation::{ComparisonRow, ScalingMap};
pub use diffusion::{DensitySlice, DiffusionParams, TransientDensity};
pub use discrete::{DiscreteParams, DistributionSlice, LaplaceRoots, SteadyLaw};
pub use error::{Error, Result};
pub use simulation::{EmpiricalEstimate, PathTrace, SimConfig, Statistic};
pub use special_math::{bessel_i_scaled, integrate_adaptive, QuadratureResult, QuadratureSpec};
