//! Lattice process `N(t)`: a bilateral birth-death walk on the integers with
//! up-rate `lambda` and down-rate `mu`, sent to the failure state `F` by
//! catastrophes at rate `nu` and restarted at 0 after an `Exp(eta)` repair.
//! `N(0) = 0` throughout.

mod laplace;
mod moments;
mod steady;
mod transient;

use serde::{Deserialize, Serialize};

use crate::error::{check_nonnegative, check_positive, Result};

pub use laplace::{laplace_p0, laplace_pn, laplace_roots, LaplaceRoots};
pub(crate) use moments::restart_mean;
pub use moments::{
    mean_asymptotic, mean_peak_time, mean_transient, variance_asymptotic, variance_transient,
};
pub use steady::{steady_failure, steady_law, steady_state, SteadyLaw};
pub(crate) use transient::failure_mass;
pub use transient::{
    default_window, failure_probability, first_passage_density, skellam_probability,
    transient_distribution, transient_probability, transient_probability_renewal,
    DistributionSlice,
};

/// Rates of the catastrophe-repair random walk, in events per unit time.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawDiscreteParams")]
pub struct DiscreteParams {
    lambda: f64,
    mu: f64,
    nu: f64,
    eta: f64,
}

#[derive(Deserialize)]
struct RawDiscreteParams {
    lambda: f64,
    mu: f64,
    nu: f64,
    eta: f64,
}

impl TryFrom<RawDiscreteParams> for DiscreteParams {
    type Error = crate::Error;

    fn try_from(raw: RawDiscreteParams) -> Result<Self> {
        DiscreteParams::new(raw.lambda, raw.mu, raw.nu, raw.eta)
    }
}

impl DiscreteParams {
    /// `lambda`, `mu`, `eta` must be positive and `nu` nonnegative.
    pub fn new(lambda: f64, mu: f64, nu: f64, eta: f64) -> Result<Self> {
        Ok(Self {
            lambda: check_positive("lambda", lambda)?,
            mu: check_positive("mu", mu)?,
            nu: check_nonnegative("nu", nu)?,
            eta: check_positive("eta", eta)?,
        })
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    pub fn nu(&self) -> f64 {
        self.nu
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }

    /// `2 sqrt(lambda mu)`, the Bessel argument rate.
    pub fn alpha(&self) -> f64 {
        2.0 * (self.lambda * self.mu).sqrt()
    }

    /// `sqrt(lambda / mu)`.
    pub fn beta(&self) -> f64 {
        (self.lambda / self.mu).sqrt()
    }

    pub(crate) fn ln_beta(&self) -> f64 {
        0.5 * (self.lambda.ln() - self.mu.ln())
    }

    /// `lambda + mu - alpha = (sqrt(lambda) - sqrt(mu))^2`, the exponential rate
    /// left over once `e^{-alpha t}` is absorbed into the scaled Bessel factor.
    pub(crate) fn scaled_gap(&self) -> f64 {
        let d = self.lambda.sqrt() - self.mu.sqrt();
        d * d
    }

    /// Parameters with the roles of `lambda` and `mu` exchanged, which reflects
    /// the state space `n -> -n`.
    pub fn swapped(&self) -> Self {
        Self {
            lambda: self.mu,
            mu: self.lambda,
            ..*self
        }
    }
}
