use serde::{Deserialize, Serialize};

use super::DiscreteParams;
use crate::error::{Error, Result};

/// Limiting law: `pi_0` at the origin, geometric decay on either side.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SteadyLaw {
    pub failure: f64,
    pub pi0: f64,
    /// `pi_{n+1} / pi_n` for `n >= 0`.
    pub up_ratio: f64,
    /// `pi_{-n-1} / pi_{-n}` for `n >= 0`.
    pub down_ratio: f64,
}

impl SteadyLaw {
    pub fn probability(&self, n: i64) -> f64 {
        let ratio = if n >= 0 {
            self.up_ratio
        } else {
            self.down_ratio
        };
        self.pi0 * ratio.powf(n.unsigned_abs() as f64)
    }

    /// Sum of the two geometric series plus the failure mass.
    pub fn total_mass(&self) -> f64 {
        self.pi0 * (1.0 / (1.0 - self.up_ratio) + self.down_ratio / (1.0 - self.down_ratio))
            + self.failure
    }
}

/// `(lambda + mu + nu + z)^2 - 4 lambda mu`, expanded so the large terms never cancel.
pub(crate) fn discriminant(p: &DiscreteParams, z: f64) -> f64 {
    let (l, m) = (p.lambda(), p.mu());
    let w = z + p.nu();
    (l - m) * (l - m) + 2.0 * w * (l + m) + w * w
}

pub fn steady_law(p: &DiscreteParams) -> Result<SteadyLaw> {
    let (nu, eta) = (p.nu(), p.eta());
    if nu == 0.0 {
        return Err(Error::NoSteadyState);
    }
    let failure = nu / (eta + nu);
    let root = discriminant(p, 0.0).sqrt();
    let sum = p.lambda() + p.mu() + nu;
    Ok(SteadyLaw {
        failure,
        pi0: (1.0 - failure) * nu / root,
        // (S - sqrt D) / (2 mu) rewritten as 2 lambda / (S + sqrt D)
        up_ratio: 2.0 * p.lambda() / (sum + root),
        down_ratio: 2.0 * p.mu() / (sum + root),
    })
}

/// `pi_n`; requires `nu > 0`.
pub fn steady_state(p: &DiscreteParams, n: i64) -> Result<f64> {
    Ok(steady_law(p)?.probability(n))
}

/// `q = nu / (eta + nu)`; requires `nu > 0`.
pub fn steady_failure(p: &DiscreteParams) -> Result<f64> {
    Ok(steady_law(p)?.failure)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn table_one_finest_grid() {
        // lambda-hat=1, mu-hat=2, sigma^2=9 scaled with eps=0.01
        let p = DiscreteParams::new(45100.0, 45200.0, 1.0, 0.25).unwrap();
        let eps = 0.01;
        assert!((steady_state(&p, 0).unwrap() / eps - 0.04581).abs() < 5e-6);
        assert!((steady_state(&p, 1).unwrap() / eps - 0.04554).abs() < 5e-6);
    }

    #[test]
    fn mass_closes() {
        for &(l, m, nu, eta) in &[
            (2.0, 1.0, 1.0, 1.0),
            (1.0, 3.0, 0.2, 0.5),
            (5.0, 5.0, 0.01, 2.0),
        ] {
            let law = steady_law(&DiscreteParams::new(l, m, nu, eta).unwrap()).unwrap();
            assert!((law.total_mass() - 1.0).abs() < 1e-12);
            let direct: f64 = (-4000..=4000).map(|n| law.probability(n)).sum::<f64>() + law.failure;
            assert!((direct - 1.0).abs() < 1e-10, "{direct}");
        }
    }

    #[test]
    fn balance_equations_hold() {
        let p = DiscreteParams::new(2.0, 1.0, 0.7, 1.3).unwrap();
        let law = steady_law(&p).unwrap();
        let pi = |n| law.probability(n);
        let out = p.lambda() + p.mu() + p.nu();
        let r0 = -out * pi(0) + p.lambda() * pi(-1) + p.mu() * pi(1) + p.eta() * law.failure;
        assert!(r0.abs() < 1e-14);
        for n in [-3_i64, -1, 1, 4] {
            let r = -out * pi(n) + p.lambda() * pi(n - 1) + p.mu() * pi(n + 1);
            assert!(r.abs() < 1e-14, "n={n}: {r}");
        }
    }

    #[test]
    fn requires_catastrophes() {
        let p = DiscreteParams::new(2.0, 1.0, 0.0, 1.0).unwrap();
        assert_eq!(steady_state(&p, 0), Err(Error::NoSteadyState));
        assert_eq!(steady_failure(&p), Err(Error::NoSteadyState));
    }
}
