use serde::{Deserialize, Serialize};

use super::steady::discriminant;
use super::DiscreteParams;
use crate::error::{check_positive, Result};

/// Roots `psi1 > psi2` of `mu chi^2 - (z + lambda + mu + nu) chi + lambda = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LaplaceRoots {
    pub z: f64,
    pub psi1: f64,
    pub psi2: f64,
}

pub fn laplace_roots(p: &DiscreteParams, z: f64) -> Result<LaplaceRoots> {
    check_positive("z", z)?;
    let sum = z + p.lambda() + p.mu() + p.nu();
    let big = sum + discriminant(p, z).sqrt();
    Ok(LaplaceRoots {
        z,
        psi1: big / (2.0 * p.mu()),
        // the small root via psi1 psi2 = lambda / mu
        psi2: 2.0 * p.lambda() / big,
    })
}

/// `P_0*(z) = [1 + eta nu / (z (z + eta + nu))] / sqrt((z+lambda+mu+nu)^2 - 4 lambda mu)`.
pub fn laplace_p0(p: &DiscreteParams, z: f64) -> Result<f64> {
    check_positive("z", z)?;
    let (nu, eta) = (p.nu(), p.eta());
    Ok((1.0 + eta * nu / (z * (z + eta + nu))) / discriminant(p, z).sqrt())
}

/// `P_n*(z) = P_0*(z) psi2^n` for `n >= 1` and `P_0*(z) psi1^n` for `n <= -1`.
pub fn laplace_pn(p: &DiscreteParams, n: i64, z: f64) -> Result<f64> {
    let p0 = laplace_p0(p, z)?;
    let roots = laplace_roots(p, z)?;
    let factor = if n >= 0 {
        roots.psi2.powf(n as f64)
    } else {
        (1.0 / roots.psi1).powf(n.unsigned_abs() as f64)
    };
    Ok(p0 * factor)
}
