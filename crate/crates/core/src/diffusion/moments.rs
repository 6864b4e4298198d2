use super::DiffusionParams;
use crate::discrete::restart_mean;
use crate::error::{check_nonnegative, Error, Result};
use crate::renewal::restart_moments;

/// Mean of `X(t) 1{X(t) != F}`; same shape as the lattice mean with
/// `lambda - mu` replaced by the drift.
pub fn mean_x(dp: &DiffusionParams, t: f64) -> Result<f64> {
    check_nonnegative("t", t)?;
    Ok(restart_mean(dp.drift(), dp.nu(), dp.eta(), t))
}

/// Variance of `X(t) 1{X(t) != F}` in closed form. For `nu t < 1e-3` the
/// expanded formula loses digits to its `1/nu^2` prefactors and the restart
/// convolution is evaluated instead.
pub fn variance_x(dp: &DiffusionParams, t: f64) -> Result<f64> {
    check_nonnegative("t", t)?;
    let (nu, eta, s2, d) = (dp.nu(), dp.eta(), dp.sigma2(), dp.drift());
    if nu * t < 1e-3 {
        let (m, second) = restart_moments(d, s2, nu, eta, t);
        return Ok((second - m * m).max(0.0));
    }
    let k = eta + nu;
    let en = (-nu * t).exp();
    let ee = (-eta * t).exp();
    let shape = 1.0 - en + (nu * nu) / (eta * eta) * en * (1.0 - ee);
    let diffusive = s2 * eta / (k * nu) * shape;
    let bracket = -2.0 * nu * nu * en * (1.0 - ee) * (nu * nu + eta * nu + eta * eta)
        + 2.0 * nu * eta.powi(3) * (1.0 - en)
        + eta.powi(4)
        + 2.0 * eta * nu * k * (nu * nu - eta * eta) * t * en
        - (en * (nu * nu - eta * eta - nu * nu * ee)).powi(2);
    let drift_part = d * d / (k * k * nu * nu * eta * eta) * bracket;
    Ok(diffusive + drift_part)
}

/// Limits of [`mean_x`] and [`variance_x`] as `t -> infinity`.
pub fn asymptotic_moments(dp: &DiffusionParams) -> Result<(f64, f64)> {
    let (nu, eta) = (dp.nu(), dp.eta());
    if nu == 0.0 {
        return Err(Error::NoSteadyState);
    }
    let d = dp.drift();
    let k = eta + nu;
    let mean = d * eta / (k * nu);
    let var = dp.sigma2() * eta / (k * nu) + d * d * eta * (2.0 * nu + eta) / (k * k * nu * nu);
    Ok((mean, var))
}
