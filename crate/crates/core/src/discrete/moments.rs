use super::DiscreteParams;
use crate::error::{check_nonnegative, Error, Result};
use crate::renewal::restart_moments;

/// Mean of `N(t) 1{N(t) != F}`:
/// `(lambda-mu) eta / ((eta+nu) nu) [1 - e^{-nu t} + (nu/eta)^2 e^{-nu t} (1 - e^{-eta t})]`,
/// with the `nu -> 0` limit `(lambda - mu) t`.
pub fn mean_transient(p: &DiscreteParams, t: f64) -> Result<f64> {
    check_nonnegative("t", t)?;
    Ok(restart_mean(p.lambda() - p.mu(), p.nu(), p.eta(), t))
}

pub(crate) fn restart_mean(drift: f64, nu: f64, eta: f64, t: f64) -> f64 {
    if nu == 0.0 {
        return drift * t;
    }
    let decay = (-nu * t).exp();
    let r = nu / eta;
    let one_minus_decay_over_nu = -(-nu * t).exp_m1() / nu;
    drift * eta / (eta + nu) * (one_minus_decay_over_nu + r * r / nu * decay * -(-eta * t).exp_m1())
}

/// Variance of `N(t) 1{N(t) != F}`, i.e. truncated second moment minus the
/// squared truncated mean. The second moment is the restart convolution of the
/// free moment `(lambda+mu) s + (lambda-mu)^2 s^2`, in closed form.
pub fn variance_transient(p: &DiscreteParams, t: f64) -> Result<f64> {
    check_nonnegative("t", t)?;
    let drift = p.lambda() - p.mu();
    let (_, second) = restart_moments(drift, p.lambda() + p.mu(), p.nu(), p.eta(), t);
    let mean = restart_mean(drift, p.nu(), p.eta(), t);
    Ok((second - mean * mean).max(0.0))
}

/// `lim m_N(t) = (1 - q) (lambda - mu) / nu`.
pub fn mean_asymptotic(p: &DiscreteParams) -> Result<f64> {
    let (nu, eta) = (p.nu(), p.eta());
    if nu == 0.0 {
        return Err(Error::NoSteadyState);
    }
    Ok((p.lambda() - p.mu()) * eta / ((eta + nu) * nu))
}

/// `lim V_N(t) = (lambda+mu) eta / ((eta+nu) nu) + (lambda-mu)^2 eta (2 nu + eta) / ((eta+nu)^2 nu^2)`.
pub fn variance_asymptotic(p: &DiscreteParams) -> Result<f64> {
    let (nu, eta) = (p.nu(), p.eta());
    if nu == 0.0 {
        return Err(Error::NoSteadyState);
    }
    let d = p.lambda() - p.mu();
    let k = eta + nu;
    Ok((p.lambda() + p.mu()) * eta / (k * nu) + d * d * eta * (2.0 * nu + eta) / (k * k * nu * nu))
}

/// Time of the interior extremum of the mean, `(1/eta) ln(nu / (nu - eta))`.
///
/// `None` when the mean is monotone (`eta >= nu`) or identically zero
/// (`lambda == mu`).
pub fn mean_peak_time(p: &DiscreteParams) -> Option<f64> {
    let (nu, eta) = (p.nu(), p.eta());
    if eta >= nu || p.lambda() == p.mu() {
        return None;
    }
    Some((nu / (nu - eta)).ln() / eta)
}
