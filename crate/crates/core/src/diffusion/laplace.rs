use super::DiffusionParams;
use crate::error::{check_finite, check_positive, Error, Result};

/// `sqrt((lambda_hat - mu_hat)^2 + 2 sigma2 rate)`.
fn spread(dp: &DiffusionParams, rate: f64) -> f64 {
    let d = dp.drift();
    (d * d + 2.0 * dp.sigma2() * rate).sqrt()
}

/// Roots `w1 > 0 > w2` of `sigma2 w^2 - 2 (lambda_hat - mu_hat) w - 2 (z + nu) = 0`,
/// the decay exponents of the transform to the left and right of the origin.
pub fn laplace_exponents(dp: &DiffusionParams, z: f64) -> Result<(f64, f64)> {
    check_positive("z", z)?;
    let d = dp.drift();
    let r = spread(dp, z + dp.nu());
    Ok(((d + r) / dp.sigma2(), (d - r) / dp.sigma2()))
}

/// Laplace transform in `t` of `f(x,t|0)`:
/// `(z+nu)(z+eta) / (z (z+eta+nu) R) exp((d x - R |x|) / sigma2)`, `R = sqrt(d^2 + 2 sigma2 (z+nu))`.
pub fn laplace_density(dp: &DiffusionParams, x: f64, z: f64) -> Result<f64> {
    check_finite("x", x)?;
    check_positive("z", z)?;
    let (nu, eta) = (dp.nu(), dp.eta());
    let r = spread(dp, z + nu);
    let amplitude = (z + nu) * (z + eta) / (z * (z + eta + nu) * r);
    Ok(amplitude * ((dp.drift() * x - r * x.abs()) / dp.sigma2()).exp())
}

/// Steady-state density, a two-sided exponential:
/// `eta nu / ((eta+nu) R) exp((d x - R |x|) / sigma2)`, `R = sqrt(d^2 + 2 sigma2 nu)`.
pub fn steady_density(dp: &DiffusionParams, x: f64) -> Result<f64> {
    check_finite("x", x)?;
    let (nu, eta) = (dp.nu(), dp.eta());
    if nu == 0.0 {
        return Err(Error::NoSteadyState);
    }
    let r = spread(dp, nu);
    Ok(eta * nu / ((eta + nu) * r) * ((dp.drift() * x - r * x.abs()) / dp.sigma2()).exp())
}
