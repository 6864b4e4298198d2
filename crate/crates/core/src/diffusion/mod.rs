//! Jump-diffusion `X(t)`: a Wiener process with drift `lambda_hat - mu_hat` and
//! infinitesimal variance `sigma2` that jumps to the failure state `F` at rate
//! `nu` and restarts from 0 after an `Exp(eta)` repair. `X(0) = 0`.

mod laplace;
mod moments;

use std::cell::Cell;
use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::discrete::failure_mass;
use crate::error::{check_finite, check_nonnegative, check_positive, Error, Result};
use crate::special_math::{integrate_segments, QuadratureSpec};

pub use laplace::{laplace_density, laplace_exponents, steady_density};
pub use moments::{asymptotic_moments, mean_x, variance_x};

/// Parameters of the jump-diffusion. Only the net drift `lambda_hat - mu_hat`
/// enters the law; the two components are kept because the lattice scaling
/// uses them separately.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawDiffusionParams")]
pub struct DiffusionParams {
    lambda_hat: f64,
    mu_hat: f64,
    sigma2: f64,
    nu: f64,
    eta: f64,
}

#[derive(Deserialize)]
struct RawDiffusionParams {
    lambda_hat: f64,
    mu_hat: f64,
    sigma2: f64,
    nu: f64,
    eta: f64,
}

impl TryFrom<RawDiffusionParams> for DiffusionParams {
    type Error = Error;

    fn try_from(raw: RawDiffusionParams) -> Result<Self> {
        DiffusionParams::new(raw.lambda_hat, raw.mu_hat, raw.sigma2, raw.nu, raw.eta)
    }
}

impl DiffusionParams {
    pub fn new(lambda_hat: f64, mu_hat: f64, sigma2: f64, nu: f64, eta: f64) -> Result<Self> {
        Ok(Self {
            lambda_hat: check_positive("lambda_hat", lambda_hat)?,
            mu_hat: check_positive("mu_hat", mu_hat)?,
            sigma2: check_positive("sigma2", sigma2)?,
            nu: check_nonnegative("nu", nu)?,
            eta: check_positive("eta", eta)?,
        })
    }

    pub fn lambda_hat(&self) -> f64 {
        self.lambda_hat
    }

    pub fn mu_hat(&self) -> f64 {
        self.mu_hat
    }

    pub fn sigma2(&self) -> f64 {
        self.sigma2
    }

    pub fn nu(&self) -> f64 {
        self.nu
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }

    /// Net drift `lambda_hat - mu_hat`.
    pub fn drift(&self) -> f64 {
        self.lambda_hat - self.mu_hat
    }

    /// Same law with the drift reversed.
    pub fn reflected(&self) -> Self {
        Self {
            lambda_hat: self.mu_hat,
            mu_hat: self.lambda_hat,
            ..*self
        }
    }
}

/// Transition density of the catastrophe-free Wiener process from `x0`.
pub fn wiener_density(dp: &DiffusionParams, x: f64, t: f64, x0: f64) -> Result<f64> {
    check_finite("x", x)?;
    check_finite("x0", x0)?;
    check_positive("t", t)?;
    Ok(gaussian(dp, x - x0, t))
}

fn gaussian(dp: &DiffusionParams, displacement: f64, t: f64) -> f64 {
    let var = dp.sigma2 * t;
    let dev = displacement - dp.drift() * t;
    (-dev * dev / (2.0 * var)).exp() / (2.0 * PI * var).sqrt()
}

/// Density of `X(t)` on the real line, or the point mass at the origin at `t = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum TransientDensity {
    PointMassAtOrigin,
    Value(f64),
}

impl TransientDensity {
    pub fn value(self) -> Option<f64> {
        match self {
            TransientDensity::Value(v) => Some(v),
            TransientDensity::PointMassAtOrigin => None,
        }
    }
}

/// `f(x,t|0) = e^{-nu t} f~(x,t|0) + eta int_0^t q(tau) e^{-nu (t-tau)} f~(x,t-tau|0) dtau`.
pub fn transient_density(
    dp: &DiffusionParams,
    x: f64,
    t: f64,
    q: &QuadratureSpec,
) -> Result<TransientDensity> {
    check_finite("x", x)?;
    check_nonnegative("t", t)?;
    if t == 0.0 {
        return Ok(TransientDensity::PointMassAtOrigin);
    }
    density_value(dp, x, t, q).map(TransientDensity::Value)
}

/// Numeric density for `t > 0`.
pub(crate) fn density_value(
    dp: &DiffusionParams,
    x: f64,
    t: f64,
    q: &QuadratureSpec,
) -> Result<f64> {
    let (nu, eta) = (dp.nu, dp.eta);
    let free = (-nu * t).exp() * gaussian(dp, x, t);
    if nu == 0.0 {
        return Ok(free);
    }
    let k = eta + nu;
    let c = eta * nu / k;
    // In the elapsed time s = t - tau since the last repair.
    let integrand = |s: f64| -(-k * (t - s)).exp_m1() * (-nu * s).exp() * gaussian(dp, x, s);
    let d = dp.drift();
    let split = (0.5 * t).min(10.0 * dp.sigma2 / (d * d + dp.sigma2));
    // s = u^2 on the first piece removes the s^{-1/2} behaviour at x = 0.
    let early = integrate_segments(
        |u: f64| {
            if u == 0.0 {
                0.0
            } else {
                2.0 * u * integrand(u * u)
            }
        },
        &[0.0, split.sqrt()],
        q,
    )?;
    let late = integrate_segments(integrand, &[split, t], q)?;
    Ok(free + c * (early.value + late.value))
}

/// First-passage-time density of the free Wiener process through `x`,
/// `|x - x0| / t f~(x,t|x0)`.
pub fn fpt_density_wiener(dp: &DiffusionParams, x: f64, t: f64, x0: f64) -> Result<f64> {
    if x == x0 {
        return Err(Error::InvalidArgument("first passage needs x != x0".into()));
    }
    Ok((x - x0).abs() / t * wiener_density(dp, x, t, x0)?)
}

/// Both sides of the last-visit-to-origin identity
/// `f(x,t|0) = int_0^t f(0,tau|0) e^{-nu(t-tau)} g~(x,t-tau|0) dtau`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RenewalCheck {
    pub direct: f64,
    pub renewal: f64,
    pub residual: f64,
}

pub fn renewal_check(
    dp: &DiffusionParams,
    x: f64,
    t: f64,
    q: &QuadratureSpec,
) -> Result<RenewalCheck> {
    check_finite("x", x)?;
    if x == 0.0 {
        return Err(Error::InvalidArgument(
            "renewal identity needs x != 0".into(),
        ));
    }
    check_positive("t", t)?;
    let direct = density_value(dp, x, t, q)?;

    let failure: Cell<Option<Error>> = Cell::new(None);
    let integrand = |tau: f64| {
        let s = t - tau;
        if s <= 0.0 || tau <= 0.0 {
            return 0.0;
        }
        let passage = (-dp.nu * s).exp() * x.abs() / s * gaussian(dp, x, s);
        if passage == 0.0 {
            return 0.0;
        }
        match density_value(dp, 0.0, tau, q) {
            Ok(f0) => f0 * passage,
            Err(e) => {
                failure.set(Some(e));
                f64::NAN
            }
        }
    };
    let half = 0.5 * t;
    let early = integrate_segments(|u: f64| 2.0 * u * integrand(u * u), &[0.0, half.sqrt()], q);
    let late = integrate_segments(integrand, &[half, t], q);
    if let Some(e) = failure.take() {
        return Err(e);
    }
    let renewal = early?.value + late?.value;
    Ok(RenewalCheck {
        direct,
        renewal,
        residual: (direct - renewal).abs(),
    })
}

/// Probability that the process is in the failure state at time `t`.
pub fn failure_probability(dp: &DiffusionParams, t: f64) -> Result<f64> {
    check_nonnegative("t", t)?;
    Ok(failure_mass(dp.nu, dp.eta, t))
}

/// `int f(x,t|0) dx` by adaptive quadrature in `x`, split at the origin where the
/// density has a kink. Tails beyond ten standard deviations are dropped.
pub fn total_mass(dp: &DiffusionParams, t: f64, q: &QuadratureSpec) -> Result<f64> {
    check_positive("t", t)?;
    let (lo, hi) = support(dp, t, 10.0);
    let failure: Cell<Option<Error>> = Cell::new(None);
    let f = |x: f64| match density_value(dp, x, t, q) {
        Ok(v) => v,
        Err(e) => {
            failure.set(Some(e));
            f64::NAN
        }
    };
    let mass = integrate_segments(f, &[lo, 0.0, hi], q);
    if let Some(e) = failure.take() {
        return Err(e);
    }
    Ok(mass?.value)
}

/// Interval covering every mixture component `N(d s, sigma2 s)`, `s <= t`, to
/// `width` standard deviations.
fn support(dp: &DiffusionParams, t: f64, width: f64) -> (f64, f64) {
    let reach = width * (dp.sigma2 * t).sqrt();
    let shift = dp.drift() * t;
    (shift.min(0.0) - reach, shift.max(0.0) + reach)
}

/// Upper normal tail at eight standard deviations.
const NORMAL_TAIL_8: f64 = 6.220_960_574_271_785e-16;

/// Density of `X(t)` sampled on a grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DensitySlice {
    pub time: f64,
    pub abscissas: Vec<f64>,
    pub densities: Vec<f64>,
    pub failure_mass: f64,
    /// Bound on the density mass outside the grid.
    pub tail_bound: f64,
}

impl DensitySlice {
    /// Composite trapezoid over the grid.
    pub fn trapezoid_mass(&self) -> f64 {
        trapezoid(&self.abscissas, &self.densities)
    }

    /// Declared accuracy of [`Self::trapezoid_mass`]: a Richardson estimate from
    /// the every-other-node sub-grid plus the tail bound.
    pub fn mass_tolerance(&self) -> f64 {
        let coarse_x: Vec<f64> = self.abscissas.iter().copied().step_by(2).collect();
        let coarse_f: Vec<f64> = self.densities.iter().copied().step_by(2).collect();
        let fine = self.trapezoid_mass();
        let coarse = trapezoid(&coarse_x, &coarse_f);
        2.0 * (fine - coarse).abs() / 3.0 + self.tail_bound + 1e-12
    }
}

fn trapezoid(x: &[f64], f: &[f64]) -> f64 {
    x.windows(2)
        .zip(f.windows(2))
        .map(|(xs, fs)| 0.5 * (xs[1] - xs[0]) * (fs[0] + fs[1]))
        .sum()
}

/// Default number of grid points in [`density_slice`].
pub const DEFAULT_SLICE_POINTS: usize = 801;

/// Density on `points` abscissas covering eight standard deviations of every
/// mixture component, with the origin (where the density has a kink) as a node
/// and an even number of panels on each side.
pub fn density_slice(
    dp: &DiffusionParams,
    t: f64,
    points: usize,
    q: &QuadratureSpec,
) -> Result<DensitySlice> {
    check_positive("t", t)?;
    if points < 5 {
        return Err(Error::InvalidArgument(
            "a density slice needs at least 5 points".into(),
        ));
    }
    let (lo, hi) = support(dp, t, 8.0);
    let panels = (points - 1) & !1;
    let mut left = ((panels as f64 * -lo / (hi - lo)).round() as usize).clamp(2, panels - 2);
    left += left % 2;
    let right = panels - left;
    let mut abscissas: Vec<f64> = (0..left)
        .map(|i| lo + (-lo) * i as f64 / left as f64)
        .collect();
    abscissas.extend((0..=right).map(|i| hi * i as f64 / right as f64));
    let densities = abscissas
        .iter()
        .map(|&x| density_value(dp, x, t, q))
        .collect::<Result<Vec<_>>>()?;
    let failure_mass = failure_mass(dp.nu, dp.eta, t);
    Ok(DensitySlice {
        time: t,
        abscissas,
        densities,
        failure_mass,
        tail_bound: 2.0 * (1.0 - failure_mass) * NORMAL_TAIL_8,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn drifted(nu: f64) -> DiffusionParams {
        DiffusionParams::new(3.0, 1.0, 1.0, nu, 1.0).unwrap()
    }

    #[test]
    fn validation() {
        assert!(DiffusionParams::new(1.0, 2.0, 9.0, 1.0, 0.25).is_ok());
        assert!(DiffusionParams::new(0.0, 2.0, 9.0, 1.0, 0.25).is_err());
        assert!(DiffusionParams::new(1.0, 2.0, 0.0, 1.0, 0.25).is_err());
        assert!(DiffusionParams::new(1.0, 2.0, 9.0, -1.0, 0.25).is_err());
        assert!(DiffusionParams::new(1.0, 2.0, 9.0, 1.0, 0.0).is_err());
    }

    #[test]
    fn wiener_mode_and_symmetry() {
        let dp = drifted(1.0);
        let t = 0.8;
        let mode = wiener_density(&dp, 0.3 + 2.0 * t, t, 0.3).unwrap();
        assert!((mode - 1.0 / (2.0 * PI * t).sqrt()).abs() < 1e-15);
        for x in [-1.5, 0.4, 2.0] {
            let lhs = wiener_density(&dp, x, t, 0.0).unwrap();
            let rhs = (2.0 * dp.drift() * x / dp.sigma2()).exp()
                * wiener_density(&dp, 0.0, t, x).unwrap();
            assert!((lhs - rhs).abs() < 1e-14 * lhs.max(1e-300));
        }
        assert!(wiener_density(&dp, 0.0, 0.0, 0.0).is_err());
    }

    #[test]
    fn dirac_at_time_zero() {
        let dp = drifted(1.0);
        let r = transient_density(&dp, 0.0, 0.0, &QuadratureSpec::default()).unwrap();
        assert_eq!(r, TransientDensity::PointMassAtOrigin);
        assert_eq!(r.value(), None);
    }

    #[test]
    fn pure_gaussian_without_catastrophes() {
        let dp = drifted(0.0);
        let q = QuadratureSpec::default();
        for x in [-1.0, 0.0, 2.5] {
            let f = transient_density(&dp, x, 1.0, &q).unwrap().value().unwrap();
            assert_eq!(f, wiener_density(&dp, x, 1.0, 0.0).unwrap());
        }
    }

    #[test]
    fn reflection_of_drift() {
        let dp = drifted(0.5);
        let q = QuadratureSpec::default();
        for x in [-1.3, 0.0, 0.7, 2.2] {
            let a = density_value(&dp, x, 1.0, &q).unwrap();
            let b = density_value(&dp.reflected(), -x, 1.0, &q).unwrap();
            assert_eq!(a, b, "x={x}");
        }
    }

    #[test]
    fn slice_grid_shape() {
        let dp = drifted(1.0);
        let s = density_slice(&dp, 1.0, DEFAULT_SLICE_POINTS, &QuadratureSpec::default()).unwrap();
        assert_eq!(s.abscissas.len(), DEFAULT_SLICE_POINTS);
        assert!(s.abscissas.windows(2).all(|w| w[0] < w[1]));
        assert!(s.abscissas.contains(&0.0));
        assert!(s.densities.iter().all(|&f| f >= 0.0));
        assert!(density_slice(&dp, 1.0, 3, &QuadratureSpec::default()).is_err());
    }

    #[test]
    fn fpt_rejects_coincident_points() {
        let dp = drifted(1.0);
        assert!(fpt_density_wiener(&dp, 1.0, 1.0, 1.0).is_err());
        assert!(fpt_density_wiener(&dp, 1.0, 0.5, 0.0).unwrap() > 0.0);
        assert!(renewal_check(&dp, 0.0, 1.0, &QuadratureSpec::default()).is_err());
    }
}
