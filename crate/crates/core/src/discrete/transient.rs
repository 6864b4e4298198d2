use std::cell::Cell;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::DiscreteParams;
use crate::error::{check_nonnegative, check_positive, Error, Result};
use crate::special_math::{integrate_segments, scaled_i, QuadratureSpec};

/// Probability that the system is under repair at time `t`.
pub fn failure_probability(p: &DiscreteParams, t: f64) -> Result<f64> {
    check_nonnegative("t", t)?;
    Ok(failure_mass(p.nu(), p.eta(), t))
}

pub(crate) fn failure_mass(nu: f64, eta: f64, t: f64) -> f64 {
    if nu == 0.0 {
        return 0.0;
    }
    let k = eta + nu;
    nu / k * -(-k * t).exp_m1()
}

/// Catastrophe-free law `e^{-(lambda+mu)t} beta^n I_n(alpha t)` (Skellam).
pub fn skellam_probability(p: &DiscreteParams, n: i64, t: f64) -> Result<f64> {
    check_nonnegative("t", t)?;
    Ok(skellam(p, n, t))
}

pub(crate) fn skellam(p: &DiscreteParams, n: i64, t: f64) -> f64 {
    if t == 0.0 {
        return if n == 0 { 1.0 } else { 0.0 };
    }
    let bessel = scaled_i(n.unsigned_abs(), p.alpha() * t);
    if bessel == 0.0 {
        return 0.0;
    }
    (n as f64 * p.ln_beta() - p.scaled_gap() * t).exp() * bessel
}

/// Width of the initial layer where `P~_n(s)` builds up from zero.
fn onset_time(p: &DiscreteParams, n: i64, t: f64) -> f64 {
    (n.unsigned_abs().max(1) as f64 / (p.lambda() + p.mu())).min(t)
}

/// `P_n(t)`: probability of being in state `n` at time `t`.
///
/// Uses the restart decomposition: either no catastrophe happened in `(0, t)`,
/// or the last repair ended at `t - s` and the walk then moved freely for `s`:
///
/// `P_n(t) = e^{-nu t} P~_n(t) + c int_0^t (1 - e^{-(eta+nu)(t-s)}) e^{-nu s} P~_n(s) ds`
///
/// with `c = eta nu / (eta + nu)`. The integrand is nonnegative, so the two
/// integrals of the textbook form never cancel.
pub fn transient_probability(
    p: &DiscreteParams,
    n: i64,
    t: f64,
    q: &QuadratureSpec,
) -> Result<f64> {
    check_nonnegative("t", t)?;
    let (nu, eta) = (p.nu(), p.eta());
    let free = (-nu * t).exp() * skellam(p, n, t);
    if nu == 0.0 || t == 0.0 {
        return Ok(free);
    }
    let k = eta + nu;
    let c = eta * nu / k;
    let integrand = |s: f64| -(-k * (t - s)).exp_m1() * (-nu * s).exp() * skellam(p, n, s);
    let onset = onset_time(p, n, t);
    let repaired = integrate_segments(integrand, &[0.0, onset, t], q)?.value;
    Ok((free + c * repaired).clamp(0.0, 1.0))
}

/// `P_n(t)` for `n != 0` through the last visit to the origin:
///
/// `P_n(t) = |n| beta^n int_0^t e^{-(lambda+mu+nu)(t-u)} I_n(alpha (t-u)) / (t-u) P_0(u) du`.
///
/// The kernel is `0/0` at `u = t`; on the last `1e-8 t` of the range it is replaced
/// by its leading term `(alpha/2)^{|n|} (t-u)^{|n|-1} / (|n|-1)!`, integrated exactly.
pub fn transient_probability_renewal(
    p: &DiscreteParams,
    n: i64,
    t: f64,
    q: &QuadratureSpec,
) -> Result<f64> {
    if n == 0 {
        return Err(Error::InvalidArgument("renewal form needs n != 0".into()));
    }
    check_positive("t", t)?;
    let order = n.unsigned_abs();
    let nu = p.nu();
    let closing = 1e-8 * t;

    let failure: Cell<Option<Error>> = Cell::new(None);
    let integrand = |u: f64| {
        let s = t - u;
        let kernel = (-nu * s).exp() * order as f64 / s * skellam(p, n, s);
        if kernel == 0.0 {
            return 0.0;
        }
        match transient_probability(p, 0, u, q) {
            Ok(p0) => kernel * p0,
            Err(e) => {
                failure.set(Some(e));
                f64::NAN
            }
        }
    };
    let end = t - closing;
    let split = (t - onset_time(p, n, t)).clamp(0.0, end);
    let main = integrate_segments(integrand, &[0.0, split, end], q);
    if let Some(e) = failure.take() {
        return Err(e);
    }
    let main = main?.value;

    // int_0^d |n| (alpha/2)^m s^{m-1}/(m-1)! ds = (alpha d / 2)^m / m!
    let mut tail = 1.0;
    let half = 0.5 * p.alpha() * closing;
    for k in 1..=order {
        tail *= half / k as f64;
        if tail == 0.0 {
            break;
        }
    }
    let tail = tail * (n as f64 * p.ln_beta()).exp() * transient_probability(p, 0, t, q)?;
    Ok((main + tail).clamp(0.0, 1.0))
}

/// First-passage-time density from 0 to `n` of the catastrophe-free walk,
/// `(|n|/t) P~_n(t)`.
pub fn first_passage_density(p: &DiscreteParams, n: i64, t: f64) -> Result<f64> {
    if n == 0 {
        return Err(Error::InvalidArgument("first passage needs n != 0".into()));
    }
    check_positive("t", t)?;
    Ok(n.unsigned_abs() as f64 / t * skellam(p, n, t))
}

/// Transient law at a fixed time restricted to a window of states.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistributionSlice {
    pub time: f64,
    pub n_min: i64,
    pub n_max: i64,
    /// `probabilities[i]` is `P_{n_min + i}(time)`.
    pub probabilities: Vec<f64>,
    pub failure_mass: f64,
    /// Upper bound on the on-state mass outside `[n_min, n_max]`.
    pub tail_bound: f64,
}

impl DistributionSlice {
    pub fn probability(&self, n: i64) -> Option<f64> {
        if n < self.n_min || n > self.n_max {
            return None;
        }
        self.probabilities.get((n - self.n_min) as usize).copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = (i64, f64)> + '_ {
        (self.n_min..).zip(self.probabilities.iter().copied())
    }

    pub fn window_mass(&self) -> f64 {
        self.probabilities.iter().sum()
    }

    /// Window mass plus failure mass; within `tail_bound` of one.
    pub fn accounted_mass(&self) -> f64 {
        self.window_mass() + self.failure_mass
    }
}

/// Window `[min(0,c) - h, max(0,c) + h]` with `c = round((lambda - mu) t)` and
/// half-width `h = ceil(alpha t + 12 sqrt(alpha t) + 30)`.
pub fn default_window(p: &DiscreteParams, t: f64) -> (i64, i64) {
    let at = p.alpha() * t;
    let half = (at + 12.0 * at.sqrt() + 30.0).ceil() as i64;
    let drift = ((p.lambda() - p.mu()) * t).round() as i64;
    (drift.min(0) - half, drift.max(0) + half)
}

/// Chernoff bound on `P(S(s) >= a)` over all `s in [0, t]` for a Skellam
/// variable `S(s)` with rates `up`, `down`, and `a > 0`.
fn skellam_upper_tail(up: f64, down: f64, a: f64, t: f64) -> f64 {
    if t == 0.0 {
        return 0.0;
    }
    let r = a / t;
    let growth = (r + (r * r + 4.0 * up * down).sqrt()) / (2.0 * up);
    if growth <= 1.0 {
        return 1.0;
    }
    let theta = growth.ln();
    let cumulant = up * (growth - 1.0) + down * (1.0 / growth - 1.0);
    (-theta * a + t * cumulant.max(0.0)).exp().min(1.0)
}

/// `P_n(t)` for every `n` in the window (default: [`default_window`]) plus `q(t)`
/// and a bound on the mass left outside. States are evaluated in parallel.
pub fn transient_distribution(
    p: &DiscreteParams,
    t: f64,
    window: Option<(i64, i64)>,
    q: &QuadratureSpec,
) -> Result<DistributionSlice> {
    check_nonnegative("t", t)?;
    let (n_min, n_max) = window.unwrap_or_else(|| default_window(p, t));
    if n_min > n_max {
        return Err(Error::InvalidArgument(format!(
            "empty window [{n_min}, {n_max}]"
        )));
    }
    let probabilities = (n_min..=n_max)
        .into_par_iter()
        .map(|n| transient_probability(p, n, t, q))
        .collect::<Result<Vec<_>>>()?;
    let failure_mass = failure_mass(p.nu(), p.eta(), t);
    let upper = if n_max >= 0 {
        skellam_upper_tail(p.lambda(), p.mu(), (n_max + 1) as f64, t)
    } else {
        1.0
    };
    let lower = if n_min <= 0 {
        skellam_upper_tail(p.mu(), p.lambda(), (1 - n_min) as f64, t)
    } else {
        1.0
    };
    let tail_bound = ((1.0 - failure_mass) * (upper + lower)).min(1.0);
    Ok(DistributionSlice {
        time: t,
        n_min,
        n_max,
        probabilities,
        failure_mass,
        tail_bound,
    })
}
