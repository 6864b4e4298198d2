//! Exponentially scaled modified Bessel functions of the first kind and integer order.
//!
//! The primitive is `e^{-x} I_n(x)`, which lies in `[0, 1]` for every `x >= 0` and
//! never overflows. Three regimes are used:
//!
//! - `n < DEBYE_MIN_ORDER`, `x <= SERIES_MAX_ARG`: the ascending power series. All
//!   terms are positive so the sum is accurate to a few ulps.
//! - `n >= DEBYE_MIN_ORDER`: Debye's uniform asymptotic expansion in the order,
//!   valid for every `x > 0`.
//! - `n < DEBYE_MIN_ORDER`, `x > SERIES_MAX_ARG`: the two orders `DEBYE_MIN_ORDER`
//!   and `DEBYE_MIN_ORDER + 1` from the uniform expansion, then the three-term
//!   recurrence run downwards (the stable direction for `I_n`).

use std::f64::consts::PI;
use std::sync::OnceLock;

use crate::error::{Error, Result};

/// Largest accepted `|n|`.
pub const MAX_ORDER: u64 = 1_000_000;

const SERIES_MAX_ARG: f64 = 30.0;
const DEBYE_MIN_ORDER: u64 = 50;
const DEBYE_TERMS: usize = 16;

/// `e^{-x} I_n(x)` for integer `n` and `x >= 0`.
///
/// Relative error is below `1e-12` wherever the result is a normal float above
/// `1e-280`; smaller values are still returned but carry the rounding of their
/// exponent. Negative orders use `I_{-n} = I_n`.
pub fn bessel_i_scaled(n: i64, x: f64) -> Result<f64> {
    if !x.is_finite() || x < 0.0 {
        return Err(Error::InvalidArgument(format!(
            "Bessel argument must be finite and nonnegative, got {x}"
        )));
    }
    let order = n.unsigned_abs();
    if order > MAX_ORDER {
        return Err(Error::InvalidArgument(format!(
            "Bessel order |{n}| exceeds the supported maximum {MAX_ORDER}"
        )));
    }
    Ok(scaled_i(order, x))
}

/// Unchecked kernel behind [`bessel_i_scaled`]. Callers guarantee `x >= 0`.
pub(crate) fn scaled_i(order: u64, x: f64) -> f64 {
    if x == 0.0 {
        return if order == 0 { 1.0 } else { 0.0 };
    }
    if order >= DEBYE_MIN_ORDER {
        return debye(order as f64, x);
    }
    if x <= SERIES_MAX_ARG {
        return series(order, x);
    }
    downward(order, x)
}

/// Backward recurrence from the two lowest Debye orders.
fn downward(order: u64, x: f64) -> f64 {
    let mut upper = debye((DEBYE_MIN_ORDER + 1) as f64, x);
    let mut current = debye(DEBYE_MIN_ORDER as f64, x);
    let mut k = DEBYE_MIN_ORDER;
    while k > order {
        let lower = upper + (2.0 * k as f64 / x) * current;
        upper = current;
        current = lower;
        k -= 1;
    }
    current
}

fn series(order: u64, x: f64) -> f64 {
    let half = 0.5 * x;
    let mut lead = (-x).exp();
    for k in 1..=order {
        lead *= half / k as f64;
    }
    if lead == 0.0 {
        return 0.0;
    }
    let quarter_sq = half * half;
    let n = order as f64;
    let mut term = lead;
    let mut sum = lead;
    let mut k = 0.0_f64;
    loop {
        k += 1.0;
        term *= quarter_sq / (k * (k + n));
        sum += term;
        if term <= 1e-17 * sum && k > half {
            break;
        }
    }
    sum
}

/// Uniform expansion `I_v(v z) ~ e^{v eta} / (sqrt(2 pi v) (1+z^2)^{1/4}) sum_k u_k(p) / v^k`,
/// returned with the factor `e^{-v z}` folded into the exponent.
fn debye(order: f64, x: f64) -> f64 {
    let z = x / order;
    let root = z.hypot(1.0);
    let p = 1.0 / root;
    // v*eta - x written without cancellation: v/(root + z) - v*asinh(1/z).
    let exponent = order / (root + z) - order * (order / x).asinh();
    let prefactor = exponent.exp() / ((2.0 * PI * order).sqrt() * root.sqrt());
    if prefactor == 0.0 {
        return 0.0;
    }
    let polys = debye_polynomials();
    let mut sum = 1.0;
    let mut scale = 1.0;
    for poly in polys.iter().skip(1) {
        scale /= order;
        let term = scale * eval_poly(poly, p);
        sum += term;
        if term.abs() < 1e-17 * sum.abs() {
            break;
        }
    }
    prefactor * sum
}

fn eval_poly(coeffs: &[f64], p: f64) -> f64 {
    coeffs.iter().rev().fold(0.0, |acc, &c| acc * p + c)
}

/// Coefficients (ascending powers of `p`) of the Debye polynomials `u_0 .. u_{K-1}`,
/// generated from `u_{k+1} = p^2 (1 - p^2) u_k' / 2 + (1/8) int_0^p (1 - 5 t^2) u_k(t) dt`.
fn debye_polynomials() -> &'static [Vec<f64>] {
    static POLYS: OnceLock<Vec<Vec<f64>>> = OnceLock::new();
    POLYS.get_or_init(|| {
        let mut polys = vec![vec![1.0]];
        for k in 0..DEBYE_TERMS - 1 {
            let u = &polys[k];
            let degree = 3 * (k + 1);
            let mut next = vec![0.0; degree + 1];
            // p^2 (1 - p^2) u'(p) / 2
            for (i, &c) in u.iter().enumerate().skip(1) {
                let d = i as f64 * c;
                next[i + 1] += 0.5 * d;
                next[i + 3] -= 0.5 * d;
            }
            // (1/8) int_0^p (1 - 5 t^2) u(t) dt
            for (i, &c) in u.iter().enumerate() {
                next[i + 1] += c / (8.0 * (i as f64 + 1.0));
                next[i + 3] -= 5.0 * c / (8.0 * (i as f64 + 3.0));
            }
            polys.push(next);
        }
        polys
    })
}
