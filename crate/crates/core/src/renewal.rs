//! Moments of a process that, between catastrophes, has mean `drift * s` and
//! variance `diffusivity * s` after running for time `s`, and restarts from 0 after
//! each repair. Both models share this structure.
//!
//! With restart weight `c = eta nu / (eta + nu)` the k-th truncated moment is
//!
//! `M_k(t) = e^{-nu t} m_k(t) + c int_0^t (1 - e^{-(eta+nu)(t-s)}) e^{-nu s} m_k(s) ds`
//!
//! and every integral is an exponential-polynomial evaluated in closed form.

/// `int_0^t s^j e^{-rho s} ds` for `rho >= 0` and `j <= 2`.
pub(crate) fn exp_poly_integral(j: u32, rho: f64, t: f64) -> f64 {
    debug_assert!(rho >= 0.0 && j <= 2);
    let x = rho * t;
    if x < 1.0 {
        // t^{j+1} sum_k (-x)^k / (k! (j + k + 1))
        let mut term = 1.0;
        let mut sum = 1.0 / (j as f64 + 1.0);
        let mut k = 0.0;
        loop {
            k += 1.0;
            term *= -x / k;
            let add = term / (j as f64 + k + 1.0);
            sum += add;
            if add.abs() < 1e-18 * sum.abs() {
                break;
            }
        }
        return t.powi(j as i32 + 1) * sum;
    }
    let e = (-x).exp();
    match j {
        0 => -(-x).exp_m1() / rho,
        1 => (1.0 - e * (1.0 + x)) / (rho * rho),
        _ => (2.0 - e * (x * x + 2.0 * x + 2.0)) / (rho * rho * rho),
    }
}

/// Truncated mean and second moment at time `t`.
pub(crate) fn restart_moments(
    drift: f64,
    diffusivity: f64,
    nu: f64,
    eta: f64,
    t: f64,
) -> (f64, f64) {
    let decay = (-nu * t).exp();
    let free_mean = drift * t;
    let free_second = diffusivity * t + drift * drift * t * t;
    if nu == 0.0 {
        return (free_mean, free_second);
    }
    let c = eta * nu / (eta + nu);
    let g = |j| exp_poly_integral(j, nu, t);
    let h = |j| exp_poly_integral(j, eta, t);
    // int_0^t e^{-eta w} (t - w)^j dw, j = 1, 2
    let back1 = t * h(0) - h(1);
    let back2 = t * t * h(0) - 2.0 * t * h(1) + h(2);

    let mean = decay * free_mean + c * drift * (g(1) - decay * back1);
    let second = decay * free_second
        + c * (diffusivity * (g(1) - decay * back1) + drift * drift * (g(2) - decay * back2));
    (mean, second)
}
