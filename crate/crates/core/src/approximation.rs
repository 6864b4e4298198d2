//! Links between the lattice walk and the jump-diffusion: the heavy-traffic
//! scaling of rates and the numerical checks that the lattice law, rescaled by
//! the step `epsilon`, approaches the diffusion law.

use serde::{Deserialize, Serialize};

use crate::diffusion::{self, DiffusionParams};
use crate::discrete::{self, DiscreteParams};
use crate::error::{check_positive, Error, Result};

/// Lattice spacing `epsilon` together with the diffusion it approximates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScalingMap {
    epsilon: f64,
    source: DiffusionParams,
}

impl ScalingMap {
    pub fn new(source: DiffusionParams, epsilon: f64) -> Result<Self> {
        check_positive("epsilon", epsilon)?;
        Ok(Self { epsilon, source })
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn source(&self) -> &DiffusionParams {
        &self.source
    }

    /// `lambda = lambda_hat / eps + sigma2 / (2 eps^2)`, `mu` likewise; `nu`, `eta` unchanged.
    pub fn lattice(&self) -> DiscreteParams {
        let (dp, eps) = (&self.source, self.epsilon);
        let noise = dp.sigma2() / (2.0 * eps * eps);
        DiscreteParams::new(
            dp.lambda_hat() / eps + noise,
            dp.mu_hat() / eps + noise,
            dp.nu(),
            dp.eta(),
        )
        .expect("scaled rates are positive whenever the source parameters are valid")
    }
}

pub fn scale_params(dp: &DiffusionParams, epsilon: f64) -> Result<DiscreteParams> {
    Ok(ScalingMap::new(*dp, epsilon)?.lattice())
}

/// One line of the steady-state comparison at lattice site `n`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ComparisonRow {
    pub n: i64,
    /// `pi_n(eps) / eps`.
    pub scaled_pi: f64,
    /// `W(n eps)`.
    pub w_value: f64,
    /// `(W(n eps) eps - pi_n(eps)) / pi_n(eps)`.
    pub delta: f64,
}

pub fn steady_comparison(
    dp: &DiffusionParams,
    epsilon: f64,
    n_range: (i64, i64),
) -> Result<Vec<ComparisonRow>> {
    let (lo, hi) = n_range;
    if lo > hi {
        return Err(Error::InvalidArgument(format!("empty range [{lo}, {hi}]")));
    }
    let law = discrete::steady_law(&scale_params(dp, epsilon)?)?;
    (lo..=hi)
        .map(|n| {
            let pi = law.probability(n);
            let w = diffusion::steady_density(dp, n as f64 * epsilon)?;
            Ok(ComparisonRow {
                n,
                scaled_pi: pi / epsilon,
                w_value: w,
                delta: (w * epsilon - pi) / pi,
            })
        })
        .collect()
}

/// Outcome of rescaling space and drift/variance by a common factor `h`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RateInvariance {
    /// `max(|lambda_h - lambda| / lambda, |mu_h - mu| / mu)`.
    pub rate_residual: f64,
    /// `max_n |W_h(n eps_h) eps_h - W(n eps) eps|` over `n` in `[-50, 50]`.
    pub density_residual: f64,
}

/// Maps `eps, lambda_hat, mu_hat` to `h` times themselves and `sigma2` to
/// `h^2 sigma2`, then compares the induced lattice rates and the lattice-scaled
/// steady densities. The variance must scale with `h^2` for the rates to be
/// unchanged; with a linear factor `lambda_h` picks up `sigma2 (1/h - 1) / (2 eps^2)`.
pub fn rate_invariance_check(dp: &DiffusionParams, epsilon: f64, h: f64) -> Result<RateInvariance> {
    check_positive("h", h)?;
    let scaled = DiffusionParams::new(
        dp.lambda_hat() * h,
        dp.mu_hat() * h,
        dp.sigma2() * h * h,
        dp.nu(),
        dp.eta(),
    )?;
    let eps_h = epsilon * h;
    let base = scale_params(dp, epsilon)?;
    let moved = scale_params(&scaled, eps_h)?;
    let rel = |a: f64, b: f64| (a - b).abs() / b;
    let rate_residual = rel(moved.lambda(), base.lambda()).max(rel(moved.mu(), base.mu()));
    let mut density_residual: f64 = 0.0;
    for n in -50..=50 {
        let w = diffusion::steady_density(dp, n as f64 * epsilon)? * epsilon;
        let w_h = diffusion::steady_density(&scaled, n as f64 * eps_h)? * eps_h;
        density_residual = density_residual.max((w_h - w).abs());
    }
    Ok(RateInvariance {
        rate_residual,
        density_residual,
    })
}

/// Gap between the lattice and diffusion Laplace transforms at one spacing.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LaplaceGap {
    pub epsilon: f64,
    /// Site nearest `x / epsilon`, ties to even.
    pub n: i64,
    /// `|P_n*(z; eps) / eps - f*(x, z | 0)|`.
    pub gap: f64,
}

pub fn laplace_convergence(
    dp: &DiffusionParams,
    z: f64,
    x: f64,
    epsilons: &[f64],
) -> Result<Vec<LaplaceGap>> {
    check_positive("z", z)?;
    if epsilons.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::InvalidArgument(
            "epsilon list must be strictly decreasing".into(),
        ));
    }
    let target = diffusion::laplace_density(dp, x, z)?;
    epsilons
        .iter()
        .map(|&eps| {
            let p = scale_params(dp, eps)?;
            let n = (x / eps).round_ties_even() as i64;
            let lattice = discrete::laplace_pn(&p, n, z)? / eps;
            Ok(LaplaceGap {
                epsilon: eps,
                n,
                gap: (lattice - target).abs(),
            })
        })
        .collect()
}

/// `max_t |m_N(t) - m_X(t) / eps|` with the lattice rates from [`scale_params`].
pub fn mean_correspondence_check(
    dp: &DiffusionParams,
    epsilon: f64,
    t_grid: &[f64],
) -> Result<f64> {
    let p = scale_params(dp, epsilon)?;
    let mut worst: f64 = 0.0;
    for &t in t_grid {
        let lattice = discrete::mean_transient(&p, t)?;
        let continuum = diffusion::mean_x(dp, t)? / epsilon;
        worst = worst.max((lattice - continuum).abs());
    }
    Ok(worst)
}

/// Long-run moments of both processes in the spatial units of `X`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AsymptoticCorrespondence {
    /// `eps lim m_N`.
    pub lattice_mean: f64,
    pub diffusion_mean: f64,
    /// `eps^2 lim V_N`.
    pub lattice_variance: f64,
    pub diffusion_variance: f64,
}

impl AsymptoticCorrespondence {
    pub fn mean_residual(&self) -> f64 {
        (self.lattice_mean - self.diffusion_mean).abs()
    }

    pub fn variance_relative_gap(&self) -> f64 {
        (self.lattice_variance - self.diffusion_variance).abs() / self.diffusion_variance
    }
}

/// The means agree exactly. The rescaled lattice variance exceeds the diffusion
/// one by `(lambda_hat + mu_hat) eps eta / (nu (eta + nu))`, which vanishes only
/// as `eps -> 0`.
pub fn asymptotic_correspondence(
    dp: &DiffusionParams,
    epsilon: f64,
) -> Result<AsymptoticCorrespondence> {
    let p = scale_params(dp, epsilon)?;
    let (diffusion_mean, diffusion_variance) = diffusion::asymptotic_moments(dp)?;
    Ok(AsymptoticCorrespondence {
        lattice_mean: discrete::mean_asymptotic(&p)? * epsilon,
        diffusion_mean,
        lattice_variance: discrete::variance_asymptotic(&p)? * epsilon * epsilon,
        diffusion_variance,
    })
}

/// The three spacings of the reference steady-state table.
pub const TABLE_EPSILONS: [f64; 3] = [0.1, 0.05, 0.01];

#[cfg(test)]
mod tests {
    use super::*;

    fn table_one() -> DiffusionParams {
        DiffusionParams::new(1.0, 2.0, 9.0, 1.0, 0.25).unwrap()
    }

    #[test]
    fn scaled_rates() {
        let dp = table_one();
        for (eps, l, m) in [
            (0.01, 45100.0, 45200.0),
            (0.1, 460.0, 470.0),
            (0.05, 1820.0, 1840.0),
        ] {
            let p = scale_params(&dp, eps).unwrap();
            assert!((p.lambda() - l).abs() < 1e-9 * l, "eps={eps}");
            assert!((p.mu() - m).abs() < 1e-9 * m, "eps={eps}");
            assert_eq!((p.nu(), p.eta()), (1.0, 0.25));
        }
        assert!(scale_params(&dp, 0.0).is_err());
    }

    #[test]
    fn comparison_rows() {
        let dp = table_one();
        let rows = steady_comparison(&dp, 0.01, (0, 0)).unwrap();
        let r = rows[0];
        assert!((r.scaled_pi - 0.04581).abs() < 1.5e-5);
        assert!((r.w_value - 0.04588).abs() < 1.5e-5);
        assert!((r.delta - 0.00158).abs() < 1.5e-5);
        let r = steady_comparison(&dp, 0.1, (-6, 6)).unwrap()[0];
        assert_eq!(r.n, -6);
        assert!((r.scaled_pi - 0.03621).abs() < 1.5e-5);
        assert!((r.delta - 0.01305).abs() < 1.5e-5);
        assert!(steady_comparison(&dp, 0.1, (1, 0)).is_err());
    }

    #[test]
    fn invariance_under_common_rescaling() {
        let dp = table_one();
        let same = rate_invariance_check(&dp, 0.05, 1.0).unwrap();
        assert_eq!(same.rate_residual, 0.0);
        assert_eq!(same.density_residual, 0.0);
        for h in [0.5, 2.0] {
            let r = rate_invariance_check(&dp, 0.05, h).unwrap();
            assert!(
                r.rate_residual < 1e-14 && r.density_residual < 1e-12,
                "h={h}"
            );
        }
    }

    #[test]
    fn laplace_gaps_shrink() {
        let dp = table_one();
        for x in [0.0, 0.5] {
            let gaps = laplace_convergence(&dp, 1.0, x, &TABLE_EPSILONS).unwrap();
            assert!(
                gaps.windows(2).all(|g| g[1].gap < g[0].gap),
                "x={x}: {gaps:?}"
            );
        }
        assert!(laplace_convergence(&dp, 1.0, 0.0, &[0.01, 0.1]).is_err());
    }

    #[test]
    fn ties_round_to_even() {
        let dp = table_one();
        let g = laplace_convergence(&dp, 1.0, 0.25, &[0.5]).unwrap();
        assert_eq!(g[0].n, 0);
        let g = laplace_convergence(&dp, 1.0, 0.75, &[0.5]).unwrap();
        assert_eq!(g[0].n, 2);
    }

    #[test]
    fn means_correspond() {
        let dp = table_one();
        assert_eq!(mean_correspondence_check(&dp, 0.1, &[0.0]).unwrap(), 0.0);
        assert!(mean_correspondence_check(&dp, 0.1, &[0.5, 1.0, 5.0]).unwrap() < 1e-10);
    }

    #[test]
    fn asymptotic_gap_is_first_order_in_epsilon() {
        let dp = table_one();
        for eps in [0.1, 0.01] {
            let a = asymptotic_correspondence(&dp, eps).unwrap();
            assert!(a.mean_residual() < 1e-12);
            let excess = 3.0 * eps * 0.25 / 1.25;
            assert!((a.lattice_variance - a.diffusion_variance - excess).abs() < 1e-9);
        }
    }
}
