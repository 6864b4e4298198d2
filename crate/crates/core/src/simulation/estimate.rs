use std::borrow::Borrow;

use serde::{Deserialize, Serialize};

use super::{ObservedState, PathTrace};
use crate::error::{Error, Result};

/// Quantity estimated from the observations at one time.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Statistic {
    /// `P{N(t) = n}`; lattice traces only.
    StateProbability(i64),
    FailureProbability,
    /// `E[X(t) 1{X(t) != F}]`.
    TruncatedMean,
    /// `Var[X(t) 1{X(t) != F}]`.
    TruncatedVariance,
    /// `P{X(t) != F, X(t) <= x}`.
    Cdf(f64),
}

impl Statistic {
    pub fn name(&self) -> &'static str {
        match self {
            Statistic::StateProbability(_) => "state_probability",
            Statistic::FailureProbability => "failure_probability",
            Statistic::TruncatedMean => "truncated_mean",
            Statistic::TruncatedVariance => "truncated_variance",
            Statistic::Cdf(_) => "cdf",
        }
    }

    fn sample(&self, state: ObservedState) -> Result<f64> {
        let indicator = |b: bool| if b { 1.0 } else { 0.0 };
        Ok(match (*self, state) {
            (Statistic::StateProbability(_), ObservedState::Position(_)) => {
                return Err(Error::UndefinedStatistic {
                    statistic: self.name(),
                    trace_kind: "diffusion",
                })
            }
            (Statistic::StateProbability(n), s) => indicator(s == ObservedState::Site(n)),
            (Statistic::FailureProbability, s) => indicator(s == ObservedState::Failed),
            (Statistic::TruncatedMean | Statistic::TruncatedVariance, s) => s.truncated_value(),
            (Statistic::Cdf(_), ObservedState::Failed) => 0.0,
            (Statistic::Cdf(x), s) => indicator(s.truncated_value() <= x),
        })
    }
}

/// Monte Carlo estimate with its standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EmpiricalEstimate {
    pub value: f64,
    pub standard_error: f64,
    pub replications: usize,
    /// False when a single replication leaves the standard error undefined;
    /// `standard_error` is then 0.
    pub standard_error_available: bool,
}

/// Estimate of `stat` at time `t` over all traces.
pub fn estimate<I, B>(traces: I, t: f64, stat: Statistic) -> Result<EmpiricalEstimate>
where
    I: IntoIterator<Item = B>,
    B: Borrow<PathTrace>,
{
    Ok(estimate_many(traces, t, &[stat])?.remove(0))
}

/// Several statistics in a single pass, so a lazy trace stream is consumed once.
///
/// `t = 0` is answered from the initial condition `X(0) = 0`; any other `t` must
/// be an observation time of every trace.
pub fn estimate_many<I, B>(traces: I, t: f64, stats: &[Statistic]) -> Result<Vec<EmpiricalEstimate>>
where
    I: IntoIterator<Item = B>,
    B: Borrow<PathTrace>,
{
    if !(t.is_finite() && t >= 0.0) {
        return Err(Error::InvalidArgument(format!(
            "time must be finite and nonnegative, got {t}"
        )));
    }
    let mut samples: Vec<Vec<f64>> = vec![Vec::new(); stats.len()];
    for trace in traces {
        let trace = trace.borrow();
        let state = if t == 0.0 {
            match trace.observations.first().map(|o| o.state) {
                Some(ObservedState::Position(_)) => ObservedState::Position(0.0),
                _ => ObservedState::Site(0),
            }
        } else {
            trace.observation_at(t).ok_or(Error::NotObserved(t))?
        };
        for (stat, out) in stats.iter().zip(samples.iter_mut()) {
            out.push(stat.sample(state)?);
        }
    }
    if samples.first().is_none_or(Vec::is_empty) && !stats.is_empty() {
        return Err(Error::InvalidArgument("no traces to estimate from".into()));
    }
    Ok(stats
        .iter()
        .zip(samples)
        .map(|(stat, ys)| match stat {
            Statistic::TruncatedVariance => variance_estimate(&ys),
            _ => mean_estimate(&ys),
        })
        .collect())
}

fn mean_and_central(ys: &[f64]) -> (f64, f64, f64) {
    let n = ys.len() as f64;
    let mean = ys.iter().sum::<f64>() / n;
    let (mut m2, mut m4) = (0.0, 0.0);
    for y in ys {
        let d2 = (y - mean) * (y - mean);
        m2 += d2;
        m4 += d2 * d2;
    }
    (mean, m2 / n, m4 / n)
}

fn mean_estimate(ys: &[f64]) -> EmpiricalEstimate {
    let n = ys.len();
    let (mean, m2, _) = mean_and_central(ys);
    let available = n > 1;
    let se = if available {
        (m2 * n as f64 / (n as f64 - 1.0) / n as f64).sqrt()
    } else {
        0.0
    };
    EmpiricalEstimate {
        value: mean,
        standard_error: se,
        replications: n,
        standard_error_available: available,
    }
}

/// Unbiased sample variance; its standard error uses the delta-method
/// approximation `sqrt((m4 - m2^2) / n)`.
fn variance_estimate(ys: &[f64]) -> EmpiricalEstimate {
    let n = ys.len();
    let (_, m2, m4) = mean_and_central(ys);
    let available = n > 1;
    let (value, se) = if available {
        let nf = n as f64;
        (m2 * nf / (nf - 1.0), ((m4 - m2 * m2).max(0.0) / nf).sqrt())
    } else {
        (0.0, 0.0)
    };
    EmpiricalEstimate {
        value,
        standard_error: se,
        replications: n,
        standard_error_available: available,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::simulation::Observation;

    fn trace(states: &[ObservedState]) -> Vec<PathTrace> {
        states
            .iter()
            .enumerate()
            .map(|(i, &state)| PathTrace {
                replication: i,
                events: vec![],
                observations: vec![Observation { time: 1.0, state }],
            })
            .collect()
    }

    #[test]
    fn hand_computed_values() {
        use ObservedState::*;
        let traces = trace(&[Site(1), Site(3), Failed, Site(1)]);
        let est = estimate_many(
            &traces,
            1.0,
            &[
                Statistic::StateProbability(1),
                Statistic::FailureProbability,
                Statistic::TruncatedMean,
                Statistic::TruncatedVariance,
                Statistic::Cdf(1.0),
            ],
        )
        .unwrap();
        assert_eq!(est[0].value, 0.5);
        assert_eq!(est[1].value, 0.25);
        assert_eq!(est[2].value, 1.25);
        // values 1, 3, 0, 1: mean 1.25, squared deviations sum 4.75
        assert!((est[3].value - 4.75 / 3.0).abs() < 1e-15);
        assert_eq!(est[4].value, 0.5);
        assert!((est[0].standard_error - (1.0f64 / 12.0).sqrt()).abs() < 1e-15);
    }

    #[test]
    fn single_replication_has_no_error_bar() {
        let traces = trace(&[ObservedState::Site(2)]);
        let e = estimate(&traces, 1.0, Statistic::TruncatedMean).unwrap();
        assert_eq!(e.value, 2.0);
        assert!(!e.standard_error_available);
        assert_eq!(e.standard_error, 0.0);
    }

    #[test]
    fn time_zero_is_the_initial_state() {
        let traces = trace(&[ObservedState::Failed, ObservedState::Site(4)]);
        let e = estimate(&traces, 0.0, Statistic::FailureProbability).unwrap();
        assert_eq!(e.value, 0.0);
        assert_eq!(
            estimate(&traces, 0.0, Statistic::StateProbability(0))
                .unwrap()
                .value,
            1.0
        );
    }

    #[test]
    fn errors() {
        let lattice = trace(&[ObservedState::Site(0)]);
        assert_eq!(
            estimate(&lattice, 0.5, Statistic::TruncatedMean),
            Err(Error::NotObserved(0.5))
        );
        let real = trace(&[ObservedState::Position(0.3)]);
        assert!(matches!(
            estimate(&real, 1.0, Statistic::StateProbability(0)),
            Err(Error::UndefinedStatistic { .. })
        ));
        let empty: Vec<PathTrace> = vec![];
        assert!(estimate(&empty, 1.0, Statistic::TruncatedMean).is_err());
    }
}
