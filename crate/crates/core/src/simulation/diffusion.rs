use rand::Rng;
use rand_distr::{Exp1, StandardNormal};
use rayon::prelude::*;

use super::{replication_rng, Event, EventKind, Observation, ObservedState, PathTrace, SimConfig};
use crate::diffusion::DiffusionParams;
use crate::error::Result;

/// Lazily generated traces of `X(t)`. Positions are drawn only at observation
/// times, as exact Gaussian increments from the previous draw (or from the
/// restart at 0), so the observed marginals carry no discretization bias.
pub fn simulate_diffusion<'a>(
    dp: &'a DiffusionParams,
    cfg: &'a SimConfig,
) -> Result<impl Iterator<Item = PathTrace> + 'a> {
    cfg.validate()?;
    Ok((0..cfg.replications).map(move |i| run(dp, cfg, i)))
}

pub fn simulate_diffusion_parallel(
    dp: &DiffusionParams,
    cfg: &SimConfig,
) -> Result<Vec<PathTrace>> {
    cfg.validate()?;
    Ok((0..cfg.replications)
        .into_par_iter()
        .map(|i| run(dp, cfg, i))
        .collect())
}

fn run(dp: &DiffusionParams, cfg: &SimConfig, replication: usize) -> PathTrace {
    let mut rng = replication_rng(cfg.seed, replication);
    let (drift, sigma, nu, eta) = (dp.drift(), dp.sigma2().sqrt(), dp.nu(), dp.eta());

    let mut events = Vec::new();
    let mut observations = Vec::with_capacity(cfg.observation_times.len());
    let mut pending = cfg.observation_times.iter().copied().peekable();
    let mut failed = false;
    let mut position = 0.0;
    let mut anchor = 0.0;
    let mut now = 0.0;

    loop {
        let rate = if failed { eta } else { nu };
        let next = if rate == 0.0 {
            f64::INFINITY
        } else {
            now + rng.sample::<f64, _>(Exp1) / rate
        };
        while let Some(&t) = pending.peek() {
            if t >= next {
                break;
            }
            let state = if failed {
                ObservedState::Failed
            } else {
                let dt = t - anchor;
                let z: f64 = rng.sample(StandardNormal);
                position += drift * dt + sigma * dt.sqrt() * z;
                anchor = t;
                ObservedState::Position(position)
            };
            observations.push(Observation { time: t, state });
            pending.next();
        }
        if next > cfg.horizon {
            break;
        }
        now = next;
        let kind = if failed {
            position = 0.0;
            anchor = now;
            EventKind::RepairDone
        } else {
            EventKind::Catastrophe
        };
        failed = !failed;
        if cfg.record_events {
            events.push(Event { time: now, kind });
        }
    }
    PathTrace {
        replication,
        events,
        observations,
    }
}
