use rand::Rng;
use rand_distr::Exp1;
use rayon::prelude::*;

use super::{replication_rng, Event, EventKind, Observation, ObservedState, PathTrace, SimConfig};
use crate::discrete::DiscreteParams;
use crate::error::Result;

/// Largest `lambda + mu` the command-line front end will simulate. The sampler
/// itself has no limit; its cost grows linearly in `(lambda + mu) * horizon`.
pub const DISCRETE_RATE_CAP: f64 = 1e4;

/// Lazily generated traces of `N(t)`, one per replication, in index order.
pub fn simulate_discrete<'a>(
    p: &'a DiscreteParams,
    cfg: &'a SimConfig,
) -> Result<impl Iterator<Item = PathTrace> + 'a> {
    cfg.validate()?;
    Ok((0..cfg.replications).map(move |i| run(p, cfg, i)))
}

/// All traces, replications spread over the rayon pool. Identical to collecting
/// [`simulate_discrete`].
pub fn simulate_discrete_parallel(p: &DiscreteParams, cfg: &SimConfig) -> Result<Vec<PathTrace>> {
    cfg.validate()?;
    Ok((0..cfg.replications)
        .into_par_iter()
        .map(|i| run(p, cfg, i))
        .collect())
}

fn run(p: &DiscreteParams, cfg: &SimConfig, replication: usize) -> PathTrace {
    let mut rng = replication_rng(cfg.seed, replication);
    let (lambda, mu, nu, eta) = (p.lambda(), p.mu(), p.nu(), p.eta());
    let on_rate = lambda + mu + nu;

    let mut events = Vec::new();
    let mut observations = Vec::with_capacity(cfg.observation_times.len());
    let mut pending = cfg.observation_times.iter().copied().peekable();
    let mut state = ObservedState::Site(0);
    let mut now = 0.0;

    loop {
        let rate = match state {
            ObservedState::Failed => eta,
            _ => on_rate,
        };
        let wait: f64 = rng.sample::<f64, _>(Exp1) / rate;
        let next = now + wait;
        while let Some(&t) = pending.peek() {
            if t >= next {
                break;
            }
            observations.push(Observation { time: t, state });
            pending.next();
        }
        if next > cfg.horizon {
            break;
        }
        now = next;
        let kind = match state {
            ObservedState::Failed => {
                state = ObservedState::Site(0);
                EventKind::RepairDone
            }
            ObservedState::Site(n) => {
                let u = rng.random::<f64>() * on_rate;
                if u < lambda {
                    state = ObservedState::Site(n + 1);
                    EventKind::Up
                } else if u < lambda + mu {
                    state = ObservedState::Site(n - 1);
                    EventKind::Down
                } else {
                    state = ObservedState::Failed;
                    EventKind::Catastrophe
                }
            }
            ObservedState::Position(_) => unreachable!("lattice walk never holds a real position"),
        };
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
