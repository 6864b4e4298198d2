//! Exact Monte Carlo of both processes, used as an oracle for the analytic laws.
//!
//! Replication `i` draws from its own ChaCha8 stream: the generator is seeded
//! with the master seed and then switched to stream number `i`. A replication's
//! trace therefore depends only on `(seed, i, parameters)`, and sequential and
//! parallel runs produce bit-identical output.

mod diffusion;
mod discrete;
mod estimate;
mod export;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use diffusion::{simulate_diffusion, simulate_diffusion_parallel};
pub use discrete::{simulate_discrete, simulate_discrete_parallel, DISCRETE_RATE_CAP};
pub use estimate::{estimate, estimate_many, EmpiricalEstimate, Statistic};
pub use export::{read_traces, write_traces, TraceHeader};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    pub seed: u64,
    pub replications: usize,
    pub horizon: f64,
    /// Strictly increasing, in `(0, horizon]`.
    pub observation_times: Vec<f64>,
    /// Keep the full event log in each trace. Off, only observations are kept.
    pub record_events: bool,
}

impl SimConfig {
    /// Config whose horizon is the last observation time, with event logging on.
    pub fn new(seed: u64, replications: usize, observation_times: Vec<f64>) -> Result<Self> {
        let horizon = observation_times.last().copied().unwrap_or(0.0);
        let cfg = Self {
            seed,
            replications,
            horizon,
            observation_times,
            record_events: true,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn without_events(mut self) -> Self {
        self.record_events = false;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.replications == 0 {
            return Err(Error::InvalidArgument(
                "replications must be at least 1".into(),
            ));
        }
        if !(self.horizon.is_finite() && self.horizon > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "horizon must be finite and positive, got {}",
                self.horizon
            )));
        }
        if self.observation_times.is_empty() {
            return Err(Error::InvalidArgument(
                "at least one observation time is required".into(),
            ));
        }
        if self.observation_times.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidArgument(
                "observation times must be strictly increasing".into(),
            ));
        }
        let first = self.observation_times[0];
        let last = self.observation_times[self.observation_times.len() - 1];
        if !(first > 0.0 && last <= self.horizon) {
            return Err(Error::InvalidArgument(
                "observation times must lie in (0, horizon]".into(),
            ));
        }
        Ok(())
    }
}

pub(crate) fn replication_rng(seed: u64, replication: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(replication as u64);
    rng
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EventKind {
    Up,
    Down,
    Catastrophe,
    RepairDone,
}

impl EventKind {
    pub fn as_str(self) -> &'static str {
        match self {
            EventKind::Up => "up",
            EventKind::Down => "down",
            EventKind::Catastrophe => "catastrophe",
            EventKind::RepairDone => "repair_done",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Some(match s {
            "up" => EventKind::Up,
            "down" => EventKind::Down,
            "catastrophe" => EventKind::Catastrophe,
            "repair_done" => EventKind::RepairDone,
            _ => return None,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Event {
    pub time: f64,
    pub kind: EventKind,
}

/// State seen at an observation time: a lattice site, a real position, or `F`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum ObservedState {
    Site(i64),
    Position(f64),
    Failed,
}

impl ObservedState {
    /// Value of the truncated variable `X 1{X != F}`.
    pub fn truncated_value(self) -> f64 {
        match self {
            ObservedState::Site(n) => n as f64,
            ObservedState::Position(x) => x,
            ObservedState::Failed => 0.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Observation {
    pub time: f64,
    pub state: ObservedState,
}

/// One simulated trajectory.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PathTrace {
    pub replication: usize,
    pub events: Vec<Event>,
    pub observations: Vec<Observation>,
}

impl PathTrace {
    /// Checks the event grammar: strictly increasing times, and after a
    /// catastrophe the next event (if any) is the repair.
    pub fn check_legal(&self) -> Result<()> {
        let bad = |reason: String| {
            Err(Error::InvalidArgument(format!(
                "replication {}: {reason}",
                self.replication
            )))
        };
        let mut failed = false;
        let mut last = 0.0;
        for e in &self.events {
            if e.time <= last {
                return bad(format!("event time {} does not increase", e.time));
            }
            last = e.time;
            match (failed, e.kind) {
                (true, EventKind::RepairDone) => failed = false,
                (true, kind) => return bad(format!("{} while under repair", kind.as_str())),
                (false, EventKind::RepairDone) => return bad("repair without catastrophe".into()),
                (false, EventKind::Catastrophe) => failed = true,
                (false, _) => {}
            }
        }
        Ok(())
    }

    /// Observation recorded at exactly `t`.
    pub fn observation_at(&self, t: f64) -> Option<ObservedState> {
        let idx = self.observations.partition_point(|o| o.time < t);
        self.observations
            .get(idx)
            .filter(|o| o.time == t)
            .map(|o| o.state)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_validation() {
        assert!(SimConfig::new(1, 10, vec![0.5, 1.0]).is_ok());
        assert!(SimConfig::new(1, 0, vec![1.0]).is_err());
        assert!(SimConfig::new(1, 10, vec![]).is_err());
        assert!(SimConfig::new(1, 10, vec![1.0, 0.5]).is_err());
        assert!(SimConfig::new(1, 10, vec![0.0, 1.0]).is_err());
        let mut cfg = SimConfig::new(1, 10, vec![1.0]).unwrap();
        cfg.horizon = 0.5;
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn streams_differ_by_replication() {
        use rand::Rng;
        let a: u64 = replication_rng(7, 0).random();
        let b: u64 = replication_rng(7, 1).random();
        let a2: u64 = replication_rng(7, 0).random();
        assert_ne!(a, b);
        assert_eq!(a, a2);
    }

    #[test]
    fn legality_rejects_bad_grammar() {
        let ev = |time, kind| Event { time, kind };
        let mut trace = PathTrace {
            replication: 0,
            events: vec![ev(0.1, EventKind::Catastrophe), ev(0.2, EventKind::Up)],
            observations: vec![],
        };
        assert!(trace.check_legal().is_err());
        trace.events = vec![ev(0.1, EventKind::RepairDone)];
        assert!(trace.check_legal().is_err());
        trace.events = vec![ev(0.2, EventKind::Up), ev(0.1, EventKind::Down)];
        assert!(trace.check_legal().is_err());
        trace.events = vec![
            ev(0.1, EventKind::Catastrophe),
            ev(0.3, EventKind::RepairDone),
            ev(0.4, EventKind::Down),
        ];
        assert!(trace.check_legal().is_ok());
    }
}
