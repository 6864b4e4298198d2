//! Plain-text trace files.
//!
//! ```text
//! # deqjump-trace 1
//! # {"model":"discrete","params":{...},"seed":7,"replications":2,"horizon":1.0,"observation_times":[1.0]}
//! rep 0
//! ev 0.2281 up
//! obs 1 1
//! rep 1
//! ev 0.6147 catastrophe
//! obs 1 F
//! ```
//!
//! Lines starting with `#` are the header: a format tag followed by one JSON
//! object. Every other line is a whitespace-separated record: `rep <index>`
//! opens a replication, `ev <time> <kind>` is an event, `obs <time> <state>` is
//! an observation, where the state is an integer site, a real position or `F`.
//! Reals are written in shortest round-trip form, so reading a file back gives
//! bit-identical traces.

use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};

use super::{Event, EventKind, Observation, ObservedState, PathTrace};
use crate::error::{Error, Result};

const TAG: &str = "# deqjump-trace 1";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceHeader {
    /// `"discrete"` or `"diffusion"`; selects how observation states are parsed.
    pub model: String,
    pub params: serde_json::Value,
    pub seed: u64,
    pub replications: usize,
    pub horizon: f64,
    pub observation_times: Vec<f64>,
}

fn io_err(e: std::io::Error) -> Error {
    Error::InvalidArgument(format!("i/o error: {e}"))
}

pub fn write_traces<'a, W, I>(mut out: W, header: &TraceHeader, traces: I) -> Result<()>
where
    W: Write,
    I: IntoIterator<Item = &'a PathTrace>,
{
    let json = serde_json::to_string(header).map_err(|e| Error::InvalidArgument(e.to_string()))?;
    writeln!(out, "{TAG}\n# {json}").map_err(io_err)?;
    for trace in traces {
        writeln!(out, "rep {}", trace.replication).map_err(io_err)?;
        for e in &trace.events {
            writeln!(out, "ev {:?} {}", e.time, e.kind.as_str()).map_err(io_err)?;
        }
        for o in &trace.observations {
            let state = match o.state {
                ObservedState::Site(n) => n.to_string(),
                ObservedState::Position(x) => format!("{x:?}"),
                ObservedState::Failed => "F".into(),
            };
            writeln!(out, "obs {:?} {state}", o.time).map_err(io_err)?;
        }
    }
    out.flush().map_err(io_err)
}

pub fn read_traces<R: BufRead>(input: R) -> Result<(TraceHeader, Vec<PathTrace>)> {
    let mut header: Option<TraceHeader> = None;
    let mut traces: Vec<PathTrace> = Vec::new();
    for (idx, line) in input.lines().enumerate() {
        let lineno = idx + 1;
        let line = line.map_err(io_err)?;
        let bad = |reason: &str| Error::MalformedTrace {
            line: lineno,
            reason: reason.to_string(),
        };
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        if lineno == 1 {
            if line != TAG {
                return Err(bad("missing format tag"));
            }
            continue;
        }
        if let Some(rest) = line.strip_prefix('#') {
            if header.is_none() {
                header = Some(serde_json::from_str(rest.trim()).map_err(|e| bad(&e.to_string()))?);
            }
            continue;
        }
        let h = header.as_ref().ok_or_else(|| bad("record before header"))?;
        let fields: Vec<&str> = line.split_whitespace().collect();
        let real = |s: &str| s.parse::<f64>().map_err(|_| bad("bad number"));
        match fields.as_slice() {
            ["rep", i] => traces.push(PathTrace {
                replication: i.parse().map_err(|_| bad("bad replication index"))?,
                events: vec![],
                observations: vec![],
            }),
            ["ev", time, kind] => {
                let trace = traces
                    .last_mut()
                    .ok_or_else(|| bad("event outside a replication"))?;
                let kind = EventKind::parse(kind).ok_or_else(|| bad("unknown event kind"))?;
                trace.events.push(Event {
                    time: real(time)?,
                    kind,
                });
            }
            ["obs", time, state] => {
                let time = real(time)?;
                let state = match (*state, h.model.as_str()) {
                    ("F", _) => ObservedState::Failed,
                    (s, "discrete") => ObservedState::Site(s.parse().map_err(|_| bad("bad site"))?),
                    (s, _) => ObservedState::Position(real(s)?),
                };
                let trace = traces
                    .last_mut()
                    .ok_or_else(|| bad("observation outside a replication"))?;
                trace.observations.push(Observation { time, state });
            }
            _ => return Err(bad("unrecognised record")),
        }
    }
    let header = header.ok_or(Error::MalformedTrace {
        line: 0,
        reason: "no header".into(),
    })?;
    for trace in &traces {
        trace.check_legal()?;
    }
    Ok((header, traces))
}
