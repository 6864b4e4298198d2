use std::fs::File;
use std::io::BufWriter;

use deqjump::approximation::{steady_comparison, TABLE_EPSILONS};
use deqjump::diffusion::{self, DiffusionParams, DEFAULT_SLICE_POINTS};
use deqjump::discrete::{self, DiscreteParams};
use deqjump::simulation::{
    estimate_many, simulate_diffusion_parallel, simulate_discrete_parallel, write_traces,
    TraceHeader, DISCRETE_RATE_CAP,
};
use deqjump::{PathTrace, QuadratureSpec, SimConfig, Statistic};
use serde_json::Value;

use crate::config::{Model, Settings};
use crate::error::{invalid, CliError};
use crate::grid::Grid;
use crate::table::{Cell, Column, ColumnType, Table};

use ColumnType::{Integer, Number, Text};

/// Parameters of the comparison table, used by `compare` and `table1` when no
/// diffusion rates are given.
const TABLE_DEFAULTS: [(&str, f64); 5] = [
    ("lambda_hat", 1.0),
    ("mu_hat", 2.0),
    ("sigma2", 9.0),
    ("nu", 1.0),
    ("eta", 0.25),
];

const DEFAULT_REPS: usize = 10_000;
const DEFAULT_SEED: u64 = 0;
const DEFAULT_STEADY_WINDOW: (i64, i64) = (-10, 10);
const DEFAULT_COMPARE_WINDOW: (i64, i64) = (-6, 6);
const DEFAULT_MOMENT_GRID: &str = "0:10:0.1";
const DEFAULT_STEADY_X_GRID: &str = "-5:5:0.1";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Kind {
    Transient,
    Steady,
    Moments,
    Simulate,
    Compare,
    Table1,
}

impl Kind {
    pub fn name(self) -> &'static str {
        match self {
            Kind::Transient => "transient",
            Kind::Steady => "steady",
            Kind::Moments => "moments",
            Kind::Simulate => "simulate",
            Kind::Compare => "compare",
            Kind::Table1 => "table1",
        }
    }
}

pub fn run(kind: Kind, mut s: Settings) -> Result<Table, CliError> {
    s.command = Some(kind.name().to_string());
    match kind {
        Kind::Transient => transient(s),
        Kind::Steady => steady(s),
        Kind::Moments => moments(s),
        Kind::Simulate => simulate(s),
        Kind::Compare => compare(s),
        Kind::Table1 => table1(s),
    }
}

fn params_of(s: &Settings) -> Value {
    serde_json::to_value(s).expect("settings serialize")
}

fn model(s: &mut Settings) -> Result<Model, CliError> {
    let m = *s.model.get_or_insert(Model::Discrete);
    let foreign: &[(&str, bool)] = match m {
        Model::Discrete => &[
            ("--lambda-hat", s.lambda_hat.is_some()),
            ("--mu-hat", s.mu_hat.is_some()),
            ("--sigma2", s.sigma2.is_some()),
            ("--x-grid", s.x_grid.is_some()),
            ("--points", s.points.is_some()),
        ],
        Model::Diffusion => &[("--lambda", s.lambda.is_some()), ("--mu", s.mu.is_some())],
    };
    reject(foreign, "the selected model")?;
    if s.epsilon.is_some() {
        return Err(invalid("--epsilon only applies to compare and table1"));
    }
    Ok(m)
}

fn reject(flags: &[(&str, bool)], context: &str) -> Result<(), CliError> {
    match flags.iter().find(|(_, set)| *set) {
        Some((name, _)) => Err(invalid(format!("{name} does not apply to {context}"))),
        None => Ok(()),
    }
}

fn require(name: &str, v: Option<f64>) -> Result<f64, CliError> {
    v.ok_or_else(|| invalid(format!("missing --{name}")))
}

fn discrete_params(s: &Settings) -> Result<DiscreteParams, CliError> {
    Ok(DiscreteParams::new(
        require("lambda", s.lambda)?,
        require("mu", s.mu)?,
        require("nu", s.nu)?,
        require("eta", s.eta)?,
    )?)
}

fn diffusion_params(s: &Settings) -> Result<DiffusionParams, CliError> {
    Ok(DiffusionParams::new(
        require("lambda-hat", s.lambda_hat)?,
        require("mu-hat", s.mu_hat)?,
        require("sigma2", s.sigma2)?,
        require("nu", s.nu)?,
        require("eta", s.eta)?,
    )?)
}

fn quadrature(s: &Settings) -> Result<QuadratureSpec, CliError> {
    let d = QuadratureSpec::default();
    Ok(QuadratureSpec::new(
        s.rel_tol.unwrap_or(d.relative_tolerance),
        d.absolute_tolerance,
        s.max_subdivisions.unwrap_or(d.max_subdivisions),
    )?)
}

/// `--t` or `--t-grid`, falling back to `default` when given.
fn times(s: &mut Settings, default: Option<&str>) -> Result<Vec<f64>, CliError> {
    let grid = match (s.t, &s.t_grid) {
        (Some(_), Some(_)) => return Err(invalid("give either --t or --t-grid, not both")),
        (Some(t), None) => Grid(vec![t]),
        (None, Some(g)) => g.clone(),
        (None, None) => match default {
            Some(text) => {
                let g: Grid = text.parse().map_err(invalid)?;
                s.t_grid = Some(g.clone());
                g
            }
            None => return Err(invalid("missing --t or --t-grid")),
        },
    };
    if grid.values().iter().any(|&t| t < 0.0) {
        return Err(invalid("times must be nonnegative"));
    }
    if !grid.is_strictly_increasing() {
        return Err(invalid("the time grid must be strictly increasing"));
    }
    Ok(grid.0)
}

fn window(s: &Settings) -> Result<Option<(i64, i64)>, CliError> {
    match (s.n_min, s.n_max) {
        (None, None) => Ok(None),
        (Some(lo), Some(hi)) if lo <= hi => Ok(Some((lo, hi))),
        (Some(lo), Some(hi)) => Err(invalid(format!(
            "empty window: --n-min {lo} > --n-max {hi}"
        ))),
        _ => Err(invalid("give both --n-min and --n-max")),
    }
}

fn window_or(s: &mut Settings, default: (i64, i64)) -> Result<(i64, i64), CliError> {
    let w = window(s)?.unwrap_or(default);
    s.n_min = Some(w.0);
    s.n_max = Some(w.1);
    Ok(w)
}

fn transient(mut s: Settings) -> Result<Table, CliError> {
    reject(
        &[("--seed", s.seed.is_some()), ("--reps", s.reps.is_some())],
        "transient",
    )?;
    let m = model(&mut s)?;
    let ts = times(&mut s, None)?;
    let q = quadrature(&s)?;
    match m {
        Model::Discrete => {
            let p = discrete_params(&s)?;
            let w = window(&s)?;
            let mut table = Table::new(
                "transient",
                params_of(&s),
                &[
                    ("t", Number, "time"),
                    ("n", Integer, "lattice state"),
                    ("probability", Number, "P(N(t) = n)"),
                    ("failure_probability", Number, "P(system under repair at t)"),
                ],
            );
            for &t in &ts {
                // Without an explicit window the law at t = 0 is the unit mass at 0.
                let w = w.unwrap_or_else(|| {
                    if t == 0.0 {
                        (0, 0)
                    } else {
                        discrete::default_window(&p, t)
                    }
                });
                let slice = discrete::transient_distribution(&p, t, Some(w), &q)?;
                for (n, prob) in slice.iter() {
                    table.push(vec![
                        Cell::Num(t),
                        Cell::Int(n),
                        Cell::Num(prob),
                        Cell::Num(slice.failure_mass),
                    ]);
                }
            }
            Ok(table)
        }
        Model::Diffusion => {
            reject(
                &[
                    ("--n-min", s.n_min.is_some()),
                    ("--n-max", s.n_max.is_some()),
                ],
                "the diffusion model",
            )?;
            let dp = diffusion_params(&s)?;
            if ts.contains(&0.0) {
                return Err(invalid(
                    "at t = 0 the law is a point mass at the origin and has no density",
                ));
            }
            if s.x_grid.is_some() && s.points.is_some() {
                return Err(invalid("--points only applies to the default grid"));
            }
            let mut table = Table::new(
                "transient",
                params_of(&s),
                &[
                    ("t", Number, "time"),
                    ("x", Number, "position"),
                    ("density", Number, "density of X(t) at x"),
                    ("failure_probability", Number, "P(system under repair at t)"),
                ],
            );
            for &t in &ts {
                let (xs, fs) = match &s.x_grid {
                    Some(g) => {
                        let fs = g
                            .values()
                            .iter()
                            .map(|&x| {
                                Ok(diffusion::transient_density(&dp, x, t, &q)?
                                    .value()
                                    .unwrap())
                            })
                            .collect::<Result<Vec<f64>, CliError>>()?;
                        (g.0.clone(), fs)
                    }
                    None => {
                        let slice = diffusion::density_slice(
                            &dp,
                            t,
                            s.points.unwrap_or(DEFAULT_SLICE_POINTS),
                            &q,
                        )?;
                        (slice.abscissas, slice.densities)
                    }
                };
                let fail = diffusion::failure_probability(&dp, t)?;
                for (x, f) in xs.into_iter().zip(fs) {
                    table.push(vec![
                        Cell::Num(t),
                        Cell::Num(x),
                        Cell::Num(f),
                        Cell::Num(fail),
                    ]);
                }
            }
            Ok(table)
        }
    }
}

fn steady(mut s: Settings) -> Result<Table, CliError> {
    reject(
        &[
            ("--t", s.t.is_some()),
            ("--t-grid", s.t_grid.is_some()),
            ("--seed", s.seed.is_some()),
            ("--reps", s.reps.is_some()),
        ],
        "steady",
    )?;
    match model(&mut s)? {
        Model::Discrete => {
            let p = discrete_params(&s)?;
            let (lo, hi) = window_or(&mut s, DEFAULT_STEADY_WINDOW)?;
            let law = discrete::steady_law(&p)?;
            let mut table = Table::new(
                "steady",
                params_of(&s),
                &[
                    ("n", Integer, "lattice state"),
                    ("probability", Number, "limiting P(N = n)"),
                    (
                        "failure_probability",
                        Number,
                        "limiting P(system under repair)",
                    ),
                ],
            );
            for n in lo..=hi {
                table.push(vec![
                    Cell::Int(n),
                    Cell::Num(law.probability(n)),
                    Cell::Num(law.failure),
                ]);
            }
            Ok(table)
        }
        Model::Diffusion => {
            reject(
                &[
                    ("--n-min", s.n_min.is_some()),
                    ("--n-max", s.n_max.is_some()),
                    ("--points", s.points.is_some()),
                ],
                "the diffusion steady state",
            )?;
            let dp = diffusion_params(&s)?;
            let xs = match &s.x_grid {
                Some(g) => g.clone(),
                None => {
                    let g: Grid = DEFAULT_STEADY_X_GRID.parse().map_err(invalid)?;
                    s.x_grid = Some(g.clone());
                    g
                }
            };
            let fail = dp.nu() / (dp.nu() + dp.eta());
            let mut table = Table::new(
                "steady",
                params_of(&s),
                &[
                    ("x", Number, "position"),
                    ("density", Number, "limiting density at x"),
                    (
                        "failure_probability",
                        Number,
                        "limiting P(system under repair)",
                    ),
                ],
            );
            for &x in xs.values() {
                let w = diffusion::steady_density(&dp, x)?;
                table.push(vec![Cell::Num(x), Cell::Num(w), Cell::Num(fail)]);
            }
            Ok(table)
        }
    }
}

fn moments(mut s: Settings) -> Result<Table, CliError> {
    reject(
        &[
            ("--n-min", s.n_min.is_some()),
            ("--n-max", s.n_max.is_some()),
            ("--seed", s.seed.is_some()),
            ("--reps", s.reps.is_some()),
            ("--x-grid", s.x_grid.is_some()),
            ("--points", s.points.is_some()),
        ],
        "moments",
    )?;
    let m = model(&mut s)?;
    let ts = times(&mut s, Some(DEFAULT_MOMENT_GRID))?;
    let columns = [
        ("t", Number, "time"),
        ("mean", Number, "E[state; system working]"),
        (
            "variance",
            Number,
            "E[state^2; working] - E[state; working]^2",
        ),
    ];
    let rows: Vec<(f64, f64, f64)> = match m {
        Model::Discrete => {
            let p = discrete_params(&s)?;
            ts.iter()
                .map(|&t| {
                    Ok((
                        t,
                        discrete::mean_transient(&p, t)?,
                        discrete::variance_transient(&p, t)?,
                    ))
                })
                .collect::<Result<_, deqjump::Error>>()?
        }
        Model::Diffusion => {
            let dp = diffusion_params(&s)?;
            ts.iter()
                .map(|&t| {
                    Ok((
                        t,
                        diffusion::mean_x(&dp, t)?,
                        diffusion::variance_x(&dp, t)?,
                    ))
                })
                .collect::<Result<_, deqjump::Error>>()?
        }
    };
    let mut table = Table::new("moments", params_of(&s), &columns);
    for (t, mean, var) in rows {
        table.push(vec![Cell::Num(t), Cell::Num(mean), Cell::Num(var)]);
    }
    Ok(table)
}

fn simulate(mut s: Settings) -> Result<Table, CliError> {
    reject(&[("--points", s.points.is_some())], "simulate")?;
    let m = model(&mut s)?;
    let ts = times(&mut s, None)?;
    let seed = *s.seed.get_or_insert(DEFAULT_SEED);
    let reps = *s.reps.get_or_insert(DEFAULT_REPS);
    let mut cfg = SimConfig::new(seed, reps, ts.clone())?;
    if s.trace_out.is_none() {
        cfg = cfg.without_events();
    }
    let mut stats = vec![
        Statistic::FailureProbability,
        Statistic::TruncatedMean,
        Statistic::TruncatedVariance,
    ];
    let (traces, model_name, model_params): (Vec<PathTrace>, &str, Value) = match m {
        Model::Discrete => {
            let p = discrete_params(&s)?;
            if p.lambda() + p.mu() > DISCRETE_RATE_CAP {
                return Err(invalid(format!(
                    "lambda + mu = {} exceeds the simulation limit {DISCRETE_RATE_CAP}",
                    p.lambda() + p.mu()
                )));
            }
            if let Some((lo, hi)) = window(&s)? {
                stats.extend((lo..=hi).map(Statistic::StateProbability));
            }
            let v = serde_json::to_value(p).unwrap();
            (simulate_discrete_parallel(&p, &cfg)?, "discrete", v)
        }
        Model::Diffusion => {
            reject(
                &[
                    ("--n-min", s.n_min.is_some()),
                    ("--n-max", s.n_max.is_some()),
                ],
                "the diffusion model",
            )?;
            let dp = diffusion_params(&s)?;
            if let Some(g) = &s.x_grid {
                stats.extend(g.values().iter().map(|&x| Statistic::Cdf(x)));
            }
            let v = serde_json::to_value(dp).unwrap();
            (simulate_diffusion_parallel(&dp, &cfg)?, "diffusion", v)
        }
    };
    if let Some(path) = &s.trace_out {
        let header = TraceHeader {
            model: model_name.to_string(),
            params: model_params,
            seed,
            replications: reps,
            horizon: cfg.horizon,
            observation_times: cfg.observation_times.clone(),
        };
        let file = File::create(path)
            .map_err(|e| invalid(format!("cannot create {}: {e}", path.display())))?;
        write_traces(BufWriter::new(file), &header, &traces)?;
    }
    let mut table = Table::new(
        "simulate",
        params_of(&s),
        &[
            ("t", Number, "observation time"),
            ("statistic", Text, "estimated quantity"),
            (
                "argument",
                Text,
                "state n or abscissa x, empty when not applicable",
            ),
            ("value", Number, "sample estimate"),
            ("standard_error", Number, "standard error of the estimate"),
            ("replications", Integer, "number of simulated paths"),
        ],
    );
    for &t in &ts {
        for (stat, e) in stats.iter().zip(estimate_many(&traces, t, &stats)?) {
            let argument = match stat {
                Statistic::StateProbability(n) => n.to_string(),
                Statistic::Cdf(x) => x.to_string(),
                _ => String::new(),
            };
            table.push(vec![
                Cell::Num(t),
                Cell::Text(stat.name().to_string()),
                Cell::Text(argument),
                Cell::Num(e.value),
                Cell::Num(e.standard_error),
                Cell::Int(e.replications as i64),
            ]);
        }
    }
    Ok(table)
}

/// Shared set-up of `compare` and `table1`: the diffusion rates (with the table
/// defaults filled in only when none is given), the ε list and the state window.
fn comparison_inputs(
    s: &mut Settings,
    command: &str,
) -> Result<(DiffusionParams, Vec<f64>, (i64, i64)), CliError> {
    reject(
        &[
            ("--model", s.model.is_some()),
            ("--lambda", s.lambda.is_some()),
            ("--mu", s.mu.is_some()),
            ("--t", s.t.is_some()),
            ("--t-grid", s.t_grid.is_some()),
            ("--x-grid", s.x_grid.is_some()),
            ("--points", s.points.is_some()),
            ("--seed", s.seed.is_some()),
            ("--reps", s.reps.is_some()),
        ],
        command,
    )?;
    let given = [s.lambda_hat, s.mu_hat, s.sigma2, s.nu, s.eta];
    if given.iter().all(Option::is_none) {
        let fields = [
            &mut s.lambda_hat,
            &mut s.mu_hat,
            &mut s.sigma2,
            &mut s.nu,
            &mut s.eta,
        ];
        for (slot, (_, v)) in fields.into_iter().zip(TABLE_DEFAULTS) {
            *slot = Some(v);
        }
    }
    let dp = diffusion_params(s)?;
    let eps = s
        .epsilon
        .get_or_insert_with(|| Grid(TABLE_EPSILONS.to_vec()))
        .0
        .clone();
    let w = window_or(s, DEFAULT_COMPARE_WINDOW)?;
    Ok((dp, eps, w))
}

fn compare(mut s: Settings) -> Result<Table, CliError> {
    let (dp, eps, w) = comparison_inputs(&mut s, "compare")?;
    let mut table = Table::new(
        "compare",
        params_of(&s),
        &[
            ("epsilon", Number, "lattice spacing"),
            ("n", Integer, "lattice state"),
            ("scaled_pi", Number, "pi_n(epsilon) / epsilon"),
            ("w", Number, "limiting diffusion density at n epsilon"),
            ("delta", Number, "(epsilon W - pi_n) / pi_n"),
        ],
    );
    for &e in &eps {
        for row in steady_comparison(&dp, e, w)? {
            table.push(vec![
                Cell::Num(e),
                Cell::Int(row.n),
                Cell::Num(row.scaled_pi),
                Cell::Num(row.w_value),
                Cell::Num(row.delta),
            ]);
        }
    }
    Ok(table)
}

fn round5(v: f64) -> f64 {
    (v * 1e5).round() / 1e5
}

fn table1(mut s: Settings) -> Result<Table, CliError> {
    let (dp, eps, (lo, hi)) = comparison_inputs(&mut s, "table1")?;
    let mut columns = vec![Column {
        name: "n".into(),
        kind: Integer,
        description: "lattice state".into(),
    }];
    let mut blocks = Vec::with_capacity(eps.len());
    for &e in &eps {
        let col = |prefix: &str, description: &str| Column {
            name: format!("{prefix}_{e}"),
            kind: Number,
            description: format!("{description} at epsilon = {e}"),
        };
        columns.push(col("scaled_pi", "pi_n(epsilon) / epsilon"));
        columns.push(col("w", "limiting diffusion density at n epsilon"));
        columns.push(col("delta", "(epsilon W - pi_n) / pi_n"));
        blocks.push(steady_comparison(&dp, e, (lo, hi))?);
    }
    let mut table = Table::with_columns("table1", params_of(&s), columns);
    for (i, n) in (lo..=hi).enumerate() {
        let mut row = vec![Cell::Int(n)];
        for block in &blocks {
            let r = &block[i];
            row.extend([r.scaled_pi, r.w_value, r.delta].map(|v| Cell::Num(round5(v))));
        }
        table.push(row);
    }
    Ok(table)
}
