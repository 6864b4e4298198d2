//! Run settings. Every field can come from a flag or from a config file (TOML,
//! or JSON when the path ends in `.json`); flags win. The `params` object that
//! each output carries uses the same keys, so it can be fed back as a config.

use std::path::{Path, PathBuf};

use clap::{Args, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::error::{invalid, CliError};
use crate::grid::Grid;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Model {
    Discrete,
    Diffusion,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Default, PartialEq, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Settings {
    /// Name of the command that produced a params record; ignored on input.
    #[arg(skip)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub command: Option<String>,

    #[arg(long, value_enum)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub model: Option<Model>,

    /// Up-jump rate of the lattice walk
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda: Option<f64>,

    /// Down-jump rate of the lattice walk
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mu: Option<f64>,

    /// Catastrophe rate
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub nu: Option<f64>,

    /// Repair rate
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eta: Option<f64>,

    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda_hat: Option<f64>,

    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mu_hat: Option<f64>,

    /// Infinitesimal variance of the diffusion
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sigma2: Option<f64>,

    /// Lattice spacing(s): a number, a comma list or start:stop:step
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<Grid>,

    /// Single time; shorthand for a one-point --t-grid
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t: Option<f64>,

    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t_grid: Option<Grid>,

    #[arg(long, allow_negative_numbers = true)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_min: Option<i64>,

    #[arg(long, allow_negative_numbers = true)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_max: Option<i64>,

    #[arg(long, allow_hyphen_values = true)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x_grid: Option<Grid>,

    /// Number of abscissas of the default density grid
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub points: Option<usize>,

    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,

    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reps: Option<usize>,

    /// Relative tolerance of the adaptive quadrature
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rel_tol: Option<f64>,

    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_subdivisions: Option<usize>,

    #[arg(long, value_enum)]
    #[serde(default, skip_serializing)]
    pub format: Option<Format>,

    #[arg(long)]
    #[serde(default, skip_serializing)]
    pub out: Option<PathBuf>,

    /// Write the simulated paths to this file (simulate only)
    #[arg(long)]
    #[serde(default, skip_serializing)]
    pub trace_out: Option<PathBuf>,

    /// Print CSV numbers at full precision instead of 6 significant digits
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    #[serde(default, skip_serializing)]
    pub full_precision: Option<bool>,
}

macro_rules! prefer {
    ($a:ident, $b:ident, $($f:ident),*) => {
        Settings { $($f: $a.$f.or($b.$f),)* }
    };
}

impl Settings {
    /// Fields set in `self` win over those in `fallback`.
    pub fn or(self, fallback: Settings) -> Settings {
        prefer!(
            self,
            fallback,
            command,
            model,
            lambda,
            mu,
            nu,
            eta,
            lambda_hat,
            mu_hat,
            sigma2,
            epsilon,
            t,
            t_grid,
            n_min,
            n_max,
            x_grid,
            points,
            seed,
            reps,
            rel_tol,
            max_subdivisions,
            format,
            out,
            trace_out,
            full_precision
        )
    }

    pub fn load(path: &Path) -> Result<Settings, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| invalid(format!("cannot read config {}: {e}", path.display())))?;
        let parsed = if path
            .extension()
            .is_some_and(|e| e.eq_ignore_ascii_case("json"))
        {
            serde_json::from_str(&text).map_err(|e| e.to_string())
        } else {
            toml::from_str(&text).map_err(|e| e.to_string())
        };
        parsed.map_err(|e| invalid(format!("config {}: {e}", path.display())))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flags_override_file() {
        let file = Settings {
            lambda: Some(1.0),
            mu: Some(2.0),
            ..Default::default()
        };
        let flags = Settings {
            lambda: Some(5.0),
            ..Default::default()
        };
        let s = flags.or(file);
        assert_eq!(s.lambda, Some(5.0));
        assert_eq!(s.mu, Some(2.0));
        assert_eq!(s.nu, None);
    }

    #[test]
    fn toml_schema() {
        let s: Settings = toml::from_str(
            "model = \"discrete\"\nlambda = 2.0\nmu = 2\nt_grid = \"0:1:0.5\"\nn_min = -2\nformat = \"json\"",
        )
        .unwrap();
        assert_eq!(s.model, Some(Model::Discrete));
        assert_eq!(s.mu, Some(2.0));
        assert_eq!(s.t_grid.unwrap().values(), &[0.0, 0.5, 1.0]);
        assert_eq!(s.n_min, Some(-2));
        assert_eq!(s.format, Some(Format::Json));
        assert!(toml::from_str::<Settings>("lamda = 1.0").is_err());
    }

    #[test]
    fn output_only_fields_stay_out_of_params() {
        let s = Settings {
            seed: Some(7),
            out: Some("x.csv".into()),
            format: Some(Format::Csv),
            ..Default::default()
        };
        assert_eq!(serde_json::to_string(&s).unwrap(), "{\"seed\":7}");
    }
}
