use std::path::{Path, PathBuf};

use clap::{Args, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DesignKind {
    /// Impulse train for linear systems.
    Lti,
    /// Amplitude-modulated impulse train for an input-only monomial basis.
    Hammerstein,
    /// Pulse experiments for a flat system with the state-input monomial basis.
    Flat,
    /// Randomly sampled multi-experiment pulses checked on a plant model.
    RandomEta,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LiftKind {
    /// Check the raw series.
    None,
    /// Evaluate the input-only monomial basis of power `t`.
    Input,
    /// Simulate `--plant` from the origin and evaluate the state-input
    /// monomial basis of power `t`.
    State,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DefinitionKind {
    /// Rank `eta L` of the Hankel matrix.
    Order,
    /// Positive definite Gram sum of the samples.
    Exciting,
    /// Smallest singular value at least `--alpha`.
    Alpha,
}

/// Every scenario parameter. Flags override values from `--config`.
#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScenarioConfig {
    /// Designer to run.
    #[arg(long, value_enum)]
    pub kind: Option<DesignKind>,
    /// Input dimension.
    #[arg(long)]
    pub m: Option<usize>,
    /// Excitation order (Hankel depth).
    #[arg(long = "L")]
    #[serde(rename = "L")]
    pub order: Option<usize>,
    /// Horizon (samples per experiment).
    #[arg(long = "N")]
    #[serde(rename = "N")]
    pub horizon: Option<usize>,
    /// Flat system order.
    #[arg(long)]
    pub n: Option<usize>,
    /// Highest basis power.
    #[arg(long)]
    pub t: Option<u32>,
    /// Reachability horizon of multi-experiment designs.
    #[arg(long)]
    pub mu: Option<usize>,
    /// Impulse amplitude, alpha-PE threshold or random amplitude bound.
    #[arg(long)]
    pub alpha: Option<f64>,
    /// Comma separated nonzero distinct pulse values.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub deltas: Vec<f64>,
    /// Hammerstein amplitudes: columns separated by ';', entries by ','.
    #[arg(long, allow_hyphen_values = true)]
    pub amplitudes: Option<String>,
    /// Seed for every random draw. Drawn from entropy and printed if absent.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Solver sample budget or random designer attempts.
    #[arg(long)]
    pub attempts: Option<usize>,
    /// Input CSV files (repeat for multiple experiments).
    #[arg(long)]
    pub input: Vec<PathBuf>,
    /// Output CSV files matching `--input`.
    #[arg(long)]
    pub output: Vec<PathBuf>,
    /// Query input window CSV.
    #[arg(long)]
    pub query_u: Option<PathBuf>,
    /// Query output window CSV.
    #[arg(long)]
    pub query_y: Option<PathBuf>,
    /// Initial outputs pinned for prediction.
    #[arg(long)]
    pub y_init: Option<PathBuf>,
    /// Plant definition JSON.
    #[arg(long)]
    pub plant: Option<PathBuf>,
    /// Basis lifting before the check.
    #[arg(long, value_enum)]
    pub lift: Option<LiftKind>,
    /// Excitation definition to test.
    #[arg(long, value_enum)]
    pub definition: Option<DefinitionKind>,
    /// Relative rank tolerance.
    #[arg(long, env = "PE_EXCITE_TOL")]
    pub tol: Option<f64>,
    /// Residual tolerance of membership queries, relative to `1 + |query|`.
    #[arg(long)]
    pub residual_tol: Option<f64>,
    /// Number of trials.
    #[arg(long)]
    pub trials: Option<usize>,
    /// Closed-loop pole location in [0, 1).
    #[arg(long)]
    pub pole_radius: Option<f64>,
    /// JSON (or CSV for predict) output path.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Output directory for multi-file results.
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
    /// CSV output path.
    #[arg(long)]
    pub out_csv: Option<PathBuf>,
}

macro_rules! merge_fields {
    ($dst:ident, $src:ident; $($opt:ident),*; $($list:ident),*) => {{
        $( if $dst.$opt.is_none() { $dst.$opt = $src.$opt; } )*
        $( if $dst.$list.is_empty() { $dst.$list = $src.$list; } )*
    }};
}

impl ScenarioConfig {
    /// Fills every unset field from `file`.
    pub fn merge(mut self, file: ScenarioConfig) -> Self {
        merge_fields!(self, file;
            kind, m, order, horizon, n, t, mu, alpha, amplitudes, seed, attempts,
            query_u, query_y, y_init, plant, lift, definition, tol, residual_tol, trials,
            pole_radius, out, out_dir, out_csv;
            deltas, input, output);
        self
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        serde_json::from_str(&text)
            .map_err(|e| CliError::Usage(format!("config {}: {e}", path.display())))
    }

    pub fn require<T: Clone>(value: &Option<T>, flag: &str) -> Result<T, CliError> {
        value
            .clone()
            .ok_or_else(|| CliError::Usage(format!("missing required --{flag}")))
    }

    pub fn tolerance(&self) -> f64 {
        self.tol.unwrap_or(pe_excite::DEFAULT_RANK_TOL)
    }
}
