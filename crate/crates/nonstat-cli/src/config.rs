// SPDX-License-Identifier: MIT OR Apache-2.0

//! Flat key-value config files and the run manifest.
//!
//! # Config file format
//!
//! One `key = value` pair per line. Blank lines are skipped and `#` starts
//! a comment (full-line or trailing). Keys:
//!
//! ```text
//! experiment       = scb_coverage   # qq_theoretical | qq_bootstrap | scb_coverage
//!                                   # | changepoint_power | deviation_tail
//! theta_kind       = piecewise4     # constant | split_sign | piecewise4 | sine8pi
//! theta            = -0.4           # autoregressive level, |theta| < 1
//! innovations      = t6             # normal | t<df> | chisq1
//! sine_transformed = false          # optional; apply x -> sin(x) to the noise
//! n                = 600            # series length
//! m                = auto           # optional; block length, or floor(n^(1/3))
//! h                = 0.13, 0.15     # bandwidths; one result row per entry
//! alpha            = 0.05           # level in (0, 1)
//! reps             = 1000           # Monte Carlo replications
//! bootstrap        = 500            # bootstrap draws per replication
//! seed             = 20240601       # root seed; all randomness derives from it
//! output           = results/       # optional; CLI --out overrides
//! ```
//!
//! `h` is required (non-empty) for `scb_coverage` and ignored by the other
//! experiments; the deviation study reads `m` as its band width. Parse
//! errors carry the offending line number and field name.

use serde::{Deserialize, Serialize};

use nonstat::experiments::{ExperimentConfig, ExperimentKind, ModelConfig};
use nonstat::models::ThetaKind;
use nonstat::{Error, Result};

/// Parse the documented flat key-value format into a validated config.
pub fn parse_config(text: &str) -> Result<ExperimentConfig> {
    let mut pairs: Vec<(String, String, usize)> = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = match raw.find('#') {
            Some(pos) => &raw[..pos],
            None => raw,
        }
        .trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| {
            Error::invalid_input(format!(
                "line {line_no}: expected `key = value`, got `{line}`"
            ))
        })?;
        let key = key.trim().to_string();
        let value = value.trim().to_string();
        if key.is_empty() {
            return Err(Error::invalid_input(format!("line {line_no}: empty key")));
        }
        if value.is_empty() {
            return Err(Error::invalid_input(format!(
                "line {line_no}: field `{key}`: empty value"
            )));
        }
        if let Some((_, _, prev)) = pairs.iter().find(|(k, _, _)| *k == key) {
            return Err(Error::invalid_input(format!(
                "line {line_no}: duplicate key `{key}` (first set on line {prev})"
            )));
        }
        pairs.push((key, value, line_no));
    }

    let known = [
        "experiment",
        "theta_kind",
        "theta",
        "innovations",
        "sine_transformed",
        "n",
        "m",
        "h",
        "alpha",
        "reps",
        "bootstrap",
        "seed",
        "output",
    ];
    if let Some((key, _, line_no)) = pairs.iter().find(|(k, _, _)| !known.contains(&k.as_str()))
    {
        return Err(Error::invalid_input(format!(
            "line {line_no}: unknown key `{key}`"
        )));
    }

    let lookup = |key: &str| pairs.iter().find(|(k, _, _)| k == key);
    let required = |key: &str| {
        lookup(key)
            .map(|(_, v, l)| (v.clone(), *l))
            .ok_or_else(|| Error::invalid_input(format!("missing required key `{key}`")))
    };

    fn typed<T: std::str::FromStr>(field: &str, value: &str, line_no: usize) -> Result<T> {
        value.parse::<T>().map_err(|_| {
            Error::invalid_input(format!(
                "line {line_no}: field `{field}`: cannot parse `{value}` as {}",
                std::any::type_name::<T>()
            ))
        })
    }

    // Re-anchor a nested message at its source line.
    fn at_line(line_no: usize, e: Error) -> Error {
        match e {
            Error::InvalidInput(msg) => Error::invalid_input(format!("line {line_no}: {msg}")),
            other => other,
        }
    }

    let (experiment_name, experiment_line) = required("experiment")?;
    let experiment =
        ExperimentKind::from_name(&experiment_name).map_err(|e| at_line(experiment_line, e))?;
    let (theta_kind_name, theta_kind_line) = required("theta_kind")?;
    let theta_kind =
        ThetaKind::from_name(&theta_kind_name).map_err(|e| at_line(theta_kind_line, e))?;
    let (theta_value, theta_line) = required("theta")?;
    let theta: f64 = typed("theta", &theta_value, theta_line)?;
    let (innovations, _) = required("innovations")?;

    let sine_transformed = match lookup("sine_transformed") {
        None => false,
        Some((_, v, l)) => match v.as_str() {
            "true" => true,
            "false" => false,
            other => {
                return Err(Error::invalid_input(format!(
                    "line {l}: field `sine_transformed`: expected true or false, got `{other}`"
                )))
            }
        },
    };

    let (n_value, n_line) = required("n")?;
    let n: usize = typed("n", &n_value, n_line)?;
    let m = match lookup("m") {
        None => None,
        Some((_, v, _)) if v == "auto" => None,
        Some((_, v, l)) => Some(typed::<usize>("m", v, *l)?),
    };
    let h: Vec<f64> = match lookup("h") {
        None => Vec::new(),
        Some((_, v, l)) => v
            .split(',')
            .map(|piece| typed::<f64>("h", piece.trim(), *l))
            .collect::<Result<_>>()?,
    };
    let (alpha_value, alpha_line) = required("alpha")?;
    let alpha: f64 = typed("alpha", &alpha_value, alpha_line)?;
    let (reps_value, reps_line) = required("reps")?;
    let reps: usize = typed("reps", &reps_value, reps_line)?;
    let (bootstrap_value, bootstrap_line) = required("bootstrap")?;
    let bootstrap: usize = typed("bootstrap", &bootstrap_value, bootstrap_line)?;
    let (seed_value, seed_line) = required("seed")?;
    let seed: u64 = typed("seed", &seed_value, seed_line)?;
    let output = lookup("output").map(|(_, v, _)| v.clone());

    let config = ExperimentConfig {
        experiment,
        model: ModelConfig { theta_kind, theta, innovations, sine_transformed },
        n,
        m,
        h,
        alpha,
        reps,
        bootstrap,
        seed,
        output,
    };
    config.validate()?;
    // Surface model-construction errors (bad |theta|, unknown innovation
    // family) at parse time rather than mid-run.
    config.model.build(config.n.max(1))?;
    Ok(config)
}

/// JSON-serializable mirror of [`ExperimentConfig`]; the manifest embeds
/// one so a run can be reproduced from its manifest alone.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConfigDoc {
    pub experiment: String,
    pub theta_kind: String,
    pub theta: f64,
    pub innovations: String,
    pub sine_transformed: bool,
    pub n: usize,
    /// `None` means the floor(n^(1/3)) default.
    pub m: Option<usize>,
    pub h: Vec<f64>,
    pub alpha: f64,
    pub reps: usize,
    pub bootstrap: usize,
    pub seed: u64,
    pub output: Option<String>,
}

impl ConfigDoc {
    pub fn from_config(config: &ExperimentConfig) -> Self {
        ConfigDoc {
            experiment: config.experiment.name().to_string(),
            theta_kind: config.model.theta_kind.name().to_string(),
            theta: config.model.theta,
            innovations: config.model.innovations.clone(),
            sine_transformed: config.model.sine_transformed,
            n: config.n,
            m: config.m,
            h: config.h.clone(),
            alpha: config.alpha,
            reps: config.reps,
            bootstrap: config.bootstrap,
            seed: config.seed,
            output: config.output.clone(),
        }
    }

    pub fn to_config(&self) -> Result<ExperimentConfig> {
        let config = ExperimentConfig {
            experiment: ExperimentKind::from_name(&self.experiment)?,
            model: ModelConfig {
                theta_kind: ThetaKind::from_name(&self.theta_kind)?,
                theta: self.theta,
                innovations: self.innovations.clone(),
                sine_transformed: self.sine_transformed,
            },
            n: self.n,
            m: self.m,
            h: self.h.clone(),
            alpha: self.alpha,
            reps: self.reps,
            bootstrap: self.bootstrap,
            seed: self.seed,
            output: self.output.clone(),
        };
        config.validate()?;
        Ok(config)
    }
}

/// Provenance record written next to every results CSV.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Manifest {
    pub library_version: String,
    pub cli_version: String,
    /// The effective root seed (after any `--seed` override).
    pub seed: u64,
    pub wall_time_seconds: f64,
    /// Results CSV file name, relative to the manifest's directory.
    pub results_file: String,
    /// The effective config; parsing it back reproduces the run.
    pub config: ConfigDoc,
}

impl Manifest {
    pub fn new(config: &ExperimentConfig, results_file: String, wall_time_seconds: f64) -> Self {
        Manifest {
            library_version: nonstat::VERSION.to_string(),
            cli_version: env!("CARGO_PKG_VERSION").to_string(),
            seed: config.seed,
            wall_time_seconds,
            results_file,
            config: ConfigDoc::from_config(config),
        }
    }
}
