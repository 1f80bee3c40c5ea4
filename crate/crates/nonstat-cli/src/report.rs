// SPDX-License-Identifier: MIT OR Apache-2.0

//! JSON report for the single-series analysis pipeline.
//!
//! The report is fully deterministic given the input file and seed, so
//! re-running `analyze` prints byte-identical output. Band arrays are
//! reported on the input file's own time axis; the `settings` block
//! records every knob needed to reproduce the run.

use serde::{Deserialize, Serialize};

use nonstat::experiments::AnalysisReport;

use crate::input::SeriesInput;

/// Echo of the analyze invocation.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AnalyzeSettings {
    pub m: usize,
    pub h: f64,
    pub alpha: f64,
    pub bootstrap: usize,
    pub seed: u64,
    /// Harmonic periods in the input file's time units (empty = no fit).
    pub periods: Vec<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ChangePointReport {
    /// Scaled maximal centered partial sum of the observations.
    pub statistic: f64,
    /// 1-based location of the maximal deviation.
    pub tau_hat: usize,
    /// Location of the maximal deviation on the file's time axis.
    pub tau_time: f64,
    /// Bootstrap critical value at the requested level.
    pub cutoff: f64,
    /// Add-one bootstrap p-value in (0, 1].
    pub p_value: f64,
    pub reject: bool,
    pub bootstrap_draws: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BandReport {
    /// Evaluation points on the file's time axis (trimmed window only).
    pub t: Vec<f64>,
    /// Bias-corrected trend estimate at `t`.
    pub mu_tilde: Vec<f64>,
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
    pub half_width: f64,
    /// Trimmed window on the unit design interval.
    pub trim: (f64, f64),
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct HarmonicReport {
    /// (slope, a1, b1, a2, b2, ...) for the linear-plus-harmonics trend
    /// on the unit design interval.
    pub coefficients: Vec<f64>,
    /// Periods as given on the command line (file time units).
    pub periods: Vec<f64>,
    /// True when the fitted curve exits the simultaneous band somewhere
    /// on the trimmed window.
    pub rejected: bool,
}

/// Everything `analyze` reports, serialized as JSON.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Report {
    pub n: usize,
    pub settings: AnalyzeSettings,
    pub changepoint: ChangePointReport,
    pub band: BandReport,
    /// Observation minus fitted trend, one entry per input row.
    pub residuals: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub harmonic: Option<HarmonicReport>,
    /// Human-readable caveats (degenerate input, bandwidth guidance).
    pub warnings: Vec<String>,
}

/// Assemble the report from the library's analysis output.
pub fn build_report(
    analysis: &AnalysisReport,
    input: &SeriesInput,
    settings: AnalyzeSettings,
) -> Report {
    let cp = &analysis.changepoint;
    let band = &analysis.band;
    let n = input.values.len();

    let mut warnings = Vec::new();
    if cp.degenerate {
        warnings.push(
            "residuals have zero running variance (constant input?); the null \
             bootstrap is degenerate and the p-value is reported as 1"
                .to_string(),
        );
    }
    if let Some(w) = &band.bandwidth_warning {
        warnings.push(w.clone());
    }

    // tau_hat indexes observations 1..n; grid[tau_hat - 1] is its design
    // point, mapped back to the file's time axis.
    let tau_time = input.time_at(input.grid[cp.tau_hat - 1]);

    Report {
        n,
        changepoint: ChangePointReport {
            statistic: cp.statistic,
            tau_hat: cp.tau_hat,
            tau_time,
            cutoff: cp.cutoff,
            p_value: cp.p_value,
            reject: cp.reject,
            bootstrap_draws: cp.bootstrap_draws,
        },
        band: BandReport {
            t: band.t_eval.iter().map(|&g| input.time_at(g)).collect(),
            mu_tilde: band.mu_tilde.clone(),
            lower: band.mu_tilde.iter().map(|m| m - band.half_width).collect(),
            upper: band.mu_tilde.iter().map(|m| m + band.half_width).collect(),
            half_width: band.half_width,
            trim: band.trim,
        },
        residuals: analysis.residuals.clone(),
        harmonic: analysis.harmonic.as_ref().map(|fit| HarmonicReport {
            coefficients: fit.coefficients.clone(),
            periods: settings.periods.clone(),
            rejected: fit.rejected,
        }),
        settings,
        warnings,
    }
}
