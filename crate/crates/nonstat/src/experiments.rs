// SPDX-License-Identifier: MIT OR Apache-2.0

//! Config-driven Monte Carlo studies: quantile comparisons of the data
//! maximum against its Gaussian surrogates, confidence-band coverage,
//! change-point size and power, deviation tails, and the single-series
//! analysis pipeline.
//!
//! Every study flows all randomness from one root seed. Distinct sample
//! families (data draws, Gaussian paths, bootstrap draws) get sub-roots
//! derived as (seed, stage, family-index); replications within a family
//! then derive per-replication seeds through [`crate::parallel`], so
//! results are independent of thread count and identical across runs.

use crate::changepoint::{self, ChangePointResult};
use crate::deviation::{self, BandedQuadratic, TailStudy};
use crate::error::{Error, Result};
use crate::gaussian::{
    max_partial_sum, max_partial_sum_of, qq_discrepancy, CovarianceFactor,
    MaxStatisticSample, TwoSidedBmSampler,
};
use crate::models::{
    add_mean_shift, signal_plus_noise, theta_path, tvar_covariance,
    tvar_partial_variance, InnovationSpec, ThetaKind, TvarModel,
};
use crate::parallel;
use crate::rng::{self, derive_seed, stage};
use crate::scb::{self, BandResult, SCB_TRIM};
use crate::series::{default_block_length, uniform_grid, TimeSeries};
use crate::stats;
use crate::variance::{brv, brv_no_cross, overlapping_variance, VarianceTrack};

/// The study types the runner knows how to execute.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExperimentKind {
    QqTheoretical,
    QqBootstrap,
    ScbCoverage,
    ChangepointPower,
    DeviationTail,
    DataAnalysis,
}

impl ExperimentKind {
    pub fn from_name(name: &str) -> Result<Self> {
        match name {
            "qq_theoretical" => Ok(ExperimentKind::QqTheoretical),
            "qq_bootstrap" => Ok(ExperimentKind::QqBootstrap),
            "scb_coverage" => Ok(ExperimentKind::ScbCoverage),
            "changepoint_power" => Ok(ExperimentKind::ChangepointPower),
            "deviation_tail" => Ok(ExperimentKind::DeviationTail),
            "data_analysis" => Ok(ExperimentKind::DataAnalysis),
            other => Err(Error::invalid_input(format!(
                "unknown experiment '{other}' (expected qq_theoretical, \
                 qq_bootstrap, scb_coverage, changepoint_power, \
                 deviation_tail, or data_analysis)"
            ))),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            ExperimentKind::QqTheoretical => "qq_theoretical",
            ExperimentKind::QqBootstrap => "qq_bootstrap",
            ExperimentKind::ScbCoverage => "scb_coverage",
            ExperimentKind::ChangepointPower => "changepoint_power",
            ExperimentKind::DeviationTail => "deviation_tail",
            ExperimentKind::DataAnalysis => "data_analysis",
        }
    }
}

/// Declarative description of the error-generating process.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelConfig {
    pub theta_kind: ThetaKind,
    pub theta: f64,
    /// Innovation family name: "normal", "t<df>" (e.g. "t6"), or "chisq1".
    pub innovations: String,
    /// Apply x ↦ sin(x) to the autoregression before use.
    pub sine_transformed: bool,
}

impl ModelConfig {
    pub fn build(&self, n: usize) -> Result<TvarModel> {
        let path = theta_path(self.theta_kind, self.theta, n)?;
        let innovations = InnovationSpec::from_name(&self.innovations)?;
        Ok(if self.sine_transformed {
            TvarModel::sine_transformed(path, innovations)
        } else {
            TvarModel::new(path, innovations)
        })
    }
}

/// Full experiment description, typically parsed from a config file.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub experiment: ExperimentKind,
    pub model: ModelConfig,
    pub n: usize,
    /// Block length; `None` means the ⌊n^{1/3}⌋ default. The deviation
    /// study reads this as the band width D.
    pub m: Option<usize>,
    /// Bandwidths; one table row per entry for coverage studies.
    pub h: Vec<f64>,
    pub alpha: f64,
    pub reps: usize,
    pub bootstrap: usize,
    pub seed: u64,
    /// Output directory; consumed by the CLI layer, ignored here.
    pub output: Option<String>,
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::invalid_input("n must be positive"));
        }
        if self.reps == 0 {
            return Err(Error::invalid_input("reps must be positive"));
        }
        if self.bootstrap == 0 {
            return Err(Error::invalid_input("bootstrap must be positive"));
        }
        if let Some(m) = self.m {
            if m == 0 || m > self.n {
                return Err(Error::invalid_input(format!(
                    "m must satisfy 1 <= m <= n; got m={m}, n={}",
                    self.n
                )));
            }
        }
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(Error::invalid_input(format!(
                "alpha must lie in (0, 1); got {}",
                self.alpha
            )));
        }
        if self.experiment == ExperimentKind::ScbCoverage && self.h.is_empty() {
            return Err(Error::invalid_input(
                "scb_coverage needs at least one bandwidth in h",
            ));
        }
        for h in &self.h {
            if !(h.is_finite() && *h > 0.0) {
                return Err(Error::invalid_input(format!("bandwidth {h} must be positive")));
            }
        }
        Ok(())
    }

    pub fn block_length(&self) -> usize {
        self.m.unwrap_or_else(|| default_block_length(self.n))
    }
}

/// A rectangular numeric result table with named columns.
#[derive(Debug, Clone, PartialEq)]
pub struct ResultTable {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl ResultTable {
    pub fn new(columns: &[&str], rows: Vec<Vec<f64>>) -> Result<Self> {
        for row in &rows {
            if row.len() != columns.len() {
                return Err(Error::invalid_input(format!(
                    "row with {} entries in a {}-column table",
                    row.len(),
                    columns.len()
                )));
            }
        }
        Ok(ResultTable {
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows,
        })
    }

    /// Deterministic CSV rendering: identical inputs yield identical bytes.
    pub fn to_csv(&self) -> String {
        let mut out = self.columns.join(",");
        out.push('\n');
        for row in &self.rows {
            let mut first = true;
            for v in row {
                if !first {
                    out.push(',');
                }
                first = false;
                out.push_str(&format!("{v}"));
            }
            out.push('\n');
        }
        out
    }
}

/// The trend curve used by the coverage studies:
/// μ(t) = 0.5·cos(2πt − 0.7) + 0.3·e^{−t}.
pub fn cos_exp_trend(t: f64) -> f64 {
    0.5 * (2.0 * std::f64::consts::PI * t - 0.7).cos() + 0.3 * (-t).exp()
}

/// Quantile comparison of the data maximum against its two theoretical
/// Gaussian surrogates.
#[derive(Debug, Clone)]
pub struct QqTheoreticalStudy {
    pub q_grid: Vec<f64>,
    /// Quantiles of max partial sum of the simulated process.
    pub data_quantiles: Vec<f64>,
    /// Quantiles of a Brownian motion read along the exact variance track
    /// (independent-increment surrogate).
    pub bm_quantiles: Vec<f64>,
    /// Quantiles of the covariance-matched Gaussian surrogate.
    pub matched_quantiles: Vec<f64>,
    /// Max quantile gap data vs Brownian surrogate.
    pub bm_discrepancy: f64,
    /// Max quantile gap data vs covariance-matched surrogate.
    pub matched_discrepancy: f64,
}

fn sorted_quantiles(draws: &[f64], q_grid: &[f64]) -> Vec<f64> {
    let mut sorted = draws.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).expect("finite draws"));
    q_grid.iter().map(|&q| stats::quantile_sorted(&sorted, q)).collect()
}

/// Draw `reps` maxima of the process, of the track-indexed Brownian
/// surrogate, and of the covariance-matched surrogate, then compare their
/// quantiles.
pub fn qq_theoretical_study(
    model: &TvarModel,
    reps: usize,
    seed: u64,
) -> Result<QqTheoreticalStudy> {
    if model.sine_transformed {
        return Err(Error::invalid_input(
            "qq_theoretical needs the exact covariance, which is not \
             available in closed form for sine-transformed models",
        ));
    }
    if reps < 100 {
        return Err(Error::invalid_input(format!(
            "quantile comparison needs at least 100 replications; got {reps}"
        )));
    }
    let variance = model.innovations.variance();
    let track =
        VarianceTrack::from_exact(tvar_partial_variance(&model.path, variance))?;
    let factor = CovarianceFactor::new(&tvar_covariance(&model.path, variance)?)?;
    let sampler = TwoSidedBmSampler::new(&track);

    let data: Vec<f64> = parallel::replicate_map(
        reps,
        derive_seed(seed, stage::SIMULATE, 0),
        stage::REPLICATION,
        |_, d| max_partial_sum(&model.simulate(d)),
    );
    let bm: Vec<f64> = parallel::replicate_map(
        reps,
        derive_seed(seed, stage::GAUSSIAN_PATH, 0),
        stage::REPLICATION,
        |_, d| {
            let mut r = rng::raw_stream(d);
            sampler
                .sample(&mut r)
                .into_iter()
                .fold(f64::NEG_INFINITY, f64::max)
        },
    );
    let matched: Vec<f64> = parallel::replicate_map(
        reps,
        derive_seed(seed, stage::GAUSSIAN_PATH, 1),
        stage::REPLICATION,
        |_, d| {
            let mut r = rng::raw_stream(d);
            max_partial_sum_of(&factor.sample(&mut r))
        },
    );

    let q_grid = crate::gaussian::default_q_grid();
    let data_s = MaxStatisticSample::new(data.clone())?;
    let bm_s = MaxStatisticSample::new(bm.clone())?;
    let matched_s = MaxStatisticSample::new(matched.clone())?;
    Ok(QqTheoreticalStudy {
        data_quantiles: sorted_quantiles(&data, &q_grid),
        bm_quantiles: sorted_quantiles(&bm, &q_grid),
        matched_quantiles: sorted_quantiles(&matched, &q_grid),
        bm_discrepancy: qq_discrepancy(&data_s, &bm_s, &q_grid)?,
        matched_discrepancy: qq_discrepancy(&data_s, &matched_s, &q_grid)?,
        q_grid,
    })
}

/// Quantile comparison of the data maximum against bootstrap Brownian
/// surrogates driven by the three variance-track estimators, all fitted
/// on one typical draw.
#[derive(Debug, Clone)]
pub struct QqBootstrapStudy {
    pub q_grid: Vec<f64>,
    pub data_quantiles: Vec<f64>,
    pub brv_quantiles: Vec<f64>,
    pub no_cross_quantiles: Vec<f64>,
    pub overlapping_quantiles: Vec<f64>,
    pub brv_discrepancy: f64,
    pub no_cross_discrepancy: f64,
    pub overlapping_discrepancy: f64,
}

pub fn qq_bootstrap_study(
    model: &TvarModel,
    m: usize,
    reps: usize,
    bootstrap: usize,
    seed: u64,
) -> Result<QqBootstrapStudy> {
    if reps < 100 || bootstrap < 100 {
        return Err(Error::invalid_input(format!(
            "quantile comparison needs at least 100 draws per sample; got \
             reps={reps}, bootstrap={bootstrap}"
        )));
    }
    let data: Vec<f64> = parallel::replicate_map(
        reps,
        derive_seed(seed, stage::SIMULATE, 0),
        stage::REPLICATION,
        |_, d| max_partial_sum(&model.simulate(d)),
    );
    let typical = model.simulate(derive_seed(seed, stage::SIMULATE, 1));
    let tracks = [
        brv(&typical, m)?,
        brv_no_cross(&typical, m)?,
        overlapping_variance(&typical, m)?,
    ];
    let mut samples = Vec::with_capacity(3);
    for (family, track) in tracks.iter().enumerate() {
        let sampler = TwoSidedBmSampler::new(track);
        samples.push(parallel::replicate_map(
            bootstrap,
            derive_seed(seed, stage::BOOTSTRAP, family as u64),
            stage::REPLICATION,
            move |_, d| {
                let mut r = rng::raw_stream(d);
                sampler
                    .sample(&mut r)
                    .into_iter()
                    .fold(f64::NEG_INFINITY, f64::max)
            },
        ));
    }
    let q_grid = crate::gaussian::default_q_grid();
    let data_s = MaxStatisticSample::new(data.clone())?;
    let wrapped: Vec<MaxStatisticSample> = samples
        .iter()
        .map(|s| MaxStatisticSample::new(s.clone()))
        .collect::<Result<_>>()?;
    Ok(QqBootstrapStudy {
        data_quantiles: sorted_quantiles(&data, &q_grid),
        brv_quantiles: sorted_quantiles(&samples[0], &q_grid),
        no_cross_quantiles: sorted_quantiles(&samples[1], &q_grid),
        overlapping_quantiles: sorted_quantiles(&samples[2], &q_grid),
        brv_discrepancy: qq_discrepancy(&data_s, &wrapped[0], &q_grid)?,
        no_cross_discrepancy: qq_discrepancy(&data_s, &wrapped[1], &q_grid)?,
        overlapping_discrepancy: qq_discrepancy(&data_s, &wrapped[2], &q_grid)?,
        q_grid,
    })
}

/// Empirical coverage of the simultaneous band over replications.
#[derive(Debug, Clone, Copy)]
pub struct CoverageStudy {
    pub coverage: f64,
    pub se: f64,
    pub mean_half_width: f64,
}

/// Simulate trend-plus-noise data, build a band per replication, and
/// record how often the band contains the true trend over the trimmed
/// window.
pub fn scb_coverage_study(
    model: &TvarModel,
    trend: impl Fn(f64) -> f64 + Sync,
    h: f64,
    m: usize,
    alpha: f64,
    reps: usize,
    bootstrap: usize,
    seed: u64,
) -> Result<CoverageStudy> {
    if reps == 0 {
        return Err(Error::invalid_input("coverage study needs reps >= 1"));
    }
    let grid = uniform_grid(model.n());
    let outcomes: Vec<Result<(bool, f64)>> = parallel::replicate_map(
        reps,
        derive_seed(seed, stage::SIMULATE, 0),
        stage::REPLICATION,
        |_, d| {
            let noise = model.simulate(d);
            let x = signal_plus_noise(&trend, &grid, &noise)?;
            let band = scb::scb_build(&x, h, m, alpha, bootstrap, d)?;
            Ok((scb::band_contains(&band, &trend, SCB_TRIM), band.half_width))
        },
    );
    let mut hits = 0usize;
    let mut width_sum = 0.0;
    for outcome in outcomes {
        let (contained, width) = outcome?;
        hits += contained as usize;
        width_sum += width;
    }
    let coverage = hits as f64 / reps as f64;
    Ok(CoverageStudy {
        coverage,
        se: stats::proportion_se(coverage, reps),
        mean_half_width: width_sum / reps as f64,
    })
}

/// Rejection rates of the oracle change-point test across shift sizes.
#[derive(Debug, Clone)]
pub struct PowerStudy {
    /// Critical value from the exact-track null simulation.
    pub cutoff: f64,
    pub degenerate: bool,
    pub deltas: Vec<f64>,
    pub rates: Vec<f64>,
    pub ses: Vec<f64>,
}

/// The shift grid of the power tables: 0 (size) then 0.1 … 1.0.
pub fn default_delta_grid() -> Vec<f64> {
    (0..=10).map(|k| k as f64 / 10.0).collect()
}

/// Size-and-power study of the oracle test: the critical value comes from
/// the exact null variance track, and each shift size reuses the same
/// noise replications so power is comparable across shifts.
pub fn power_study(
    model: &TvarModel,
    alpha: f64,
    reps: usize,
    cutoff_draws: usize,
    deltas: &[f64],
    seed: u64,
) -> Result<PowerStudy> {
    if model.sine_transformed {
        return Err(Error::invalid_input(
            "power_study uses the exact autoregressive variance track, \
             which is not available for sine-transformed models",
        ));
    }
    if deltas.is_empty() {
        return Err(Error::invalid_input("power study needs at least one shift size"));
    }
    if let Some(bad) = deltas.iter().find(|d| !(d.is_finite() && **d >= 0.0)) {
        return Err(Error::invalid_input(format!(
            "shift sizes must be nonnegative; found {bad}"
        )));
    }
    let n = model.n();
    if n < 4 {
        return Err(Error::invalid_input(format!("power study needs n >= 4; got {n}")));
    }
    if reps == 0 {
        return Err(Error::invalid_input("power study needs reps >= 1"));
    }
    let track = VarianceTrack::from_exact(tvar_partial_variance(
        &model.path,
        model.innovations.variance(),
    ))?;
    let estimate = changepoint::cutoff_from_track(
        &track,
        alpha,
        cutoff_draws,
        derive_seed(seed, stage::GAUSSIAN_PATH, 0),
    )?;
    let cutoff = estimate.cutoff;

    let tau = n / 2;
    let noise_root = derive_seed(seed, stage::SIMULATE, 0);
    let mut rates = Vec::with_capacity(deltas.len());
    let mut ses = Vec::with_capacity(deltas.len());
    for &delta in deltas {
        let rejections: Vec<Result<bool>> =
            parallel::replicate_map(reps, noise_root, stage::REPLICATION, |_, d| {
                let noise = model.simulate(d);
                let shifted = add_mean_shift(&noise, delta, tau)?;
                let (statistic, _) = changepoint::cusum(&shifted)?;
                Ok(statistic > cutoff)
            });
        let mut hits = 0usize;
        for r in rejections {
            hits += r? as usize;
        }
        let rate = hits as f64 / reps as f64;
        rates.push(rate);
        ses.push(stats::proportion_se(rate, reps));
    }
    Ok(PowerStudy {
        cutoff,
        degenerate: estimate.degenerate,
        deltas: deltas.to_vec(),
        rates,
        ses,
    })
}

/// Geometric threshold grid spanning the central-to-extreme range of
/// observed maxima: from their median to their 99.5th percentile.
pub fn default_tail_grid(maxima: &[f64], points: usize) -> Result<Vec<f64>> {
    if points < 2 {
        return Err(Error::invalid_input("tail grid needs at least 2 points"));
    }
    let lo = stats::quantile(maxima, 0.5)?;
    let hi = stats::quantile(maxima, 0.995)?;
    if !(lo > 0.0 && hi > lo) {
        return Err(Error::numerical(format!(
            "cannot span a tail grid over maxima with median {lo} and upper \
             quantile {hi}"
        )));
    }
    let ratio = (hi / lo).powf(1.0 / (points - 1) as f64);
    Ok((0..points).map(|k| lo * ratio.powi(k as i32)).collect())
}

/// Tail study with an automatically chosen threshold grid.
pub fn deviation_tail_experiment(
    model: &TvarModel,
    band: usize,
    reps: usize,
    grid_points: usize,
    seed: u64,
) -> Result<TailStudy> {
    let q = BandedQuadratic::constant_band(model.n(), band)?;
    let pilot = deviation::tail_study(model, &q, &[1.0], reps, seed)?;
    let x_grid = default_tail_grid(&pilot.maxima, grid_points)?;
    let tail = deviation::tail_from_maxima(&pilot.maxima, &x_grid)?;
    Ok(TailStudy { x_grid, tail, maxima: pilot.maxima, block_means: pilot.block_means })
}

/// Least-squares slope of log(tail) against log(x) over the upper half of
/// the positive-tail grid points.
pub fn log_log_slope(x_grid: &[f64], tail: &[f64]) -> Result<f64> {
    if x_grid.len() != tail.len() {
        return Err(Error::invalid_input("grid and tail lengths differ"));
    }
    let positive: Vec<(f64, f64)> = x_grid
        .iter()
        .zip(tail)
        .filter(|(_, t)| **t > 0.0)
        .map(|(x, t)| (x.ln(), t.ln()))
        .collect();
    let upper = &positive[positive.len() / 2..];
    if upper.len() < 3 {
        return Err(Error::data(format!(
            "only {} positive tail points in the upper half; need >= 3",
            upper.len()
        )));
    }
    let xs: Vec<f64> = upper.iter().map(|p| p.0).collect();
    let ys: Vec<f64> = upper.iter().map(|p| p.1).collect();
    stats::ls_slope(&xs, &ys)
}

/// One-sided envelope check: anchor C·x^{−p/2} at the first positive tail
/// point and verify no later point rises above it.
pub fn anchored_envelope_holds(x_grid: &[f64], tail: &[f64], p: f64) -> Result<bool> {
    if x_grid.len() != tail.len() {
        return Err(Error::invalid_input("grid and tail lengths differ"));
    }
    let anchor = x_grid
        .iter()
        .zip(tail)
        .find(|(_, t)| **t > 0.0)
        .ok_or_else(|| Error::data("no positive tail points to anchor the envelope"))?;
    let c = anchor.1 * anchor.0.powf(p / 2.0);
    Ok(x_grid
        .iter()
        .zip(tail)
        .all(|(x, t)| *t <= c * x.powf(-p / 2.0) * (1.0 + 1e-12)))
}

/// Fitted harmonic trend and whether the band rejects it.
#[derive(Debug, Clone)]
pub struct HarmonicFit {
    /// (slope, a₁, b₁, …) as returned by the trend fitter.
    pub coefficients: Vec<f64>,
    /// Periods in grid units.
    pub periods: Vec<f64>,
    /// True when the fitted curve exits the simultaneous band somewhere
    /// on the trimmed window.
    pub rejected: bool,
}

/// Output of the single-series pipeline: change-point test, simultaneous
/// band, residuals, and optional harmonic-trend assessment.
#[derive(Debug, Clone)]
pub struct AnalysisReport {
    pub changepoint: ChangePointResult,
    pub band: BandResult,
    /// Data minus the bias-corrected trend fit, on the full grid.
    pub residuals: Vec<f64>,
    pub harmonic: Option<HarmonicFit>,
}

/// Run the full analysis pipeline on one observed series.
pub fn analyze_series(
    x: &TimeSeries,
    m: usize,
    h: f64,
    alpha: f64,
    bootstrap: usize,
    periods: &[f64],
    seed: u64,
) -> Result<AnalysisReport> {
    if x.n() < 50 {
        return Err(Error::data(format!(
            "analysis needs at least 50 observations; got {}",
            x.n()
        )));
    }
    if (x.n() as f64) * h < 10.0 {
        return Err(Error::invalid_input(format!(
            "bandwidth window n·h = {} is too small to smooth over",
            x.n() as f64 * h
        )));
    }
    let changepoint = changepoint::changepoint_test(
        x,
        m,
        alpha,
        bootstrap,
        derive_seed(seed, stage::BOOTSTRAP, 0),
    )?;
    let band = scb::scb_build(
        x,
        h,
        m,
        alpha,
        bootstrap,
        derive_seed(seed, stage::BOOTSTRAP, 1),
    )?;
    let grid = x.grid_or_uniform();
    let fit_full = scb::jackknife_fit(x, h, &grid)?;
    let residuals: Vec<f64> = x
        .values()
        .iter()
        .zip(&fit_full)
        .map(|(v, f)| v - f)
        .collect();
    let harmonic = if periods.is_empty() {
        None
    } else {
        let gridded = TimeSeries::with_grid(x.values().to_vec(), grid.clone())?;
        let coefficients = scb::fit_harmonic_trend(&gridded, periods)?;
        let curve = |t: f64| scb::harmonic_eval(&coefficients, periods, t);
        let rejected = !scb::band_contains(&band, curve, SCB_TRIM);
        Some(HarmonicFit { coefficients, periods: periods.to_vec(), rejected })
    };
    Ok(AnalysisReport { changepoint, band, residuals, harmonic })
}

/// Execute a config-described experiment and return its result table.
///
/// `data_analysis` configs are rejected here: that workflow needs an
/// input series and runs through [`analyze_series`].
pub fn run_experiment(config: &ExperimentConfig) -> Result<ResultTable> {
    config.validate()?;
    let m = config.block_length();
    match config.experiment {
        ExperimentKind::QqTheoretical => {
            let model = config.model.build(config.n)?;
            let study = qq_theoretical_study(&model, config.reps, config.seed)?;
            let rows = study
                .q_grid
                .iter()
                .enumerate()
                .map(|(i, q)| {
                    vec![
                        *q,
                        study.data_quantiles[i],
                        study.bm_quantiles[i],
                        study.matched_quantiles[i],
                    ]
                })
                .collect();
            ResultTable::new(&["q", "u_x", "u_1", "u_2"], rows)
        }
        ExperimentKind::QqBootstrap => {
            let model = config.model.build(config.n)?;
            let study = qq_bootstrap_study(
                &model,
                m,
                config.reps,
                config.bootstrap,
                config.seed,
            )?;
            let rows = study
                .q_grid
                .iter()
                .enumerate()
                .map(|(i, q)| {
                    vec![
                        *q,
                        study.data_quantiles[i],
                        study.brv_quantiles[i],
                        study.no_cross_quantiles[i],
                        study.overlapping_quantiles[i],
                    ]
                })
                .collect();
            ResultTable::new(&["q", "u_x", "u_brv", "u_no_cross", "u_overlapping"], rows)
        }
        ExperimentKind::ScbCoverage => {
            let model = config.model.build(config.n)?;
            let mut rows = Vec::with_capacity(config.h.len());
            for (cell, &h) in config.h.iter().enumerate() {
                let cell_seed = derive_seed(config.seed, stage::REPLICATION, cell as u64);
                let study = scb_coverage_study(
                    &model,
                    cos_exp_trend,
                    h,
                    m,
                    config.alpha,
                    config.reps,
                    config.bootstrap,
                    cell_seed,
                )?;
                rows.push(vec![
                    config.n as f64,
                    h,
                    config.model.theta,
                    study.coverage,
                    study.se,
                    study.mean_half_width,
                ]);
            }
            ResultTable::new(
                &["n", "h", "theta", "coverage", "se", "mean_half_width"],
                rows,
            )
        }
        ExperimentKind::ChangepointPower => {
            let model = config.model.build(config.n)?;
            let study = power_study(
                &model,
                config.alpha,
                config.reps,
                config.bootstrap,
                &default_delta_grid(),
                config.seed,
            )?;
            let rows = study
                .deltas
                .iter()
                .enumerate()
                .map(|(i, d)| vec![*d, study.rates[i], study.ses[i], study.cutoff])
                .collect();
            ResultTable::new(&["delta", "rejection_rate", "se", "cutoff"], rows)
        }
        ExperimentKind::DeviationTail => {
            let model = config.model.build(config.n)?;
            let study = deviation_tail_experiment(
                &model,
                m,
                config.reps,
                12,
                config.seed,
            )?;
            let rows = study
                .x_grid
                .iter()
                .enumerate()
                .map(|(i, x)| {
                    vec![
                        *x,
                        study.tail[i],
                        stats::proportion_se(study.tail[i], study.maxima.len()),
                    ]
                })
                .collect();
            ResultTable::new(&["x", "tail", "se"], rows)
        }
        ExperimentKind::DataAnalysis => Err(Error::invalid_input(
            "data_analysis reads an input series; run it through the \
             analyze entry point instead of the experiment runner",
        )),
    }
}
