// SPDX-License-Identifier: MIT OR Apache-2.0

//! CUSUM test for a single mean shift with bootstrap critical values that
//! remain valid when the noise is non-stationary.
//!
//! The statistic is the maximal absolute centered partial sum, scaled by
//! √n. Its null distribution is approximated by the maximum of a Brownian
//! bridge evaluated along a running-variance track estimated from the
//! residuals: under stationarity this collapses to the classical
//! Kolmogorov limit, and under non-stationarity the track carries the
//! time-varying scale into the critical value.

use crate::error::{Error, Result};
use crate::gaussian::TwoSidedBmSampler;
use crate::parallel;
use crate::rng::{self, stage};
use crate::series::TimeSeries;
use crate::stats;
use crate::variance::{brv, VarianceTrack};

/// Outcome of one change-point test.
#[derive(Debug, Clone, PartialEq)]
pub struct ChangePointResult {
    /// Uₙ, the scaled maximal centered partial sum.
    pub statistic: f64,
    /// 1-based location of the maximum (smallest index on ties).
    pub tau_hat: usize,
    /// Bootstrap critical value at the requested level.
    pub cutoff: f64,
    /// Add-one bootstrap p-value in (0, 1].
    pub p_value: f64,
    /// statistic > cutoff.
    pub reject: bool,
    /// Number of bootstrap draws behind cutoff and p_value.
    pub bootstrap_draws: usize,
    /// The residual series was identically zero, so the null draws are
    /// degenerate and cutoff is 0.
    pub degenerate: bool,
}

/// Uₙ = max_{i=1..n−1} |Σ_{j≤i}(xⱼ − x̄)|/√n and the 1-based argmax
/// (smallest index on ties).
pub fn cusum(x: &TimeSeries) -> Result<(f64, usize)> {
    let n = x.n();
    if n < 2 {
        return Err(Error::invalid_input(format!(
            "change-point statistic needs n >= 2; got n={n}"
        )));
    }
    let mean = stats::mean(x.values());
    let scale = (n as f64).sqrt();
    let mut running = 0.0;
    let mut best = f64::NEG_INFINITY;
    let mut tau_hat = 1;
    for (idx, v) in x.values()[..n - 1].iter().enumerate() {
        running += v - mean;
        let stat = running.abs();
        if stat > best {
            best = stat;
            tau_hat = idx + 1;
        }
    }
    Ok((best / scale, tau_hat))
}

/// Subtract the two segment means around a split at `tau` (1-based,
/// 1 ≤ tau < n).
pub fn residualize(x: &TimeSeries, tau: usize) -> Result<TimeSeries> {
    let n = x.n();
    if tau == 0 || tau >= n {
        return Err(Error::invalid_input(format!(
            "split must satisfy 1 <= tau < n={n}; got tau={tau}"
        )));
    }
    let head_mean = stats::mean(&x.values()[..tau]);
    let tail_mean = stats::mean(&x.values()[tau..]);
    let values = x
        .values()
        .iter()
        .enumerate()
        .map(|(idx, v)| v - if idx < tau { head_mean } else { tail_mean })
        .collect();
    x.with_replaced_values(values)
}

/// B draws of the null statistic V = maxᵢ |𝕎(𝒯ᵢ) − (i/n)·𝕎(𝒯ₙ)|/√n for a
/// given variance track. Draws are independent given derived seeds and
/// independent of evaluation order.
pub fn null_max_draws(track: &VarianceTrack, b: usize, seed: u64) -> Vec<f64> {
    let sampler = TwoSidedBmSampler::new(track);
    let n = track.n();
    let scale = (n as f64).sqrt();
    parallel::replicate_map(b, seed, stage::BOOTSTRAP, move |_, derived| {
        let mut rng = rng::raw_stream(derived);
        let w = sampler.sample(&mut rng);
        let end = w[n - 1];
        let mut best = 0.0f64;
        for (idx, wi) in w.iter().enumerate() {
            let bridge = (wi - (idx + 1) as f64 / n as f64 * end).abs();
            best = best.max(bridge);
        }
        best / scale
    })
}

/// A critical value plus a degeneracy warning.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CutoffEstimate {
    pub cutoff: f64,
    /// True when the track was identically zero (all null draws are 0).
    pub degenerate: bool,
}

fn check_level_and_draws(alpha: f64, b: usize) -> Result<()> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::invalid_input(format!(
            "level must satisfy 0 < alpha < 1; got alpha={alpha}"
        )));
    }
    if b < 100 {
        return Err(Error::invalid_input(format!(
            "at least 100 bootstrap draws required; got {b}"
        )));
    }
    Ok(())
}

/// (1−alpha) quantile of the null draws for an arbitrary variance track —
/// the oracle path when the track is exact, the bootstrap path when it is
/// estimated.
pub fn cutoff_from_track(
    track: &VarianceTrack,
    alpha: f64,
    b: usize,
    seed: u64,
) -> Result<CutoffEstimate> {
    check_level_and_draws(alpha, b)?;
    let degenerate = track.values().iter().all(|&v| v == 0.0);
    if degenerate {
        return Ok(CutoffEstimate { cutoff: 0.0, degenerate: true });
    }
    let draws = null_max_draws(track, b, seed);
    Ok(CutoffEstimate {
        cutoff: stats::quantile(&draws, 1.0 - alpha)?,
        degenerate: false,
    })
}

/// Bootstrap critical value from residuals: estimate the variance track by
/// the block-based running variance with block length m, then take the
/// (1−alpha) quantile of the null draws.
pub fn bootstrap_cutoff(
    residuals: &TimeSeries,
    m: usize,
    alpha: f64,
    b: usize,
    seed: u64,
) -> Result<CutoffEstimate> {
    let track = brv(residuals, m)?;
    cutoff_from_track(&track, alpha, b, seed)
}

/// Full test: CUSUM statistic, residualization at the estimated split,
/// bootstrap critical value, decision, and add-one p-value.
pub fn changepoint_test(
    x: &TimeSeries,
    m: usize,
    alpha: f64,
    b: usize,
    seed: u64,
) -> Result<ChangePointResult> {
    check_level_and_draws(alpha, b)?;
    let (statistic, tau_hat) = cusum(x)?;
    let residuals = residualize(x, tau_hat)?;
    let track = brv(&residuals, m)?;
    let degenerate = track.values().iter().all(|&v| v == 0.0);
    let draws = if degenerate {
        vec![0.0; b]
    } else {
        null_max_draws(&track, b, seed)
    };
    let cutoff = stats::quantile(&draws, 1.0 - alpha)?;
    let exceed = draws.iter().filter(|d| **d >= statistic).count();
    let p_value = (1 + exceed) as f64 / (b + 1) as f64;
    let reject = statistic > cutoff;
    Ok(ChangePointResult {
        statistic,
        tau_hat,
        cutoff,
        p_value,
        reject,
        bootstrap_draws: b,
        degenerate,
    })
}
