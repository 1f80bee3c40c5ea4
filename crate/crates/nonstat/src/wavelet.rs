// SPDX-License-Identifier: MIT OR Apache-2.0

//! Haar wavelet coefficients of a series and of its Gaussian analogue.
//!
//! At level j the series is cut into blocks of 2^j consecutive points;
//! the coefficient of a block is 2^{−j/2}·(sum of its first half − sum of
//! its second half). Because each coefficient is a short weighted partial
//! sum, the Gaussian coupling for partial sums transfers to the whole
//! coefficient array at once, with an error that shrinks like 2^{−j/2} as
//! the level grows.

use crate::error::{Error, Result};
use crate::gaussian::TwoSidedBmSampler;
use crate::rng::{self, stage};
use crate::variance::VarianceTrack;

/// 2^{−j/2}, the Haar filter amplitude at level j.
pub(crate) fn haar_amplitude(j: u32) -> f64 {
    let half_steps = 2f64.powi(-((j / 2) as i32));
    if j % 2 == 1 {
        half_steps * std::f64::consts::FRAC_1_SQRT_2
    } else {
        half_steps
    }
}

/// The Haar filter at one level.
///
/// `filter()[l-1]` multiplies the observation l−1 steps before the block
/// end: −2^{−j/2} on the second half of the block (l ≤ 2^{j−1}), +2^{−j/2}
/// on the first half.
#[derive(Debug, Clone)]
pub struct HaarLevel {
    j: u32,
    filter: Vec<f64>,
}

impl HaarLevel {
    pub fn new(j: u32) -> Result<HaarLevel> {
        if j == 0 {
            return Err(Error::invalid_input("haar level must be at least 1"));
        }
        if j >= usize::BITS {
            return Err(Error::invalid_input(format!(
                "haar level {j} is too large to index"
            )));
        }
        let width = 1usize << j;
        let amp = haar_amplitude(j);
        let filter = (1..=width)
            .map(|l| if l <= width / 2 { -amp } else { amp })
            .collect();
        Ok(HaarLevel { j, filter })
    }

    pub fn j(&self) -> u32 {
        self.j
    }

    /// Block width 2^j.
    pub fn width(&self) -> usize {
        1usize << self.j
    }

    pub fn amplitude(&self) -> f64 {
        haar_amplitude(self.j)
    }

    pub fn filter(&self) -> &[f64] {
        &self.filter
    }
}

fn check_dyadic(n: usize, j: u32) -> Result<usize> {
    if n < 2 || !n.is_power_of_two() {
        return Err(Error::invalid_input(format!(
            "haar analysis needs a power-of-two length; got n={n}"
        )));
    }
    let level = HaarLevel::new(j)?;
    if level.width() > n {
        return Err(Error::invalid_input(format!(
            "haar level {j} needs at least 2^{j} points but n={n}"
        )));
    }
    Ok(level.width())
}

/// All coefficients W_{j,t}, t = 1..n/2^j, at one level.
pub fn haar_coefficients(x: &[f64], j: u32) -> Result<Vec<f64>> {
    let width = check_dyadic(x.len(), j)?;
    let amp = haar_amplitude(j);
    let half = width / 2;
    Ok(x.chunks_exact(width)
        .map(|block| {
            let mut acc = 0.0;
            for v in &block[..half] {
                acc += amp * v;
            }
            for v in &block[half..] {
                acc -= amp * v;
            }
            acc
        })
        .collect())
}

/// Coefficients of the Gaussian analogue: the increments of a two-sided
/// Brownian motion read along the variance track, passed through the same
/// Haar filter.
pub fn haar_gaussian_analogue(track: &VarianceTrack, j: u32, seed: u64) -> Result<Vec<f64>> {
    check_dyadic(track.n(), j)?;
    let sampler = TwoSidedBmSampler::new(track);
    let mut rng = rng::stream(seed, stage::GAUSSIAN_PATH, 0);
    let path = sampler.sample(&mut rng);
    let mut increments = Vec::with_capacity(path.len());
    let mut prev = 0.0;
    for w in path {
        increments.push(w - prev);
        prev = w;
    }
    haar_coefficients(&increments, j)
}

/// Smallest level at which the coefficient-array coupling result starts
/// to apply: the least integer strictly greater than
/// (2/ln 2)·(ln(n)/p + ln(ln n)/2).
pub fn min_resolution(n: usize, p: f64) -> Result<u32> {
    if n < 4 {
        return Err(Error::invalid_input(format!(
            "minimum resolution needs n >= 4; got {n}"
        )));
    }
    if !(p > 2.0) {
        return Err(Error::invalid_input(format!(
            "minimum resolution needs a moment order p > 2; got {p}"
        )));
    }
    let nf = n as f64;
    let threshold = 2.0 / std::f64::consts::LN_2 * (nf.ln() / p + nf.ln().ln() / 2.0);
    Ok(threshold.floor() as u32 + 1)
}
