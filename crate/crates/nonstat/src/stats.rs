// SPDX-License-Identifier: MIT OR Apache-2.0

//! Small shared statistics helpers.

use crate::error::{Error, Result};

/// Empirical quantile with linear interpolation between order statistics
/// (the common "type 7" convention). One convention is used everywhere in
/// this crate — bootstrap cutoffs, band half-widths, quantile
/// discrepancies — so results are comparable across modules.
///
/// `q` must lie in [0, 1]; `data` need not be sorted.
pub fn quantile(data: &[f64], q: f64) -> Result<f64> {
    if data.is_empty() {
        return Err(Error::invalid_input("quantile of an empty sample"));
    }
    if !(0.0..=1.0).contains(&q) {
        return Err(Error::invalid_input(format!(
            "quantile level must be in [0,1]; got q={q}"
        )));
    }
    let mut sorted = data.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).expect("non-finite value in quantile input"));
    Ok(quantile_sorted(&sorted, q))
}

/// As [`quantile`] but assumes `sorted` is already ascending.
pub fn quantile_sorted(sorted: &[f64], q: f64) -> f64 {
    let n = sorted.len();
    debug_assert!(n > 0);
    if n == 1 {
        return sorted[0];
    }
    let pos = q * (n - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    if lo == hi {
        sorted[lo]
    } else {
        let w = pos - lo as f64;
        sorted[lo] * (1.0 - w) + sorted[hi] * w
    }
}

pub fn mean(data: &[f64]) -> f64 {
    if data.is_empty() {
        return f64::NAN;
    }
    data.iter().sum::<f64>() / data.len() as f64
}

pub fn median(data: &[f64]) -> Result<f64> {
    quantile(data, 0.5)
}

/// Sample variance with the 1/(n-1) normalization.
pub fn sample_variance(data: &[f64]) -> f64 {
    let n = data.len();
    if n < 2 {
        return f64::NAN;
    }
    let m = mean(data);
    data.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (n - 1) as f64
}

/// Standard error of an empirical proportion `p` from `n` trials.
pub fn proportion_se(p: f64, n: usize) -> f64 {
    if n == 0 {
        return f64::NAN;
    }
    (p * (1.0 - p) / n as f64).sqrt()
}

/// Two-sample Kolmogorov–Smirnov distance between empirical distributions.
pub fn ks_distance(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::invalid_input("ks_distance requires non-empty samples"));
    }
    let mut sa = a.to_vec();
    let mut sb = b.to_vec();
    sa.sort_by(|x, y| x.partial_cmp(y).expect("non-finite value in ks input"));
    sb.sort_by(|x, y| x.partial_cmp(y).expect("non-finite value in ks input"));
    let (na, nb) = (sa.len() as f64, sb.len() as f64);
    let (mut i, mut j) = (0usize, 0usize);
    let mut d: f64 = 0.0;
    while i < sa.len() && j < sb.len() {
        // Consume every copy of the current value from both samples before
        // comparing the empirical CDFs, so ties never inflate the distance.
        let v = sa[i].min(sb[j]);
        while i < sa.len() && sa[i] == v {
            i += 1;
        }
        while j < sb.len() && sb[j] == v {
            j += 1;
        }
        d = d.max((i as f64 / na - j as f64 / nb).abs());
    }
    Ok(d)
}

/// One-sample Kolmogorov–Smirnov distance from the uniform law on [0,1].
pub fn ks_distance_uniform(a: &[f64]) -> Result<f64> {
    if a.is_empty() {
        return Err(Error::invalid_input("ks_distance_uniform requires a non-empty sample"));
    }
    let mut s = a.to_vec();
    s.sort_by(|x, y| x.partial_cmp(y).expect("non-finite value in ks input"));
    let n = s.len() as f64;
    let mut d: f64 = 0.0;
    for (i, &x) in s.iter().enumerate() {
        let hi = (i + 1) as f64 / n - x;
        let lo = x - i as f64 / n;
        d = d.max(hi.max(lo));
    }
    Ok(d)
}

/// Ordinary least squares slope of `y` on `x`.
pub fn ls_slope(x: &[f64], y: &[f64]) -> Result<f64> {
    if x.len() != y.len() || x.len() < 2 {
        return Err(Error::invalid_input(format!(
            "ls_slope needs two equal-length samples of size >= 2; got {} and {}",
            x.len(),
            y.len()
        )));
    }
    let mx = mean(x);
    let my = mean(y);
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    for (&xi, &yi) in x.iter().zip(y) {
        sxx += (xi - mx) * (xi - mx);
        sxy += (xi - mx) * (yi - my);
    }
    if sxx <= 0.0 {
        return Err(Error::numerical("ls_slope: degenerate x sample"));
    }
    Ok(sxy / sxx)
}
