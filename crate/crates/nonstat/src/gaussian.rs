// SPDX-License-Identifier: MIT OR Apache-2.0

//! Explicit Gaussian processes that approximate the partial-sum process of
//! a non-stationary sequence.
//!
//! Two constructions are provided:
//! - Brownian motion evaluated along a variance track ([`sample_bm_at`]),
//!   with a two-sided variant ([`sample_two_sided_bm_at`]) for estimated
//!   tracks that may be negative or non-monotone;
//! - a Gaussian vector matching a target covariance exactly
//!   ([`covariance_matching_sample`]), realized through a triangular
//!   factorization.
//!
//! Both are deterministic given a seed. [`max_partial_sum`] and
//! [`qq_discrepancy`] support distribution comparisons between the
//! original process and its Gaussian analogues.

use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::linalg::{self, LowerTriangular};
use crate::models::CovarianceOracle;
use crate::rng::{self, stage};
use crate::series::{partial_sums, TimeSeries};
use crate::stats;
use crate::variance::VarianceTrack;

/// Which construction produced a Gaussian path.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GaussianSource {
    BmAtTrack,
    TwoSidedBmAtTrack,
    CovarianceMatching,
}

/// One realization of an approximating Gaussian path, aligned with the
/// indices of the series it approximates.
#[derive(Debug, Clone)]
pub struct GaussianPathSample {
    values: Vec<f64>,
    source: GaussianSource,
}

impl GaussianPathSample {
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn source(&self) -> GaussianSource {
        self.source
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }
}

/// 𝔹(track[j]) for a nondecreasing, nonnegative track, realized as
/// cumulative sums of independent N(0, Δⱼ) increments.
pub fn sample_bm_at(track: &VarianceTrack, seed: u64) -> Result<GaussianPathSample> {
    let vals = track.values();
    if vals[0] < 0.0 {
        return Err(Error::invalid_input(format!(
            "one-sided sampling needs a nonnegative track; starts at {}",
            vals[0]
        )));
    }
    for j in 1..vals.len() {
        if vals[j] < vals[j - 1] {
            return Err(Error::invalid_input(format!(
                "one-sided sampling needs a nondecreasing track; decreases at \
                 position {}: {} -> {} (use the two-sided sampler)",
                j + 1,
                vals[j - 1],
                vals[j]
            )));
        }
    }
    let mut rng = rng::stream(seed, stage::GAUSSIAN_PATH, 0);
    let mut values = Vec::with_capacity(vals.len());
    let mut level = 0.0;
    let mut prev = 0.0;
    for v in vals {
        let z: f64 = rng.sample(StandardNormal);
        level += (v - prev).sqrt() * z;
        prev = *v;
        values.push(level);
    }
    Ok(GaussianPathSample { values, source: GaussianSource::BmAtTrack })
}

#[derive(Debug, Clone, Copy)]
enum TrackPoint {
    Zero,
    Neg(usize),
    Pos(usize),
}

/// Reusable sampler for a two-sided Brownian motion
/// 𝕎(t) = B₁(t)·1{t≥0} + B₂(−t)·1{t<0} evaluated at a fixed track.
///
/// Construction cost (sorting the track) is paid once; each call to
/// [`sample`](Self::sample) consumes one normal draw per distinct nonzero
/// track value, walking outward from zero on each side, so equal track
/// values always map to the same 𝕎 value.
#[derive(Debug, Clone)]
pub struct TwoSidedBmSampler {
    /// √ of the |track| increments on the negative side, nearest zero first.
    neg_sd: Vec<f64>,
    /// √ of the track increments on the positive side, nearest zero first.
    pos_sd: Vec<f64>,
    /// For each original index, where its track value lives.
    map: Vec<TrackPoint>,
}

impl TwoSidedBmSampler {
    pub fn new(track: &VarianceTrack) -> Self {
        Self::from_values(track.values())
    }

    pub fn from_values(vals: &[f64]) -> Self {
        let mut sorted: Vec<f64> = vals.to_vec();
        sorted.sort_by(|a, b| a.partial_cmp(b).expect("track values are finite"));
        sorted.dedup();
        let split = sorted.partition_point(|&v| v < 0.0);
        // Negative side ordered nearest-zero-first (descending values).
        let neg: Vec<f64> = sorted[..split].iter().rev().copied().collect();
        let pos: Vec<f64> = sorted[split..].iter().filter(|&&v| v > 0.0).copied().collect();
        let sds = |side: &[f64]| -> Vec<f64> {
            let mut prev = 0.0;
            side.iter()
                .map(|v| {
                    let sd = (v.abs() - prev).sqrt();
                    prev = v.abs();
                    sd
                })
                .collect()
        };
        let neg_sd = sds(&neg);
        let pos_sd = sds(&pos);
        let map = vals
            .iter()
            .map(|&v| {
                if v == 0.0 {
                    TrackPoint::Zero
                } else if v < 0.0 {
                    let rank = neg.partition_point(|&u| u > v);
                    debug_assert_eq!(neg[rank], v);
                    TrackPoint::Neg(rank)
                } else {
                    let rank = pos.partition_point(|&u| u < v);
                    debug_assert_eq!(pos[rank], v);
                    TrackPoint::Pos(rank)
                }
            })
            .collect();
        TwoSidedBmSampler { neg_sd, pos_sd, map }
    }

    /// Normal draws consumed per sample.
    pub fn draws_per_sample(&self) -> usize {
        self.neg_sd.len() + self.pos_sd.len()
    }

    /// One realization of 𝕎 at the track points, in original index order.
    /// Draw order is fixed: negative side outward, then positive side
    /// outward.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<f64> {
        let walk = |sds: &[f64], rng: &mut R| -> Vec<f64> {
            let mut level = 0.0;
            sds.iter()
                .map(|sd| {
                    let z: f64 = rng.sample(StandardNormal);
                    level += sd * z;
                    level
                })
                .collect()
        };
        let neg = walk(&self.neg_sd, rng);
        let pos = walk(&self.pos_sd, rng);
        self.map
            .iter()
            .map(|p| match p {
                TrackPoint::Zero => 0.0,
                TrackPoint::Neg(r) => neg[*r],
                TrackPoint::Pos(r) => pos[*r],
            })
            .collect()
    }
}

/// 𝕎(track[j]) for an arbitrary track (any signs, any order).
pub fn sample_two_sided_bm_at(track: &VarianceTrack, seed: u64) -> GaussianPathSample {
    let sampler = TwoSidedBmSampler::new(track);
    let mut rng = rng::stream(seed, stage::GAUSSIAN_PATH, 0);
    GaussianPathSample {
        values: sampler.sample(&mut rng),
        source: GaussianSource::TwoSidedBmAtTrack,
    }
}

/// Reusable factor of a covariance matrix for drawing exact Gaussian
/// vectors Y ~ N(0, Cov): Y = L·z with z iid standard normal.
pub struct CovarianceFactor {
    l: LowerTriangular,
    ridge: f64,
}

impl CovarianceFactor {
    /// Factor the oracle's matrix, adding a small ridge (1e-10, then 1e-8,
    /// times the mean diagonal) only if the plain factorization fails.
    pub fn new(oracle: &CovarianceOracle) -> Result<Self> {
        let n = oracle.n();
        let cov = oracle.as_slice();
        let plain_err = match linalg::cholesky(cov, n) {
            Ok(l) => return Ok(CovarianceFactor { l, ridge: 0.0 }),
            Err(e) => e,
        };
        let trace: f64 = (0..n).map(|i| cov[i * n + i]).sum();
        let scale = if trace > 0.0 { trace / n as f64 } else { 1.0 };
        for eps in [1e-10, 1e-8] {
            let ridge = eps * scale;
            let mut shifted = cov.to_vec();
            for i in 0..n {
                shifted[i * n + i] += ridge;
            }
            if let Ok(l) = linalg::cholesky(&shifted, n) {
                return Ok(CovarianceFactor { l, ridge });
            }
        }
        Err(plain_err)
    }

    pub fn n(&self) -> usize {
        self.l.n
    }

    /// Ridge actually added to the diagonal (0 when none was needed).
    pub fn ridge(&self) -> f64 {
        self.ridge
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<f64> {
        let z: Vec<f64> = (0..self.l.n).map(|_| rng.sample(StandardNormal)).collect();
        self.l.mul_vec(&z)
    }

    /// Exact Var(Σ_{j≤i} Yⱼ) for each i, computed from the factor:
    /// the variance of a partial sum is the squared norm of the summed
    /// factor rows. Agrees with the track from the covariance matrix up to
    /// rounding (plus the ridge contribution when one was added).
    pub fn partial_sum_variances(&self) -> Vec<f64> {
        let n = self.l.n;
        let mut colsum = vec![0.0; n];
        let mut sumsq = 0.0;
        let mut out = Vec::with_capacity(n);
        for i in 0..n {
            let row = self.l.row(i);
            for (k, l_ik) in row.iter().enumerate() {
                sumsq += l_ik * (2.0 * colsum[k] + l_ik);
                colsum[k] += l_ik;
            }
            out.push(sumsq);
        }
        out
    }
}

/// One draw of Y ~ N(0, oracle), deterministic given the seed.
pub fn covariance_matching_sample(
    oracle: &CovarianceOracle,
    seed: u64,
) -> Result<GaussianPathSample> {
    let factor = CovarianceFactor::new(oracle)?;
    let mut rng = rng::stream(seed, stage::GAUSSIAN_PATH, 0);
    Ok(GaussianPathSample {
        values: factor.sample(&mut rng),
        source: GaussianSource::CovarianceMatching,
    })
}

/// Signed maximum of the partial sums: max over j of S_j.
pub fn max_partial_sum(x: &TimeSeries) -> f64 {
    partial_sums(x)
        .into_iter()
        .fold(f64::NEG_INFINITY, f64::max)
}

/// Signed maximum of the partial sums of a raw value vector.
pub fn max_partial_sum_of(values: &[f64]) -> f64 {
    let mut acc = 0.0;
    let mut best = f64::NEG_INFINITY;
    for v in values {
        acc += v;
        best = best.max(acc);
    }
    best
}

/// A Monte Carlo sample of max-of-partial-sums statistics, one per
/// replication.
#[derive(Debug, Clone)]
pub struct MaxStatisticSample {
    draws: Vec<f64>,
}

impl MaxStatisticSample {
    pub fn new(draws: Vec<f64>) -> Result<Self> {
        if draws.is_empty() {
            return Err(Error::invalid_input("statistic sample must be nonempty"));
        }
        if let Some(bad) = draws.iter().find(|d| !d.is_finite()) {
            return Err(Error::invalid_input(format!(
                "statistic sample must be finite; found {bad}"
            )));
        }
        Ok(MaxStatisticSample { draws })
    }

    pub fn draws(&self) -> &[f64] {
        &self.draws
    }

    pub fn len(&self) -> usize {
        self.draws.len()
    }

    pub fn is_empty(&self) -> bool {
        self.draws.is_empty()
    }
}

/// Default quantile grid for distribution comparisons: 0.05 to 0.95 in
/// steps of 0.05.
pub fn default_q_grid() -> Vec<f64> {
    (1..=19).map(|k| k as f64 * 0.05).collect()
}

/// Largest absolute difference of empirical quantiles over a grid.
/// Zero iff the two samples have identical empirical quantiles on it.
pub fn qq_discrepancy(
    a: &MaxStatisticSample,
    b: &MaxStatisticSample,
    q_grid: &[f64],
) -> Result<f64> {
    for (name, s) in [("first", a), ("second", b)] {
        if s.len() < 100 {
            return Err(Error::invalid_input(format!(
                "quantile comparison needs >= 100 draws; {name} sample has {}",
                s.len()
            )));
        }
    }
    if q_grid.is_empty() {
        return Err(Error::invalid_input("quantile grid must be nonempty"));
    }
    if let Some(bad) = q_grid.iter().find(|q| !(0.01..=0.99).contains(*q)) {
        return Err(Error::invalid_input(format!(
            "quantile grid must lie in [0.01, 0.99]; found {bad}"
        )));
    }
    let sort = |s: &MaxStatisticSample| {
        let mut v = s.draws().to_vec();
        v.sort_by(|x, y| x.partial_cmp(y).expect("finite draws"));
        v
    };
    let sa = sort(a);
    let sb = sort(b);
    Ok(q_grid
        .iter()
        .map(|&q| (stats::quantile_sorted(&sa, q) - stats::quantile_sorted(&sb, q)).abs())
        .fold(0.0, f64::max))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::{theta_path, tvar_covariance, ThetaKind};
    use crate::rng::derive_seed;
    use crate::variance::exact_partial_variance;

    fn assert_close(actual: f64, expected: f64, tol: f64) {
        assert!(
            (actual - expected).abs() <= tol,
            "expected {expected}, got {actual} (tol {tol})"
        );
    }

    fn track(values: Vec<f64>) -> VarianceTrack {
        VarianceTrack::from_exact(values).unwrap()
    }

    #[test]
    fn bm_rejects_decreasing_and_negative_tracks() {
        assert!(sample_bm_at(&track(vec![1.0, 0.5]), 0).is_err());
        assert!(sample_bm_at(&track(vec![-1.0, 2.0]), 0).is_err());
    }

    #[test]
    fn bm_constant_track_is_constant_path() {
        let s = sample_bm_at(&track(vec![2.0; 6]), 3).unwrap();
        let first = s.values()[0];
        assert!(s.values().iter().all(|&v| v == first));
    }

    #[test]
    fn bm_marginal_variances_match_track() {
        let n = 16;
        let t: Vec<f64> = (1..=n).map(|j| j as f64).collect();
        let tr = track(t);
        let reps = 20_000;
        let check = [0usize, n / 2 - 1, n - 1];
        let mut acc = [0.0; 3];
        for r in 0..reps {
            let s = sample_bm_at(&tr, derive_seed(5, stage::REPLICATION, r)).unwrap();
            for (a, &j) in acc.iter_mut().zip(&check) {
                *a += s.values()[j] * s.values()[j];
            }
        }
        for (a, &j) in acc.iter().zip(&check) {
            let target = (j + 1) as f64;
            let se = target * (2.0 / reps as f64).sqrt();
            assert_close(a / reps as f64, target, 3.5 * se);
        }
    }

    #[test]
    fn bm_increments_uncorrelated() {
        let n = 20_000;
        let t: Vec<f64> = (1..=n).map(|j| j as f64).collect();
        let s = sample_bm_at(&track(t), 11).unwrap();
        let incr: Vec<f64> = s
            .values()
            .windows(2)
            .map(|w| w[1] - w[0])
            .collect();
        let m = stats::mean(&incr);
        let mut num = 0.0;
        let mut den = 0.0;
        for w in incr.windows(2) {
            num += (w[0] - m) * (w[1] - m);
        }
        for v in &incr {
            den += (v - m) * (v - m);
        }
        let corr = num / den;
        assert!(corr.abs() <= 0.03, "lag-1 increment correlation {corr}");
    }

    #[test]
    fn two_sided_zero_track_is_zero() {
        let s = sample_two_sided_bm_at(&track(vec![0.0; 5]), 9);
        assert!(s.values().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn two_sided_ties_map_to_same_value() {
        let s = sample_two_sided_bm_at(&track(vec![4.0, -9.0, 4.0, -9.0]), 2);
        assert_eq!(s.values()[0], s.values()[2]);
        assert_eq!(s.values()[1], s.values()[3]);
        assert_ne!(s.values()[0], s.values()[1]);
    }

    #[test]
    fn two_sided_is_deterministic_in_seed() {
        let tr = track(vec![3.0, -1.0, 2.0, 0.0, -4.0]);
        let a = sample_two_sided_bm_at(&tr, 7);
        let b = sample_two_sided_bm_at(&tr, 7);
        let c = sample_two_sided_bm_at(&tr, 8);
        assert_eq!(a.values(), b.values());
        assert_ne!(a.values(), c.values());
    }

    #[test]
    fn two_sided_negative_coordinate_marginal_and_independence() {
        let tr = track(vec![4.0, -9.0]);
        let sampler = TwoSidedBmSampler::new(&tr);
        assert_eq!(sampler.draws_per_sample(), 2);
        let reps = 20_000;
        let mut rng = rng::stream(13, stage::REPLICATION, 0);
        let (mut v0, mut v1, mut cross) = (0.0, 0.0, 0.0);
        for _ in 0..reps {
            let s = sampler.sample(&mut rng);
            v0 += s[0] * s[0];
            v1 += s[1] * s[1];
            cross += s[0] * s[1];
        }
        let r = reps as f64;
        assert_close(v0 / r, 4.0, 3.5 * 4.0 * (2.0 / r).sqrt());
        assert_close(v1 / r, 9.0, 3.5 * 9.0 * (2.0 / r).sqrt());
        let corr = (cross / r) / (6.0);
        assert!(corr.abs() <= 0.03, "cross-side correlation {corr}");
    }

    #[test]
    fn two_sided_matches_one_sided_in_law_on_monotone_tracks() {
        let path = theta_path(ThetaKind::Constant, 0.5, 32).unwrap();
        let oracle = tvar_covariance(&path, 1.0).unwrap();
        let tr = exact_partial_variance(&oracle);
        let reps = 10_000u64;
        let mut one_sided = Vec::with_capacity(reps as usize);
        let mut two_sided = Vec::with_capacity(reps as usize);
        let sampler = TwoSidedBmSampler::new(&tr);
        for r in 0..reps {
            let a = sample_bm_at(&tr, derive_seed(40, stage::REPLICATION, r)).unwrap();
            one_sided.push(a.values().iter().copied().fold(f64::NEG_INFINITY, f64::max));
            let mut rng = rng::stream(41, stage::REPLICATION, r);
            let b = sampler.sample(&mut rng);
            two_sided.push(b.iter().copied().fold(f64::NEG_INFINITY, f64::max));
        }
        let d = stats::ks_distance(&one_sided, &two_sided).unwrap();
        assert!(d <= 0.03, "KS distance between constructions: {d}");
    }

    #[test]
    fn covariance_matching_identity_is_iid_standard_normal() {
        let oracle = CovarianceOracle::identity(8, 1.0).unwrap();
        let factor = CovarianceFactor::new(&oracle).unwrap();
        assert_eq!(factor.ridge(), 0.0);
        let reps = 50_000;
        let mut rng = rng::stream(4, stage::REPLICATION, 0);
        let mut acc = vec![0.0; 8];
        let mut cross = 0.0;
        for _ in 0..reps {
            let y = factor.sample(&mut rng);
            for (a, v) in acc.iter_mut().zip(&y) {
                *a += v * v;
            }
            cross += y[0] * y[7];
        }
        for a in &acc {
            assert_close(a / reps as f64, 1.0, 0.03);
        }
        assert_close(cross / reps as f64, 0.0, 0.03);
    }

    #[test]
    fn covariance_matching_empirical_covariance() {
        let n = 20;
        let path = theta_path(ThetaKind::Constant, 0.5, n).unwrap();
        let oracle = tvar_covariance(&path, 1.0).unwrap();
        let factor = CovarianceFactor::new(&oracle).unwrap();
        let reps = 100_000;
        let mut rng = rng::stream(8, stage::REPLICATION, 0);
        let mut acc = vec![0.0; n * n];
        for _ in 0..reps {
            let y = factor.sample(&mut rng);
            for s in 0..n {
                for t in s..n {
                    acc[s * n + t] += y[s] * y[t];
                }
            }
        }
        for s in 0..n {
            for t in s..n {
                let emp = acc[s * n + t] / reps as f64;
                assert_close(emp, oracle.get(s, t), 0.02);
            }
        }
    }

    #[test]
    fn factor_partial_sum_variances_match_exact_track() {
        let path = theta_path(ThetaKind::Piecewise4, 0.9, 50).unwrap();
        let oracle = tvar_covariance(&path, 1.0).unwrap();
        let factor = CovarianceFactor::new(&oracle).unwrap();
        let from_factor = factor.partial_sum_variances();
        let exact = exact_partial_variance(&oracle);
        for (a, b) in from_factor.iter().zip(exact.values()) {
            assert_close(*a, *b, 1e-8 * (1.0 + b.abs()));
        }
    }

    #[test]
    fn singular_covariance_factors_with_ridge() {
        // Rank-one matrix: plain Cholesky hits a zero pivot at minor 2.
        let oracle = CovarianceOracle::from_fn(3, |_, _| 1.0).unwrap();
        let factor = CovarianceFactor::new(&oracle).unwrap();
        assert!(factor.ridge() > 0.0);
        let mut rng = rng::stream(1, stage::REPLICATION, 0);
        let y = factor.sample(&mut rng);
        // All coordinates nearly equal under the rank-one structure.
        assert_close(y[0], y[1], 1e-3);
        assert_close(y[0], y[2], 1e-3);
    }

    #[test]
    fn max_partial_sum_examples() {
        let x = TimeSeries::new(vec![1.0, -2.0, 3.0]).unwrap();
        assert_close(max_partial_sum(&x), 2.0, 1e-15);
        let neg = TimeSeries::new(vec![-1.0, -0.5, -2.0]).unwrap();
        assert_close(max_partial_sum(&neg), -1.0, 1e-15);
        assert_close(max_partial_sum_of(&[1.0, -2.0, 3.0]), 2.0, 1e-15);
    }

    #[test]
    fn qq_discrepancy_basics() {
        let grid = default_q_grid();
        let draws: Vec<f64> = (0..500).map(|i| (i as f64) / 500.0).collect();
        let a = MaxStatisticSample::new(draws.clone()).unwrap();
        let b = MaxStatisticSample::new(draws.iter().map(|v| v + 0.25).collect()).unwrap();
        assert_eq!(qq_discrepancy(&a, &a, &grid).unwrap(), 0.0);
        assert_close(qq_discrepancy(&a, &b, &grid).unwrap(), 0.25, 1e-12);
        let tiny = MaxStatisticSample::new(vec![0.0; 50]).unwrap();
        assert!(qq_discrepancy(&tiny, &a, &grid).is_err());
        assert!(qq_discrepancy(&a, &b, &[]).is_err());
        assert!(qq_discrepancy(&a, &b, &[0.995]).is_err());
    }

    #[test]
    fn qq_discrepancy_same_law_calibration() {
        let reps = 10_000u64;
        let draw = |salt: u64| {
            let mut v = Vec::with_capacity(reps as usize);
            let mut rng = rng::stream(salt, stage::REPLICATION, 0);
            for _ in 0..reps {
                v.push(rng.sample::<f64, _>(StandardNormal));
            }
            MaxStatisticSample::new(v).unwrap()
        };
        let a = draw(100);
        let b = draw(101);
        let d = qq_discrepancy(&a, &b, &default_q_grid()).unwrap();
        assert!(d <= 0.08, "same-law discrepancy {d} above calibration bound");
    }
}
