// SPDX-License-Identifier: MIT OR Apache-2.0

//! Deviation bounds for block sums of banded quadratic forms.
//!
//! A banded quadratic form Qₙ = Σ_{t} Σ_{s ≤ t, t−s ≤ D} a_{s,t}·x_s·x_t
//! is split into blocks V_k collecting the terms whose outer index t falls
//! in ((k−1)·D, k·D]. The object of interest is the maximal centered
//! partial sum max_K |Σ_{k≤K} (V_k − E V_k)|: its tail decays
//! polynomially with exponent governed by the innovation moments, which a
//! Monte Carlo tail study makes visible on a log-log plot.

use crate::error::{Error, Result};
use crate::models::{CovarianceOracle, TvarModel};
use crate::parallel;
use crate::rng::stage;

/// Lower-banded coefficient array a_{s,t}, 0 ≤ t−s ≤ d, |a| ≤ 1.
#[derive(Debug, Clone)]
pub struct BandedQuadratic {
    n: usize,
    d: usize,
    // coeffs[t * (d + 1) + (t - s)] holds a_{s,t}.
    coeffs: Vec<f64>,
}

impl BandedQuadratic {
    /// Build from a coefficient function over 0-based index pairs (s, t)
    /// with s ≤ t and t − s ≤ d. Coefficients must be finite and bounded
    /// by 1 in absolute value.
    pub fn from_fn(n: usize, d: usize, a: impl Fn(usize, usize) -> f64) -> Result<Self> {
        if n == 0 {
            return Err(Error::invalid_input("quadratic form needs n >= 1"));
        }
        if d == 0 || d > n {
            return Err(Error::invalid_input(format!(
                "band width must satisfy 1 <= d <= n; got d={d}, n={n}"
            )));
        }
        let mut coeffs = vec![0.0; n * (d + 1)];
        for t in 0..n {
            for lag in 0..=d.min(t) {
                let value = a(t - lag, t);
                if !value.is_finite() || value.abs() > 1.0 {
                    return Err(Error::invalid_input(format!(
                        "coefficient a_{{{},{}}} = {value} outside [-1, 1]",
                        t - lag,
                        t
                    )));
                }
                coeffs[t * (d + 1) + lag] = value;
            }
        }
        Ok(BandedQuadratic { n, d, coeffs })
    }

    /// All coefficients equal to 1 inside the band.
    pub fn constant_band(n: usize, d: usize) -> Result<Self> {
        Self::from_fn(n, d, |_, _| 1.0)
    }

    /// Pure sum of squares: a_{t,t} = 1, off-diagonal 0, band width 1.
    pub fn diagonal(n: usize) -> Result<Self> {
        Self::from_fn(n, 1, |s, t| if s == t { 1.0 } else { 0.0 })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Band width D: also the block length of the block decomposition.
    pub fn band(&self) -> usize {
        self.d
    }

    /// a_{s,t} for 0-based indices; zero outside the band.
    pub fn get(&self, s: usize, t: usize) -> f64 {
        if s > t || t >= self.n || t - s > self.d {
            0.0
        } else {
            self.coeffs[t * (self.d + 1) + (t - s)]
        }
    }

    /// Number of blocks ⌈n/D⌉.
    pub fn block_count(&self) -> usize {
        self.n.div_ceil(self.d)
    }
}

/// Block sums V_k of the quadratic form and their total Qₙ.
///
/// V_k = Σ_{t ∈ ((k−1)D, kD ∧ n]} Σ_{s ≤ t, t−s ≤ D} a_{s,t}·x_s·x_t.
pub fn quadratic_blocks(x: &[f64], q: &BandedQuadratic) -> Result<(Vec<f64>, f64)> {
    if x.len() != q.n {
        return Err(Error::invalid_input(format!(
            "series length {} does not match quadratic form size {}",
            x.len(),
            q.n
        )));
    }
    let mut blocks = vec![0.0; q.block_count()];
    for t in 0..q.n {
        let mut inner = 0.0;
        for lag in 0..=q.d.min(t) {
            inner += q.coeffs[t * (q.d + 1) + lag] * x[t - lag];
        }
        blocks[t / q.d] += inner * x[t];
    }
    let total = blocks.iter().sum();
    Ok((blocks, total))
}

/// max_K |Σ_{k≤K} (V_k − means_k)|: the maximal centered partial sum of
/// the block decomposition.
pub fn centered_max_process(x: &[f64], q: &BandedQuadratic, means: &[f64]) -> Result<f64> {
    let (blocks, _) = quadratic_blocks(x, q)?;
    if means.len() != blocks.len() {
        return Err(Error::invalid_input(format!(
            "{} block means supplied for {} blocks",
            means.len(),
            blocks.len()
        )));
    }
    let mut running = 0.0;
    let mut best = 0.0f64;
    for (v, m) in blocks.iter().zip(means) {
        running += v - m;
        best = best.max(running.abs());
    }
    Ok(best)
}

/// E V_k for a mean-zero process with the given covariance: every product
/// E[x_s·x_t] is the covariance entry, so the block means are exact sums
/// of weighted covariances.
pub fn exact_block_means(oracle: &CovarianceOracle, q: &BandedQuadratic) -> Result<Vec<f64>> {
    if oracle.n() != q.n {
        return Err(Error::invalid_input(format!(
            "covariance size {} does not match quadratic form size {}",
            oracle.n(),
            q.n
        )));
    }
    let mut means = vec![0.0; q.block_count()];
    for t in 0..q.n {
        let mut acc = 0.0;
        for lag in 0..=q.d.min(t) {
            acc += q.coeffs[t * (q.d + 1) + lag] * oracle.get(t - lag, t);
        }
        means[t / q.d] += acc;
    }
    Ok(means)
}

/// Result of a Monte Carlo tail study of the centered maximal process.
#[derive(Debug, Clone)]
pub struct TailStudy {
    /// Thresholds the tail is evaluated at.
    pub x_grid: Vec<f64>,
    /// P(max > x) estimates, one per threshold.
    pub tail: Vec<f64>,
    /// The raw maxima, one per replication.
    pub maxima: Vec<f64>,
    /// Block means estimated by the pre-pass.
    pub block_means: Vec<f64>,
}

/// Empirical exceedance fractions of `maxima` over each threshold.
pub fn tail_from_maxima(maxima: &[f64], x_grid: &[f64]) -> Result<Vec<f64>> {
    if maxima.is_empty() {
        return Err(Error::invalid_input("tail evaluation needs at least one maximum"));
    }
    Ok(x_grid
        .iter()
        .map(|&x| maxima.iter().filter(|m| **m > x).count() as f64 / maxima.len() as f64)
        .collect())
}

/// Estimate the tail of max_K |Σ_{k≤K}(V_k − E V_k)| by simulation.
///
/// A first pass (its own seed stage) estimates the block means E V_k; an
/// independent second pass draws fresh series and records the centered
/// maxima. `tail[i]` is the fraction of maxima exceeding `x_grid[i]`.
pub fn tail_study(
    model: &TvarModel,
    q: &BandedQuadratic,
    x_grid: &[f64],
    reps: usize,
    seed: u64,
) -> Result<TailStudy> {
    if reps < 500 {
        return Err(Error::invalid_input(format!(
            "tail study needs at least 500 replications; got {reps}"
        )));
    }
    if x_grid.is_empty() {
        return Err(Error::invalid_input("tail study needs a non-empty threshold grid"));
    }
    if let Some(bad) = x_grid.iter().find(|x| !(x.is_finite() && **x > 0.0)) {
        return Err(Error::invalid_input(format!(
            "tail thresholds must be positive; found {bad}"
        )));
    }
    if model.n() != q.n {
        return Err(Error::invalid_input(format!(
            "model length {} does not match quadratic form size {}",
            model.n(),
            q.n
        )));
    }

    let block_sums = parallel::replicate_map(reps, seed, stage::PREPASS, |_, derived| {
        let x = model.simulate(derived);
        quadratic_blocks(x.values(), q).expect("lengths checked above")
    });
    let k = q.block_count();
    let mut block_means = vec![0.0; k];
    for (blocks, _) in &block_sums {
        for (acc, v) in block_means.iter_mut().zip(blocks) {
            *acc += v;
        }
    }
    for m in &mut block_means {
        *m /= reps as f64;
    }

    let means = block_means.clone();
    let maxima = parallel::replicate_map(reps, seed, stage::REPLICATION, move |_, derived| {
        let x = model.simulate(derived);
        centered_max_process(x.values(), q, &means).expect("lengths checked above")
    });

    let tail = tail_from_maxima(&maxima, x_grid)?;
    Ok(TailStudy { x_grid: x_grid.to_vec(), tail, maxima, block_means })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::{
        theta_path, tvar_covariance, InnovationSpec, ThetaKind, TvarModel,
    };

    fn assert_close(actual: f64, expected: f64, tol: f64) {
        assert!(
            (actual - expected).abs() <= tol,
            "expected {expected}, got {actual} (tol {tol})"
        );
    }

    #[test]
    fn block_sums_worked_example() {
        let q = BandedQuadratic::constant_band(3, 1).unwrap();
        let (v, total) = quadratic_blocks(&[1.0, 2.0, 3.0], &q).unwrap();
        assert_eq!(v, vec![1.0, 6.0, 15.0]);
        assert_eq!(total, 22.0);
    }

    #[test]
    fn block_sums_with_wider_band() {
        let q = BandedQuadratic::constant_band(3, 2).unwrap();
        let (v, total) = quadratic_blocks(&[1.0, 2.0, 3.0], &q).unwrap();
        // Block 1 holds t=1,2; block 2 holds t=3 (1-based): 1+2+4 and 3+6+9.
        assert_eq!(v, vec![7.0, 18.0]);
        assert_eq!(total, 25.0);
    }

    #[test]
    fn diagonal_form_is_sum_of_squares() {
        let x = [1.5, -2.0, 0.5, 3.0];
        let q = BandedQuadratic::diagonal(4).unwrap();
        let (v, total) = quadratic_blocks(&x, &q).unwrap();
        assert_eq!(v, vec![2.25, 4.0, 0.25, 9.0]);
        assert_close(total, x.iter().map(|v| v * v).sum(), 1e-12);
    }

    #[test]
    fn coefficient_and_shape_validation() {
        assert!(BandedQuadratic::from_fn(4, 2, |_, _| 1.5).is_err());
        assert!(BandedQuadratic::from_fn(4, 2, |_, _| f64::NAN).is_err());
        assert!(BandedQuadratic::from_fn(4, 0, |_, _| 1.0).is_err());
        assert!(BandedQuadratic::from_fn(4, 5, |_, _| 1.0).is_err());
        let q = BandedQuadratic::constant_band(4, 2).unwrap();
        assert!(quadratic_blocks(&[1.0; 3], &q).is_err());
        assert_eq!(q.get(0, 3), 0.0);
        assert_eq!(q.get(1, 3), 1.0);
        assert_eq!(q.get(3, 1), 0.0);
    }

    #[test]
    fn exact_means_under_identity_covariance() {
        let oracle = CovarianceOracle::identity(6, 1.0).unwrap();
        let q = BandedQuadratic::constant_band(6, 2).unwrap();
        let means = exact_block_means(&oracle, &q).unwrap();
        // Only the diagonal terms survive: each block covers two t values.
        assert_eq!(means, vec![2.0, 2.0, 2.0]);
        let diag = BandedQuadratic::diagonal(5).unwrap();
        let means_diag =
            exact_block_means(&CovarianceOracle::identity(5, 1.0).unwrap(), &diag).unwrap();
        assert_eq!(means_diag, vec![1.0; 5]);
    }

    #[test]
    fn exact_means_match_monte_carlo() {
        let n = 64;
        let path = theta_path(ThetaKind::Constant, 0.5, n).unwrap();
        let model = TvarModel::new(path.clone(), InnovationSpec::standard_normal());
        let oracle = tvar_covariance(&path, 1.0).unwrap();
        let q = BandedQuadratic::constant_band(n, 4).unwrap();
        let exact = exact_block_means(&oracle, &q).unwrap();

        let reps = 4000;
        let mut sums = vec![0.0; exact.len()];
        let mut sq = vec![0.0; exact.len()];
        for r in 0..reps {
            let x = model.simulate(crate::rng::derive_seed(31, 9, r as u64));
            let (v, _) = quadratic_blocks(x.values(), &q).unwrap();
            for i in 0..v.len() {
                sums[i] += v[i];
                sq[i] += v[i] * v[i];
            }
        }
        for i in 0..exact.len() {
            let mean = sums[i] / reps as f64;
            let var = sq[i] / reps as f64 - mean * mean;
            let se = (var / reps as f64).sqrt();
            assert!(
                (mean - exact[i]).abs() <= 4.0 * se + 1e-9,
                "block {i}: MC mean {mean} vs exact {} (se {se})",
                exact[i]
            );
        }
    }

    #[test]
    fn centered_process_vanishes_when_means_are_the_blocks() {
        let x = [0.4, -1.2, 2.0, 0.3, -0.7, 1.1];
        let q = BandedQuadratic::constant_band(6, 2).unwrap();
        let (v, _) = quadratic_blocks(&x, &q).unwrap();
        assert_eq!(centered_max_process(&x, &q, &v).unwrap(), 0.0);
        let zeros = vec![0.0; v.len()];
        let max = centered_max_process(&x, &q, &zeros).unwrap();
        let expect = {
            let mut run = 0.0f64;
            let mut best = 0.0f64;
            for vi in &v {
                run += vi;
                best = best.max(run.abs());
            }
            best
        };
        assert_eq!(max, expect);
        assert!(centered_max_process(&x, &q, &[0.0]).is_err());
    }

    #[test]
    fn tail_study_shape_and_monotonicity() {
        let n = 128;
        let path = theta_path(ThetaKind::Constant, 0.4, n).unwrap();
        let model = TvarModel::new(path, InnovationSpec::standard_normal());
        let q = BandedQuadratic::constant_band(n, 8).unwrap();
        let grid = [2.0, 4.0, 8.0, 16.0, 32.0];
        let study = tail_study(&model, &q, &grid, 500, 99).unwrap();
        assert_eq!(study.maxima.len(), 500);
        assert_eq!(study.tail.len(), grid.len());
        for pair in study.tail.windows(2) {
            assert!(pair[0] >= pair[1], "tail must be non-increasing: {:?}", study.tail);
        }
        for t in &study.tail {
            assert!((0.0..=1.0).contains(t));
        }
        assert!(study.tail[0] > study.tail[grid.len() - 1]);
        // Deterministic given the seed.
        let again = tail_study(&model, &q, &grid, 500, 99).unwrap();
        assert_eq!(study.maxima, again.maxima);
        assert_eq!(study.block_means, again.block_means);
    }

    #[test]
    fn centered_chi_square_walk_max_scales_like_root_n() {
        // For iid N(0,1) and the diagonal form, V_k = X_k^2 with mean 1,
        // so the centered maximum behaves like the running maximum of a
        // random walk: quadrupling n should about double it.
        let mean_max = |n: usize| -> f64 {
            let q = BandedQuadratic::diagonal(n).unwrap();
            let means = vec![1.0; n];
            let innov = InnovationSpec::standard_normal();
            let reps = 300;
            let mut acc = 0.0;
            for r in 0..reps {
                let mut rng = crate::rng::stream(
                    crate::rng::derive_seed(88, 3, r),
                    crate::rng::stage::REPLICATION,
                    0,
                );
                let x = innov.sample_vec(n, &mut rng);
                acc += centered_max_process(&x, &q, &means).unwrap();
            }
            acc / reps as f64
        };
        let ratio = mean_max(2000) / mean_max(500);
        assert!(
            (1.4..=2.9).contains(&ratio),
            "max scaling ratio for n 500 -> 2000 was {ratio}"
        );
    }

    #[test]
    fn block_variance_track_is_a_banded_quadratic_form() {
        // The block-based running variance at a full-block index K·m is
        // twice the quadratic form with 1/2 on the diagonal, 1 on within-
        // and adjacent-block pairs: both expand to ΣB_a² + 2ΣB_aB_{a+1}.
        let n = 12;
        let m = 3;
        let x: Vec<f64> = (0..n).map(|i| ((i * 7 + 3) % 11) as f64 * 0.3 - 1.2).collect();
        let q = BandedQuadratic::from_fn(n, 2 * m - 1, |s, t| {
            if s == t {
                return 0.5;
            }
            let (bs, bt) = (s / m, t / m);
            if bt == bs || bt == bs + 1 {
                1.0
            } else {
                0.0
            }
        })
        .unwrap();
        let (_, total) = quadratic_blocks(&x, &q).unwrap();
        let series = crate::series::TimeSeries::new(x).unwrap();
        let track = crate::variance::brv(&series, m).unwrap();
        assert_close(track.values()[n - 1], 2.0 * total, 1e-10);
    }

    #[test]
    fn tail_from_maxima_counts_exceedances() {
        let maxima = [1.0, 2.0, 3.0, 4.0];
        let tail = tail_from_maxima(&maxima, &[0.5, 2.5, 9.0]).unwrap();
        assert_eq!(tail, vec![1.0, 0.5, 0.0]);
        assert!(tail_from_maxima(&[], &[1.0]).is_err());
    }

    #[test]
    fn tail_study_validation() {
        let n = 32;
        let path = theta_path(ThetaKind::Constant, 0.4, n).unwrap();
        let model = TvarModel::new(path, InnovationSpec::standard_normal());
        let q = BandedQuadratic::constant_band(n, 4).unwrap();
        assert!(tail_study(&model, &q, &[1.0], 100, 0).is_err());
        assert!(tail_study(&model, &q, &[], 500, 0).is_err());
        assert!(tail_study(&model, &q, &[-1.0], 500, 0).is_err());
        let mismatched = BandedQuadratic::constant_band(16, 4).unwrap();
        assert!(tail_study(&model, &mismatched, &[1.0], 500, 0).is_err());
    }
}
