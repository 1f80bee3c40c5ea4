// SPDX-License-Identifier: MIT OR Apache-2.0

//! Running estimates of Var(Sⱼ), the variance of the partial-sum process,
//! for sequences whose dependence and marginal law change over time.
//!
//! Three estimators are provided:
//! - [`brv`]: non-overlapping block sums with first-order cross terms,
//! - [`brv_no_cross`]: the same without cross terms,
//! - [`overlapping_variance`]: averaged overlapping window sums,
//!
//! plus [`exact_partial_variance`], the ground-truth track computed from a
//! covariance oracle. Estimated tracks may contain negative values; the
//! two-sided Gaussian construction downstream consumes them as-is.

use crate::error::{Error, Result};
use crate::models::CovarianceOracle;
use crate::series::TimeSeries;

/// Which estimator produced a variance track.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TrackKind {
    Brv,
    BrvNoCross,
    Overlapping,
    Exact,
}

/// A running-variance track: values[j] estimates (or equals) Var(S_{j+1}).
#[derive(Debug, Clone, PartialEq)]
pub struct VarianceTrack {
    values: Vec<f64>,
    kind: TrackKind,
    /// Block length used by the estimator; 0 for exact tracks.
    m: usize,
}

impl VarianceTrack {
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn kind(&self) -> TrackKind {
        self.kind
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn n(&self) -> usize {
        self.values.len()
    }

    /// Wrap an externally computed track (e.g. a closed-form truth used in
    /// tests). Kind is `Exact`.
    pub fn from_exact(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::invalid_input("variance track must be nonempty"));
        }
        if let Some(bad) = values.iter().find(|v| !v.is_finite()) {
            return Err(Error::invalid_input(format!(
                "variance track must be finite; found {bad}"
            )));
        }
        Ok(VarianceTrack { values, kind: TrackKind::Exact, m: 0 })
    }
}

fn check_block_length(m: usize, n: usize) -> Result<()> {
    if m == 0 || m > n {
        return Err(Error::invalid_input(format!(
            "block length must satisfy 1 <= m <= n; got m={m}, n={n}"
        )));
    }
    Ok(())
}

/// Block-based running variance with adjacent cross terms:
/// out[j] = T_{⌊j/m⌋} + Rⱼ² + 2·B_{⌊j/m⌋}·Rⱼ, where Bₐ are the
/// non-overlapping block sums, Rⱼ the partial sum of the current block,
/// and T_k = Σ_{a≤k} Bₐ² + 2Σ_{a<k} Bₐ·Bₐ₊₁ (T₀ = 0, B₀ = 0).
pub fn brv(x: &TimeSeries, m: usize) -> Result<VarianceTrack> {
    check_block_length(m, x.n())?;
    let mut values = Vec::with_capacity(x.n());
    let mut t = 0.0; // T_{⌊j/m⌋}
    let mut b_prev = 0.0; // B_{⌊j/m⌋}
    let mut r = 0.0; // Rⱼ
    for (idx, v) in x.values().iter().enumerate() {
        r += v;
        if (idx + 1) % m == 0 {
            t += r * r + 2.0 * b_prev * r;
            b_prev = r;
            r = 0.0;
            values.push(t);
        } else {
            values.push(t + r * r + 2.0 * b_prev * r);
        }
    }
    Ok(VarianceTrack { values, kind: TrackKind::Brv, m })
}

/// Block-based running variance without cross terms:
/// out[i] = Σ_{a ≤ ⌊i/m⌋} Bₐ² + Rᵢ².
pub fn brv_no_cross(x: &TimeSeries, m: usize) -> Result<VarianceTrack> {
    check_block_length(m, x.n())?;
    let mut values = Vec::with_capacity(x.n());
    let mut t = 0.0;
    let mut r = 0.0;
    for (idx, v) in x.values().iter().enumerate() {
        r += v;
        if (idx + 1) % m == 0 {
            t += r * r;
            r = 0.0;
            values.push(t);
        } else {
            values.push(t + r * r);
        }
    }
    Ok(VarianceTrack { values, kind: TrackKind::BrvNoCross, m })
}

/// Overlapping-window running variance:
/// out[i] = Σ_{t=m..i} (window sum ending at t)²/m, zero for i < m.
pub fn overlapping_variance(x: &TimeSeries, m: usize) -> Result<VarianceTrack> {
    check_block_length(m, x.n())?;
    let vals = x.values();
    let mut values = Vec::with_capacity(vals.len());
    let mut window = 0.0; // sum of the last min(i, m) observations
    let mut acc = 0.0;
    for (idx, v) in vals.iter().enumerate() {
        window += v;
        if idx + 1 > m {
            window -= vals[idx - m];
        }
        if idx + 1 >= m {
            acc += window * window / m as f64;
        }
        values.push(acc);
    }
    Ok(VarianceTrack { values, kind: TrackKind::Overlapping, m })
}

/// Ground-truth track from a covariance oracle:
/// out[j] = Σ_{s,t ≤ j} Cov(X_s, X_t) = Var(S_{j+1}).
pub fn exact_partial_variance(oracle: &CovarianceOracle) -> VarianceTrack {
    let n = oracle.n();
    let cov = oracle.as_slice();
    let mut values = Vec::with_capacity(n);
    let mut s2 = 0.0;
    for j in 0..n {
        let mut cross = 0.0;
        for s in 0..j {
            cross += cov[s * n + j];
        }
        s2 += 2.0 * cross + cov[j * n + j];
        values.push(s2);
    }
    VarianceTrack { values, kind: TrackKind::Exact, m: 0 }
}

/// Maximum absolute componentwise deviation between two tracks.
pub fn estimation_error(track: &VarianceTrack, truth: &VarianceTrack) -> Result<f64> {
    if track.n() != truth.n() {
        return Err(Error::invalid_input(format!(
            "track lengths differ: {} vs {}",
            track.n(),
            truth.n()
        )));
    }
    Ok(track
        .values()
        .iter()
        .zip(truth.values())
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max))
}

/// Expected cross-moments of the non-overlapping block sums:
/// `adjacent_max` = maxₖ |𝔼(Bₖ·Bₖ₊₁)|, `far_sum_max` = maxₖ Σ_{|i−k|≥2}
/// |𝔼(Bᵢ·Bₖ)|. Both are 0 when fewer than two full blocks exist.
pub fn cross_product_diagnostic(
    oracle: &CovarianceOracle,
    m: usize,
) -> Result<(f64, f64)> {
    let n = oracle.n();
    check_block_length(m, n)?;
    let k_blocks = n / m;
    let cov = oracle.as_slice();
    // block_cov[i][k] = E(B_{i+1} B_{k+1}) over full blocks only
    let mut block_cov = vec![0.0; k_blocks * k_blocks];
    for bi in 0..k_blocks {
        for bk in bi..k_blocks {
            let mut acc = 0.0;
            for s in bi * m..(bi + 1) * m {
                for t in bk * m..(bk + 1) * m {
                    acc += cov[s * n + t];
                }
            }
            block_cov[bi * k_blocks + bk] = acc;
            block_cov[bk * k_blocks + bi] = acc;
        }
    }
    let mut adjacent_max = 0.0f64;
    for k in 0..k_blocks.saturating_sub(1) {
        adjacent_max = adjacent_max.max(block_cov[k * k_blocks + k + 1].abs());
    }
    let mut far_sum_max = 0.0f64;
    for k in 0..k_blocks {
        let mut acc = 0.0;
        for i in 0..k_blocks {
            if i.abs_diff(k) >= 2 {
                acc += block_cov[i * k_blocks + k].abs();
            }
        }
        far_sum_max = far_sum_max.max(acc);
    }
    Ok((adjacent_max, far_sum_max))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::{theta_path, tvar_covariance, ThetaKind};

    fn assert_close(actual: f64, expected: f64, tol: f64) {
        assert!(
            (actual - expected).abs() <= tol,
            "expected {expected}, got {actual} (tol {tol})"
        );
    }

    fn series(values: &[f64]) -> TimeSeries {
        TimeSeries::new(values.to_vec()).unwrap()
    }

    #[test]
    fn brv_worked_example() {
        let x = series(&[1.0, 2.0, 3.0, 4.0]);
        let track = brv(&x, 2).unwrap();
        assert_eq!(track.values(), &[1.0, 9.0, 36.0, 100.0]);
        assert_eq!(track.kind(), TrackKind::Brv);
        assert_eq!(track.m(), 2);
    }

    #[test]
    fn brv_no_cross_worked_example() {
        let x = series(&[1.0, 2.0, 3.0, 4.0]);
        let track = brv_no_cross(&x, 2).unwrap();
        assert_eq!(track.values(), &[1.0, 9.0, 18.0, 58.0]);
        assert!(track.values().iter().all(|&v| v >= 0.0));
    }

    #[test]
    fn overlapping_worked_example() {
        let x = series(&[1.0, 1.0, 1.0, 1.0]);
        let track = overlapping_variance(&x, 2).unwrap();
        assert_eq!(track.values(), &[0.0, 2.0, 4.0, 6.0]);
    }

    #[test]
    fn overlapping_window_one_is_running_square_sum() {
        let x = series(&[3.0, -2.0, 0.5]);
        let track = overlapping_variance(&x, 1).unwrap();
        assert_eq!(track.values(), &[9.0, 13.0, 13.25]);
    }

    #[test]
    fn zero_series_gives_zero_tracks() {
        let x = series(&[0.0; 10]);
        for track in [
            brv(&x, 3).unwrap(),
            brv_no_cross(&x, 3).unwrap(),
            overlapping_variance(&x, 3).unwrap(),
        ] {
            assert!(track.values().iter().all(|&v| v == 0.0));
        }
    }

    #[test]
    fn brv_two_full_blocks_is_squared_sum() {
        // With exactly two blocks the cross term completes the square:
        // T_2 = B1^2 + B2^2 + 2 B1 B2 = (B1 + B2)^2.
        let x = series(&[1.0, -2.0, 3.5, 0.25, -1.0, 2.0]);
        let m = 3;
        let track = brv(&x, m).unwrap();
        let total: f64 = x.values().iter().sum();
        assert_close(track.values()[5], total * total, 1e-12);
    }

    #[test]
    fn brv_block_boundary_matches_block_form() {
        let x = series(&[0.5, 1.5, -1.0, 2.0, 3.0, -0.5, 1.0, 0.0]);
        let m = 2;
        let track = brv(&x, m).unwrap();
        let b: Vec<f64> = x.values().chunks(m).map(|c| c.iter().sum()).collect();
        for k in 1..=4usize {
            let mut t = 0.0;
            for a in 0..k {
                t += b[a] * b[a];
            }
            for a in 0..k.saturating_sub(1) {
                t += 2.0 * b[a] * b[a + 1];
            }
            assert_close(track.values()[k * m - 1], t, 1e-12);
        }
    }

    #[test]
    fn tracks_are_even_in_the_series() {
        let x = series(&[1.0, -2.0, 3.0, 4.0, -5.0]);
        let flipped = series(&[-1.0, 2.0, -3.0, -4.0, 5.0]);
        for m in [1, 2, 3] {
            assert_eq!(brv(&x, m).unwrap().values(), brv(&flipped, m).unwrap().values());
            assert_eq!(
                brv_no_cross(&x, m).unwrap().values(),
                brv_no_cross(&flipped, m).unwrap().values()
            );
            assert_eq!(
                overlapping_variance(&x, m).unwrap().values(),
                overlapping_variance(&flipped, m).unwrap().values()
            );
        }
    }

    #[test]
    fn block_length_validation() {
        let x = series(&[1.0, 2.0]);
        assert!(brv(&x, 0).is_err());
        assert!(brv(&x, 3).is_err());
        assert!(brv_no_cross(&x, 3).is_err());
        assert!(overlapping_variance(&x, 3).is_err());
    }

    #[test]
    fn exact_track_identity_covariance() {
        let oracle = CovarianceOracle::identity(5, 2.5).unwrap();
        let track = exact_partial_variance(&oracle);
        for (j, v) in track.values().iter().enumerate() {
            assert_close(*v, (j + 1) as f64 * 2.5, 1e-12);
        }
        assert_eq!(track.kind(), TrackKind::Exact);
        assert_eq!(track.m(), 0);
    }

    #[test]
    fn exact_track_ar_example() {
        let path = theta_path(ThetaKind::Constant, 0.5, 2).unwrap();
        let oracle = tvar_covariance(&path, 1.0).unwrap();
        let track = exact_partial_variance(&oracle);
        assert_close(track.values()[0], 1.0, 1e-15);
        assert_close(track.values()[1], 3.25, 1e-15);
    }

    #[test]
    fn exact_track_telescoping_difference_stays_bounded() {
        // X_t = eps_t - eps_{t-1}: S_j = eps_j - eps_0, so E(S_j^2) = 2.
        let n = 40;
        let oracle = CovarianceOracle::from_fn(n, |i, j| {
            if i == j {
                2.0
            } else if i.abs_diff(j) == 1 {
                -1.0
            } else {
                0.0
            }
        })
        .unwrap();
        let track = exact_partial_variance(&oracle);
        for v in track.values() {
            assert_close(*v, 2.0, 1e-12);
        }
    }

    #[test]
    fn estimation_error_basics() {
        let x = series(&[1.0, 2.0, 3.0, 4.0]);
        let track = brv(&x, 2).unwrap();
        assert_eq!(estimation_error(&track, &track).unwrap(), 0.0);
        let other = VarianceTrack::from_exact(vec![0.0, 9.0, 36.0, 90.0]).unwrap();
        assert_close(estimation_error(&track, &other).unwrap(), 10.0, 1e-12);
        let short = VarianceTrack::from_exact(vec![1.0]).unwrap();
        assert!(estimation_error(&track, &short).is_err());
    }

    #[test]
    fn cross_diagnostic_identity_is_zero() {
        let oracle = CovarianceOracle::identity(24, 1.0).unwrap();
        let (adj, far) = cross_product_diagnostic(&oracle, 4).unwrap();
        assert_eq!(adj, 0.0);
        assert_eq!(far, 0.0);
    }

    #[test]
    fn cross_diagnostic_band_one_has_no_far_terms() {
        let n = 30;
        let oracle = CovarianceOracle::from_fn(n, |i, j| {
            if i == j {
                2.0
            } else if i.abs_diff(j) == 1 {
                0.5
            } else {
                0.0
            }
        })
        .unwrap();
        for m in [2, 3, 5] {
            let (adj, far) = cross_product_diagnostic(&oracle, m).unwrap();
            // Adjacent blocks only touch through the single boundary pair.
            assert_close(adj, 0.5, 1e-12);
            assert_eq!(far, 0.0);
        }
    }

    #[test]
    fn cross_diagnostic_adjacent_stable_in_block_length() {
        // Exponentially decaying dependence: E(B_k B_{k+1}) converges as m
        // grows, so the values at m=8 and m=64 agree within a factor of 2.
        let path = theta_path(ThetaKind::Constant, 0.5, 256).unwrap();
        let oracle = tvar_covariance(&path, 1.0).unwrap();
        let (adj8, _) = cross_product_diagnostic(&oracle, 8).unwrap();
        let (adj64, _) = cross_product_diagnostic(&oracle, 64).unwrap();
        assert!(adj8 > 0.0 && adj64 > 0.0);
        let ratio = adj64 / adj8;
        assert!(
            (0.5..=2.0).contains(&ratio),
            "adjacent cross-moment ratio {ratio} outside [0.5, 2]"
        );
    }

    #[test]
    fn brv_beats_no_cross_on_dependent_data() {
        // Positively autocorrelated data: the cross terms capture most of
        // the covariance between adjacent blocks, so the full estimator
        // should be closer to the truth in a clear majority of replications.
        use crate::models::{simulate_tvar, InnovationSpec};
        use crate::rng::{derive_seed, stage};
        let n = 1000;
        let m = 10;
        let path = theta_path(ThetaKind::Constant, 0.8, n).unwrap();
        let truth = VarianceTrack::from_exact(
            crate::models::tvar_partial_variance(&path, 1.0),
        )
        .unwrap();
        let innov = InnovationSpec::standard_normal();
        let reps = 200;
        let mut wins = 0;
        for r in 0..reps {
            let x = simulate_tvar(&path, &innov, derive_seed(1234, stage::REPLICATION, r));
            let with_cross = estimation_error(&brv(&x, m).unwrap(), &truth).unwrap();
            let without = estimation_error(&brv_no_cross(&x, m).unwrap(), &truth).unwrap();
            if with_cross <= without {
                wins += 1;
            }
        }
        assert!(
            wins >= 120,
            "cross-term estimator won only {wins}/{reps} replications"
        );
    }
}
