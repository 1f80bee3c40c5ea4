// SPDX-License-Identifier: MIT OR Apache-2.0

//! Data-generating processes for simulation studies, plus exact
//! second-moment oracles for the linear ones.
//!
//! All autoregressions start from X₀ = 0. That convention (rather than a
//! stationary burn-in) makes the covariance oracle exact: every
//! Cov(X_s, X_t) below is the finite-sample value of the recursion as
//! simulated, not an asymptotic approximation.

use rand::Rng;
use rand_distr::{ChiSquared, Distribution, StandardNormal, StudentT};

use crate::error::{Error, Result};
use crate::linalg;
use crate::rng::{self, stage};
use crate::series::TimeSeries;

/// Innovation distribution. All provided kinds are centered; the scaled-t
/// default and the normal have unit variance, the centered χ²₁ has
/// variance 2.
#[derive(Debug, Clone, Copy)]
pub struct InnovationSpec {
    kind: InnovKind,
}

#[derive(Debug, Clone, Copy)]
enum InnovKind {
    Normal,
    ScaledT { df: f64, scale: f64, dist: StudentT<f64> },
    ChiSq1 { dist: ChiSquared<f64> },
}

impl InnovationSpec {
    pub fn standard_normal() -> Self {
        InnovationSpec { kind: InnovKind::Normal }
    }

    /// Student t with `df` degrees of freedom, scaled to unit variance
    /// (scale √((df−2)/df)); requires df > 2 so the variance exists.
    pub fn scaled_t(df: u32) -> Result<Self> {
        let scale = (((df as f64) - 2.0) / df as f64).sqrt();
        Self::scaled_t_with_scale(df, scale)
    }

    /// Student t with an explicit scale factor.
    pub fn scaled_t_with_scale(df: u32, scale: f64) -> Result<Self> {
        if df <= 2 {
            return Err(Error::invalid_input(format!(
                "scaled t innovations need df > 2; got df={df}"
            )));
        }
        if !(scale.is_finite() && scale > 0.0) {
            return Err(Error::invalid_input(format!(
                "scale must be positive and finite; got {scale}"
            )));
        }
        let dist = StudentT::new(df as f64)
            .map_err(|e| Error::invalid_input(format!("t distribution: {e}")))?;
        Ok(InnovationSpec {
            kind: InnovKind::ScaledT { df: df as f64, scale, dist },
        })
    }

    /// χ²₁ − 1: centered, variance 2, skewed.
    pub fn centered_chisq1() -> Self {
        let dist = ChiSquared::new(1.0).expect("chi-squared with k=1 is valid");
        InnovationSpec { kind: InnovKind::ChiSq1 { dist } }
    }

    /// Parse a short name: `normal`, `t<df>` (e.g. `t4`, `t6`), `chisq1`.
    pub fn from_name(name: &str) -> Result<Self> {
        match name {
            "normal" | "gaussian" => Ok(Self::standard_normal()),
            "chisq1" => Ok(Self::centered_chisq1()),
            t if t.starts_with('t') => {
                let df: u32 = t[1..].parse().map_err(|_| {
                    Error::invalid_input(format!("unrecognized innovation kind `{name}`"))
                })?;
                Self::scaled_t(df)
            }
            _ => Err(Error::invalid_input(format!(
                "unrecognized innovation kind `{name}` (expected normal, t<df>, chisq1)"
            ))),
        }
    }

    pub fn name(&self) -> String {
        match self.kind {
            InnovKind::Normal => "normal".to_string(),
            InnovKind::ScaledT { df, .. } => format!("t{}", df as u64),
            InnovKind::ChiSq1 { .. } => "chisq1".to_string(),
        }
    }

    pub fn variance(&self) -> f64 {
        match self.kind {
            InnovKind::Normal => 1.0,
            InnovKind::ScaledT { df, scale, .. } => scale * scale * df / (df - 2.0),
            InnovKind::ChiSq1 { .. } => 2.0,
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match &self.kind {
            InnovKind::Normal => rng.sample(StandardNormal),
            InnovKind::ScaledT { scale, dist, .. } => scale * dist.sample(rng),
            InnovKind::ChiSq1 { dist } => dist.sample(rng) - 1.0,
        }
    }

    pub fn sample_vec<R: Rng + ?Sized>(&self, len: usize, rng: &mut R) -> Vec<f64> {
        (0..len).map(|_| self.sample(rng)).collect()
    }
}

/// Shape of the time-varying autoregressive coefficient θₜ.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ThetaKind {
    /// θₜ = θ for all t.
    Constant,
    /// θ for t ≤ n/2, −θ after.
    SplitSign,
    /// θ·0.75 with the sign alternating +,−,+,− over the four quarters.
    Piecewise4,
    /// θ·sin(8πt/n).
    Sine8Pi,
}

impl ThetaKind {
    pub fn from_name(name: &str) -> Result<Self> {
        match name {
            "constant" => Ok(ThetaKind::Constant),
            "split_sign" => Ok(ThetaKind::SplitSign),
            "piecewise4" => Ok(ThetaKind::Piecewise4),
            "sine8pi" => Ok(ThetaKind::Sine8Pi),
            _ => Err(Error::invalid_input(format!(
                "unrecognized theta path kind `{name}` (expected constant, split_sign, piecewise4, sine8pi)"
            ))),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            ThetaKind::Constant => "constant",
            ThetaKind::SplitSign => "split_sign",
            ThetaKind::Piecewise4 => "piecewise4",
            ThetaKind::Sine8Pi => "sine8pi",
        }
    }
}

/// Coefficient sequence θ₁..θₙ of a time-varying AR(1); every entry has
/// modulus < 1.
#[derive(Debug, Clone, PartialEq)]
pub struct ThetaPath {
    coefficients: Vec<f64>,
}

impl ThetaPath {
    pub fn from_coefficients(coefficients: Vec<f64>) -> Result<Self> {
        if coefficients.is_empty() {
            return Err(Error::invalid_input("theta path must have length >= 1"));
        }
        if let Some(bad) = coefficients.iter().find(|c| !(c.abs() < 1.0)) {
            return Err(Error::invalid_input(format!(
                "theta path requires |theta_t| < 1 for stability; found {bad}"
            )));
        }
        Ok(ThetaPath { coefficients })
    }

    pub fn n(&self) -> usize {
        self.coefficients.len()
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.coefficients
    }
}

/// Build the coefficient path for one of the named shapes.
pub fn theta_path(kind: ThetaKind, theta: f64, n: usize) -> Result<ThetaPath> {
    if !(theta.abs() < 1.0) {
        return Err(Error::invalid_input(format!(
            "|theta| < 1 required for stability; got theta={theta}"
        )));
    }
    if n == 0 {
        return Err(Error::invalid_input("theta path must have length >= 1"));
    }
    let coeffs = (1..=n)
        .map(|t| match kind {
            ThetaKind::Constant => theta,
            ThetaKind::SplitSign => {
                if 2 * t <= n {
                    theta
                } else {
                    -theta
                }
            }
            ThetaKind::Piecewise4 => {
                let quarter = (4 * t).div_ceil(n); // 1..=4
                if quarter % 2 == 1 {
                    theta * 0.75
                } else {
                    theta * -0.75
                }
            }
            ThetaKind::Sine8Pi => {
                theta * (8.0 * std::f64::consts::PI * t as f64 / n as f64).sin()
            }
        })
        .collect();
    ThetaPath::from_coefficients(coeffs)
}

/// Simulate Xₜ = θₜ·Xₜ₋₁ + εₜ with X₀ = 0, t = 1..n.
pub fn simulate_tvar(path: &ThetaPath, innov: &InnovationSpec, seed: u64) -> TimeSeries {
    let mut rng = rng::stream(seed, stage::SIMULATE, 0);
    let eps = innov.sample_vec(path.n(), &mut rng);
    TimeSeries::from_simulated(apply_tvar(path, &eps))
}

/// Apply the AR recursion to an explicit innovation vector (ε₁..εₙ).
/// Separated out so coupled copies can replay a stream with one position
/// replaced.
pub fn apply_tvar(path: &ThetaPath, eps: &[f64]) -> Vec<f64> {
    assert_eq!(
        eps.len(),
        path.n(),
        "innovation vector length {} does not match path length {}",
        eps.len(),
        path.n()
    );
    let mut out = Vec::with_capacity(path.n());
    let mut prev = 0.0;
    for (theta, e) in path.coefficients().iter().zip(eps) {
        prev = theta * prev + e;
        out.push(prev);
    }
    out
}

/// Elementwise sine, grid preserved. Bounded output for any input.
pub fn sine_transform(x: &TimeSeries) -> TimeSeries {
    let values = x.values().iter().map(|v| v.sin()).collect();
    x.with_replaced_values(values)
        .expect("sine of finite values is finite")
}

/// Shift observations after position `tau` (1-based, 1 ≤ tau < n) by
/// `delta`.
pub fn add_mean_shift(x: &TimeSeries, delta: f64, tau: usize) -> Result<TimeSeries> {
    let n = x.n();
    if tau == 0 || tau >= n {
        return Err(Error::invalid_input(format!(
            "shift location must satisfy 1 <= tau < n={n}; got tau={tau}"
        )));
    }
    let values = x
        .values()
        .iter()
        .enumerate()
        .map(|(idx, v)| if idx + 1 > tau { v + delta } else { *v })
        .collect();
    x.with_replaced_values(values)
}

/// Observations Xᵢ = μ(tᵢ) + Zᵢ on the supplied grid; the grid is attached
/// to the output.
pub fn signal_plus_noise(
    mu: impl Fn(f64) -> f64,
    grid: &[f64],
    noise: &TimeSeries,
) -> Result<TimeSeries> {
    if grid.len() != noise.n() {
        return Err(Error::invalid_input(format!(
            "grid length {} does not match noise length {}",
            grid.len(),
            noise.n()
        )));
    }
    let values = grid
        .iter()
        .zip(noise.values())
        .map(|(t, z)| mu(*t) + z)
        .collect();
    TimeSeries::with_grid(values, grid.to_vec())
}

/// Independent draws with heavy, index-growing extremes:
/// Xᵢ = ±(i+1)^(1/p) with probability 1/(i+1) each, ±1 with probability
/// 1/2 − 1/(i+1) each.
pub fn simulate_counterexample(n: usize, p: f64, seed: u64) -> Result<TimeSeries> {
    if n < 2 {
        return Err(Error::invalid_input(format!("n >= 2 required; got n={n}")));
    }
    if !(p > 2.0) {
        return Err(Error::invalid_input(format!("p > 2 required; got p={p}")));
    }
    let mut rng = rng::stream(seed, stage::SIMULATE, 0);
    let values = (1..=n)
        .map(|i| {
            let q = 1.0 / (i as f64 + 1.0);
            let u: f64 = rng.gen();
            let big = (i as f64 + 1.0).powf(1.0 / p);
            if u < q {
                big
            } else if u < 2.0 * q {
                -big
            } else if u < 0.5 + q {
                1.0
            } else {
                -1.0
            }
        })
        .collect();
    Ok(TimeSeries::from_simulated(values))
}

/// Second-order Volterra process with finite lag truncation:
/// Xₜ = Σ_{0 ≤ j₁ < j₂ ≤ L} a(j₁, j₂, t/n)·ε_{t−j₁}·ε_{t−j₂}.
pub fn simulate_volterra2(
    kernel: impl Fn(usize, usize, f64) -> f64,
    truncation: usize,
    n: usize,
    innov: &InnovationSpec,
    seed: u64,
) -> Result<TimeSeries> {
    if truncation == 0 {
        return Err(Error::invalid_input("truncation >= 1 required"));
    }
    if n == 0 {
        return Err(Error::invalid_input("n >= 1 required"));
    }
    let mut rng = rng::stream(seed, stage::SIMULATE, 0);
    // eps[k] holds ε_{k − truncation + 1}, covering indices 1−L ..= n.
    let eps = innov.sample_vec(n + truncation, &mut rng);
    let at = |t: i64| -> f64 {
        let idx = t + truncation as i64 - 1;
        debug_assert!(idx >= 0 && (idx as usize) < eps.len());
        eps[idx as usize]
    };
    let values = (1..=n as i64)
        .map(|t| {
            let u = t as f64 / n as f64;
            let mut acc = 0.0;
            for j1 in 0..truncation {
                for j2 in (j1 + 1)..=truncation {
                    let a = kernel(j1, j2, u);
                    if a != 0.0 {
                        acc += a * at(t - j1 as i64) * at(t - j2 as i64);
                    }
                }
            }
            acc
        })
        .collect();
    Ok(TimeSeries::from_simulated(values))
}

/// Exact covariance matrix of a zero-mean sequence, with a tolerance-based
/// positive semi-definiteness check at construction.
#[derive(Debug, Clone)]
pub struct CovarianceOracle {
    n: usize,
    cov: Vec<f64>, // row-major n×n
}

impl CovarianceOracle {
    /// Validate and wrap a row-major symmetric matrix. The PSD check
    /// accepts eigenvalues down to −1e-8·(trace/n).
    pub fn from_matrix(n: usize, cov: Vec<f64>) -> Result<Self> {
        if n == 0 || cov.len() != n * n {
            return Err(Error::invalid_input(format!(
                "covariance storage must be n*n with n >= 1; got n={n}, len={}",
                cov.len()
            )));
        }
        let mut trace = 0.0;
        for i in 0..n {
            if cov[i * n + i] < 0.0 {
                return Err(Error::invalid_input(format!(
                    "negative variance at diagonal position {i}"
                )));
            }
            trace += cov[i * n + i];
            for j in 0..i {
                let a = cov[i * n + j];
                let b = cov[j * n + i];
                if (a - b).abs() > 1e-10 * (1.0 + a.abs().max(b.abs())) {
                    return Err(Error::invalid_input(format!(
                        "matrix not symmetric at ({i},{j}): {a} vs {b}"
                    )));
                }
            }
        }
        let shift = 1e-8 * trace / n as f64 + 1e-30;
        if !linalg::is_psd_within(&cov, n, shift) {
            return Err(Error::invalid_input(
                "matrix is not positive semi-definite within tolerance",
            ));
        }
        Ok(CovarianceOracle { n, cov })
    }

    pub fn from_fn(n: usize, f: impl Fn(usize, usize) -> f64) -> Result<Self> {
        let mut cov = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                cov[i * n + j] = f(i, j);
            }
        }
        Self::from_matrix(n, cov)
    }

    pub fn identity(n: usize, variance: f64) -> Result<Self> {
        Self::from_fn(n, |i, j| if i == j { variance } else { 0.0 })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Entry (i, j), 0-based.
    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.cov[i * self.n + j]
    }

    pub(crate) fn as_slice(&self) -> &[f64] {
        &self.cov
    }
}

/// Exact covariance of the AR recursion Xₜ = θₜ·Xₜ₋₁ + εₜ, X₀ = 0, with
/// innovation variance `innov_var`:
/// for s ≤ t, Cov(X_s, X_t) = Var(X_s)·Π_{k=s+1..t} θₖ, where
/// Var(Xₜ) = θₜ²·Var(Xₜ₋₁) + innov_var.
pub fn tvar_covariance(path: &ThetaPath, innov_var: f64) -> Result<CovarianceOracle> {
    if !(innov_var.is_finite() && innov_var >= 0.0) {
        return Err(Error::invalid_input(format!(
            "innovation variance must be nonnegative; got {innov_var}"
        )));
    }
    let n = path.n();
    let theta = path.coefficients();
    let mut var = vec![0.0; n];
    let mut prev = 0.0;
    for t in 0..n {
        prev = theta[t] * theta[t] * prev + innov_var;
        var[t] = prev;
    }
    let mut cov = vec![0.0; n * n];
    for s in 0..n {
        cov[s * n + s] = var[s];
        let mut c = var[s];
        for t in (s + 1)..n {
            c *= theta[t];
            cov[s * n + t] = c;
            cov[t * n + s] = c;
        }
    }
    CovarianceOracle::from_matrix(n, cov)
}

/// Exact E(Sₜ²) for the same recursion in O(n) without materializing the
/// matrix: with aₜ = E(SₜXₜ) and vₜ = Var(Xₜ),
/// E(Sₜ²) = E(Sₜ₋₁²) + 2θₜ·aₜ₋₁ + vₜ and aₜ = θₜ·aₜ₋₁ + vₜ.
pub fn tvar_partial_variance(path: &ThetaPath, innov_var: f64) -> Vec<f64> {
    let n = path.n();
    let theta = path.coefficients();
    let mut out = Vec::with_capacity(n);
    let mut v = 0.0; // Var(X_t)
    let mut a = 0.0; // E(S_t X_t)
    let mut s2 = 0.0; // E(S_t^2)
    for t in 0..n {
        v = theta[t] * theta[t] * v + innov_var;
        s2 += 2.0 * theta[t] * a + v;
        a = theta[t] * a + v;
        out.push(s2);
    }
    out
}

/// A simulable innovation-driven model: time-varying AR(1), optionally
/// followed by the sine transform.
#[derive(Debug, Clone)]
pub struct TvarModel {
    pub path: ThetaPath,
    pub innovations: InnovationSpec,
    pub sine_transformed: bool,
}

impl TvarModel {
    pub fn new(path: ThetaPath, innovations: InnovationSpec) -> Self {
        TvarModel { path, innovations, sine_transformed: false }
    }

    pub fn sine_transformed(path: ThetaPath, innovations: InnovationSpec) -> Self {
        TvarModel { path, innovations, sine_transformed: true }
    }

    pub fn n(&self) -> usize {
        self.path.n()
    }

    /// Number of innovations one replication consumes.
    pub fn innovations_needed(&self) -> usize {
        self.path.n()
    }

    pub fn simulate(&self, seed: u64) -> TimeSeries {
        let mut rng = rng::stream(seed, stage::SIMULATE, 0);
        let eps = self.innovations.sample_vec(self.innovations_needed(), &mut rng);
        TimeSeries::from_simulated(self.apply_innovations(&eps))
    }

    /// Deterministic map from an innovation vector to the observed series.
    pub fn apply_innovations(&self, eps: &[f64]) -> Vec<f64> {
        let mut values = apply_tvar(&self.path, eps);
        if self.sine_transformed {
            for v in &mut values {
                *v = v.sin();
            }
        }
        values
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stats;

    fn assert_close(actual: f64, expected: f64, tol: f64) {
        assert!(
            (actual - expected).abs() <= tol,
            "expected {expected}, got {actual} (tol {tol})"
        );
    }

    #[test]
    fn theta_path_shapes() {
        let split = theta_path(ThetaKind::SplitSign, 0.9, 4).unwrap();
        assert_eq!(split.coefficients(), &[0.9, 0.9, -0.9, -0.9]);

        let pw = theta_path(ThetaKind::Piecewise4, 0.8, 8).unwrap();
        let w = 0.8 * 0.75;
        assert_eq!(pw.coefficients(), &[w, w, -w, -w, w, w, -w, -w]);

        let zero = theta_path(ThetaKind::Constant, 0.0, 5).unwrap();
        assert!(zero.coefficients().iter().all(|&c| c == 0.0));

        assert!(theta_path(ThetaKind::Constant, 1.0, 4).is_err());
        assert!(theta_path(ThetaKind::Constant, -1.3, 4).is_err());
    }

    #[test]
    fn tvar_same_seed_is_identical() {
        let path = theta_path(ThetaKind::Sine8Pi, 0.6, 64).unwrap();
        let innov = InnovationSpec::scaled_t(4).unwrap();
        let a = simulate_tvar(&path, &innov, 99);
        let b = simulate_tvar(&path, &innov, 99);
        assert_eq!(a.values(), b.values());
    }

    #[test]
    fn tvar_iid_case_is_the_innovations() {
        let path = theta_path(ThetaKind::Constant, 0.0, 200).unwrap();
        let innov = InnovationSpec::standard_normal();
        let x = simulate_tvar(&path, &innov, 7);
        // With theta = 0 the recursion is the identity on innovations.
        let mut rng = rng::stream(7, stage::SIMULATE, 0);
        let eps = innov.sample_vec(200, &mut rng);
        assert_eq!(x.values(), &eps[..]);
    }

    #[test]
    fn var_of_x2_matches_ma_form() {
        // Var(X₂) = 1 + θ² for θ constant, unit innovations.
        let path = theta_path(ThetaKind::Constant, 0.5, 2).unwrap();
        let innov = InnovationSpec::standard_normal();
        let reps = 100_000;
        let mut acc = 0.0;
        for r in 0..reps {
            let x = simulate_tvar(&path, &innov, rng::derive_seed(11, stage::REPLICATION, r));
            acc += x.values()[1] * x.values()[1];
        }
        assert_close(acc / reps as f64, 1.25, 0.02);
    }

    #[test]
    fn innovation_variances() {
        assert_close(InnovationSpec::standard_normal().variance(), 1.0, 0.0);
        assert_close(InnovationSpec::scaled_t(4).unwrap().variance(), 1.0, 1e-15);
        assert_close(InnovationSpec::scaled_t(6).unwrap().variance(), 1.0, 1e-15);
        assert_close(InnovationSpec::centered_chisq1().variance(), 2.0, 0.0);
        assert!(InnovationSpec::scaled_t(2).is_err());
    }

    #[test]
    fn innovation_names_roundtrip() {
        for name in ["normal", "t4", "t6", "chisq1"] {
            assert_eq!(InnovationSpec::from_name(name).unwrap().name(), name);
        }
        assert!(InnovationSpec::from_name("cauchy").is_err());
    }

    #[test]
    fn innovation_sample_moments() {
        let mut rng = rng::stream(3, 0, 0);
        for spec in [
            InnovationSpec::standard_normal(),
            InnovationSpec::scaled_t(4).unwrap(),
            InnovationSpec::scaled_t(6).unwrap(),
            InnovationSpec::centered_chisq1(),
        ] {
            let draws = spec.sample_vec(200_000, &mut rng);
            let m = stats::mean(&draws);
            let v = stats::sample_variance(&draws);
            assert_close(m, 0.0, 0.03);
            // t4 has infinite fourth moment; its variance estimate converges slowly.
            let tol = if spec.name() == "t4" { 0.15 } else { 0.05 };
            assert_close(v, spec.variance(), tol);
        }
    }

    #[test]
    fn sine_transform_examples() {
        let x = TimeSeries::new(vec![0.0, std::f64::consts::FRAC_PI_2, -0.3]).unwrap();
        let y = sine_transform(&x);
        assert_close(y.values()[0], 0.0, 0.0);
        assert_close(y.values()[1], 1.0, 1e-15);
        assert_close(y.values()[2], -(0.3f64.sin()), 1e-15);
        assert!(y.values().iter().all(|v| v.abs() <= 1.0));
    }

    #[test]
    fn tvar_covariance_closed_forms() {
        let iid = theta_path(ThetaKind::Constant, 0.0, 3).unwrap();
        let oracle = tvar_covariance(&iid, 2.0).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                assert_close(oracle.get(i, j), if i == j { 2.0 } else { 0.0 }, 1e-15);
            }
        }

        let ar = theta_path(ThetaKind::Constant, 0.5, 2).unwrap();
        let oracle = tvar_covariance(&ar, 1.0).unwrap();
        assert_close(oracle.get(0, 0), 1.0, 1e-15);
        assert_close(oracle.get(1, 1), 1.25, 1e-15);
        assert_close(oracle.get(0, 1), 0.5, 1e-15);
    }

    #[test]
    fn tvar_covariance_matches_monte_carlo_for_split_sign() {
        let path = theta_path(ThetaKind::SplitSign, 0.9, 8).unwrap();
        let oracle = tvar_covariance(&path, 1.0).unwrap();
        let innov = InnovationSpec::standard_normal();
        let reps = 100_000usize;
        let n = 8;
        let mut acc = vec![0.0; n * n];
        for r in 0..reps {
            let x = simulate_tvar(&path, &innov, rng::derive_seed(21, stage::REPLICATION, r as u64));
            for s in 0..n {
                for t in 0..n {
                    acc[s * n + t] += x.values()[s] * x.values()[t];
                }
            }
        }
        for s in 0..n {
            for t in 0..n {
                let emp = acc[s * n + t] / reps as f64;
                assert_close(emp, oracle.get(s, t), 0.06);
            }
        }
    }

    #[test]
    fn partial_variance_fast_path_matches_matrix_sum() {
        for (kind, theta) in [
            (ThetaKind::Constant, 0.5),
            (ThetaKind::SplitSign, -0.8),
            (ThetaKind::Piecewise4, 0.9),
            (ThetaKind::Sine8Pi, 0.7),
        ] {
            let path = theta_path(kind, theta, 60).unwrap();
            let oracle = tvar_covariance(&path, 1.3).unwrap();
            let fast = tvar_partial_variance(&path, 1.3);
            for j in 0..60 {
                let mut direct = 0.0;
                for s in 0..=j {
                    for t in 0..=j {
                        direct += oracle.get(s, t);
                    }
                }
                assert_close(fast[j], direct, 1e-9 * (1.0 + direct.abs()));
            }
        }
    }

    #[test]
    fn mean_shift_examples() {
        let x = TimeSeries::new(vec![0.0; 6]).unwrap();
        let shifted = add_mean_shift(&x, 1.0, 3).unwrap();
        assert_eq!(shifted.values(), &[0.0, 0.0, 0.0, 1.0, 1.0, 1.0]);
        let same = add_mean_shift(&x, 0.0, 3).unwrap();
        assert_eq!(same.values(), x.values());
        assert!(add_mean_shift(&x, 1.0, 0).is_err());
        assert!(add_mean_shift(&x, 1.0, 6).is_err());
    }

    #[test]
    fn signal_plus_noise_attaches_grid() {
        let grid: Vec<f64> = (1..=4).map(|i| i as f64 / 4.0).collect();
        let noise = TimeSeries::new(vec![0.0; 4]).unwrap();
        let mu = |t: f64| 0.5 * (2.0 * std::f64::consts::PI * t - 0.7).cos() + 0.3 * (-t).exp();
        let y = signal_plus_noise(mu, &grid, &noise).unwrap();
        assert_eq!(y.grid().unwrap(), &grid[..]);
        assert_close(y.values()[3], mu(1.0), 1e-15);
        // Value check near t = 0 of the trend function itself.
        assert_close(mu(0.0), 0.5 * (0.7f64).cos() + 0.3, 1e-12);
        let short_grid = vec![0.5];
        assert!(signal_plus_noise(mu, &short_grid, &noise).is_err());
    }

    #[test]
    fn counterexample_support_and_symmetry() {
        let n = 4000;
        let p = 4.0;
        let x = simulate_counterexample(n, p, 5).unwrap();
        for (idx, v) in x.values().iter().enumerate() {
            let i = idx + 1;
            let big = ((i + 1) as f64).powf(0.25);
            let a = v.abs();
            assert!(
                (a - 1.0).abs() < 1e-12 || (a - big).abs() < 1e-12,
                "value {v} at position {i} outside the two-point support"
            );
        }
        let m = stats::mean(x.values());
        assert!(m.abs() < 0.15, "empirical mean {m} too far from 0");
        assert!(simulate_counterexample(1, 4.0, 0).is_err());
        assert!(simulate_counterexample(100, 2.0, 0).is_err());
    }

    #[test]
    fn volterra_zero_kernel_and_product_case() {
        let innov = InnovationSpec::standard_normal();
        let zero = simulate_volterra2(|_, _, _| 0.0, 3, 50, &innov, 1).unwrap();
        assert!(zero.values().iter().all(|&v| v == 0.0));

        // kernel selecting (j1, j2) = (0, 1) gives X_t = eps_t * eps_{t-1};
        // mean 0, variance 1 under unit-variance innovations.
        let reps = 20_000;
        let mut acc = 0.0;
        let mut acc2 = 0.0;
        for r in 0..reps {
            let x = simulate_volterra2(
                |j1, j2, _| if j1 == 0 && j2 == 1 { 1.0 } else { 0.0 },
                1,
                5,
                &innov,
                rng::derive_seed(33, stage::REPLICATION, r),
            )
            .unwrap();
            let v = x.values()[2];
            acc += v;
            acc2 += v * v;
        }
        assert_close(acc / reps as f64, 0.0, 0.04);
        assert_close(acc2 / reps as f64, 1.0, 0.1);
    }

    #[test]
    fn tvar_model_apply_matches_simulate() {
        let path = theta_path(ThetaKind::Piecewise4, -0.4, 32).unwrap();
        let model = TvarModel::sine_transformed(path, InnovationSpec::scaled_t(6).unwrap());
        let direct = model.simulate(17);
        let mut rng = rng::stream(17, stage::SIMULATE, 0);
        let eps = model.innovations.sample_vec(32, &mut rng);
        assert_eq!(direct.values(), &model.apply_innovations(&eps)[..]);
    }
}
