// SPDX-License-Identifier: MIT OR Apache-2.0

//! Series container, partial sums, and block decomposition.
//!
//! Formulas throughout the crate are written with 1-based indices
//! (observation i of n, block a of ⌈n/m⌉); storage is 0-based. Public
//! index arguments follow the 1-based convention and say so.

use crate::error::{Error, Result};

/// An observed (or simulated) series with an optional design grid.
///
/// Invariants, enforced at construction: at least one value, all values
/// finite; if a grid is attached it has the same length, lies in (0, 1],
/// and is strictly increasing.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeSeries {
    values: Vec<f64>,
    grid: Option<Vec<f64>>,
}

impl TimeSeries {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::invalid_input("series must contain at least one value"));
        }
        if let Some(pos) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::data(format!(
                "non-finite value at position {} (1-based)",
                pos + 1
            )));
        }
        Ok(TimeSeries { values, grid: None })
    }

    pub fn with_grid(values: Vec<f64>, grid: Vec<f64>) -> Result<Self> {
        let mut series = Self::new(values)?;
        if grid.len() != series.n() {
            return Err(Error::invalid_input(format!(
                "grid length {} does not match series length {}",
                grid.len(),
                series.n()
            )));
        }
        if grid[0] <= 0.0 || *grid.last().unwrap() > 1.0 {
            return Err(Error::invalid_input(format!(
                "grid must lie in (0, 1]; got range [{}, {}]",
                grid[0],
                grid.last().unwrap()
            )));
        }
        if grid.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::invalid_input("grid must be strictly increasing"));
        }
        series.grid = Some(grid);
        Ok(series)
    }

    /// Construct from values known to satisfy the invariants (simulator
    /// output); checked only in debug builds.
    pub(crate) fn from_simulated(values: Vec<f64>) -> Self {
        debug_assert!(!values.is_empty() && values.iter().all(|v| v.is_finite()));
        TimeSeries { values, grid: None }
    }

    pub fn n(&self) -> usize {
        self.values.len()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn grid(&self) -> Option<&[f64]> {
        self.grid.as_deref()
    }

    /// The attached grid, or the default design tᵢ = i/n.
    pub fn grid_or_uniform(&self) -> Vec<f64> {
        match &self.grid {
            Some(g) => g.clone(),
            None => uniform_grid(self.n()),
        }
    }

    pub fn with_replaced_values(&self, values: Vec<f64>) -> Result<Self> {
        match &self.grid {
            Some(g) => TimeSeries::with_grid(values, g.clone()),
            None => TimeSeries::new(values),
        }
    }
}

/// The default design grid tᵢ = i/n, i = 1..n.
pub fn uniform_grid(n: usize) -> Vec<f64> {
    (1..=n).map(|i| i as f64 / n as f64).collect()
}

/// Partition of 1..n into ⌈n/m⌉ consecutive blocks of length m (last
/// block possibly shorter): block a covers indices (a−1)m+1 ..= min(am, n).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BlockScheme {
    pub n: usize,
    pub m: usize,
}

impl BlockScheme {
    pub fn new(n: usize, m: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::invalid_input("block scheme requires n >= 1"));
        }
        if m == 0 || m > n {
            return Err(Error::invalid_input(format!(
                "block length must satisfy 1 <= m <= n; got m={m}, n={n}"
            )));
        }
        Ok(BlockScheme { n, m })
    }

    /// Default block length ⌊n^(1/3)⌋ (at least 1).
    pub fn with_default_m(n: usize) -> Result<Self> {
        Self::new(n, default_block_length(n))
    }

    pub fn block_count(&self) -> usize {
        self.n.div_ceil(self.m)
    }
}

/// The default block-length rule m = ⌊n^(1/3)⌋, floored at 1.
pub fn default_block_length(n: usize) -> usize {
    ((n as f64).cbrt().floor() as usize).max(1)
}

/// Running sums out[j] = Σ_{i ≤ j} x_i. Never empty: the series type
/// guarantees n ≥ 1.
pub fn partial_sums(x: &TimeSeries) -> Vec<f64> {
    let mut out = Vec::with_capacity(x.n());
    let mut acc = 0.0;
    for &v in x.values() {
        acc += v;
        out.push(acc);
    }
    out
}

/// Block sums B_a = Σ_{i=(a−1)m+1}^{am ∧ n} x_i for a = 1..⌈n/m⌉.
pub fn block_sums(x: &TimeSeries, scheme: &BlockScheme) -> Result<Vec<f64>> {
    if scheme.n != x.n() {
        return Err(Error::invalid_input(format!(
            "block scheme is for n={}, series has n={}",
            scheme.n,
            x.n()
        )));
    }
    Ok(x.values()
        .chunks(scheme.m)
        .map(|chunk| chunk.iter().sum())
        .collect())
}

/// Partial sum of the block containing index j (1-based):
/// zero when j is a multiple of m, else Σ_{i=⌊j/m⌋·m+1}^{j} x_i.
pub fn remainder_sum(x: &TimeSeries, scheme: &BlockScheme, j: usize) -> Result<f64> {
    if scheme.n != x.n() {
        return Err(Error::invalid_input(format!(
            "block scheme is for n={}, series has n={}",
            scheme.n,
            x.n()
        )));
    }
    if j == 0 || j > x.n() {
        return Err(Error::invalid_input(format!(
            "index j must satisfy 1 <= j <= n={}; got j={j}",
            x.n()
        )));
    }
    if j % scheme.m == 0 {
        return Ok(0.0);
    }
    let start = (j / scheme.m) * scheme.m; // 0-based start of the open block
    Ok(x.values()[start..j].iter().sum())
}
