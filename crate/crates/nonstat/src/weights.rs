// SPDX-License-Identifier: MIT OR Apache-2.0

//! Weighted-partial-sum weight families and their total-variation
//! functional.
//!
//! Each statistic treated by this crate — the CUSUM process, local-linear
//! smoothers, Haar coefficients — is a maximum over `t` of weighted sums
//! Σᵢ wᵢ(t)·xᵢ. What the Gaussian approximation charges for a family is
//! its total variation Ωₙ = sup_t (|w₁(t)| + Σᵢ |wᵢ(t) − wᵢ₋₁(t)|): the
//! smaller Ωₙ·(path coupling error), the tighter the transfer from data
//! maxima to Gaussian maxima.

use crate::error::{Error, Result};
use crate::scb::{local_linear_weights, KernelSpec};
use crate::series::uniform_grid;

/// A family of weight rows indexed by a location t ∈ (0, 1).
#[derive(Debug, Clone)]
pub enum WeightFamily {
    /// wᵢ(t) = (𝕀{i ≤ ⌊nt⌋} − ⌊nt⌋/n)/√n.
    Cusum,
    /// Local-linear smoother weights at bandwidth `h`.
    LocalLinear { h: f64, kernel: KernelSpec },
    /// Haar filter at level `j`: +2^{−j/2} on the first half of the block
    /// containing t, −2^{−j/2} on the second half, 0 elsewhere.
    Haar { j: u32 },
}

impl WeightFamily {
    /// The weight row (w₁(t), …, wₙ(t)).
    pub fn row(&self, t: f64, n: usize) -> Result<Vec<f64>> {
        if n == 0 {
            return Err(Error::invalid_input("weight row needs n >= 1"));
        }
        if !(t > 0.0 && t < 1.0) {
            return Err(Error::invalid_input(format!(
                "weight location must lie in (0, 1); got t={t}"
            )));
        }
        match self {
            WeightFamily::Cusum => {
                let k = (n as f64 * t).floor() as usize;
                let frac = k as f64 / n as f64;
                let scale = (n as f64).sqrt();
                Ok((1..=n)
                    .map(|i| ((if i <= k { 1.0 } else { 0.0 }) - frac) / scale)
                    .collect())
            }
            WeightFamily::LocalLinear { h, kernel } => {
                local_linear_weights(&uniform_grid(n), t, *h, kernel)
            }
            WeightFamily::Haar { j } => {
                let width = 1usize
                    .checked_shl(*j)
                    .filter(|w| *w <= n)
                    .ok_or_else(|| {
                        Error::invalid_input(format!(
                            "haar level {j} needs blocks of 2^{j} points but n={n}"
                        ))
                    })?;
                if *j == 0 {
                    return Err(Error::invalid_input("haar level must be at least 1"));
                }
                let n_blocks = n / width;
                let block = ((t * n_blocks as f64).ceil() as usize).clamp(1, n_blocks);
                let amp = crate::wavelet::haar_amplitude(*j);
                let half = width / 2;
                let mut row = vec![0.0; n];
                let start = (block - 1) * width;
                for (offset, w) in row[start..start + width].iter_mut().enumerate() {
                    *w = if offset < half { amp } else { -amp };
                }
                Ok(row)
            }
        }
    }

    /// Single weight wᵢ(t) with 1-based index `i`.
    pub fn weight(&self, t: f64, i: usize, n: usize) -> Result<f64> {
        if i == 0 || i > n {
            return Err(Error::invalid_input(format!(
                "weight index must satisfy 1 <= i <= n; got i={i}, n={n}"
            )));
        }
        Ok(self.row(t, n)?[i - 1])
    }
}

/// Default location grid: 512 equispaced interior points k/513.
pub fn default_t_grid() -> Vec<f64> {
    (1..=512).map(|k| k as f64 / 513.0).collect()
}

/// Ωₙ = sup over `t_grid` of |w₁(t)| + Σᵢ₌₂ⁿ |wᵢ(t) − wᵢ₋₁(t)|.
pub fn weight_total_variation(
    family: &WeightFamily,
    n: usize,
    t_grid: &[f64],
) -> Result<f64> {
    if t_grid.is_empty() {
        return Err(Error::invalid_input("total variation needs a non-empty t grid"));
    }
    let mut sup = 0.0f64;
    for &t in t_grid {
        let row = family.row(t, n)?;
        let mut tv = row[0].abs();
        for pair in row.windows(2) {
            tv += (pair[1] - pair[0]).abs();
        }
        sup = sup.max(tv);
    }
    Ok(sup)
}
