// SPDX-License-Identifier: MIT OR Apache-2.0

//! Replication driver: run `reps` independent seeded closures and collect
//! results in replication order.
//!
//! With the `parallel` feature (default) the work is distributed with
//! rayon; otherwise it runs serially. Because each replication receives a
//! seed derived from `(root, stage, index)` and results are collected by
//! index, the output is bit-identical in both modes and for any thread
//! count.

use crate::rng::derive_seed;

/// Run `f(rep_index, derived_seed)` for `rep_index` in `0..reps`.
///
/// `f` must be a pure function of its arguments for reproducibility to
/// hold across execution modes.
#[cfg(feature = "parallel")]
pub fn replicate_map<T, F>(reps: usize, root_seed: u64, stage: u64, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize, u64) -> T + Sync,
{
    use rayon::prelude::*;
    (0..reps)
        .into_par_iter()
        .map(|i| f(i, derive_seed(root_seed, stage, i as u64)))
        .collect()
}

#[cfg(not(feature = "parallel"))]
pub fn replicate_map<T, F>(reps: usize, root_seed: u64, stage: u64, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize, u64) -> T + Sync,
{
    replicate_map_serial(reps, root_seed, stage, f)
}

/// Serial reference implementation of [`replicate_map`]; always available
/// so the two execution modes can be compared in tests and benchmarks.
pub fn replicate_map_serial<T, F>(reps: usize, root_seed: u64, stage: u64, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize, u64) -> T + Sync,
{
    (0..reps)
        .map(|i| f(i, derive_seed(root_seed, stage, i as u64)))
        .collect()
}
