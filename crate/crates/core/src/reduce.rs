//! Blocked pairwise reduction over node indices.
//!
//! Nodes are cut into fixed blocks of [`BLOCK`] consecutive indices, each block
//! is accumulated left to right, and block partials are combined pairwise in a
//! tree that depends only on the number of blocks. Evaluating blocks in
//! parallel therefore cannot change a single bit of the result.

use std::ops::Range;

use serde::{Deserialize, Serialize};

pub const BLOCK: usize = 64;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExecPolicy {
    #[default]
    Sequential,
    /// Blocks evaluated on the rayon pool (falls back to sequential without
    /// the `parallel` feature).
    Parallel,
}

fn block_ranges(len: usize) -> Vec<Range<usize>> {
    (0..len.div_ceil(BLOCK))
        .map(|b| b * BLOCK..((b + 1) * BLOCK).min(len))
        .collect()
}

fn map_blocks<T, F>(len: usize, policy: ExecPolicy, leaf: F) -> Vec<T>
where
    T: Send,
    F: Fn(Range<usize>) -> T + Sync + Send,
{
    let ranges = block_ranges(len);
    match policy {
        #[cfg(feature = "parallel")]
        ExecPolicy::Parallel => {
            use rayon::prelude::*;
            ranges.into_par_iter().map(leaf).collect()
        }
        _ => ranges.into_iter().map(leaf).collect(),
    }
}

fn pairwise<T>(mut level: Vec<T>, combine: impl Fn(T, T) -> T) -> Option<T> {
    while level.len() > 1 {
        let mut next = Vec::with_capacity(level.len().div_ceil(2));
        let mut it = level.into_iter();
        while let Some(a) = it.next() {
            match it.next() {
                Some(b) => next.push(combine(a, b)),
                None => next.push(a),
            }
        }
        level = next;
    }
    level.pop()
}

/// Reduces `len` node contributions; `None` when `len == 0`.
pub fn block_reduce<T, F, C>(len: usize, policy: ExecPolicy, leaf: F, combine: C) -> Option<T>
where
    T: Send,
    F: Fn(Range<usize>) -> T + Sync + Send,
    C: Fn(T, T) -> T,
{
    pairwise(map_blocks(len, policy, leaf), combine)
}

/// Deterministic sum of a slice.
pub fn tree_sum(xs: &[f64]) -> f64 {
    block_reduce(
        xs.len(),
        ExecPolicy::Sequential,
        |r| xs[r].iter().sum::<f64>(),
        |a, b| a + b,
    )
    .unwrap_or(0.0)
}

/// Elementwise parallel-safe map preserving order.
pub(crate) fn map_nodes<T, F>(len: usize, policy: ExecPolicy, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    map_blocks(len, policy, |r| r.map(&f).collect::<Vec<T>>())
        .into_iter()
        .flatten()
        .collect()
}
