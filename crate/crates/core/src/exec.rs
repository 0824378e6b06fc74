//! Execution back end for embarrassingly parallel work.
//!
//! Every Monte Carlo trial and every sweep cell is a pure function of its
//! index, so the only reduction ever performed is an order-insensitive
//! integer sum or an indexed collect. That keeps results bit-identical
//! between the rayon path (`parallel` feature, default) and the
//! sequential fallback.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Map `0..n` through `f`, preserving index order in the output.
#[cfg(feature = "parallel")]
pub(crate) fn map_indexed<T: Send, F>(n: usize, f: F) -> Vec<T>
where
    F: Fn(usize) -> T + Sync + Send,
{
    (0..n).into_par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
pub(crate) fn map_indexed<T, F>(n: usize, f: F) -> Vec<T>
where
    F: Fn(usize) -> T,
{
    (0..n).map(f).collect()
}

/// Sum `f(i)` over `0..n` as a u64 count.
#[cfg(feature = "parallel")]
pub(crate) fn sum_indexed<F>(n: usize, f: F) -> u64
where
    F: Fn(usize) -> u64 + Sync + Send,
{
    (0..n).into_par_iter().map(f).sum()
}

#[cfg(not(feature = "parallel"))]
pub(crate) fn sum_indexed<F>(n: usize, f: F) -> u64
where
    F: Fn(usize) -> u64,
{
    (0..n).map(f).sum()
}

/// Sum a pair of u64 counts over `0..n`.
#[cfg(feature = "parallel")]
pub(crate) fn sum2_indexed<F>(n: usize, f: F) -> (u64, u64)
where
    F: Fn(usize) -> (u64, u64) + Sync + Send,
{
    (0..n)
        .into_par_iter()
        .map(f)
        .reduce(|| (0, 0), |a, b| (a.0 + b.0, a.1 + b.1))
}

#[cfg(not(feature = "parallel"))]
pub(crate) fn sum2_indexed<F>(n: usize, f: F) -> (u64, u64)
where
    F: Fn(usize) -> (u64, u64),
{
    sum2_indexed_seq(n, f)
}

/// Always-sequential variant of [`sum2_indexed`].
pub(crate) fn sum2_indexed_seq<F>(n: usize, f: F) -> (u64, u64)
where
    F: Fn(usize) -> (u64, u64),
{
    (0..n).map(f).fold((0, 0), |a, b| (a.0 + b.0, a.1 + b.1))
}
