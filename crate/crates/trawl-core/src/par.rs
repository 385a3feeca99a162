//! Data-parallel helpers with a sequential fallback.
//!
//! Built with the `parallel` feature (the default), these fan out over rayon;
//! without it they run plain iterators. Every call site is structured so the
//! two lanes produce identical results: work units are independent and merged
//! in input order.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Map `f` over `items`, preserving input order in the output.
#[cfg(feature = "parallel")]
pub fn map_collect<T, U, F>(items: Vec<T>, f: F) -> Vec<U>
where
    T: Send,
    U: Send,
    F: Fn(T) -> U + Sync + Send,
{
    items.into_par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
pub fn map_collect<T, U, F>(items: Vec<T>, f: F) -> Vec<U>
where
    F: Fn(T) -> U,
{
    items.into_iter().map(f).collect()
}

/// Map `f` over borrowed items, preserving input order.
#[cfg(feature = "parallel")]
pub fn map_ref_collect<T, U, F>(items: &[T], f: F) -> Vec<U>
where
    T: Sync,
    U: Send,
    F: Fn(&T) -> U + Sync + Send,
{
    items.par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
pub fn map_ref_collect<T, U, F>(items: &[T], f: F) -> Vec<U>
where
    F: Fn(&T) -> U,
{
    items.iter().map(f).collect()
}

/// Map `f` over `0..n`, preserving index order in the output.
#[cfg(feature = "parallel")]
pub fn map_range<U, F>(n: usize, f: F) -> Vec<U>
where
    U: Send,
    F: Fn(usize) -> U + Sync + Send,
{
    (0..n).into_par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
pub fn map_range<U, F>(n: usize, f: F) -> Vec<U>
where
    F: Fn(usize) -> U,
{
    (0..n).map(f).collect()
}

/// [`map_range`] for cheap per-item work: batches at least `min_len`
/// indices per task so scheduling overhead stays amortized.
#[cfg(feature = "parallel")]
pub fn map_range_min_len<U, F>(n: usize, min_len: usize, f: F) -> Vec<U>
where
    U: Send,
    F: Fn(usize) -> U + Sync + Send,
{
    (0..n)
        .into_par_iter()
        .with_min_len(min_len.max(1))
        .map(f)
        .collect()
}

#[cfg(not(feature = "parallel"))]
pub fn map_range_min_len<U, F>(n: usize, _min_len: usize, f: F) -> Vec<U>
where
    F: Fn(usize) -> U,
{
    (0..n).map(f).collect()
}

/// Map `f` over index chunks of `0..len` and sum the u64 results.
/// The chunk boundaries are fixed by `chunk` alone, so the sum is
/// deterministic whatever the thread count.
#[cfg(feature = "parallel")]
pub fn sum_over_chunks<F>(len: u64, chunk: u64, f: F) -> u64
where
    F: Fn(u64, u64) -> u64 + Sync + Send,
{
    let n_chunks = len.div_ceil(chunk);
    (0..n_chunks)
        .into_par_iter()
        .map(|i| {
            let start = i * chunk;
            f(start, (start + chunk).min(len))
        })
        .sum()
}

#[cfg(not(feature = "parallel"))]
pub fn sum_over_chunks<F>(len: u64, chunk: u64, f: F) -> u64
where
    F: Fn(u64, u64) -> u64,
{
    let n_chunks = len.div_ceil(chunk);
    (0..n_chunks)
        .map(|i| {
            let start = i * chunk;
            f(start, (start + chunk).min(len))
        })
        .sum()
}

/// True when the parallel lane is compiled in.
pub fn is_parallel() -> bool {
    cfg!(feature = "parallel")
}

/// Cap the worker pool at `n` threads (0 keeps the default). Takes effect
/// only before the pool's first use; later calls are ignored.
#[cfg(feature = "parallel")]
pub fn configure_threads(n: usize) {
    if n > 0 {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
}

#[cfg(not(feature = "parallel"))]
pub fn configure_threads(_n: usize) {}
