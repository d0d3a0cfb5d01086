//! Execution strategy helpers: data-parallel map with an always-available
//! sequential twin.
//!
//! With the `parallel` feature (default), [`par_map`] fans work items out
//! across the rayon thread pool while preserving input order in the
//! output. Without the feature it degrades to the sequential
//! implementation, so downstream code is oblivious to the build
//! configuration. [`seq_map`] is always sequential regardless of
//! features, which lets benchmarks compare the two strategies within a
//! single build.

/// Order-preserving map over `items`, parallel when the `parallel`
/// feature is enabled.
#[cfg(feature = "parallel")]
pub fn par_map<T, U, F>(items: Vec<T>, f: F) -> Vec<U>
where
    T: Send,
    U: Send,
    F: Fn(T) -> U + Sync + Send,
{
    use rayon::prelude::*;
    items.into_par_iter().map(f).collect()
}

/// Order-preserving map over `items`, parallel when the `parallel`
/// feature is enabled.
#[cfg(not(feature = "parallel"))]
pub fn par_map<T, U, F>(items: Vec<T>, f: F) -> Vec<U>
where
    T: Send,
    U: Send,
    F: Fn(T) -> U + Sync + Send,
{
    seq_map(items, f)
}

/// Order-preserving sequential map (used by benchmarks as the baseline
/// and by callers that must stay single-threaded).
pub fn seq_map<T, U, F>(items: Vec<T>, f: F) -> Vec<U>
where
    F: Fn(T) -> U,
{
    items.into_iter().map(f).collect()
}
