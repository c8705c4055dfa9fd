//! Batch execution helpers. Per-atom solves, property-grid instances and
//! counterexample candidates are independent computations; with the
//! `parallel` feature enabled they run on the rayon thread pool, otherwise
//! on the calling thread. Results are always ordered by index, so the two
//! modes are interchangeable.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Execution mode for batch operations.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Exec {
    /// Parallel when the `parallel` feature is enabled, sequential otherwise.
    #[default]
    Auto,
    /// Always run on the calling thread.
    Sequential,
}

/// Applies `f` to every index in `0..n`, returning results in index order.
pub fn map_indexed<R: Send>(exec: Exec, n: usize, f: impl Fn(usize) -> R + Send + Sync) -> Vec<R> {
    match exec {
        #[cfg(feature = "parallel")]
        Exec::Auto => (0..n).into_par_iter().map(f).collect(),
        #[cfg(not(feature = "parallel"))]
        Exec::Auto => (0..n).map(f).collect(),
        Exec::Sequential => (0..n).map(f).collect(),
    }
}

/// Returns the result for the lowest index on which `f` yields `Some`,
/// regardless of completion order.
pub fn find_map_first<T: Send>(
    exec: Exec,
    n: usize,
    f: impl Fn(usize) -> Option<T> + Send + Sync,
) -> Option<T> {
    match exec {
        #[cfg(feature = "parallel")]
        Exec::Auto => (0..n).into_par_iter().find_map_first(f),
        #[cfg(not(feature = "parallel"))]
        Exec::Auto => (0..n).find_map(f),
        Exec::Sequential => (0..n).find_map(f),
    }
}
