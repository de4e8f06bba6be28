//! Data-parallel map helpers.
//!
//! Heavy batch work (parameter sweeps, quadrature panels, identity checks
//! over seeded point sets) funnels through [`map_collect`], which runs on
//! rayon when the `parallel` feature is enabled and falls back to a plain
//! sequential map otherwise. Results are always collected in input order,
//! so output is deterministic either way. `map_seq` / `map_par` expose both
//! code paths explicitly for the benchmark suite.

/// Sequential map, always available.
pub fn map_seq<T, U, F>(items: &[T], f: F) -> Vec<U>
where
    T: Sync,
    U: Send,
    F: Fn(&T) -> U + Sync + Send,
{
    items.iter().map(f).collect()
}

/// Parallel map over rayon, preserving input order.
#[cfg(feature = "parallel")]
pub fn map_par<T, U, F>(items: &[T], f: F) -> Vec<U>
where
    T: Sync,
    U: Send,
    F: Fn(&T) -> U + Sync + Send,
{
    use rayon::prelude::*;
    items.par_iter().map(f).collect()
}

/// Map with the default execution policy for this build.
pub fn map_collect<T, U, F>(items: &[T], f: F) -> Vec<U>
where
    T: Sync,
    U: Send,
    F: Fn(&T) -> U + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        map_par(items, f)
    }
    #[cfg(not(feature = "parallel"))]
    {
        map_seq(items, f)
    }
}
