//! Data-parallel map helpers.
//!
//! `map` fans out over rayon when the `parallel` feature is enabled and
//! degrades to a plain iterator otherwise; `map_seq` is always sequential
//! (the benchmark suite compares the two). Output order always matches
//! input order, so downstream consumers stay deterministic either way.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Order-preserving map over a slice, parallel when the feature allows.
pub fn map<I, O, F>(items: &[I], f: F) -> Vec<O>
where
    I: Sync,
    O: Send,
    F: Fn(&I) -> O + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        items.par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        items.iter().map(f).collect()
    }
}

/// Order-preserving sequential map; the baseline the benches compare against.
pub fn map_seq<I, O, F>(items: &[I], f: F) -> Vec<O>
where
    F: Fn(&I) -> O,
{
    items.iter().map(f).collect()
}
