//! Feature-gated data parallelism.
//!
//! Grid kernels call [`map_collect`], which fans work out over rayon when the
//! `parallel` feature is on and degrades to a plain sequential map without
//! it. Output order always matches input order, so downstream assembly is
//! identical under both backends.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

#[cfg(feature = "parallel")]
pub(crate) fn map_collect<T, U, F>(items: &[T], f: F) -> Vec<U>
where
    T: Sync,
    U: Send,
    F: Fn(&T) -> U + Sync + Send,
{
    items.par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
pub(crate) fn map_collect<T, U, F>(items: &[T], f: F) -> Vec<U>
where
    F: Fn(&T) -> U,
{
    items.iter().map(f).collect()
}
