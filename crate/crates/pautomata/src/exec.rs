//! Parallel/sequential execution helpers.
//!
//! With the `parallel` feature (default) the data-parallel loops run on
//! rayon; without it they fall back to plain iteration. Results are
//! deterministic either way: order-preserving `map`, first-by-index
//! `find_map`.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

#[cfg(feature = "parallel")]
pub(crate) fn map_indexed<R: Send>(n: usize, f: impl Fn(usize) -> R + Sync + Send) -> Vec<R> {
    (0..n).into_par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
pub(crate) fn map_indexed<R>(n: usize, f: impl Fn(usize) -> R) -> Vec<R> {
    (0..n).map(f).collect()
}

#[cfg(feature = "parallel")]
pub(crate) fn find_map_first<R: Send>(
    n: usize,
    f: impl Fn(usize) -> Option<R> + Sync + Send,
) -> Option<R> {
    (0..n).into_par_iter().find_map_first(f)
}

#[cfg(not(feature = "parallel"))]
pub(crate) fn find_map_first<R>(n: usize, f: impl Fn(usize) -> Option<R>) -> Option<R> {
    (0..n).find_map(f)
}

#[cfg(feature = "parallel")]
pub(crate) fn map_slice<T: Sync, R: Send>(
    items: &[T],
    f: impl Fn(&T) -> R + Sync + Send,
) -> Vec<R> {
    items.par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
pub(crate) fn map_slice<T, R>(items: &[T], f: impl Fn(&T) -> R) -> Vec<R> {
    items.iter().map(f).collect()
}
