//! Data-parallel helpers. With the `parallel` feature the work runs on the
//! current rayon pool; without it, or inside [`sequential`], it runs in order
//! on the calling thread. Output order never depends on the mode.

use std::cell::Cell;

thread_local! {
    static FORCE_SEQ: Cell<bool> = const { Cell::new(false) };
}

/// Runs `f` with every helper in this module forced onto the sequential path.
pub fn sequential<R>(f: impl FnOnce() -> R) -> R {
    let prev = FORCE_SEQ.with(|c| c.replace(true));
    let out = f();
    FORCE_SEQ.with(|c| c.set(prev));
    out
}

pub fn is_sequential() -> bool {
    !cfg!(feature = "parallel") || FORCE_SEQ.with(|c| c.get())
}

/// Maps `f` over `items`, preserving input order.
pub fn map<T, R, F>(items: Vec<T>, f: F) -> Vec<R>
where
    T: Send,
    R: Send,
    F: Fn(T) -> R + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        if !is_sequential() {
            use rayon::prelude::*;
            return items.into_par_iter().map(f).collect();
        }
    }
    items.into_iter().map(f).collect()
}

/// Maps `f` over `lo..=hi`, preserving order.
pub fn map_range<R, F>(lo: u64, hi: u64, f: F) -> Vec<R>
where
    R: Send,
    F: Fn(u64) -> R + Sync + Send,
{
    if lo > hi {
        return Vec::new();
    }
    #[cfg(feature = "parallel")]
    {
        if !is_sequential() {
            use rayon::prelude::*;
            return (lo..=hi).into_par_iter().map(f).collect();
        }
    }
    (lo..=hi).map(f).collect()
}

/// Returns the first `i` in `lo..=hi` (smallest) for which `f` yields `Some`.
pub fn find_first<R, F>(lo: u64, hi: u64, f: F) -> Option<(u64, R)>
where
    R: Send,
    F: Fn(u64) -> Option<R> + Sync + Send,
{
    if lo > hi {
        return None;
    }
    #[cfg(feature = "parallel")]
    {
        if !is_sequential() {
            use rayon::prelude::*;
            return (lo..=hi)
                .into_par_iter()
                .filter_map(|i| f(i).map(|r| (i, r)))
                .find_first(|_| true);
        }
    }
    (lo..=hi).find_map(|i| f(i).map(|r| (i, r)))
}
