//! Slice-level execution.
//!
//! Almost every operation in the algebra is `k` independent dense kernels, one
//! per Fourier slice. With the `parallel` feature (on by default) those run on
//! the rayon pool; without it, or after [`set_parallel(false)`](set_parallel),
//! they run in slice order on the calling thread. Each slice writes only its
//! own output, so results are bit-identical under either schedule.

use std::sync::atomic::{AtomicBool, Ordering};

static PARALLEL: AtomicBool = AtomicBool::new(cfg!(feature = "parallel"));

/// Enables or disables the rayon path at runtime. Has no effect when the
/// crate is built without the `parallel` feature.
pub fn set_parallel(enabled: bool) {
    PARALLEL.store(enabled && cfg!(feature = "parallel"), Ordering::Relaxed);
}

pub fn is_parallel() -> bool {
    PARALLEL.load(Ordering::Relaxed)
}

/// Evaluates `f(0), f(1), .., f(count - 1)` and collects in index order.
pub fn map_range<T, F>(count: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        if is_parallel() && count > 1 {
            use rayon::prelude::*;
            return (0..count).into_par_iter().map(f).collect();
        }
    }
    (0..count).map(f).collect()
}

/// Like [`map_range`] but short-circuits on the first error in index order.
pub fn try_map_range<T, E, F>(count: usize, f: F) -> Result<Vec<T>, E>
where
    T: Send,
    E: Send,
    F: Fn(usize) -> Result<T, E> + Sync + Send,
{
    map_range(count, f).into_iter().collect()
}
