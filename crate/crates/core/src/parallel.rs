//! Optional data parallelism for embarrassingly parallel sweeps.
//!
//! `VORT2D_THREADS` selects the worker count: unset or `0`/`1` runs serially,
//! larger values use a dedicated rayon pool. Results are always returned in
//! index order, so outputs do not depend on scheduling.

use rayon::prelude::*;

pub const THREADS_ENV: &str = "VORT2D_THREADS";

pub fn thread_count() -> usize {
    std::env::var(THREADS_ENV)
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .unwrap_or(0)
}

/// `(0..len).map(f)` collected in order, possibly on several threads.
pub fn ordered_map<T, F>(len: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    let threads = thread_count();
    if threads <= 1 || len < 2 {
        return (0..len).map(f).collect();
    }
    match rayon::ThreadPoolBuilder::new().num_threads(threads).build() {
        Ok(pool) => pool.install(|| (0..len).into_par_iter().map(&f).collect()),
        Err(e) => {
            log::warn!("thread pool unavailable ({e}); running serially");
            (0..len).map(f).collect()
        }
    }
}
