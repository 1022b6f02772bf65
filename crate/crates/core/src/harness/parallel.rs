//! Trial-level data parallelism. Results always come back in trial order,
//! so downstream reductions are independent of scheduling.

/// Caps the worker count when set to a positive integer.
pub const THREADS_ENV: &str = "RRD_THREADS";

/// Worker count from `RRD_THREADS`, if set and valid.
pub fn thread_count() -> Option<usize> {
    std::env::var(THREADS_ENV)
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .filter(|&t| t > 0)
}

/// `f(0), …, f(trials − 1)` in order, on up to `RRD_THREADS` workers.
pub fn map_trials<T, F>(trials: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    map_trials_with_threads(trials, thread_count(), f)
}

#[cfg(feature = "parallel")]
pub fn map_trials_with_threads<T, F>(trials: usize, threads: Option<usize>, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    use rayon::prelude::*;
    if threads == Some(1) {
        return (0..trials).map(f).collect();
    }
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(t) = threads {
        builder = builder.num_threads(t);
    }
    match builder.build() {
        Ok(pool) => pool.install(|| (0..trials).into_par_iter().map(&f).collect()),
        Err(e) => {
            log::warn!("thread pool unavailable ({e}); running trials sequentially");
            (0..trials).map(f).collect()
        }
    }
}

#[cfg(not(feature = "parallel"))]
pub fn map_trials_with_threads<T, F>(trials: usize, _threads: Option<usize>, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    (0..trials).map(f).collect()
}
