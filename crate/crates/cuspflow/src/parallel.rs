//! Order-preserving data parallelism on a sized rayon pool.

use rayon::prelude::*;

/// Environment variable overriding the configured worker count.
pub const WORKERS_ENV: &str = "CUSPFLOW_WORKERS";

/// `configured`, unless `CUSPFLOW_WORKERS` is set; `0` means all cores.
pub fn worker_count(configured: usize) -> usize {
    let n = std::env::var(WORKERS_ENV).ok().and_then(|v| v.trim().parse().ok()).unwrap_or(configured);
    if n == 0 {
        std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1)
    } else {
        n
    }
}

/// `items.map(f)` in input order, on `workers` threads.
pub fn par_map<T, U, F>(workers: usize, items: &[T], f: F) -> Vec<U>
where
    T: Sync,
    U: Send,
    F: Fn(&T) -> U + Sync + Send,
{
    let pool = rayon::ThreadPoolBuilder::new().num_threads(workers.max(1)).build().expect("thread pool");
    pool.install(|| items.par_iter().map(&f).collect())
}

/// Like [`par_map`], stopping at the first error in input order.
pub fn try_par_map<T, U, E, F>(workers: usize, items: &[T], f: F) -> Result<Vec<U>, E>
where
    T: Sync,
    U: Send,
    E: Send,
    F: Fn(&T) -> Result<U, E> + Sync + Send,
{
    par_map(workers, items, f).into_iter().collect()
}
