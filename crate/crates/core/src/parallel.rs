//! Deterministic row-parallel evaluation.
//!
//! Work is split by grid row; every row is computed by one closure call and
//! rows are reassembled in index order, so results never depend on the
//! worker count. Reductions are left to callers and done sequentially.

use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::{Arc, Mutex, OnceLock};

use rayon::prelude::*;
use rayon::{ThreadPool, ThreadPoolBuilder};

static THREADS: AtomicUsize = AtomicUsize::new(1);
type Cached = Mutex<Option<(usize, Arc<ThreadPool>)>>;
static POOL: OnceLock<Cached> = OnceLock::new();

/// Sets the worker count used by grid operations (minimum 1).
pub fn set_threads(n: usize) {
    THREADS.store(n.max(1), Ordering::SeqCst);
}

pub fn threads() -> usize {
    THREADS.load(Ordering::SeqCst)
}

fn pool(n: usize) -> Arc<ThreadPool> {
    let cell = POOL.get_or_init(|| Mutex::new(None));
    let mut guard = cell.lock().expect("thread pool mutex poisoned");
    match guard.as_ref() {
        Some((k, p)) if *k == n => p.clone(),
        _ => {
            let p = Arc::new(
                ThreadPoolBuilder::new()
                    .num_threads(n)
                    .build()
                    .expect("failed to build worker pool"),
            );
            *guard = Some((n, p.clone()));
            p
        }
    }
}

/// Evaluates `f` for every row index in `rows` and returns the results in
/// row order.
pub fn map_rows<T, F>(rows: std::ops::Range<usize>, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    let n = threads();
    if n <= 1 || rows.len() < 2 {
        return rows.map(f).collect();
    }
    pool(n).install(|| rows.into_par_iter().map(&f).collect())
}
