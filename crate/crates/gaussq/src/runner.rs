use std::num::NonZeroUsize;
use std::sync::Mutex;
use std::thread;

use gaussq_core::mcint::ChunkRunner;

/// Environment variable capping the number of worker threads.
pub const THREADS_ENV: &str = "GAUSS_THREADS";

/// Runs chunks on scoped threads. Results come back in chunk order, so the
/// worker count never changes an estimate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ThreadRunner {
    workers: usize,
}

impl ThreadRunner {
    pub fn new(workers: usize) -> Self {
        ThreadRunner { workers: workers.max(1) }
    }

    /// Available parallelism, capped by `GAUSS_THREADS` when it holds a
    /// positive integer.
    pub fn from_env() -> Self {
        let available = thread::available_parallelism().map_or(1, NonZeroUsize::get);
        let cap = std::env::var(THREADS_ENV).ok().and_then(|v| v.trim().parse::<usize>().ok()).filter(|&n| n > 0);
        ThreadRunner::new(cap.map_or(available, |c| c.min(available)))
    }

    pub fn workers(&self) -> usize {
        self.workers
    }
}

impl ChunkRunner for ThreadRunner {
    fn run_chunks<T, F>(&self, n_chunks: usize, job: F) -> Vec<T>
    where
        T: Send,
        F: Fn(usize) -> T + Sync,
    {
        let workers = self.workers.min(n_chunks);
        if workers <= 1 {
            return (0..n_chunks).map(job).collect();
        }
        let slots: Vec<Mutex<Option<T>>> = (0..n_chunks).map(|_| Mutex::new(None)).collect();
        thread::scope(|s| {
            for w in 0..workers {
                let (job, slots) = (&job, &slots);
                s.spawn(move || {
                    for c in (w..n_chunks).step_by(workers) {
                        *slots[c].lock().unwrap() = Some(job(c));
                    }
                });
            }
        });
        slots.into_iter().map(|m| m.into_inner().unwrap().expect("every chunk ran")).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use gaussq_core::mcint::{vegas_integrate_with, Serial, VegasConfig};

    #[test]
    fn results_keep_chunk_order() {
        let out = ThreadRunner::new(3).run_chunks(10, |c| c * c);
        assert_eq!(out, (0..10).map(|c| c * c).collect::<Vec<_>>());
    }

    #[test]
    fn estimates_do_not_depend_on_worker_count() {
        let f = |x: &[f64]| (x[0] * 3.0).cos().powi(2) * (1.0 + x[1] * x[1]);
        let cfg = VegasConfig { seed: 5, ..VegasConfig::default() };
        let bounds = [(0.0, 1.0), (0.0, 1.0)];
        let serial = vegas_integrate_with(f, &bounds, &cfg, &Serial).unwrap();
        for workers in [2, 4, 7] {
            let threaded = vegas_integrate_with(f, &bounds, &cfg, &ThreadRunner::new(workers)).unwrap();
            assert_eq!(serial, threaded);
        }
    }
}
