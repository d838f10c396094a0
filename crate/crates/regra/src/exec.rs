//! A scoped-thread executor for check jobs.

use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use regra_core::verify::{merge, run_range, Executor, Job, Outcome, Serial};
use regra_core::Result;

/// Runs job ranges on up to `threads` scoped threads. Parts are merged in
/// range order, so the outcome does not depend on scheduling.
#[derive(Clone, Copy, Debug)]
pub struct Threads {
    threads: usize,
}

impl Threads {
    pub fn new(threads: usize) -> Threads {
        Threads {
            threads: threads.max(1),
        }
    }

    /// `REGRA_THREADS` if set to a positive number, else the machine's
    /// available parallelism.
    pub fn from_env() -> Threads {
        let env = std::env::var("REGRA_THREADS")
            .ok()
            .and_then(|v| v.parse().ok())
            .filter(|&n: &usize| n > 0);
        Threads::new(env.unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get())))
    }

    pub fn threads(&self) -> usize {
        self.threads
    }
}

impl Executor for Threads {
    fn run(&self, jobs: usize, job: &Job<'_>) -> Result<Outcome> {
        if self.threads == 1 || jobs < 2 {
            return Serial.run(jobs, job);
        }
        let chunks = (self.threads * 8).min(jobs);
        let size = jobs.div_ceil(chunks);
        let next = AtomicUsize::new(0);
        let parts: Mutex<Vec<Option<Result<Outcome>>>> = Mutex::new((0..chunks).map(|_| None).collect());
        std::thread::scope(|sc| {
            for _ in 0..self.threads.min(chunks) {
                sc.spawn(|| loop {
                    let c = next.fetch_add(1, Ordering::Relaxed);
                    if c >= chunks {
                        break;
                    }
                    let r = run_range(c * size..((c + 1) * size).min(jobs), job);
                    parts.lock().unwrap()[c] = Some(r);
                });
            }
        });
        merge(parts.into_inner().unwrap().into_iter().flatten())
    }
}
