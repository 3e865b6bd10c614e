//! Thread-pool executor. Job outputs are collected in job order, so any
//! worker count produces the same results as the sequential executor.

use std::any::Any;

use aircomp_core::exec::Executor;
use rayon::prelude::*;

pub struct ThreadPoolExecutor {
    pool: rayon::ThreadPool,
}

impl ThreadPoolExecutor {
    pub fn new(workers: usize) -> Self {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(workers)
            .build()
            .expect("thread pool");
        Self { pool }
    }
}

impl Executor for ThreadPoolExecutor {
    fn run_boxed(
        &self,
        jobs: Vec<Box<dyn FnOnce() -> Box<dyn Any + Send> + Send>>,
    ) -> Vec<Box<dyn Any + Send>> {
        self.pool
            .install(|| jobs.into_par_iter().map(|job| job()).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use aircomp_core::exec::{run_jobs, Sequential};

    #[test]
    fn pool_output_matches_sequential_in_order() {
        let make_jobs = || -> Vec<_> {
            (0..257u64)
                .map(|i| move || i.wrapping_mul(0x9e37_79b9).rotate_left(7))
                .collect()
        };
        let seq = run_jobs(&Sequential, make_jobs());
        for workers in [1, 2, 8] {
            let pool = ThreadPoolExecutor::new(workers);
            assert_eq!(run_jobs(&pool, make_jobs()), seq);
        }
    }
}
