//! Executor abstraction for deterministic fan-out.
//!
//! Per-device and per-server work inside a communication round, and the
//! trial blocks of the Monte-Carlo oracles, are independent jobs whose
//! randomness comes from their own substreams. An [`Executor`] only decides
//! *where* jobs run; results are always returned in job order, so every
//! implementation produces identical output. The sequential executor lives
//! here; a thread-pool one lives in the companion crate.

use alloc::boxed::Box;
use alloc::vec::Vec;
use core::any::Any;

type BoxedJob = Box<dyn FnOnce() -> Box<dyn Any + Send> + Send>;

pub trait Executor: Sync {
    /// Runs the jobs and returns their outputs in job order.
    fn run_boxed(&self, jobs: Vec<BoxedJob>) -> Vec<Box<dyn Any + Send>>;
}

/// Runs every job on the calling thread.
#[derive(Debug, Default, Clone, Copy)]
pub struct Sequential;

impl Executor for Sequential {
    fn run_boxed(&self, jobs: Vec<BoxedJob>) -> Vec<Box<dyn Any + Send>> {
        jobs.into_iter().map(|job| job()).collect()
    }
}

/// Typed front-end over [`Executor::run_boxed`].
pub fn run_jobs<T, F>(exec: &dyn Executor, jobs: Vec<F>) -> Vec<T>
where
    T: Send + 'static,
    F: FnOnce() -> T + Send + 'static,
{
    let boxed: Vec<BoxedJob> = jobs
        .into_iter()
        .map(|job| -> BoxedJob { Box::new(move || Box::new(job()) as Box<dyn Any + Send>) })
        .collect();
    exec.run_boxed(boxed)
        .into_iter()
        .map(|out| *out.downcast::<T>().expect("job output type mismatch"))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn results_keep_job_order() {
        let jobs: Vec<_> = (0..100).map(|i| move || i * i).collect();
        let out = run_jobs(&Sequential, jobs);
        assert_eq!(out, (0..100).map(|i| i * i).collect::<Vec<i32>>());
    }
}
