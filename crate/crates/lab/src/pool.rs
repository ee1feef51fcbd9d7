//! Deterministic parallel map-reduce.
//!
//! Tasks are pure functions of their index; results are gathered into an
//! index-ordered vector regardless of completion order, so any reduction the
//! caller performs afterwards is independent of the worker count. A panicking
//! task aborts the whole run and reports its index.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::sync::atomic::{AtomicBool, AtomicUsize, Ordering};
use std::sync::Mutex;

#[derive(Debug)]
pub struct WorkerFailure {
    pub task_index: usize,
}

impl std::fmt::Display for WorkerFailure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "worker task {} panicked; run aborted", self.task_index)
    }
}

impl std::error::Error for WorkerFailure {}

/// Effective worker count: `requested`, or the machine parallelism when 0.
pub fn effective_workers(requested: usize) -> usize {
    if requested > 0 {
        requested
    } else {
        std::thread::available_parallelism()
            .map(|n| n.get())
            .unwrap_or(1)
    }
}

/// Run `task` for indices 0..n_tasks on `workers` threads; results are
/// returned in ascending index order. Reduction order (and therefore every
/// floating-point result downstream) is identical for any worker count.
pub fn parallel_map<T, F>(n_tasks: usize, workers: usize, task: F) -> Result<Vec<T>, WorkerFailure>
where
    T: Send,
    F: Fn(usize) -> T + Sync,
{
    let workers = effective_workers(workers).max(1).min(n_tasks.max(1));
    let next = AtomicUsize::new(0);
    let failed: Mutex<Option<usize>> = Mutex::new(None);
    let stop = AtomicBool::new(false);
    let slots: Vec<Mutex<Option<T>>> = (0..n_tasks).map(|_| Mutex::new(None)).collect();

    std::thread::scope(|scope| {
        for _ in 0..workers {
            scope.spawn(|| loop {
                if stop.load(Ordering::Relaxed) {
                    break;
                }
                let i = next.fetch_add(1, Ordering::Relaxed);
                if i >= n_tasks {
                    break;
                }
                match catch_unwind(AssertUnwindSafe(|| task(i))) {
                    Ok(v) => {
                        *slots[i].lock().unwrap() = Some(v);
                    }
                    Err(_) => {
                        let mut f = failed.lock().unwrap();
                        if f.is_none() {
                            *f = Some(i);
                        }
                        stop.store(true, Ordering::Relaxed);
                        break;
                    }
                }
            });
        }
    });

    if let Some(task_index) = *failed.lock().unwrap() {
        return Err(WorkerFailure { task_index });
    }
    Ok(slots
        .into_iter()
        .map(|s| s.into_inner().unwrap().expect("all tasks completed"))
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn results_are_index_ordered_for_any_worker_count() {
        let task = |i: usize| (i * i) as u64;
        let one = parallel_map(100, 1, task).unwrap();
        let eight = parallel_map(100, 8, task).unwrap();
        assert_eq!(one, eight);
        assert_eq!(one[7], 49);
    }

    #[test]
    fn empty_task_set_gives_empty_reduction() {
        let out = parallel_map(0, 4, |_| 1.0f64).unwrap();
        assert!(out.is_empty());
    }

    #[test]
    fn panic_reports_failing_index() {
        let err = parallel_map(16, 3, |i| {
            if i == 7 {
                panic!("boom");
            }
            i
        })
        .unwrap_err();
        assert_eq!(err.task_index, 7);
    }

    #[test]
    fn float_sums_identical_across_worker_counts() {
        let task = |i: usize| ((i as f64) * 0.1).sin();
        let a: f64 = parallel_map(5000, 1, task).unwrap().iter().sum();
        let b: f64 = parallel_map(5000, 7, task).unwrap().iter().sum();
        assert_eq!(a.to_bits(), b.to_bits());
    }
}
