//! Thread-pooled batch execution for per-sample forward solves.

use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use ddio_core::learner::{BatchOutcome, BatchRunner};

/// Runs batch tasks on up to `jobs` OS threads. Outcomes are returned in
/// index order, so results are identical for every thread count.
pub struct ThreadedRunner {
    jobs: usize,
}

impl ThreadedRunner {
    /// `jobs = 0` means one thread per available CPU.
    pub fn new(jobs: usize) -> Self {
        let jobs = if jobs == 0 {
            std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1)
        } else {
            jobs
        };
        ThreadedRunner { jobs }
    }

    pub fn jobs(&self) -> usize {
        self.jobs
    }
}

/// Order-preserving parallel map over `0..count` on up to `jobs` threads.
pub fn parallel_map<T, F>(jobs: usize, count: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync,
{
    let jobs = if jobs == 0 {
        std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1)
    } else {
        jobs
    };
    let workers = jobs.min(count);
    if workers <= 1 {
        return (0..count).map(f).collect();
    }
    let slots: Vec<Mutex<Option<T>>> = (0..count).map(|_| Mutex::new(None)).collect();
    let next = AtomicUsize::new(0);
    std::thread::scope(|scope| {
        for _ in 0..workers {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                if i >= count {
                    break;
                }
                let out = f(i);
                *slots[i].lock().unwrap() = Some(out);
            });
        }
    });
    slots
        .into_iter()
        .map(|slot| slot.into_inner().unwrap().expect("worker filled every slot"))
        .collect()
}

impl BatchRunner for ThreadedRunner {
    fn run(
        &self,
        count: usize,
        task: &(dyn Fn(usize) -> BatchOutcome + Sync),
    ) -> Vec<BatchOutcome> {
        let workers = self.jobs.min(count);
        if workers <= 1 {
            return (0..count).map(task).collect();
        }
        let slots: Vec<Mutex<Option<BatchOutcome>>> =
            (0..count).map(|_| Mutex::new(None)).collect();
        let next = AtomicUsize::new(0);
        std::thread::scope(|scope| {
            for _ in 0..workers {
                scope.spawn(|| loop {
                    let i = next.fetch_add(1, Ordering::Relaxed);
                    if i >= count {
                        break;
                    }
                    let outcome = task(i);
                    *slots[i].lock().unwrap() = Some(outcome);
                });
            }
        });
        slots
            .into_iter()
            .map(|slot| slot.into_inner().unwrap().expect("worker filled every slot"))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use ddio_core::learner::ForwardSolve;

    #[test]
    fn outcomes_keep_index_order() {
        let runner = ThreadedRunner::new(4);
        let task = |i: usize| -> BatchOutcome {
            Ok(ForwardSolve { features: vec![i as f64], point: vec![] })
        };
        let out = runner.run(17, &task);
        for (i, o) in out.iter().enumerate() {
            assert_eq!(o.as_ref().unwrap().features[0], i as f64);
        }
    }
}
