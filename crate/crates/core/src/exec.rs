//! Execution strategy for the data-parallel inner loops.
//!
//! With the `parallel` feature enabled, [`Exec::Parallel`] dispatches to rayon. Without it,
//! every strategy runs sequentially. Results are always assembled in index order, so the
//! choice never changes an output value.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Exec {
    Sequential,
    #[default]
    Parallel,
}

impl Exec {
    /// Strategy for a `--jobs` value. `Some(1)` means sequential; any other explicit count
    /// sizes the global worker pool, which can only happen once per process.
    pub fn from_jobs(jobs: Option<usize>) -> Exec {
        match jobs {
            Some(0 | 1) => Exec::Sequential,
            Some(_n) => {
                #[cfg(feature = "parallel")]
                if rayon::ThreadPoolBuilder::new().num_threads(_n).build_global().is_err() {
                    log::debug!("worker pool already initialized; --jobs ignored");
                }
                Exec::Parallel
            }
            None => Exec::Parallel,
        }
    }

    /// True when this strategy will actually use worker threads.
    pub fn is_parallel(self) -> bool {
        cfg!(feature = "parallel") && self == Exec::Parallel
    }

    /// Evaluates `f` on `0..n` and collects the results in index order.
    pub fn map_range<T, F>(self, n: usize, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(usize) -> T + Sync + Send,
    {
        #[cfg(feature = "parallel")]
        if self.is_parallel() {
            return (0..n).into_par_iter().map(f).collect();
        }
        (0..n).map(f).collect()
    }

    /// Maps over a slice, preserving order.
    pub fn map_slice<'a, S, T, F>(self, items: &'a [S], f: F) -> Vec<T>
    where
        S: Sync,
        T: Send,
        F: Fn(&'a S) -> T + Sync + Send,
    {
        #[cfg(feature = "parallel")]
        if self.is_parallel() {
            return items.par_iter().map(f).collect();
        }
        items.iter().map(f).collect()
    }

    /// Counts the indices in `0..n` for which `pred` holds.
    pub fn count_range<F>(self, n: usize, pred: F) -> usize
    where
        F: Fn(usize) -> bool + Sync + Send,
    {
        #[cfg(feature = "parallel")]
        if self.is_parallel() {
            return (0..n).into_par_iter().filter(|&i| pred(i)).count();
        }
        (0..n).filter(|&i| pred(i)).count()
    }
}
