//! Data-parallel helpers with a sequential fallback.
//!
//! Every batch loop in the crate (per-source BFS passes, per-instance feature
//! extraction, solver campaigns, cross-validation folds) goes through
//! [`Parallelism::map`]. With the `parallel` feature disabled the rayon
//! backend is not compiled and every call runs sequentially; with it enabled
//! callers can still request [`Parallelism::Sequential`] at runtime, which is
//! what the benchmark suite uses to compare the two paths.

/// Execution strategy for batch loops.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Parallelism {
    /// Plain iterator on the calling thread.
    Sequential,
    /// Rayon work-stealing pool (falls back to sequential without the
    /// `parallel` feature).
    #[default]
    Rayon,
}

impl Parallelism {
    /// `true` when this build can actually run work on several threads.
    pub fn is_parallel(self) -> bool {
        cfg!(feature = "parallel") && self == Parallelism::Rayon
    }

    /// Order-preserving map over a slice.
    pub fn map<T, R, F>(self, items: &[T], f: F) -> Vec<R>
    where
        T: Sync,
        R: Send,
        F: Fn(&T) -> R + Sync + Send,
    {
        #[cfg(feature = "parallel")]
        if self == Parallelism::Rayon {
            use rayon::prelude::*;
            return items.par_iter().map(f).collect();
        }
        items.iter().map(f).collect()
    }

    /// Order-preserving map over `0..n`.
    pub fn map_range<R, F>(self, n: usize, f: F) -> Vec<R>
    where
        R: Send,
        F: Fn(usize) -> R + Sync + Send,
    {
        #[cfg(feature = "parallel")]
        if self == Parallelism::Rayon {
            use rayon::prelude::*;
            return (0..n).into_par_iter().map(f).collect();
        }
        (0..n).map(f).collect()
    }

    /// Fold `0..n` into per-worker accumulators and merge them.
    ///
    /// `merge` must be associative; the result is independent of how the range
    /// was split only if it is also commutative up to the caller's tolerance.
    pub fn fold_range<A, I, F, M>(self, n: usize, init: I, fold: F, merge: M) -> A
    where
        A: Send,
        I: Fn() -> A + Sync + Send,
        F: Fn(A, usize) -> A + Sync + Send,
        M: Fn(A, A) -> A + Sync + Send,
    {
        #[cfg(feature = "parallel")]
        if self == Parallelism::Rayon {
            use rayon::prelude::*;
            return (0..n).into_par_iter().fold(&init, &fold).reduce(&init, &merge);
        }
        let _ = &merge;
        (0..n).fold(init(), fold)
    }

    /// Run `f` inside a pool limited to `jobs` threads (0 = rayon default).
    pub fn with_jobs<R: Send>(self, jobs: usize, f: impl FnOnce() -> R + Send) -> R {
        #[cfg(feature = "parallel")]
        if self == Parallelism::Rayon && jobs > 0 {
            if let Ok(pool) = rayon::ThreadPoolBuilder::new().num_threads(jobs).build() {
                return pool.install(f);
            }
        }
        let _ = jobs;
        f()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn both_strategies_agree() {
        let xs: Vec<u64> = (0..1000).collect();
        let a = Parallelism::Sequential.map(&xs, |x| x * x);
        let b = Parallelism::Rayon.map(&xs, |x| x * x);
        assert_eq!(a, b);
        let s = Parallelism::Rayon.fold_range(1000, || 0u64, |acc, i| acc + i as u64, |a, b| a + b);
        assert_eq!(s, 499_500);
    }
}
