//! Data-parallel execution switch.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// How independent per-sample work is scheduled. Results are always
/// returned in input order, so reductions over them are deterministic.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Exec {
    /// rayon worker pool; falls back to sequential without the `parallel` feature.
    #[default]
    Parallel,
    Sequential,
}

impl Exec {
    pub fn map<T, R, F>(self, items: &[T], f: F) -> Vec<R>
    where
        T: Sync,
        R: Send,
        F: Fn(&T) -> R + Sync + Send,
    {
        match self {
            #[cfg(feature = "parallel")]
            Exec::Parallel => items.par_iter().map(f).collect(),
            _ => items.iter().map(f).collect(),
        }
    }

    /// `true` when work actually runs on the pool.
    pub fn is_parallel(self) -> bool {
        cfg!(feature = "parallel") && self == Exec::Parallel
    }
}
