#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Execution strategy for the data-parallel loops.
///
/// `Parallel` only runs on rayon when the crate is built with the `parallel` feature;
/// otherwise it silently degrades to `Sequential`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Exec {
    Sequential,
    Parallel,
}

impl Default for Exec {
    fn default() -> Self {
        if cfg!(feature = "parallel") {
            Exec::Parallel
        } else {
            Exec::Sequential
        }
    }
}

// Below this many items the rayon split overhead dominates.
const MIN_PARALLEL: usize = 64;

impl Exec {
    #[cfg_attr(not(feature = "parallel"), allow(dead_code))]
    fn parallel_for(self, n: usize) -> bool {
        cfg!(feature = "parallel") && self == Exec::Parallel && n >= MIN_PARALLEL
    }

    /// `f(i)` for every `i` in `0..n`, in index order.
    pub(crate) fn map_range<T, F>(self, n: u64, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(u64) -> T + Sync + Send,
    {
        #[cfg(feature = "parallel")]
        if self.parallel_for(n as usize) {
            return (0..n).into_par_iter().map(f).collect();
        }
        (0..n).map(f).collect()
    }

    /// `f(x)` for every element, order preserved.
    pub(crate) fn map_slice<T, U, F>(self, xs: &[T], f: F) -> Vec<U>
    where
        T: Sync,
        U: Send,
        F: Fn(&T) -> U + Sync + Send,
    {
        #[cfg(feature = "parallel")]
        if self.parallel_for(xs.len()) {
            return xs.par_iter().map(f).collect();
        }
        xs.iter().map(f).collect()
    }

    /// Minimum of the `Some` values of `f` over `0..n`.
    pub(crate) fn min_range<F>(self, n: u64, f: F) -> Option<u64>
    where
        F: Fn(u64) -> Option<u64> + Sync + Send,
    {
        #[cfg(feature = "parallel")]
        if self.parallel_for(n as usize) {
            return (0..n).into_par_iter().filter_map(f).min();
        }
        (0..n).filter_map(f).min()
    }

    /// Minimum of `f` over all pairs of the two slices.
    pub(crate) fn min_pairs<T, F>(self, xs: &[T], ys: &[T], f: F) -> Option<u64>
    where
        T: Sync,
        F: Fn(&T, &T) -> u64 + Sync + Send,
    {
        #[cfg(feature = "parallel")]
        if self.parallel_for(xs.len() * ys.len()) {
            return xs
                .par_iter()
                .flat_map_iter(|x| ys.iter().map(move |y| (x, y)))
                .map(|(x, y)| f(x, y))
                .min();
        }
        xs.iter()
            .flat_map(|x| ys.iter().map(move |y| (x, y)))
            .map(|(x, y)| f(x, y))
            .min()
    }
}
