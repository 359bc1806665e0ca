//! Data-parallel helpers. With the `parallel` feature they run on rayon unless
//! the mode is switched to sequential; without it everything is sequential.

use std::sync::atomic::{AtomicBool, Ordering};

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum ExecMode {
    #[default]
    Parallel,
    Sequential,
}

static FORCE_SEQUENTIAL: AtomicBool = AtomicBool::new(false);

pub fn set_mode(mode: ExecMode) {
    FORCE_SEQUENTIAL.store(mode == ExecMode::Sequential, Ordering::SeqCst);
}

/// Sizes the global pool; `1` switches to sequential mode. Only the first call can resize the pool.
pub fn set_threads(n: usize) {
    if n <= 1 {
        set_mode(ExecMode::Sequential);
        return;
    }
    set_mode(ExecMode::Parallel);
    #[cfg(feature = "parallel")]
    let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
}

pub fn mode() -> ExecMode {
    if cfg!(feature = "parallel") && !FORCE_SEQUENTIAL.load(Ordering::SeqCst) {
        ExecMode::Parallel
    } else {
        ExecMode::Sequential
    }
}

pub fn threads() -> usize {
    #[cfg(feature = "parallel")]
    if mode() == ExecMode::Parallel {
        return rayon::current_num_threads();
    }
    1
}

/// Order-preserving map over a slice.
pub fn par_map<T, R, F>(items: &[T], f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if mode() == ExecMode::Parallel {
        use rayon::prelude::*;
        return items.par_iter().map(f).collect();
    }
    items.iter().map(f).collect()
}

/// Order-preserving map over `0..n`.
pub fn par_map_range<R, F>(n: usize, f: F) -> Vec<R>
where
    R: Send,
    F: Fn(usize) -> R + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if mode() == ExecMode::Parallel {
        use rayon::prelude::*;
        return (0..n).into_par_iter().map(f).collect();
    }
    (0..n).map(f).collect()
}

/// Sum of `f(i)` for `i < n`, added in index order so results do not depend on scheduling.
pub fn ordered_sum<F>(n: usize, f: F) -> num_complex::Complex64
where
    F: Fn(usize) -> num_complex::Complex64 + Sync + Send,
{
    par_map_range(n, f).into_iter().sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn modes_agree() {
        let xs: Vec<u64> = (0..1000).collect();
        let a = par_map(&xs, |x| x * x);
        set_mode(ExecMode::Sequential);
        let b = par_map(&xs, |x| x * x);
        let s = ordered_sum(100, |i| num_complex::Complex64::new(i as f64, 0.0));
        set_mode(ExecMode::Parallel);
        assert_eq!(a, b);
        assert_eq!(s.re, 4950.0);
    }
}
