//! Execution strategy for grid-shaped work.
//!
//! With the `parallel` feature (default) `Exec::Parallel` maps over rayon's
//! pool; without it every mode runs sequentially. Results are always
//! collected in input order, and reductions go through [`pairwise_sum`], so
//! the output does not depend on the mode or the thread count.

use num_complex::Complex64;

#[cfg(feature = "parallel")]
use rayon::prelude::*;

use crate::error::Result;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Exec {
    Sequential,
    /// Falls back to sequential execution when built without `parallel`.
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

pub fn map<T, R, F>(exec: Exec, items: &[T], f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    match exec {
        #[cfg(feature = "parallel")]
        Exec::Parallel => items.par_iter().map(f).collect(),
        _ => items.iter().map(f).collect(),
    }
}

pub fn try_map<T, R, F>(exec: Exec, items: &[T], f: F) -> Result<Vec<R>>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> Result<R> + Sync + Send,
{
    match exec {
        #[cfg(feature = "parallel")]
        Exec::Parallel => items.par_iter().map(f).collect(),
        _ => items.iter().map(f).collect(),
    }
}

pub fn try_map_range<R, F>(exec: Exec, n: usize, f: F) -> Result<Vec<R>>
where
    R: Send,
    F: Fn(usize) -> Result<R> + Sync + Send,
{
    match exec {
        #[cfg(feature = "parallel")]
        Exec::Parallel => (0..n).into_par_iter().map(f).collect(),
        _ => (0..n).map(f).collect(),
    }
}

/// Pairwise (cascade) summation with a fixed split, independent of scheduling.
pub fn pairwise_sum(values: &[Complex64]) -> Complex64 {
    const LEAF: usize = 16;
    if values.len() <= LEAF {
        return values.iter().fold(Complex64::new(0.0, 0.0), |acc, v| acc + v);
    }
    let mid = values.len() / 2;
    pairwise_sum(&values[..mid]) + pairwise_sum(&values[mid..])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn modes_agree_bitwise() {
        let items: Vec<f64> = (0..1000).map(|k| k as f64 * 0.37).collect();
        let f = |x: &f64| Complex64::new(x.sin(), x.cos());
        let a = map(Exec::Sequential, &items, f);
        let b = map(Exec::Parallel, &items, f);
        assert_eq!(a, b);
        assert_eq!(pairwise_sum(&a), pairwise_sum(&b));
    }

    #[test]
    fn pairwise_matches_naive_sum() {
        let v: Vec<Complex64> = (0..777).map(|k| Complex64::new(k as f64, -(k as f64))).collect();
        let s = pairwise_sum(&v);
        assert_eq!(s, Complex64::new(301476.0, -301476.0));
    }
}
