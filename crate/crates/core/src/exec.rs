//! Data-parallel map helpers with a sequential fallback.
//!
//! All sweeps in this crate are embarrassingly parallel over independent
//! items and must produce output in input order so results do not depend
//! on thread count.  With the `parallel` feature (default) [`map_ordered`]
//! runs on the rayon pool; without it both functions are sequential.
//! [`map_ordered_seq`] is always sequential and exists so benchmarks can
//! compare both paths in one binary.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Map `f` over `items`, preserving input order in the output.
#[cfg(feature = "parallel")]
pub fn map_ordered<T, U, F>(items: &[T], f: F) -> Vec<U>
where
    T: Sync,
    U: Send,
    F: Fn(&T) -> U + Sync + Send,
{
    items.par_iter().map(f).collect()
}

/// Map `f` over `items`, preserving input order in the output.
#[cfg(not(feature = "parallel"))]
pub fn map_ordered<T, U, F>(items: &[T], f: F) -> Vec<U>
where
    F: Fn(&T) -> U,
{
    items.iter().map(f).collect()
}

/// Sequential reference path for benchmarks and determinism checks.
pub fn map_ordered_seq<T, U, F>(items: &[T], f: F) -> Vec<U>
where
    F: Fn(&T) -> U,
{
    items.iter().map(f).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parallel_and_sequential_agree_bitwise() {
        let xs: Vec<f64> = (0..1000).map(|i| i as f64 * 0.37).collect();
        let f = |x: &f64| (x * 1.000001).sin().exp();
        let a = map_ordered(&xs, f);
        let b = map_ordered_seq(&xs, f);
        assert_eq!(a, b);
    }
}
