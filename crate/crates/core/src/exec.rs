//! Batch execution strategy.
//!
//! Every batch loop in the crate (sample generation, invariant batteries,
//! minor enumeration) goes through [`map_indexed`], which runs on the rayon
//! pool when the `parallel` feature is enabled and the caller asks for
//! [`Execution::Parallel`]. Results always come back in index order, so the
//! output does not depend on the strategy.

/// How a batch of independent work items is executed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Execution {
    Sequential,
    #[default]
    Parallel,
}

impl Execution {
    /// True when this strategy actually runs on multiple threads in this build.
    pub fn is_parallel(self) -> bool {
        cfg!(feature = "parallel") && self == Execution::Parallel
    }
}

/// Evaluate `f(0), …, f(n-1)` and collect the results in index order.
pub fn map_indexed<T, F>(mode: Execution, n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if mode == Execution::Parallel {
        use rayon::prelude::*;
        return (0..n).into_par_iter().map(f).collect();
    }
    let _ = mode;
    (0..n).map(f).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn both_modes_agree() {
        let a = map_indexed(Execution::Sequential, 100, |i| i * i);
        let b = map_indexed(Execution::Parallel, 100, |i| i * i);
        assert_eq!(a, b);
        assert!(map_indexed(Execution::Parallel, 0, |i| i).is_empty());
    }
}
