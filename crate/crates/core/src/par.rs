//! Index-parallel map used by the sampling code. Results are always
//! collected in index order, so output never depends on scheduling.

/// How a batch of independent work items is evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Execution {
    Sequential,
    /// Rayon's global pool. Without the `parallel` feature this is the same
    /// as `Sequential`.
    #[default]
    Parallel,
}

impl Execution {
    pub fn is_parallel(self) -> bool {
        cfg!(feature = "parallel") && self == Execution::Parallel
    }
}

/// Evaluates `f(i)` for `i in 0..len`. On failure returns the error with the
/// lowest index.
pub fn try_map_indexed<T, E, F>(len: usize, exec: Execution, f: F) -> Result<Vec<T>, E>
where
    T: Send,
    E: Send,
    F: Fn(usize) -> Result<T, E> + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if exec.is_parallel() {
        use rayon::prelude::*;
        let results: Vec<Result<T, E>> = (0..len).into_par_iter().map(&f).collect();
        return results.into_iter().collect();
    }
    let _ = exec;
    (0..len).map(f).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn order_is_index_order() {
        for exec in [Execution::Sequential, Execution::Parallel] {
            let out: Result<Vec<usize>, ()> = try_map_indexed(1000, exec, |i| Ok(i * i));
            assert_eq!(out.unwrap(), (0..1000).map(|i| i * i).collect::<Vec<_>>());
        }
    }

    #[test]
    fn lowest_error_wins() {
        for exec in [Execution::Sequential, Execution::Parallel] {
            let out: Result<Vec<usize>, usize> =
                try_map_indexed(500, exec, |i| if i % 97 == 96 { Err(i) } else { Ok(i) });
            assert_eq!(out, Err(96));
        }
    }
}
