//! Data-parallel helpers with a sequential fallback.
//!
//! With the `parallel` feature (default) work is spread over the current
//! rayon pool; without it every helper runs on the calling thread and
//! [`Exec::Parallel`] silently degrades to sequential execution.

/// Execution strategy for the chunked hot loops.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Exec {
    Sequential,
    #[default]
    Parallel,
}

pub fn is_parallel_available() -> bool {
    cfg!(feature = "parallel")
}

/// Maps `f` over contiguous chunks of `items`, preserving chunk order.
#[cfg(feature = "parallel")]
pub fn map_chunks<T, U, F>(items: &[T], chunk_len: usize, exec: Exec, f: F) -> Vec<U>
where
    T: Sync,
    U: Send,
    F: Fn(usize, &[T]) -> U + Sync + Send,
{
    use rayon::prelude::*;
    let chunk_len = chunk_len.max(1);
    match exec {
        Exec::Parallel => items
            .par_chunks(chunk_len)
            .enumerate()
            .map(|(i, c)| f(i * chunk_len, c))
            .collect(),
        Exec::Sequential => items
            .chunks(chunk_len)
            .enumerate()
            .map(|(i, c)| f(i * chunk_len, c))
            .collect(),
    }
}

#[cfg(not(feature = "parallel"))]
pub fn map_chunks<T, U, F>(items: &[T], chunk_len: usize, _exec: Exec, f: F) -> Vec<U>
where
    F: Fn(usize, &[T]) -> U,
{
    let chunk_len = chunk_len.max(1);
    items
        .chunks(chunk_len)
        .enumerate()
        .map(|(i, c)| f(i * chunk_len, c))
        .collect()
}

/// Maps `f` over `items`, preserving order.
#[cfg(feature = "parallel")]
pub fn map<T, U, F>(items: &[T], exec: Exec, f: F) -> Vec<U>
where
    T: Sync,
    U: Send,
    F: Fn(&T) -> U + Sync + Send,
{
    use rayon::prelude::*;
    match exec {
        Exec::Parallel => items.par_iter().map(f).collect(),
        Exec::Sequential => items.iter().map(f).collect(),
    }
}

#[cfg(not(feature = "parallel"))]
pub fn map<T, U, F>(items: &[T], _exec: Exec, f: F) -> Vec<U>
where
    F: Fn(&T) -> U,
{
    items.iter().map(f).collect()
}

/// Worker count of the pool `map` and `map_chunks` would use.
pub fn current_workers() -> usize {
    #[cfg(feature = "parallel")]
    {
        rayon::current_num_threads()
    }
    #[cfg(not(feature = "parallel"))]
    {
        1
    }
}
