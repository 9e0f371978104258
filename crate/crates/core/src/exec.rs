//! Deterministic chunked execution.
//!
//! Heavy loops (Monte Carlo batches, census sweeps, character-table
//! builds) are split into fixed-size chunks indexed `0..n_chunks`. Each
//! chunk's work depends only on its index, and chunk outputs are
//! combined in index order. Consequently the result is bit-identical
//! whether chunks run on one thread or many — the `parallel` feature
//! changes wall-clock time, never output.
//!
//! Both code paths are always compiled (the sequential one is the
//! fallback when `parallel` is disabled), so benchmarks can compare
//! them directly.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Run `f(chunk_index)` for every chunk sequentially, returning outputs
/// in chunk order.
pub fn run_chunks_seq<A, F>(n_chunks: usize, f: F) -> Vec<A>
where
    A: Send,
    F: Fn(usize) -> A + Sync + Send,
{
    (0..n_chunks).map(f).collect()
}

/// Run `f(chunk_index)` for every chunk on the rayon pool, returning
/// outputs in chunk order (rayon's indexed collect preserves order).
#[cfg(feature = "parallel")]
pub fn run_chunks_par<A, F>(n_chunks: usize, f: F) -> Vec<A>
where
    A: Send,
    F: Fn(usize) -> A + Sync + Send,
{
    (0..n_chunks).into_par_iter().map(f).collect()
}

/// Dispatch to the parallel path when compiled in, else sequential.
pub fn run_chunks<A, F>(n_chunks: usize, f: F) -> Vec<A>
where
    A: Send,
    F: Fn(usize) -> A + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        run_chunks_par(n_chunks, f)
    }
    #[cfg(not(feature = "parallel"))]
    {
        run_chunks_seq(n_chunks, f)
    }
}

/// Split `n` items into ranges of at most `chunk` items.
pub fn chunk_ranges(n: usize, chunk: usize) -> Vec<std::ops::Range<usize>> {
    assert!(chunk > 0, "chunk size must be positive");
    (0..n.div_ceil(chunk))
        .map(|i| i * chunk..((i + 1) * chunk).min(n))
        .collect()
}
