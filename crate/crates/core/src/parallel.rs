//! Data-parallel execution helpers with a sequential fallback.
//!
//! Every parallel loop in the crate funnels through [`map_indexed`]: map a
//! function over `0..n`, collect results *in index order*, and let the caller
//! fold them sequentially. Because the merge order never depends on thread
//! scheduling, outputs are bitwise identical with and without the `parallel`
//! feature (and for any thread count).

#[cfg(feature = "parallel")]
pub(crate) fn map_indexed<R, F>(n: usize, f: F) -> Vec<R>
where
    R: Send,
    F: Fn(usize) -> R + Sync + Send,
{
    use rayon::prelude::*;
    (0..n).into_par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
pub(crate) fn map_indexed<R, F>(n: usize, f: F) -> Vec<R>
where
    R: Send,
    F: Fn(usize) -> R + Sync + Send,
{
    (0..n).map(f).collect()
}

/// Split `0..total` into at most `max_chunks` contiguous ranges of equal size
/// (the last may be shorter). Used to bound per-task memory when mapping over
/// large enumeration spaces.
pub(crate) fn chunk_ranges(total: u64, max_chunks: usize) -> Vec<std::ops::Range<u64>> {
    if total == 0 {
        return Vec::new();
    }
    let chunks = (max_chunks.max(1) as u64).min(total);
    let size = total.div_ceil(chunks);
    (0..chunks)
        .map(|c| {
            let lo = c * size;
            let hi = ((c + 1) * size).min(total);
            lo..hi
        })
        .filter(|r| !r.is_empty())
        .collect()
}
