//! Seeded random streams for reproducible parallel sampling.
//!
//! Work is cut into fixed-size chunks and chunk `i` draws from ChaCha8 stream
//! `i` of the run seed, so results do not depend on the number of threads.
//! Per-chunk results are returned in chunk order for a deterministic merge.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

/// Samples per chunk.
pub const CHUNK: usize = 4096;

pub fn stream(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Runs `work(rng, count)` for each chunk of `total` samples in parallel and
/// returns the per-chunk results in chunk order.
pub fn chunked<T, F>(total: usize, seed: u64, work: F) -> Vec<T>
where
    T: Send,
    F: Fn(&mut ChaCha8Rng, usize) -> T + Sync,
{
    let chunks = total.div_ceil(CHUNK);
    (0..chunks)
        .into_par_iter()
        .map(|i| {
            let count = CHUNK.min(total - i * CHUNK);
            work(&mut stream(seed, i as u64), count)
        })
        .collect()
}
