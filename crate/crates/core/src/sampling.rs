//! Reproducible random streams for parallel Monte Carlo.
//!
//! Work of `n` samples is cut into blocks of [`BLOCK_SIZE`]. Block `k` draws
//! from its own ChaCha8 stream: the key is expanded from the run seed by
//! `ChaCha8Rng::seed_from_u64(seed)` and the 64-bit stream id is set to `k`.
//! A block's samples therefore depend only on `(seed, k)`, and per-block
//! results are combined in block order, so output is bit-identical for any
//! number of worker threads.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::direction::Direction;
use crate::error::{Error, Result};

pub const BLOCK_SIZE: u64 = 65_536;

pub type StreamRng = ChaCha8Rng;

/// Generator for block `block` of a run seeded with `seed`.
pub fn block_rng(seed: u64, block: u64) -> StreamRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(block);
    rng
}

/// Uniform point on the unit sphere: `z` uniform on `[−1, 1)`, azimuth
/// uniform on `[0, 2π)`.
pub fn uniform_on_sphere<R: Rng + ?Sized>(rng: &mut R) -> Direction {
    let z = 2.0 * rng.random::<f64>() - 1.0;
    let phi = std::f64::consts::TAU * rng.random::<f64>();
    let r = (1.0 - z * z).max(0.0).sqrt();
    let (s, c) = phi.sin_cos();
    Direction::from_unit_components(r * c, r * s, z)
}

/// Runs `f(block_len, rng)` once per block and returns the results in block
/// order. `threads = None` uses the global rayon pool.
pub fn run_blocks<T, F>(n: u64, seed: u64, threads: Option<usize>, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(u64, &mut StreamRng) -> T + Sync,
{
    let blocks = n.div_ceil(BLOCK_SIZE);
    let work = || {
        (0..blocks)
            .into_par_iter()
            .map(|k| {
                let len = BLOCK_SIZE.min(n - k * BLOCK_SIZE);
                let mut rng = block_rng(seed, k);
                f(len, &mut rng)
            })
            .collect::<Vec<T>>()
    };
    match threads {
        None => Ok(work()),
        Some(0) => Err(Error::InvalidInput(
            "thread count must be at least 1".into(),
        )),
        Some(k) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(k)
                .build()
                .map_err(|e| Error::InvalidInput(format!("cannot build thread pool: {e}")))?;
            Ok(pool.install(work))
        }
    }
}
