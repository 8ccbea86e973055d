//! Seeded, splittable random streams.
//!
//! Every random draw in the crate comes from ChaCha8 keyed by
//! `seed_from_u64(seed)` (rand_core's PCG32 key expansion) with the stream
//! word set to a caller-chosen index. Work items that may run in parallel
//! each take their own stream, so results do not depend on scheduling.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

pub use rand_chacha::ChaCha8Rng as StreamRng;

/// Identifier recorded next to every randomized artifact.
pub const RNG_ALGORITHM: &str = "chacha8/seed_from_u64/stream-per-item";

pub fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Uniformly distributed direction on the unit sphere in `R^n`.
pub fn random_unit_vector<R: rand::Rng + ?Sized>(rng: &mut R, n: usize) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..n).map(|_| StandardNormal.sample(rng)).collect();
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 1e-12 {
            return v.into_iter().map(|x| x / norm).collect();
        }
    }
}
