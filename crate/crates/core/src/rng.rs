//! Seeded random streams. Every trial or iteration gets its own stream so
//! results do not depend on execution order.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

/// Recorded in run manifests.
pub const RNG_ALGORITHM: &str = "chacha8 (rand_chacha 0.9), seed_from_u64, stream per trial";

pub type StreamRng = ChaCha8Rng;

/// Independent stream `stream` of the generator seeded by `seed`.
pub fn stream_rng(seed: u64, stream: u64) -> StreamRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Uniform on `[0, 1)`.
pub fn uniform(rng: &mut StreamRng) -> f64 {
    rng.random::<f64>()
}

pub fn normal(rng: &mut StreamRng) -> f64 {
    rng.sample(StandardNormal)
}
