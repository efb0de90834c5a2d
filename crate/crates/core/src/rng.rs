//! Seeded, splittable randomness. Every stochastic routine takes an explicit
//! seed; independent tasks draw from distinct ChaCha streams of one seed.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type Rng = ChaCha8Rng;

/// Generator for `stream` under `seed`. Distinct streams are independent.
pub fn seeded(seed: u64, stream: u64) -> Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Derive a child seed from a parent seed and an index.
pub fn derive_seed(seed: u64, index: u64) -> u64 {
    use rand::RngCore;
    seeded(seed, index.wrapping_add(0x5eed)).next_u64()
}
