//! Counter-based random streams: one ChaCha8 stream per (seed, batch),
//! so batches can run on any worker and still reproduce bit for bit.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Generator for batch `batch` of a run seeded with `seed`.
pub fn stream(seed: u64, batch: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(batch);
    rng
}
