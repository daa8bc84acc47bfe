//! Seeded, splittable random streams.
//!
//! Every stochastic routine takes a base seed and derives one ChaCha stream per
//! independent unit of work (a trial, a realization). Results therefore depend
//! only on `(seed, index)` and never on how the work is scheduled.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// The generator used throughout the crate.
pub type SimRng = ChaCha8Rng;

/// Returns the generator for stream `stream` of base seed `seed`.
pub fn stream_rng(seed: u64, stream: u64) -> SimRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}
