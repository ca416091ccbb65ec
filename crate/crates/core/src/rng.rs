//! Seeded random streams.
//!
//! Work items (users, ensemble members) each get their own ChaCha stream
//! selected by index, so results do not depend on how work is scheduled
//! across threads.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type StreamRng = ChaCha8Rng;

/// Independent generator for work item `stream` under `seed`.
pub fn stream_rng(seed: u64, stream: u64) -> StreamRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}
