//! Deterministic per-path random streams.
//!
//! Every simulated path gets its own ChaCha8 stream selected by
//! `(seed, path index)`, so results do not depend on how paths are
//! distributed over threads.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn path_stream(seed: u64, path: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(path);
    rng
}
