//! Seeded random substreams.
//!
//! Every stochastic stage draws from its own ChaCha stream, indexed by
//! `(seed, stage, item)`. Work items can therefore run in any order or on any
//! thread and still see the same numbers.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Stages that consume randomness. The discriminant selects the high half of
/// the ChaCha stream id.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u64)]
pub enum Stream {
    Synthetic = 1,
    Validation = 2,
    Bootstrap = 3,
}

/// RNG for work item `index` of `stream` under the global `seed`.
pub fn substream(seed: u64, stream: Stream, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(((stream as u64) << 48) ^ index);
    rng
}
