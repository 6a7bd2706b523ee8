//! Seeded random streams.
//!
//! Every randomized routine in this crate takes an explicit generator. Work that
//! is split into independent units (trials, random instances) draws each unit
//! from its own substream so results do not depend on scheduling:
//!
//! * generator: ChaCha with 8 rounds (`rand_chacha::ChaCha8Rng`);
//! * key: `ChaCha8Rng::seed_from_u64(seed)` (the PCG32-based key expansion of `rand_core`);
//! * stream: the 64-bit ChaCha stream id is set to the unit index.
//!
//! Two units with different indices therefore read disjoint keystreams under the
//! same key, and any ChaCha8 implementation can reproduce them.

use rand::SeedableRng;
pub use rand_chacha::ChaCha8Rng;

/// Generator for unit `stream` of an experiment seeded with `seed`.
pub fn substream(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}
