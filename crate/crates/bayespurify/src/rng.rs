//! Seeded substream generator.
//!
//! All randomness in the crate flows from a single 64-bit seed. Substreams
//! are derived by hashing a list of index tags (player, cell, purpose, ...)
//! into the ChaCha stream id, so adding samples to one consumer never
//! perturbs another.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// FNV-1a over the tag words; stable across platforms.
fn fold_tags(tags: &[u64]) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for &t in tags {
        for byte in t.to_le_bytes() {
            h ^= byte as u64;
            h = h.wrapping_mul(0x0000_0100_0000_01b3);
        }
    }
    h
}

/// Derive a deterministic substream from `seed` and a tag path.
pub fn substream(seed: u64, tags: &[u64]) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(fold_tags(tags));
    rng
}
