//! Seeded random substreams.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Independent generator for item `index` of a run seeded with `seed`.
///
/// The seed fills the ChaCha key and the index selects the stream, so distinct
/// `(seed, index)` pairs never share a keystream. Work split across threads
/// therefore draws the same numbers as a sequential loop.
pub fn substream(seed: u64, index: u64) -> ChaCha8Rng {
    let mut key = [0u8; 32];
    key[..8].copy_from_slice(&seed.to_le_bytes());
    let mut rng = ChaCha8Rng::from_seed(key);
    rng.set_stream(index);
    rng
}

/// Derives a child seed from a parent seed and a label (SplitMix64 finalizer).
pub fn derive_seed(seed: u64, label: u64) -> u64 {
    let mut z = seed ^ label.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}
