//! Deterministic RNG stream derivation.
//!
//! Every trial (or map cell) gets its own ChaCha8 stream selected by a
//! counter, never by thread identity, so Monte Carlo results are
//! independent of scheduling and worker count.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// RNG for one unit of Monte Carlo work: the key comes from `seed`, the
/// ChaCha stream counter from `index`.
pub(crate) fn stream_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Stable seed derivation for nested work (per-cell, per-row seeds),
/// splitmix64 over the concatenated inputs.
pub(crate) fn derive_seed(seed: u64, a: u64, b: u64) -> u64 {
    let mut x = seed;
    for w in [a, b] {
        x = splitmix64(x ^ splitmix64(w));
    }
    x
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}
