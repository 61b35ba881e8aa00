//! Counter-based seeding.
//!
//! Every random stream is a ChaCha8 keystream selected by `(key, stream)`,
//! where the key comes from the master seed and a domain tag. A row, trial
//! or search task therefore draws the same numbers whichever thread runs it.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Domain tags that keep unrelated consumers of one master seed apart.
pub mod tag {
    pub const SAMPLES: u64 = 0x5341_4d50;
    pub const DIRECTIONS: u64 = 0x4449_5245;
    pub const SEARCH: u64 = 0x5345_4152;
    pub const TRIALS: u64 = 0x5452_4941;
    pub const PROBES: u64 = 0x5052_4f42;
    pub const COEFFS: u64 = 0x434f_4546;
}

#[inline]
fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Mixes a master seed with a tag into an independent child seed.
pub fn derive_seed(seed: u64, tag: u64) -> u64 {
    splitmix64(seed ^ splitmix64(tag))
}

/// The generator for stream `stream` under `seed`.
pub fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Shorthand for `stream_rng(derive_seed(seed, tag), stream)`.
pub fn tagged_rng(seed: u64, tag: u64, stream: u64) -> ChaCha8Rng {
    stream_rng(derive_seed(seed, tag), stream)
}
