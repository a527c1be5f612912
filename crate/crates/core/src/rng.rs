//! Counter-based random streams.
//!
//! Every random draw in the crate comes from a ChaCha8 generator keyed by
//! `(seed, domain)` and positioned on a 64-bit stream id. Monte Carlo trials
//! use their trial index as the stream id, so results do not depend on how
//! trials are partitioned across workers.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Stream domains keep the null and alternative hypotheses independent
/// when they share a user seed.
pub mod domain {
    pub const BLOCK: u64 = 0;
    pub const NULL: u64 = 1;
    pub const ALTERNATIVE: u64 = 2;
}

fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9e37_79b9_7f4a_7c15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Generator for `(seed, domain, stream)`.
pub fn stream_rng(seed: u64, domain: u64, stream: u64) -> ChaCha8Rng {
    let mut state = seed ^ domain.wrapping_mul(0xd1b5_4a32_d192_ed03);
    let mut key = [0u8; 32];
    for chunk in key.chunks_exact_mut(8) {
        chunk.copy_from_slice(&splitmix64(&mut state).to_le_bytes());
    }
    let mut rng = ChaCha8Rng::from_seed(key);
    rng.set_stream(stream);
    rng
}
