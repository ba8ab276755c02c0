//! Deterministic random streams.
//!
//! Every stochastic component receives its own [`ChaCha8Rng`] derived from
//! a run seed, so adding a consumer never perturbs the draws of another.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub type StreamRng = ChaCha8Rng;

/// Named stream `tag` of run `seed`.
pub fn stream(seed: u64, tag: u64) -> StreamRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(tag);
    rng
}

/// Fork an independent child stream off `parent`, advancing it by one draw.
pub fn fork<R: RngCore + ?Sized>(parent: &mut R) -> StreamRng {
    ChaCha8Rng::seed_from_u64(parent.next_u64())
}
