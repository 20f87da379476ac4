//! Seeded random streams.
//!
//! Every consumer of randomness (placement, traffic, fading, control-plane
//! loss) draws from its own ChaCha stream derived from the run seed, so adding
//! draws in one subsystem never shifts another subsystem's sequence.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type SimRng = ChaCha8Rng;

pub const STREAM_PLACEMENT: u64 = 1;
pub const STREAM_TRAFFIC: u64 = 2;
pub const STREAM_FADING: u64 = 3;
pub const STREAM_CONTROL_LOSS: u64 = 4;

pub fn stream(seed: u64, stream: u64) -> SimRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}
