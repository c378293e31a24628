//! Seeded, counter-based random streams.
//!
//! Every random draw in the crate comes from a ChaCha8 stream identified by
//! `(seed, stream)`. Stream ids are built from small tags so that two
//! consumers never share a stream, independent of call order.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Stream tags. Combined with a channel/span index by [`stream_id`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u64)]
pub enum Tag {
    Symbols = 1,
    TxNoise = 2,
    RxNoise = 3,
    Ase = 4,
    MiSubsample = 5,
    Awgn = 6,
}

pub fn stream_id(tag: Tag, index: u64) -> u64 {
    ((tag as u64) << 48) | (index & 0xffff_ffff_ffff)
}

pub fn stream(seed: u64, tag: Tag, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream_id(tag, index));
    rng
}
