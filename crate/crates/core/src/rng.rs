//! Counter-addressed random streams.
//!
//! Every Monte Carlo loop in this crate addresses its randomness by position
//! (`seed`, `stream`) instead of by draw order, so serial and parallel runs of
//! the same loop see identical numbers. Nested loops fork child streams from a
//! parent address; forking never consumes draws from the parent.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

/// Position of a stream in the seed tree.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct StreamId {
    pub seed: u64,
    pub stream: u64,
}

/// A ChaCha8 generator whose output is fully determined by `(seed, stream)`.
#[derive(Debug, Clone)]
pub struct StreamRng {
    id: StreamId,
    inner: ChaCha8Rng,
}

impl StreamRng {
    pub fn new(seed: u64, stream: u64) -> Self {
        let mut inner = ChaCha8Rng::seed_from_u64(seed);
        inner.set_stream(stream);
        StreamRng {
            id: StreamId { seed, stream },
            inner,
        }
    }

    /// Root stream of a seed.
    pub fn from_seed(seed: u64) -> Self {
        StreamRng::new(seed, 0)
    }

    /// Seeds from OS entropy; the chosen seed is available via [`StreamRng::id`].
    pub fn from_entropy() -> Self {
        StreamRng::from_seed(rand::random())
    }

    pub fn id(&self) -> StreamId {
        self.id
    }

    /// Child stream `index` of this stream. Depends only on this stream's
    /// address, not on how many numbers have been drawn from it.
    pub fn fork(&self, index: u64) -> StreamRng {
        let child_seed = splitmix64(splitmix64(self.id.seed) ^ self.id.stream.rotate_left(32));
        StreamRng::new(child_seed, index)
    }
}

impl RngCore for StreamRng {
    fn next_u32(&mut self) -> u32 {
        self.inner.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    fn fill_bytes(&mut self, dst: &mut [u8]) {
        self.inner.fill_bytes(dst)
    }
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}
