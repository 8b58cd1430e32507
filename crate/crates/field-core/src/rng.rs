//! Counter-based random streams keyed by (master seed, stream id, counter).
//!
//! Every output is a pure function of the key and the counter, so an ensemble
//! member draws the same numbers whatever thread runs it, and a stream can be
//! repositioned without replaying it.

use rand_core::{impls, RngCore};
use rand_distr::{Distribution, StandardNormal};

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

#[inline]
fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RngStream {
    master_seed: u64,
    stream_id: u64,
    counter: u64,
    k0: u64,
    k1: u64,
}

impl RngStream {
    pub fn new(master_seed: u64, stream_id: u64) -> Self {
        let k0 = mix64(master_seed ^ mix64(stream_id.wrapping_add(GOLDEN)));
        let k1 = mix64(k0 ^ 0x6A09_E667_F3BC_C908);
        Self { master_seed, stream_id, counter: 0, k0, k1 }
    }

    pub fn master_seed(&self) -> u64 {
        self.master_seed
    }

    pub fn stream_id(&self) -> u64 {
        self.stream_id
    }

    pub fn counter(&self) -> u64 {
        self.counter
    }

    /// Same key, counter moved to `counter`.
    pub fn at(&self, counter: u64) -> Self {
        Self { counter, ..self.clone() }
    }

    /// An independent stream derived from this one's key, e.g. one per time
    /// step or per ensemble member.
    pub fn fork(&self, tag: u64) -> Self {
        Self::new(self.master_seed, mix64(self.stream_id ^ mix64(tag.wrapping_mul(GOLDEN) ^ 0x5851_F42D_4C95_7F2D)))
    }

    /// Value at a given counter without touching the state.
    #[inline]
    pub fn value_at(&self, counter: u64) -> u64 {
        mix64(mix64(self.k0 ^ counter.wrapping_mul(GOLDEN)) ^ self.k1)
    }

    pub fn normal(&mut self) -> f64 {
        StandardNormal.sample(self)
    }

    /// Uniform in [0, 1).
    pub fn uniform(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }
}

impl RngCore for RngStream {
    fn next_u32(&mut self) -> u32 {
        (self.next_u64() >> 32) as u32
    }

    fn next_u64(&mut self) -> u64 {
        let v = self.value_at(self.counter);
        self.counter = self.counter.wrapping_add(1);
        v
    }

    fn fill_bytes(&mut self, dst: &mut [u8]) {
        impls::fill_bytes_via_next(self, dst)
    }
}
