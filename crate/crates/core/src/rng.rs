//! Seeded, splittable random streams.
//!
//! Every Monte Carlo work item owns an [`RngStream`] addressed by
//! `(seed, stream id)`. The generator is ChaCha8 with the stream id mapped to
//! the cipher's stream/nonce word, so streams are independent and a draw
//! sequence never depends on which thread produced it.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct RngStream {
    pub seed: u64,
    pub stream: u64,
}

impl RngStream {
    pub fn new(seed: u64, stream: u64) -> Self {
        Self { seed, stream }
    }

    /// A fresh generator positioned at the start of this stream.
    pub fn generator(&self) -> StreamRng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(self.stream);
        StreamRng { rng }
    }

    /// A stream for a separate purpose derived from this one; `salt`
    /// distinguishes uses that share a replication index.
    pub fn derive(&self, salt: u64) -> RngStream {
        RngStream {
            seed: splitmix64(self.seed ^ splitmix64(salt)),
            stream: self.stream,
        }
    }
}

/// Generator handed out by [`RngStream::generator`].
#[derive(Debug, Clone)]
pub struct StreamRng {
    rng: ChaCha8Rng,
}

impl StreamRng {
    pub fn normal(&mut self) -> f64 {
        StandardNormal.sample(&mut self.rng)
    }

    pub fn fill_normal(&mut self, out: &mut [f64]) {
        for v in out {
            *v = StandardNormal.sample(&mut self.rng);
        }
    }

    pub fn inner(&mut self) -> &mut ChaCha8Rng {
        &mut self.rng
    }
}

/// SplitMix64 finalizer, used to spread seeds and build checksums.
pub fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    x = (x ^ (x >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    x ^ (x >> 31)
}
