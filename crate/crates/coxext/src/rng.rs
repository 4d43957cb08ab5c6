//! Counter-based splittable random streams.
//!
//! Every stream is a pure function of (key, counter): the i-th output of a
//! stream is `mix(key + i·φ)` with the SplitMix64 finalizer. Substreams are
//! derived by mixing a label into the key, so a stream keyed by
//! (master_seed, row, replicate) produces bit-identical draws regardless of
//! execution order or degree of parallelism. No shared mutable state exists
//! anywhere.

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

#[inline]
fn mix(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// A deterministic, splittable, counter-based stream of pseudo-random words.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Stream {
    key: u64,
    counter: u64,
}

impl Stream {
    pub fn new(seed: u64) -> Self {
        Self {
            key: mix(seed ^ GOLDEN),
            counter: 0,
        }
    }

    /// Child stream labelled by `label`; independent of this stream's
    /// counter position.
    pub fn substream(&self, label: u64) -> Stream {
        Stream {
            key: mix(self.key ^ mix(label.wrapping_add(GOLDEN))),
            counter: 0,
        }
    }

    #[inline]
    pub fn next_u64(&mut self) -> u64 {
        let out = mix(self.key.wrapping_add(self.counter.wrapping_mul(GOLDEN)));
        self.counter += 1;
        out
    }

    /// Uniform in [0, 1).
    #[inline]
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform integer in {0, …, bound-1} via the multiply-shift reduction.
    #[inline]
    pub fn below(&mut self, bound: u64) -> u64 {
        debug_assert!(bound > 0);
        ((self.next_u64() as u128 * bound as u128) >> 64) as u64
    }
}
