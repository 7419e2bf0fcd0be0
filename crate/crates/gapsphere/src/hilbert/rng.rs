//! Deterministic random streams.
//!
//! Every sampler in this crate draws from an [`RngStream`], a counter-based
//! ChaCha12 generator keyed by a 64-bit master seed and a stream index.
//! Identical `(seed, index)` pairs produce identical draw sequences on every
//! platform for a given build, so experiments are reproducible and can hand
//! one stream index to each worker thread without coordination.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha12Rng;

fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// A seeded, indexed random stream.
#[derive(Debug, Clone)]
pub struct RngStream {
    seed: u64,
    index: u64,
    rng: ChaCha12Rng,
}

impl RngStream {
    /// Creates the stream for `(seed, index)`. The ChaCha key is derived by
    /// expanding both values through splitmix64 so that nearby seeds and
    /// indices land on unrelated keys.
    pub fn new(seed: u64, index: u64) -> Self {
        let mut state = seed ^ 0x6A09_E667_F3BC_C908;
        let k0 = splitmix64(&mut state);
        let k1 = splitmix64(&mut state);
        state ^= index
            .wrapping_mul(0x9E37_79B9_7F4A_7C15)
            .wrapping_add(0xBB67_AE85_84CA_A73B);
        let k2 = splitmix64(&mut state);
        let k3 = splitmix64(&mut state);

        let mut key = [0u8; 32];
        key[0..8].copy_from_slice(&k0.to_le_bytes());
        key[8..16].copy_from_slice(&k1.to_le_bytes());
        key[16..24].copy_from_slice(&k2.to_le_bytes());
        key[24..32].copy_from_slice(&k3.to_le_bytes());
        RngStream {
            seed,
            index,
            rng: ChaCha12Rng::from_seed(key),
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn index(&self) -> u64 {
        self.index
    }

    /// Derives an independent stream from the same master seed. Callers that
    /// fan work out to threads give each worker a distinct child index.
    pub fn substream(&self, child: u64) -> Self {
        let mut state = self.index ^ 0x510E_527F_ADE6_82D1;
        let folded = splitmix64(&mut state) ^ child.wrapping_mul(0x9E37_79B9_7F4A_7C15);
        RngStream::new(self.seed, folded)
    }
}

impl RngCore for RngStream {
    fn next_u32(&mut self) -> u32 {
        self.rng.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        self.rng.next_u64()
    }

    fn fill_bytes(&mut self, dest: &mut [u8]) {
        self.rng.fill_bytes(dest)
    }

    fn try_fill_bytes(&mut self, dest: &mut [u8]) -> std::result::Result<(), rand::Error> {
        self.rng.try_fill_bytes(dest)
    }
}
