//! Reproducible per-replica random streams.
//!
//! A replica stream is ChaCha8 keyed by the master seed and addressed by the
//! replica index:
//!
//! 1. the 256-bit key is four consecutive SplitMix64 outputs started from
//!    `master_seed`, each written little-endian;
//! 2. the ChaCha stream id is `replica_index`;
//! 3. the block counter starts at zero.
//!
//! ChaCha is counter based, so distinct stream ids address disjoint
//! keystreams and no state is shared between replicas.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct RngStreamSpec {
    pub master_seed: u64,
    pub replica_index: u64,
}

impl RngStreamSpec {
    pub fn new(master_seed: u64, replica_index: u64) -> Self {
        Self {
            master_seed,
            replica_index,
        }
    }

    pub fn rng(&self) -> ChaCha8Rng {
        let mut state = self.master_seed;
        let mut key = [0u8; 32];
        for chunk in key.chunks_exact_mut(8) {
            chunk.copy_from_slice(&splitmix64(&mut state).to_le_bytes());
        }
        let mut rng = ChaCha8Rng::from_seed(key);
        rng.set_stream(self.replica_index);
        rng
    }
}

fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}
