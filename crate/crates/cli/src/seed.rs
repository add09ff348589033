//! Counter-based seed expansion.
//!
//! A run has one global seed `s`. The random stream for a labelled use site
//! and counter `k` is a ChaCha8 generator seeded with the first eight bytes
//! (little endian) of `SHA-256(s as u64 LE ‖ label ‖ 0x00 ‖ k as u64 LE)`.
//! Streams never depend on the order in which they are requested.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use sha2::{Digest, Sha256};

pub fn derive_seed(global: u64, label: &str, counter: u64) -> u64 {
    let mut h = Sha256::new();
    h.update(global.to_le_bytes());
    h.update(label.as_bytes());
    h.update([0u8]);
    h.update(counter.to_le_bytes());
    let d = h.finalize();
    let mut b = [0u8; 8];
    b.copy_from_slice(&d[..8]);
    u64::from_le_bytes(b)
}

pub fn stream(global: u64, label: &str, counter: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(derive_seed(global, label, counter))
}
