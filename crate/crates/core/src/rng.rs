//! Seed splitting.
//!
//! A stream is identified by (master seed, label, index). Its seed is the first
//! eight bytes, little-endian, of
//! SHA-256(master_le64 ‖ len(label)_le64 ‖ label ‖ index_le64),
//! and feeds a ChaCha8 generator. Streams never depend on thread count.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use sha2::{Digest, Sha256};

pub fn derive_seed(master: u64, label: &str, index: u64) -> u64 {
    let mut h = Sha256::new();
    h.update(master.to_le_bytes());
    h.update((label.len() as u64).to_le_bytes());
    h.update(label.as_bytes());
    h.update(index.to_le_bytes());
    let d = h.finalize();
    u64::from_le_bytes(d[..8].try_into().unwrap())
}

pub fn stream(master: u64, label: &str, index: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(derive_seed(master, label, index))
}
