//! Order-independent child seeds.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use sha2::{Digest, Sha256};

/// Child seed for the phase identified by `labels`.
///
/// SHA-256 over the master seed followed by each label with a length prefix,
/// truncated to the first eight bytes. The prefix keeps `["ab", "c"]` and
/// `["a", "bc"]` apart.
pub fn seed_stream<S: AsRef<str>>(master_seed: u64, labels: &[S]) -> u64 {
    let mut h = Sha256::new();
    h.update(master_seed.to_le_bytes());
    for label in labels {
        let bytes = label.as_ref().as_bytes();
        h.update((bytes.len() as u64).to_le_bytes());
        h.update(bytes);
    }
    let digest = h.finalize();
    u64::from_le_bytes(digest[..8].try_into().expect("digest is 32 bytes"))
}

pub fn rng_for<S: AsRef<str>>(master_seed: u64, labels: &[S]) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed_stream(master_seed, labels))
}
