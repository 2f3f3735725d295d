//! Seed derivation and the portable generator used everywhere in the crate.
//!
//! Every random stream is a [`ChaCha8Rng`] seeded from a 64-bit value. Child
//! seeds are derived from a parent seed and a label with [`derive`], so a single
//! master seed fixes matrix generation, swarm initialization and per-iteration
//! draws, and adding a new consumer never shifts the draws of an existing one.

use rand::SeedableRng;
pub use rand_chacha::ChaCha8Rng;

/// Stream labels.
pub mod stream {
    pub const MATRIX: &str = "matrix";
    pub const SWARM_INIT: &str = "swarm-init";
    pub const SWARM_STEP: &str = "swarm-step";
}

/// Generator for a given seed.
pub fn generator(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

// SplitMix64 finalizer.
fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

// FNV-1a, stable across platforms and toolchains (unlike `DefaultHasher`).
fn label_hash(label: &str) -> u64 {
    label.bytes().fold(0xcbf2_9ce4_8422_2325, |h, b| {
        (h ^ u64::from(b)).wrapping_mul(0x0000_0100_0000_01b3)
    })
}

/// Combine a parent seed with a sequence of integers.
pub fn combine(parent: u64, parts: &[u64]) -> u64 {
    parts
        .iter()
        .fold(mix64(parent), |acc, &p| mix64(acc ^ mix64(p)))
}

/// Child seed for the stream named `label`.
pub fn derive(parent: u64, label: &str) -> u64 {
    combine(parent, &[label_hash(label)])
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    #[test]
    fn derivation_is_stable() {
        // Frozen: changing these silently changes every golden result.
        assert_eq!(label_hash(""), 0xcbf2_9ce4_8422_2325);
        assert_eq!(label_hash("a"), 0xaf63_dc4c_8601_ec8c);
        assert_eq!(derive(7, "matrix"), derive(7, "matrix"));
        assert_ne!(derive(7, "matrix"), derive(7, "swarm-init"));
        assert_ne!(combine(1, &[2, 3]), combine(1, &[3, 2]));
    }

    #[test]
    fn generator_is_reproducible() {
        let a: Vec<u32> = generator(42)
            .sample_iter(rand::distributions::Standard)
            .take(8)
            .collect();
        let b: Vec<u32> = generator(42)
            .sample_iter(rand::distributions::Standard)
            .take(8)
            .collect();
        assert_eq!(a, b);
    }
}
