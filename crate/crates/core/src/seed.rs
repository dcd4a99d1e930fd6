//! Seed derivation for replicate and bandit streams.

use rand::SeedableRng;
use rand_xoshiro::Xoshiro256PlusPlus;

/// The generator every simulation and bandit run draws from.
pub type SimRng = Xoshiro256PlusPlus;

pub fn rng_from_seed(seed: u64) -> SimRng {
    Xoshiro256PlusPlus::seed_from_u64(seed)
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Derives a child seed from a master seed and a path of indices.
///
/// Distinct paths give statistically independent seeds; the mapping is fixed
/// so outputs stay reproducible across releases.
pub fn derive_seed(master: u64, path: &[u64]) -> u64 {
    path.iter().fold(splitmix64(master), |acc, &i| splitmix64(acc ^ splitmix64(i.wrapping_add(0xA5A5))))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    #[test]
    fn derive_is_stable_and_path_sensitive() {
        assert_eq!(derive_seed(7, &[1, 2, 3]), derive_seed(7, &[1, 2, 3]));
        assert_ne!(derive_seed(7, &[1, 2, 3]), derive_seed(7, &[1, 3, 2]));
        assert_ne!(derive_seed(7, &[1, 2]), derive_seed(8, &[1, 2]));
    }

    #[test]
    fn grid_of_seeds_has_no_collisions() {
        let mut seen = HashSet::new();
        for a in 0..5 {
            for b in 0..2 {
                for r in 0..200 {
                    assert!(seen.insert(derive_seed(42, &[a, b, r])));
                }
            }
        }
    }
}
