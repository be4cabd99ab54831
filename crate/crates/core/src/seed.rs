//! Seed derivation: every task draws from `fnv1a64(task) ^ seed`.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const FNV_OFFSET: u64 = 0xcbf2_9ce4_8422_2325;
const FNV_PRIME: u64 = 0x0100_0000_01b3;

pub fn fnv1a64(bytes: &[u8]) -> u64 {
    bytes
        .iter()
        .fold(FNV_OFFSET, |h, b| (h ^ u64::from(*b)).wrapping_mul(FNV_PRIME))
}

pub fn derive_seed(task: &str, seed: u64) -> u64 {
    fnv1a64(task.as_bytes()) ^ seed
}

pub fn task_rng(task: &str, seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(derive_seed(task, seed))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fnv_reference_values() {
        assert_eq!(fnv1a64(b""), 0xcbf29ce484222325);
        assert_eq!(fnv1a64(b"a"), 0xaf63dc4c8601ec8c);
        assert_eq!(fnv1a64(b"foobar"), 0x85944171f73967e8);
    }

    #[test]
    fn derivation_depends_on_both_parts() {
        assert_ne!(derive_seed("train", 1), derive_seed("test", 1));
        assert_ne!(derive_seed("train", 1), derive_seed("train", 2));
        assert_eq!(derive_seed("train", 1), derive_seed("train", 1));
    }
}
