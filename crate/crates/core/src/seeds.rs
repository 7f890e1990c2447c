//! Counter-based seed splitting. Every random draw in the experiment
//! pipeline flows from one base seed through independent (domain, counter)
//! streams, so adding runs or records never perturbs earlier draws.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Derives an independent RNG stream for (base seed, domain, counter).
///
/// The 32-byte ChaCha key is the concatenation of the base seed, the first
/// 16 bytes of the domain label, and the counter, so distinct inputs give
/// distinct streams by construction.
pub fn stream(seed: u64, domain: &str, counter: u64) -> ChaCha8Rng {
    let mut key = [0u8; 32];
    key[..8].copy_from_slice(&seed.to_le_bytes());
    let label = domain.as_bytes();
    let n = label.len().min(16);
    key[8..8 + n].copy_from_slice(&label[..n]);
    key[24..].copy_from_slice(&counter.to_le_bytes());
    ChaCha8Rng::from_seed(key)
}

/// Derives a child seed, for nesting split schemes.
pub fn child_seed(seed: u64, domain: &str, counter: u64) -> u64 {
    use rand_chacha::rand_core::RngCore;
    stream(seed, domain, counter).next_u64()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand_chacha::rand_core::RngCore;

    #[test]
    fn streams_are_reproducible() {
        let a: Vec<u64> = (0..4).map(|_| 0).collect::<Vec<_>>();
        let _ = a;
        let mut r1 = stream(7, "history", 3);
        let mut r2 = stream(7, "history", 3);
        for _ in 0..16 {
            assert_eq!(r1.next_u64(), r2.next_u64());
        }
    }

    #[test]
    fn streams_differ_across_domains_and_counters() {
        let mut base = stream(7, "history", 3);
        let mut other_domain = stream(7, "nominal", 3);
        let mut other_counter = stream(7, "history", 4);
        let x = base.next_u64();
        assert_ne!(x, other_domain.next_u64());
        assert_ne!(x, other_counter.next_u64());
    }
}
