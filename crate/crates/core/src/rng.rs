//! Counter-based seed derivation: every (master seed, domain, index) triple
//! maps to its own ChaCha stream, so splitting work across threads never
//! changes what any single trial sees.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn fnv1a(bytes: &[u8]) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for &b in bytes {
        h ^= b as u64;
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    h
}

fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

pub fn stream(master: u64, domain: &str, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(splitmix(master ^ fnv1a(domain.as_bytes())));
    rng.set_stream(index);
    rng
}

/// Derived 64-bit seed, for recording per-trial provenance in reports.
pub fn derive_seed(master: u64, domain: &str, index: u64) -> u64 {
    splitmix(splitmix(master ^ fnv1a(domain.as_bytes())) ^ splitmix(index))
}
