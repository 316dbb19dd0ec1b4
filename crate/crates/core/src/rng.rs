//! Deterministic random streams. Every stochastic task derives its own
//! ChaCha stream from the parent seed and a tuple of task tags, so results
//! never depend on how tasks are spread over workers.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn splitmix(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    x = (x ^ (x >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    x ^ (x >> 31)
}

/// Stream for `tags` under `seed`.
pub fn stream(seed: u64, tags: &[u64]) -> ChaCha8Rng {
    let id = tags
        .iter()
        .fold(0x5EED_u64, |acc, &t| splitmix(acc ^ splitmix(t)));
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(id);
    rng
}

/// Stable 64-bit tag for a label such as a method name (FNV-1a).
pub fn tag(label: &str) -> u64 {
    label.bytes().fold(0xcbf2_9ce4_8422_2325, |h, b| {
        (h ^ b as u64).wrapping_mul(0x0100_0000_01b3)
    })
}
