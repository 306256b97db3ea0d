use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Deterministic generator for an independent stream derived from `seed`.
///
/// Work items indexed by `stream` get reproducible draws regardless of the
/// order or thread in which they run.
pub fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

pub fn seeded(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}
