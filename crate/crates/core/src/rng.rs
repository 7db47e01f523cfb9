//! Seeded, reproducible random streams.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::gf::{FieldElement, FieldParams};

pub type StreamRng = ChaCha8Rng;

pub fn seeded(seed: u64) -> StreamRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Independent sub-stream `stream` of `seed`; trial `i` of an experiment uses
/// `substream(seed, i)` so results do not depend on scheduling.
pub fn substream(seed: u64, stream: u64) -> StreamRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

pub fn random_element<R: Rng + ?Sized>(field: &FieldParams, rng: &mut R) -> FieldElement {
    let x = rng.gen_range(0..field.q());
    field.from_integer(x).expect("sampled below q")
}

pub fn random_vector<R: Rng + ?Sized>(field: &FieldParams, len: usize, rng: &mut R) -> Vec<FieldElement> {
    (0..len).map(|_| random_element(field, rng)).collect()
}
