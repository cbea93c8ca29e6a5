//! Seeded random streams.
//!
//! A run owns one seed. Independent ChaCha streams are derived from it for the
//! initial point, the solver's own decisions, the problem noise and instance
//! generation, so changing what a solver does never shifts the noise sequence.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type RunRng = ChaCha8Rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u64)]
pub enum Stream {
    InitialPoint = 0,
    Solver = 1,
    Noise = 2,
    Instance = 3,
}

pub fn substream(seed: u64, stream: Stream) -> RunRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream as u64);
    rng
}
