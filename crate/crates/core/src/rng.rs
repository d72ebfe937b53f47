//! Seeded, splittable random streams.
//!
//! Every generator takes `(seed, stream)`: the seed picks the key of a
//! ChaCha8 generator and the stream picks an independent substream, so
//! sharded test runs reproduce regardless of scheduling.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type Rng = ChaCha8Rng;

pub fn stream(seed: u64, stream: u64) -> Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Stream ids used by the library's generators, kept distinct so that e.g. a
/// body and the points sampled inside it never share randomness.
pub(crate) mod streams {
    pub const SAMPLE: u64 = 1;
    pub const BODY: u64 = 2;
    pub const FUNCTION: u64 = 3;
}
