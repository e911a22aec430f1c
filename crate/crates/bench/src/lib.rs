//! Shared inputs for the criterion benchmarks.

use trimis::configspace::random_maximal;
use trimis::{Configuration, Region};

/// A reproducible random maximal configuration on a `side × side` torus.
pub fn torus_fixture(side: usize, seed: u64) -> Configuration {
    use rand_chacha::rand_core::SeedableRng;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    random_maximal(&Region::torus(side, side), &mut rng).expect("torus wide enough for a maximal configuration")
}
