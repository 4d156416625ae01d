//! Simulation of information spreading and emotional dynamics on evolving
//! social networks where a recommender filters what each user sees of a
//! post's comment section.

pub mod cli;
pub mod cocoon;
pub mod config;
pub mod dynamics;
pub mod empirical;
pub mod ensemble;
pub mod error;
pub mod graph;
pub mod io;
pub mod metrics;
pub mod recommend;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub use error::{Error, Result};

/// Random stream used everywhere in the crate.
pub type SimRng = ChaCha8Rng;

pub fn rng_from_seed(seed: u64) -> SimRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Stream used by [`dynamics::run`]. Graph generators draw from stream 0 of
/// the same seed, so a single seed can drive both without overlap.
pub(crate) fn dynamics_rng(seed: u64) -> SimRng {
    let mut rng = rng_from_seed(seed);
    rng.set_stream(1);
    rng
}
