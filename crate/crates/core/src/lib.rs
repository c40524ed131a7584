//! Code Swendsen-Wang dynamics for classical linear codes and quantum
//! stabilizer codes.
//!
//! The crate is organised bottom-up:
//!
//! * [`gf2`] — bit-packed linear algebra over GF(2);
//! * [`code`] — parity-check codes, graphs, toric families and graphic certificates;
//! * [`stabilizer`] — symplectic bookkeeping and a dense simulator of the quantum sampler;
//! * [`dynamics`] — the Markov kernels (cluster, single-check, Glauber, lifts);
//! * [`worm`] — worm configurations, canonical paths and exact congestion;
//! * [`oracle`] — exhaustive enumeration: exact laws, transition matrices, gaps;
//! * [`analysis`] — empirical diagnostics for instances beyond enumeration.

pub mod analysis;
pub mod code;
pub mod dynamics;
pub mod error;
pub mod gf2;
pub mod oracle;
pub mod par;
pub mod stabilizer;
pub mod worm;

pub use error::{Error, Result};
pub use gf2::{BitMatrix, BitVector};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// The generator used throughout.
pub type Rng = ChaCha8Rng;

/// Deterministic generator for replica `stream` of a run seeded with `seed`.
pub fn rng_for(seed: u64, stream: u64) -> Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}
