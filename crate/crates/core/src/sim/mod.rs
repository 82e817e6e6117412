//! Pure-state simulation with register factoring.

mod density;
mod ops;
mod state;

pub use density::{fidelity, trace_distance, DensityMatrix};
pub use ops::{matmul2, unitarity_deviation, LocalOp, Matrix2, Pauli};
pub use state::{
    Basis, EnvironmentState, MeasureMode, Measurement, Owner, PrepSpec, QubitId,
    NULL_BRANCH_PROBABILITY,
};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Deterministic generator for a seed and a named role within a run.
pub fn seeded_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}
