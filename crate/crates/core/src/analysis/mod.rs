//! Brute-force and statistical oracles: blindness audits, exact acceptance of
//! incorrect outputs, bound checks and trap placement statistics.

mod blindness;
mod incorrect;
mod partition;
mod space;

pub use blindness::{blindness_audit, AuditMode, BlindnessReport, EXACT_QUBIT_CAP};
pub use incorrect::{
    bound_suite, pauli_label, pauli_strings, AttackLine, Bound, BoundReport, IncorrectnessOracle,
    IncorrectnessResult, PlacementOutcome, SampledIncorrectness, TrapPlacement, BOUND_TOLERANCE,
    DEFAULT_CELL_CAP,
};
pub use partition::{
    partition_stats, position_sets, MissLine, PartitionMode, PartitionStats, EXHAUSTIVE_N_CAP,
};
pub use space::SecretSpace;
