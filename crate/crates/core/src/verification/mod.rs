//! Trap-based verification: isolated traps, encodings, hiding a computation in a
//! dotted-complete graph and the full verifiable run.

mod embedding;
mod encoding;
mod protocol8;
mod trap;

pub use embedding::{
    a_position, all_partitions, choose_pattern, embed, flow_constraints, random_linear_extension,
    sample_partition, Embedding, EmbeddingSpec, Partition, VerificationPlan,
};
pub use encoding::{
    disjoint_union, identity_pattern, Decoded, EncodedComputation, EncodingParams, RhgParameters,
};
pub use protocol8::{run_protocol8, VerifiedOutcome};
pub use trap::{
    incorrect_projector, make_trap_pattern, make_trap_pattern_sets, TrapConfig, TrapPattern,
    TrapState,
};
