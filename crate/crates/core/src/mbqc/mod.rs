//! Measurement patterns, their reference execution and the circuit compiler.

mod compile;
mod deps;
mod entangler;
mod lemma;
mod pattern;
mod reference;

pub use compile::{
    compile_circuit, Circuit, CompileOptions, Compiled, Gate, CNOT_DOWN, CNOT_UP,
    FOUR_COLUMN_EXPANSION,
};
pub use deps::{adapted_angle, dependencies, Dependencies};
pub use entangler::LazyEntangler;
pub use lemma::{
    graph_state, measured_graph_state, pauli_lemma_fidelity, predicted_graph_state,
    simulate_reduction, PauliBasis,
};
pub use pattern::{ComputationGraph, OutputMode, Pattern, PatternBuilder};
pub use reference::{
    branch_enumerate, run_reference, run_reference_with_dummies, Branch, OutcomeRecord,
    PatternInput, PatternOutput, DEFAULT_BRANCH_CAP,
};
