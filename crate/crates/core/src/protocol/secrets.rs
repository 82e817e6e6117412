use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::angle::AngleIndex;
use crate::error::{Error, Result};
use crate::mbqc::Pattern;

/// Which blind protocol the client runs.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Variant {
    /// Quantum or classical input, no dummies.
    Basic,
    /// Classical input only; no input pads are drawn.
    ClassicalInput,
    /// Dummy qubits (and optionally traps) are part of the pattern.
    Dummy,
}

impl Variant {
    /// Checks the pattern and input kind against the variant.
    pub fn check(self, pattern: &Pattern, quantum_input: bool) -> Result<()> {
        let bad = |msg: &str| Err(Error::InconsistentVariant(msg.into()));
        match self {
            Variant::Basic | Variant::ClassicalInput if !pattern.dummies().is_empty() => {
                bad("dummies require the dummy variant")
            }
            Variant::Basic | Variant::ClassicalInput if !pattern.traps().is_empty() => {
                bad("traps require the dummy variant")
            }
            Variant::ClassicalInput if quantum_input => {
                bad("the classical-input variant takes classical input")
            }
            Variant::Dummy if pattern.dummies().is_empty() && pattern.traps().is_empty() => {
                bad("the dummy variant needs at least one dummy or trap")
            }
            _ => Ok(()),
        }
    }
}

/// The client's private randomness, indexed by vertex.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClientSecrets {
    pub theta: Vec<AngleIndex>,
    pub flip: Vec<bool>,
    /// X pad on quantum inputs.
    pub pad: Vec<bool>,
    /// Prepared bit of each dummy.
    pub dummy_bits: Vec<bool>,
}

impl ClientSecrets {
    /// All-zero secrets: the run then coincides with the reference run.
    pub fn zero(vertices: usize) -> Self {
        ClientSecrets {
            theta: vec![AngleIndex::ZERO; vertices],
            flip: vec![false; vertices],
            pad: vec![false; vertices],
            dummy_bits: vec![false; vertices],
        }
    }

    /// Draws fresh secrets; per vertex in label order: angle, flip, pad, dummy bit.
    pub fn draw(
        pattern: &Pattern,
        variant: Variant,
        quantum_input: bool,
        rng: &mut impl Rng,
    ) -> Self {
        let m = pattern.vertex_count();
        let mut s = ClientSecrets::zero(m);
        let pads = quantum_input && variant != Variant::ClassicalInput;
        for v in 0..m {
            s.theta[v] = AngleIndex::new(rng.gen_range(0..8));
            s.flip[v] = rng.gen();
            if pads && pattern.graph().is_input(v) {
                s.pad[v] = rng.gen();
            }
            if pattern.dummies().contains(&v) {
                s.dummy_bits[v] = rng.gen();
            }
        }
        s
    }

    pub fn validate(&self, pattern: &Pattern, quantum_input: bool) -> Result<()> {
        let m = pattern.vertex_count();
        for len in [
            self.theta.len(),
            self.flip.len(),
            self.pad.len(),
            self.dummy_bits.len(),
        ] {
            if len != m {
                return Err(Error::SizeMismatch {
                    expected: m,
                    actual: len,
                });
            }
        }
        for v in 0..m {
            if self.pad[v] && !(quantum_input && pattern.graph().is_input(v)) {
                return Err(Error::InconsistentVariant(format!(
                    "vertex {v} carries a pad but is not a quantum input"
                )));
            }
            if self.dummy_bits[v] && !pattern.dummies().contains(&v) {
                return Err(Error::InconsistentVariant(format!(
                    "vertex {v} has a dummy bit but is not a dummy"
                )));
            }
        }
        Ok(())
    }
}
