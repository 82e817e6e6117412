use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::angle::AngleIndex;
use crate::error::{Error, Result};
use crate::sim::Pauli;

/// Default ceiling on the ancillas a deviating server may bring in.
pub const DEFAULT_ANCILLA_CAP: usize = 4;

/// One way the server departs from the honest behaviour.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Deviation {
    Pauli {
        qubit: usize,
        pauli: Pauli,
    },
    /// A unitary on the listed vertices followed by `ancillas` fresh |0> qubits,
    /// row-major over the little-endian index of that list.
    Unitary {
        qubits: Vec<usize>,
        ancillas: usize,
        matrix: Vec<[f64; 2]>,
    },
    /// Measure at the requested angle plus `shift`.
    AngleShift {
        qubit: usize,
        shift: AngleIndex,
    },
    /// Report the opposite of the observed outcome.
    FlipResult {
        qubit: usize,
    },
}

/// A deviation and when it happens.
///
/// Stage 0 is before entangling, stage k in 1..=M is right before the k-th
/// measurement (stage 1 is right after entangling) and stage M+1 is before the
/// outputs are returned. Angle shifts and result flips act on their qubit's
/// measurement whatever the stage.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScheduledDeviation {
    pub stage: usize,
    pub deviation: Deviation,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Attack {
    pub deviations: Vec<ScheduledDeviation>,
}

impl Attack {
    pub fn honest() -> Self {
        Attack::default()
    }

    /// A Pauli string applied right after entangling; `paulis[v]` acts on vertex `v`.
    pub fn pauli_string(paulis: &[Pauli]) -> Self {
        Attack {
            deviations: paulis
                .iter()
                .enumerate()
                .filter(|(_, &p)| p != Pauli::I)
                .map(|(qubit, &pauli)| ScheduledDeviation {
                    stage: 1,
                    deviation: Deviation::Pauli { qubit, pauli },
                })
                .collect(),
        }
    }

    pub fn is_honest(&self) -> bool {
        self.deviations.is_empty()
    }

    /// Checks vertex ranges, stages, matrix shapes and the ancilla cap.
    pub fn validate(&self, vertices: usize, measurements: usize, ancilla_cap: usize) -> Result<()> {
        let mut ancillas = 0;
        for sd in &self.deviations {
            if sd.stage > measurements + 1 {
                return Err(Error::MalformedAttack(format!(
                    "stage {} is past the last stage {}",
                    sd.stage,
                    measurements + 1
                )));
            }
            let touched: Vec<usize> = match &sd.deviation {
                Deviation::Pauli { qubit, .. }
                | Deviation::AngleShift { qubit, .. }
                | Deviation::FlipResult { qubit } => {
                    vec![*qubit]
                }
                Deviation::Unitary {
                    qubits,
                    ancillas: extra,
                    matrix,
                } => {
                    ancillas += extra;
                    let dim = 1usize << (qubits.len() + extra);
                    if matrix.len() != dim * dim {
                        return Err(Error::MalformedAttack(format!(
                            "unitary on {} qubits needs {} entries, got {}",
                            qubits.len() + extra,
                            dim * dim,
                            matrix.len()
                        )));
                    }
                    let mut seen = qubits.clone();
                    seen.sort_unstable();
                    seen.dedup();
                    if seen.len() != qubits.len() {
                        return Err(Error::MalformedAttack("unitary lists a qubit twice".into()));
                    }
                    qubits.clone()
                }
            };
            if let Some(&v) = touched.iter().find(|&&v| v >= vertices) {
                return Err(Error::MalformedAttack(format!("vertex {v} does not exist")));
            }
        }
        if ancillas > ancilla_cap {
            return Err(Error::CapExceeded {
                what: "server ancillas",
                limit: ancilla_cap,
                requested: ancillas,
            });
        }
        Ok(())
    }
}

pub(crate) fn complex_matrix(entries: &[[f64; 2]]) -> Vec<Complex64> {
    entries
        .iter()
        .map(|&[re, im]| Complex64::new(re, im))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn json_shape() {
        let a = Attack::pauli_string(&[Pauli::I, Pauli::X]);
        let text = serde_json::to_string(&a).unwrap();
        assert_eq!(
            text,
            r#"{"deviations":[{"stage":1,"deviation":{"kind":"pauli","qubit":1,"pauli":"X"}}]}"#
        );
        assert_eq!(serde_json::from_str::<Attack>(&text).unwrap(), a);
    }

    #[test]
    fn ancilla_cap() {
        let a = Attack {
            deviations: vec![ScheduledDeviation {
                stage: 0,
                deviation: Deviation::Unitary {
                    qubits: vec![],
                    ancillas: 5,
                    matrix: vec![[0.0, 0.0]; 1024],
                },
            }],
        };
        assert!(matches!(
            a.validate(1, 1, DEFAULT_ANCILLA_CAP),
            Err(Error::CapExceeded { .. })
        ));
    }
}
