use std::collections::HashMap;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mbqc::{Pattern, PatternInput};
use crate::protocol::{angle_sequence, prepare_qubits, ClientSecrets, Variant};
use crate::sim::{seeded_rng, trace_distance, DensityMatrix, EnvironmentState};

use super::space::SecretSpace;

/// Default ceiling on the number of qubits for exact enumeration.
pub const EXACT_QUBIT_CAP: usize = 3;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum AuditMode {
    Exact,
    MonteCarlo { samples: u64, seed: u64 },
}

/// What the server sees, checked against the uniform view.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BlindnessReport {
    pub mode: AuditMode,
    pub qubits: usize,
    /// Count of each requested angle (index 0..8) at each measurement step. Exact
    /// mode counts over all secrets with every reported outcome fixed to 0.
    pub delta_histogram: Vec<[u64; 8]>,
    /// Trace distance of the server's averaged initial state from I/2^m. In exact
    /// mode this is the largest distance over every (reported outcomes, angle
    /// transcript) pair, conditioned on that pair.
    pub bob_state_distance: f64,
    /// Probability of the least and most likely angle transcripts (exact mode).
    pub transcript_probability_range: Option<(f64, f64)>,
    pub cardinalities: Vec<(String, u64)>,
}

impl BlindnessReport {
    /// Every step's counts are identical across the eight angles.
    pub fn histogram_flat(&self) -> bool {
        self.delta_histogram
            .iter()
            .all(|row| row.iter().all(|&c| c == row[0]))
    }

    /// Histogram as CSV: step,delta,count.
    pub fn histogram_csv(&self) -> String {
        let mut out = String::from("step,delta,count\n");
        for (step, row) in self.delta_histogram.iter().enumerate() {
            for (d, c) in row.iter().enumerate() {
                out.push_str(&format!("{},{},{}\n", step + 1, d, c));
            }
        }
        out
    }
}

/// The server's initial state for one assignment of secrets, over all vertices.
fn initial_state(
    pattern: &Pattern,
    secrets: &ClientSecrets,
    input: &PatternInput,
) -> Result<Vec<num_complex::Complex64>> {
    let mut env = EnvironmentState::new();
    let qubit = prepare_qubits(&mut env, pattern, secrets, input)?;
    env.state_vector(&qubit)
}

fn encode_transcript(deltas: &[crate::AngleIndex]) -> u64 {
    deltas
        .iter()
        .fold(0u64, |acc, d| acc << 3 | d.value() as u64)
}

/// Enumerates (or samples) the client's secrets for a fixed computation and
/// tallies what the server receives.
pub fn blindness_audit(
    pattern: &Pattern,
    variant: Variant,
    input: &PatternInput,
    mode: AuditMode,
    qubit_cap: usize,
) -> Result<BlindnessReport> {
    let quantum = matches!(input, PatternInput::Quantum(_));
    variant.check(pattern, quantum)?;
    let m = pattern.vertex_count();
    let steps = pattern.order().len();
    let uniform = DensityMatrix::maximally_mixed(m);
    let mut histogram = vec![[0u64; 8]; steps];
    match mode {
        AuditMode::Exact => {
            if m > qubit_cap {
                return Err(Error::CapExceeded {
                    what: "qubits for exact blindness enumeration",
                    limit: qubit_cap,
                    requested: m,
                });
            }
            let space = SecretSpace::new(pattern, variant, quantum);
            let mut groups: HashMap<(u64, u64), (u64, DensityMatrix)> = HashMap::new();
            for secrets in space.iter()? {
                let psi = initial_state(pattern, &secrets, input)?;
                for reported_bits in 0..1u64 << steps {
                    let reported: Vec<bool> =
                        (0..steps).map(|k| reported_bits >> k & 1 == 1).collect();
                    let deltas = angle_sequence(pattern, &secrets, &reported);
                    if reported_bits == 0 {
                        for (row, d) in histogram.iter_mut().zip(&deltas) {
                            row[d.value() as usize] += 1;
                        }
                    }
                    let entry = groups
                        .entry((reported_bits, encode_transcript(&deltas)))
                        .or_insert_with(|| (0, DensityMatrix::zeros(m)));
                    entry.0 += 1;
                    entry.1.accumulate_pure(&psi, 1.0);
                }
            }
            let per_reported = space.size()?;
            let mut distance: f64 = 0.0;
            let (mut lo, mut hi) = (f64::INFINITY, 0.0f64);
            let mut keys: Vec<_> = groups.keys().copied().collect();
            keys.sort_unstable();
            for key in keys {
                let (count, rho) = &groups[&key];
                let mut avg = rho.clone();
                avg.scale(1.0 / *count as f64);
                distance = distance.max(trace_distance(&avg, &uniform));
                let p = *count as f64 / per_reported as f64;
                lo = lo.min(p);
                hi = hi.max(p);
            }
            // Transcripts that never occur count as probability 0.
            if (groups.len() as u64) < (1u64 << steps) * 8u64.pow(steps as u32) {
                lo = 0.0;
            }
            let mut cardinalities: Vec<(String, u64)> = space
                .cardinalities()
                .iter()
                .map(|(k, v)| (k.to_string(), *v))
                .collect();
            cardinalities.push(("reported".into(), 1 << steps));
            Ok(BlindnessReport {
                mode,
                qubits: m,
                delta_histogram: histogram,
                bob_state_distance: distance,
                transcript_probability_range: Some((lo, hi)),
                cardinalities,
            })
        }
        AuditMode::MonteCarlo { samples, seed } => {
            if samples == 0 {
                return Err(Error::Config("at least one sample is needed".into()));
            }
            let mut rng = seeded_rng(seed, 0);
            let mut sum = DensityMatrix::zeros(m);
            for _ in 0..samples {
                let secrets = ClientSecrets::draw(pattern, variant, quantum, &mut rng);
                let reported: Vec<bool> = (0..steps).map(|_| rng.gen()).collect();
                for (row, d) in histogram
                    .iter_mut()
                    .zip(angle_sequence(pattern, &secrets, &reported))
                {
                    row[d.value() as usize] += 1;
                }
                sum.accumulate_pure(&initial_state(pattern, &secrets, input)?, 1.0);
            }
            sum.scale(1.0 / samples as f64);
            Ok(BlindnessReport {
                mode,
                qubits: m,
                delta_histogram: histogram,
                bob_state_distance: trace_distance(&sum, &uniform),
                transcript_probability_range: None,
                cardinalities: vec![("samples".into(), samples)],
            })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::line_pattern;
    use crate::mbqc::OutputMode;

    #[test]
    fn single_qubit_classical_input() {
        let p = line_pattern(&[], OutputMode::Classical).unwrap();
        let r = blindness_audit(
            &p,
            Variant::ClassicalInput,
            &PatternInput::Classical(vec![true]),
            AuditMode::Exact,
            3,
        )
        .unwrap();
        assert_eq!(r.delta_histogram, vec![[2; 8]]);
        assert!(r.bob_state_distance < 1e-9);
        let mut fixed = 0;
        for secrets in SecretSpace::new(&p, Variant::ClassicalInput, false)
            .iter()
            .unwrap()
        {
            let d = angle_sequence(&p, &secrets, &[false])[0];
            if d.value() == 0 {
                fixed += 1;
            }
        }
        assert_eq!(fixed, 2);
    }

    #[test]
    fn cap_is_enforced() {
        let p = line_pattern(&[1, 2, 3], OutputMode::Quantum).unwrap();
        let input = PatternInput::Classical(vec![false]);
        assert!(matches!(
            blindness_audit(&p, Variant::Basic, &input, AuditMode::Exact, 3),
            Err(Error::CapExceeded { .. })
        ));
    }

    #[test]
    fn csv_shape() {
        let r = BlindnessReport {
            mode: AuditMode::Exact,
            qubits: 1,
            delta_histogram: vec![[1; 8]],
            bob_state_distance: 0.0,
            transcript_probability_range: None,
            cardinalities: vec![],
        };
        let csv = r.histogram_csv();
        assert_eq!(csv.lines().count(), 9);
        assert!(csv.starts_with("step,delta,count\n1,0,1\n"));
    }
}
