use num_complex::Complex64;
use rand::RngCore;
use serde::Serialize;

use super::deps::{adapted_angle, dependencies};
use super::entangler::LazyEntangler;
use super::pattern::{OutputMode, Pattern};
use crate::angle::AngleIndex;
use crate::digest::sha256_hex;
use crate::error::{Error, Result};
use crate::sim::{Basis, DensityMatrix, EnvironmentState, LocalOp, MeasureMode, PrepSpec, QubitId};

/// Default ceiling on the number of measurements `branch_enumerate` will expand.
pub const DEFAULT_BRANCH_CAP: usize = 12;

#[derive(Clone, Debug, PartialEq)]
pub enum PatternInput {
    /// One bit per input: 0 gives |+>, 1 gives |->.
    Classical(Vec<bool>),
    /// Little-endian amplitudes over the inputs in input order.
    Quantum(Vec<Complex64>),
}

impl PatternInput {
    /// The input as a state vector over the inputs.
    pub fn to_vector(&self, inputs: usize) -> Result<Vec<Complex64>> {
        match self {
            PatternInput::Quantum(amps) => {
                if amps.len() != 1 << inputs {
                    return Err(Error::SizeMismatch {
                        expected: 1 << inputs,
                        actual: amps.len(),
                    });
                }
                Ok(amps.clone())
            }
            PatternInput::Classical(bits) => {
                if bits.len() != inputs {
                    return Err(Error::SizeMismatch {
                        expected: inputs,
                        actual: bits.len(),
                    });
                }
                let h = std::f64::consts::FRAC_1_SQRT_2;
                let mut v = vec![Complex64::new(1.0, 0.0)];
                for (k, &b) in bits.iter().enumerate() {
                    let sign = if b { -1.0 } else { 1.0 };
                    let mut next = vec![Complex64::new(0.0, 0.0); v.len() * 2];
                    for (i, &a) in v.iter().enumerate() {
                        next[i] = a * h;
                        next[i | (1 << k)] = a * h * sign;
                    }
                    v = next;
                }
                Ok(v)
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum PatternOutput {
    Quantum(Vec<Complex64>),
    /// Output entangled with leftover qubits; only the reduced state is available.
    QuantumMixed(DensityMatrix),
    Classical(Vec<bool>),
}

impl PatternOutput {
    /// Fidelity against a pure reference state.
    pub fn fidelity_with(&self, reference: &[Complex64]) -> Option<f64> {
        match self {
            PatternOutput::Quantum(psi) => Some(crate::sim::fidelity(psi, reference)),
            PatternOutput::QuantumMixed(rho) => Some(rho.fidelity_with(reference)),
            PatternOutput::Classical(_) => None,
        }
    }
}

/// One run of a pattern.
#[derive(Clone, Debug, PartialEq)]
pub struct OutcomeRecord {
    /// Logical outcome of each measured vertex, in measurement order.
    pub outcomes: Vec<bool>,
    pub accept: bool,
    pub output: PatternOutput,
    /// Probability of this branch.
    pub probability: f64,
    pub transcript_digest: String,
}

/// How measurement outcomes are chosen.
pub enum Branch<'a> {
    Random(&'a mut dyn RngCore),
    /// One outcome per measurement, in measurement order.
    Forced(&'a [bool]),
}

#[derive(Serialize)]
struct TranscriptLine {
    vertex: usize,
    angle: AngleIndex,
    outcome: bool,
}

/// Runs the pattern directly, without any hiding, with all dummies prepared in |0>.
pub fn run_reference(
    pattern: &Pattern,
    input: &PatternInput,
    branch: Branch<'_>,
) -> Result<OutcomeRecord> {
    let zeros = vec![false; pattern.vertex_count()];
    run_reference_with_dummies(pattern, input, &zeros, branch)
}

/// As `run_reference` with explicit dummy bits, indexed by vertex.
pub fn run_reference_with_dummies(
    pattern: &Pattern,
    input: &PatternInput,
    dummy_bits: &[bool],
    mut branch: Branch<'_>,
) -> Result<OutcomeRecord> {
    let m = pattern.vertex_count();
    let graph = pattern.graph();
    if dummy_bits.len() != m {
        return Err(Error::SizeMismatch {
            expected: m,
            actual: dummy_bits.len(),
        });
    }
    if let Branch::Forced(bits) = &branch {
        if bits.len() != pattern.order().len() {
            return Err(Error::SizeMismatch {
                expected: pattern.order().len(),
                actual: bits.len(),
            });
        }
    }
    let mut env = EnvironmentState::new();
    let mut qubit: Vec<QubitId> = vec![usize::MAX; m];
    let inputs = graph.inputs();
    match input {
        PatternInput::Quantum(_) => {
            let ids = env.allocate_register(input.to_vector(inputs.len())?)?;
            for (&v, &q) in inputs.iter().zip(&ids) {
                qubit[v] = q;
                if pattern.dummy_parity(v, dummy_bits) {
                    env.apply_local(q, &LocalOp::Z)?;
                }
            }
        }
        PatternInput::Classical(bits) => {
            if bits.len() != inputs.len() {
                return Err(Error::SizeMismatch {
                    expected: inputs.len(),
                    actual: bits.len(),
                });
            }
            for (&v, &b) in inputs.iter().zip(bits) {
                let flip = b ^ pattern.dummy_parity(v, dummy_bits);
                qubit[v] = env.allocate(&[PrepSpec::PlusTheta(AngleIndex::pi_if(flip))])?[0];
            }
        }
    }
    for v in 0..m {
        if graph.is_input(v) {
            continue;
        }
        let prep = if pattern.dummies().contains(&v) {
            PrepSpec::Computational(dummy_bits[v])
        } else {
            PrepSpec::PlusTheta(AngleIndex::pi_if(pattern.dummy_parity(v, dummy_bits)))
        };
        qubit[v] = env.allocate(&[prep])?[0];
    }
    let mut entangler = LazyEntangler::new(graph);

    let deps = dependencies(pattern);
    let no_pads = vec![false; m];
    let mut s = vec![false; m];
    let mut outcomes = Vec::with_capacity(pattern.order().len());
    let mut transcript = Vec::with_capacity(pattern.order().len());
    let mut accept = true;
    for (k, &v) in pattern.order().iter().enumerate() {
        let d = &deps[v];
        let delta = adapted_angle(
            pattern.angle(v),
            AngleIndex::ZERO,
            false,
            false,
            d.x_bit(&s),
            d.z_bit(&s, &no_pads),
            d.bridge_rotation(&s),
        );
        let mode = match &mut branch {
            Branch::Random(rng) => MeasureMode::Random(&mut **rng),
            Branch::Forced(bits) => MeasureMode::Forced(bits[k]),
        };
        entangler.entangle_around(&mut env, &qubit, v)?;
        let outcome = env.measure(qubit[v], Basis::XY(delta), mode)?.outcome;
        s[v] = outcome;
        outcomes.push(outcome);
        if pattern.traps().contains(&v) && outcome {
            accept = false;
        }
        transcript.push(TranscriptLine {
            vertex: v,
            angle: delta,
            outcome,
        });
    }

    let output = match pattern.output_mode() {
        OutputMode::Classical => {
            PatternOutput::Classical(pattern.data_outputs().iter().map(|&v| s[v]).collect())
        }
        OutputMode::Quantum => {
            entangler.entangle_all(&mut env, &qubit)?;
            for t in pattern.output_traps() {
                let seen = env.measure(
                    qubit[t],
                    Basis::XY(AngleIndex::ZERO),
                    MeasureMode::Forced(false),
                )?;
                if seen.probability < 0.5 {
                    accept = false;
                }
            }
            let data = pattern.data_outputs();
            for &v in &data {
                let d = &deps[v];
                let q = qubit[v];
                env.apply_local(q, &LocalOp::Phase(-d.bridge_rotation(&s)))?;
                if d.z_bit(&s, &no_pads) {
                    env.apply_local(q, &LocalOp::Z)?;
                }
                if d.x_bit(&s) {
                    env.apply_local(q, &LocalOp::X)?;
                }
            }
            let ids: Vec<QubitId> = data.iter().map(|&v| qubit[v]).collect();
            match env.state_vector(&ids) {
                Ok(psi) => PatternOutput::Quantum(psi),
                Err(_) => PatternOutput::QuantumMixed(env.reduced_density(&ids)?),
            }
        }
    };
    let transcript_digest =
        sha256_hex(&serde_json::to_vec(&transcript).expect("transcript serializes"));
    Ok(OutcomeRecord {
        outcomes,
        accept,
        output,
        probability: env.branch_probability(),
        transcript_digest,
    })
}

/// Every outcome string of the pattern, including zero-probability ones.
pub fn branch_enumerate(
    pattern: &Pattern,
    input: &PatternInput,
    cap: usize,
) -> Result<Vec<OutcomeRecord>> {
    let n = pattern.order().len();
    if n > cap {
        return Err(Error::CapExceeded {
            what: "measurements to enumerate",
            limit: cap,
            requested: n,
        });
    }
    (0..1usize << n)
        .map(|mask| {
            let bits: Vec<bool> = (0..n).map(|k| mask >> k & 1 == 1).collect();
            run_reference(pattern, input, Branch::Forced(&bits))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{line_flow, OpenGraph};
    use crate::mbqc::pattern::PatternBuilder;
    use crate::sim::{fidelity, matmul2, seeded_rng, Matrix2};

    fn line(angles: &[i64], mode: OutputMode) -> Pattern {
        let m = angles.len() + 1;
        let mut a: Vec<AngleIndex> = angles.iter().map(|&k| AngleIndex::new(k)).collect();
        a.push(AngleIndex::ZERO);
        let order = match mode {
            OutputMode::Quantum => (0..m - 1).collect(),
            OutputMode::Classical => (0..m).collect(),
        };
        PatternBuilder::plain(
            OpenGraph::line(m).unwrap(),
            a,
            line_flow(m).successor,
            order,
            mode,
        )
        .build()
        .unwrap()
    }

    /// H Z(-phi) for each measured angle, applied in order.
    fn line_oracle(angles: &[i64], input: [Complex64; 2]) -> Vec<Complex64> {
        let mut u: Matrix2 = LocalOp::Pauli(crate::sim::Pauli::I).matrix();
        for &k in angles {
            let step = matmul2(
                &LocalOp::H.matrix(),
                &LocalOp::Phase(AngleIndex::new(-k)).matrix(),
            );
            u = matmul2(&step, &u);
        }
        vec![
            u[0][0] * input[0] + u[0][1] * input[1],
            u[1][0] * input[0] + u[1][1] * input[1],
        ]
    }

    #[test]
    fn two_vertex_line_matches_matrix_oracle() {
        let input = [Complex64::new(0.6, 0.0), Complex64::new(0.0, 0.8)];
        for k in 0..8 {
            let p = line(&[k], OutputMode::Quantum);
            let want = line_oracle(&[k], input);
            for rec in branch_enumerate(&p, &PatternInput::Quantum(input.to_vec()), 4).unwrap() {
                assert!((rec.probability - 0.5).abs() < 1e-12);
                let f = rec.output.fidelity_with(&want).unwrap();
                assert!(f > 1.0 - 1e-12, "angle {k}: fidelity {f}");
            }
        }
    }

    #[test]
    fn longer_lines_are_deterministic() {
        let input = [Complex64::new(0.8, 0.0), Complex64::new(0.36, 0.48)];
        let angles = [1, 6, 3, 2];
        let p = line(&angles, OutputMode::Quantum);
        let want = line_oracle(&angles, input);
        let records = branch_enumerate(&p, &PatternInput::Quantum(input.to_vec()), 4).unwrap();
        assert_eq!(records.len(), 16);
        for rec in records {
            assert!(rec.output.fidelity_with(&want).unwrap() > 1.0 - 1e-12);
        }
    }

    #[test]
    fn classical_output_is_deterministic() {
        let p = line(&[4, 0], OutputMode::Classical);
        let mut rng = seeded_rng(7, 0);
        for _ in 0..20 {
            let rec = run_reference(
                &p,
                &PatternInput::Classical(vec![false]),
                Branch::Random(&mut rng),
            )
            .unwrap();
            assert_eq!(rec.output, PatternOutput::Classical(vec![true]));
            assert!(rec.accept);
        }
    }

    #[test]
    fn dummies_do_not_change_the_output() {
        let g = OpenGraph::new(4, [(0, 1), (1, 2), (1, 3), (0, 3)], vec![0], vec![2]).unwrap();
        let mut b = PatternBuilder::plain(
            g,
            vec![
                AngleIndex::new(3),
                AngleIndex::new(5),
                AngleIndex::ZERO,
                AngleIndex::ZERO,
            ],
            [(0, 1), (1, 2)].into_iter().collect(),
            vec![3, 0, 1],
            OutputMode::Quantum,
        );
        b.dummies.insert(3);
        let p = b.build().unwrap();
        let input = [Complex64::new(0.6, 0.0), Complex64::new(0.0, -0.8)];
        let want = line_oracle(&[3, 5], input);
        for bit in [false, true] {
            let mut bits = vec![false; 4];
            bits[3] = bit;
            let mut rng = seeded_rng(1, 2);
            let rec = run_reference_with_dummies(
                &p,
                &PatternInput::Quantum(input.to_vec()),
                &bits,
                Branch::Random(&mut rng),
            )
            .unwrap();
            assert!(rec.output.fidelity_with(&want).unwrap() > 1.0 - 1e-12);
        }
    }

    #[test]
    fn branch_cap_is_enforced() {
        let p = line(&[0; 5], OutputMode::Quantum);
        assert!(matches!(
            branch_enumerate(&p, &PatternInput::Classical(vec![false]), 4),
            Err(Error::CapExceeded { .. })
        ));
    }

    #[test]
    fn classical_input_matches_vector() {
        let v = PatternInput::Classical(vec![true, false])
            .to_vector(2)
            .unwrap();
        let h = 0.5;
        let want = [h, -h, h, -h].map(|x| Complex64::new(x, 0.0));
        assert!(fidelity(&v, &want) > 1.0 - 1e-15);
    }
}
