use crate::angle::AngleIndex;
use crate::error::{Error, Result};
use crate::mbqc::{
    adapted_angle, dependencies, Dependencies, OutputMode, Pattern, PatternInput, PatternOutput,
};
use crate::sim::{
    Basis, DensityMatrix, EnvironmentState, LocalOp, MeasureMode, Owner, PrepSpec, QubitId,
};

use super::message::{Bit, Message};
use super::secrets::{ClientSecrets, Variant};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct ClientOptions {
    /// Leave returned traps unmeasured and report the joint returned state instead.
    pub skip_output_trap_measurement: bool,
}

/// What the client knows at the end of a run.
#[derive(Clone, Debug, PartialEq)]
pub struct ClientOutcome {
    pub accept: bool,
    pub output: PatternOutput,
    /// Logical outcome of every measured vertex, indexed by vertex.
    pub logical: Vec<bool>,
    /// Reported outcomes in measurement order.
    pub reported: Vec<bool>,
    /// Corrected data outputs followed by un-rotated returned traps, when trap
    /// measurement was skipped.
    pub joint_output: Option<DensityMatrix>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Phase {
    Idle,
    Measuring,
    AwaitingOutput,
    Finished,
}

/// The client side of a blind session.
pub struct Client {
    pattern: Pattern,
    variant: Variant,
    input: PatternInput,
    secrets: ClientSecrets,
    options: ClientOptions,
    deps: Vec<Dependencies>,
    qubit: Vec<QubitId>,
    logical: Vec<bool>,
    reported: Vec<bool>,
    next: usize,
    accept: bool,
    phase: Phase,
    outcome: Option<ClientOutcome>,
}

/// Angle the client asks for at `v`, given the logical outcomes so far.
pub fn measurement_angle(
    pattern: &Pattern,
    deps: &Dependencies,
    secrets: &ClientSecrets,
    logical: &[bool],
    v: usize,
) -> AngleIndex {
    adapted_angle(
        pattern.angle(v),
        secrets.theta[v],
        secrets.flip[v],
        secrets.pad[v],
        deps.x_bit(logical),
        deps.z_bit(logical, &secrets.pad),
        deps.bridge_rotation(logical),
    )
}

/// Every requested angle for a given string of reported outcomes (in measurement order).
pub fn angle_sequence(
    pattern: &Pattern,
    secrets: &ClientSecrets,
    reported: &[bool],
) -> Vec<AngleIndex> {
    let deps = dependencies(pattern);
    let mut logical = vec![false; pattern.vertex_count()];
    pattern
        .order()
        .iter()
        .zip(reported)
        .map(|(&v, &b)| {
            let delta = measurement_angle(pattern, &deps[v], secrets, &logical, v);
            logical[v] = b ^ secrets.flip[v];
            delta
        })
        .collect()
}

/// The preparation of each vertex, with quantum inputs left out.
fn preparation(
    pattern: &Pattern,
    secrets: &ClientSecrets,
    input: &PatternInput,
    v: usize,
) -> PrepSpec {
    if pattern.dummies().contains(&v) {
        return PrepSpec::Computational(secrets.dummy_bits[v]);
    }
    let mut angle =
        secrets.theta[v] + AngleIndex::pi_if(pattern.dummy_parity(v, &secrets.dummy_bits));
    if let PatternInput::Classical(bits) = input {
        if let Some(k) = pattern.graph().inputs().iter().position(|&i| i == v) {
            angle += AngleIndex::pi_if(bits[k]);
        }
    }
    PrepSpec::PlusTheta(angle)
}

/// Allocates the client's qubits; returns the qubit of each vertex.
pub fn prepare_qubits(
    env: &mut EnvironmentState,
    pattern: &Pattern,
    secrets: &ClientSecrets,
    input: &PatternInput,
) -> Result<Vec<QubitId>> {
    let m = pattern.vertex_count();
    let graph = pattern.graph();
    let inputs = graph.inputs();
    let mut qubit = vec![usize::MAX; m];
    if let PatternInput::Quantum(_) = input {
        let ids = env.allocate_register(input.to_vector(inputs.len())?)?;
        for (&v, &q) in inputs.iter().zip(&ids) {
            qubit[v] = q;
            if secrets.pad[v] {
                env.apply_local(q, &LocalOp::X)?;
            }
            let angle =
                secrets.theta[v] + AngleIndex::pi_if(pattern.dummy_parity(v, &secrets.dummy_bits));
            env.apply_local(q, &LocalOp::Phase(angle))?;
        }
    } else {
        input.to_vector(inputs.len())?;
    }
    for (v, slot) in qubit.iter_mut().enumerate() {
        if *slot == usize::MAX {
            *slot = env.allocate(&[preparation(pattern, secrets, input, v)])?[0];
        }
    }
    Ok(qubit)
}

impl Client {
    pub fn new(
        pattern: Pattern,
        variant: Variant,
        input: PatternInput,
        secrets: ClientSecrets,
        options: ClientOptions,
    ) -> Result<Self> {
        let quantum = matches!(input, PatternInput::Quantum(_));
        variant.check(&pattern, quantum)?;
        secrets.validate(&pattern, quantum)?;
        if variant == Variant::ClassicalInput && secrets.pad.iter().any(|&p| p) {
            return Err(Error::InconsistentVariant(
                "the classical-input variant never pads".into(),
            ));
        }
        let m = pattern.vertex_count();
        Ok(Client {
            deps: dependencies(&pattern),
            pattern,
            variant,
            input,
            secrets,
            options,
            qubit: Vec::new(),
            logical: vec![false; m],
            reported: Vec::new(),
            next: 0,
            accept: true,
            phase: Phase::Idle,
            outcome: None,
        })
    }

    pub fn variant(&self) -> Variant {
        self.variant
    }

    pub fn pattern(&self) -> &Pattern {
        &self.pattern
    }

    pub fn secrets(&self) -> &ClientSecrets {
        &self.secrets
    }

    /// Prepares every qubit and opens the session.
    pub fn start(&mut self, env: &mut EnvironmentState) -> Result<Vec<Message>> {
        if self.phase != Phase::Idle {
            return Err(Error::ProtocolViolation("session already started".into()));
        }
        self.qubit = prepare_qubits(env, &self.pattern, &self.secrets, &self.input)?;
        let mut out = vec![
            Message::GraphAnnounce(self.pattern.graph().clone()),
            Message::QubitTransfer {
                qubits: self.qubit.clone(),
            },
        ];
        self.phase = Phase::Measuring;
        out.push(self.request_or_done());
        Ok(out)
    }

    fn request_or_done(&mut self) -> Message {
        match self.pattern.order().get(self.next) {
            Some(&v) => Message::MeasureRequest {
                qubit: v,
                angle: measurement_angle(
                    &self.pattern,
                    &self.deps[v],
                    &self.secrets,
                    &self.logical,
                    v,
                ),
            },
            None => {
                self.phase = Phase::AwaitingOutput;
                Message::Done
            }
        }
    }

    pub fn on_message(&mut self, env: &mut EnvironmentState, msg: Message) -> Result<Vec<Message>> {
        match (self.phase, msg) {
            (
                Phase::Measuring,
                Message::MeasureResult {
                    qubit,
                    outcome: Bit(b),
                },
            ) => {
                let expected = self.pattern.order()[self.next];
                if qubit != expected {
                    return Err(Error::ProtocolViolation(format!(
                        "result for {qubit}, expected {expected}"
                    )));
                }
                self.reported.push(b);
                self.logical[qubit] = b ^ self.secrets.flip[qubit];
                if self.pattern.traps().contains(&qubit) && self.logical[qubit] {
                    self.accept = false;
                }
                self.next += 1;
                Ok(vec![self.request_or_done()])
            }
            (Phase::AwaitingOutput, Message::OutputTransfer { qubits }) => {
                self.finish(env, &qubits)?;
                Ok(Vec::new())
            }
            (phase, msg) => Err(Error::ProtocolViolation(format!(
                "unexpected {msg:?} while {phase:?}"
            ))),
        }
    }

    fn finish(&mut self, env: &mut EnvironmentState, returned: &[usize]) -> Result<()> {
        let expected: Vec<usize> = match self.pattern.output_mode() {
            OutputMode::Classical => Vec::new(),
            OutputMode::Quantum => self.pattern.graph().outputs().to_vec(),
        };
        if returned != expected.as_slice() {
            return Err(Error::ProtocolViolation(format!(
                "returned {returned:?}, expected {expected:?}"
            )));
        }
        for &v in returned {
            env.set_owner(self.qubit[v], Owner::Alice)?;
        }
        let data = self.pattern.data_outputs();
        let mut joint_output = None;
        let output = match self.pattern.output_mode() {
            OutputMode::Classical => {
                PatternOutput::Classical(data.iter().map(|&v| self.logical[v]).collect())
            }
            OutputMode::Quantum => {
                for &v in &data {
                    self.correct_output(env, v)?;
                }
                let traps = self.pattern.output_traps();
                for &t in &traps {
                    env.apply_local(self.qubit[t], &LocalOp::Phase(-self.secrets.theta[t]))?;
                }
                if self.options.skip_output_trap_measurement {
                    let ids: Vec<QubitId> =
                        data.iter().chain(&traps).map(|&v| self.qubit[v]).collect();
                    joint_output = Some(env.reduced_density(&ids)?);
                } else {
                    for &t in &traps {
                        let seen = env.measure(
                            self.qubit[t],
                            Basis::XY(AngleIndex::ZERO),
                            MeasureMode::Forced(false),
                        )?;
                        if seen.probability < 0.5 {
                            self.accept = false;
                        }
                    }
                }
                let ids: Vec<QubitId> = data.iter().map(|&v| self.qubit[v]).collect();
                match env.state_vector(&ids) {
                    Ok(psi) => PatternOutput::Quantum(psi),
                    Err(_) => PatternOutput::QuantumMixed(env.reduced_density(&ids)?),
                }
            }
        };
        self.phase = Phase::Finished;
        self.outcome = Some(ClientOutcome {
            accept: self.accept,
            output,
            logical: self.logical.clone(),
            reported: self.reported.clone(),
            joint_output,
        });
        Ok(())
    }

    /// Undoes the hiding rotation, the pad, the bridge rotation and the flow corrections.
    fn correct_output(&self, env: &mut EnvironmentState, v: usize) -> Result<()> {
        let q = self.qubit[v];
        let d = &self.deps[v];
        env.apply_local(q, &LocalOp::Phase(-self.secrets.theta[v]))?;
        if self.secrets.pad[v] {
            env.apply_local(q, &LocalOp::X)?;
        }
        env.apply_local(q, &LocalOp::Phase(-d.bridge_rotation(&self.logical)))?;
        if d.z_bit(&self.logical, &self.secrets.pad) {
            env.apply_local(q, &LocalOp::Z)?;
        }
        if d.x_bit(&self.logical) {
            env.apply_local(q, &LocalOp::X)?;
        }
        Ok(())
    }

    pub fn is_finished(&self) -> bool {
        self.phase == Phase::Finished
    }

    pub fn into_outcome(self) -> Result<ClientOutcome> {
        self.outcome.ok_or_else(|| {
            Error::ProtocolViolation("session ended before the outputs came back".into())
        })
    }
}
