use rand::RngCore;

use crate::angle::AngleIndex;
use crate::error::{Error, Result};
use crate::graph::OpenGraph;
use crate::mbqc::LazyEntangler;
use crate::sim::{Basis, EnvironmentState, MeasureMode, Owner, QubitId};

use super::attack::{complex_matrix, Attack, Deviation, DEFAULT_ANCILLA_CAP};
use super::message::{Bit, Message};

/// Where the server's measurement outcomes come from.
pub enum OutcomeSource {
    Random(Box<dyn RngCore>),
    /// One outcome per measurement, in order.
    Forced(Vec<bool>),
}

/// The server side of a session.
pub trait Server {
    fn on_message(&mut self, env: &mut EnvironmentState, msg: Message) -> Result<Vec<Message>>;
}

/// A server that follows the protocol, optionally with scheduled deviations.
pub struct QuantumServer {
    attack: Attack,
    ancilla_cap: usize,
    outcomes: OutcomeSource,
    graph: Option<OpenGraph>,
    qubit: Vec<QubitId>,
    entangler: Option<LazyEntangler>,
    measured: Vec<bool>,
    count: usize,
}

impl QuantumServer {
    pub fn honest(outcomes: OutcomeSource) -> Self {
        Self::adversarial(Attack::honest(), outcomes)
    }

    pub fn adversarial(attack: Attack, outcomes: OutcomeSource) -> Self {
        QuantumServer {
            attack,
            ancilla_cap: DEFAULT_ANCILLA_CAP,
            outcomes,
            graph: None,
            qubit: Vec::new(),
            entangler: None,
            measured: Vec::new(),
            count: 0,
        }
    }

    pub fn with_ancilla_cap(mut self, cap: usize) -> Self {
        self.ancilla_cap = cap;
        self
    }

    fn graph(&self) -> Result<&OpenGraph> {
        self.graph
            .as_ref()
            .ok_or_else(|| Error::ProtocolViolation("no graph announced".into()))
    }

    fn live_vertex(&self, env: &EnvironmentState, v: usize) -> Result<QubitId> {
        let q = *self
            .qubit
            .get(v)
            .ok_or_else(|| Error::MalformedAttack(format!("vertex {v} does not exist")))?;
        if self.measured[v] || !env.is_live(q) {
            return Err(Error::MalformedAttack(format!(
                "vertex {v} is no longer held by the server"
            )));
        }
        Ok(q)
    }

    /// Applies the quantum deviations scheduled for `stage`.
    fn apply_stage(&mut self, env: &mut EnvironmentState, stage: usize) -> Result<()> {
        let due: Vec<Deviation> = self
            .attack
            .deviations
            .iter()
            .filter(|sd| sd.stage == stage)
            .map(|sd| sd.deviation.clone())
            .collect();
        for dev in due {
            match dev {
                Deviation::Pauli { qubit, pauli } => {
                    let q = self.live_vertex(env, qubit)?;
                    if stage > 0 {
                        self.complete_edges(env, qubit)?;
                    }
                    env.apply_pauli(q, pauli)?;
                }
                Deviation::Unitary {
                    qubits,
                    ancillas,
                    matrix,
                } => {
                    let mut ids = Vec::with_capacity(qubits.len() + ancillas);
                    for &v in &qubits {
                        ids.push(self.live_vertex(env, v)?);
                    }
                    if stage > 0 {
                        for &v in &qubits {
                            self.complete_edges(env, v)?;
                        }
                    }
                    let fresh =
                        env.allocate(&vec![crate::sim::PrepSpec::Computational(false); ancillas])?;
                    for &a in &fresh {
                        env.set_owner(a, Owner::Bob)?;
                    }
                    ids.extend(fresh);
                    env.apply_unitary(&ids, &complex_matrix(&matrix))?;
                }
                Deviation::AngleShift { .. } | Deviation::FlipResult { .. } => {}
            }
        }
        Ok(())
    }

    fn complete_edges(&mut self, env: &mut EnvironmentState, v: usize) -> Result<()> {
        let entangler = self
            .entangler
            .as_mut()
            .ok_or_else(|| Error::ProtocolViolation("qubits have not arrived".into()))?;
        entangler.entangle_around(env, &self.qubit, v)
    }

    fn angle_shift(&self, v: usize) -> AngleIndex {
        self.attack
            .deviations
            .iter()
            .filter_map(|sd| match sd.deviation {
                Deviation::AngleShift { qubit, shift } if qubit == v => Some(shift),
                _ => None,
            })
            .fold(AngleIndex::ZERO, |acc, s| acc + s)
    }

    fn flips(&self, v: usize) -> bool {
        self.attack
            .deviations
            .iter()
            .filter(|sd| matches!(sd.deviation, Deviation::FlipResult { qubit } if qubit == v))
            .count()
            % 2
            == 1
    }

    fn measurement_budget(&self) -> Result<usize> {
        let g = self.graph()?;
        Ok(g.vertex_count())
    }
}

impl Server for QuantumServer {
    fn on_message(&mut self, env: &mut EnvironmentState, msg: Message) -> Result<Vec<Message>> {
        match msg {
            Message::GraphAnnounce(graph) => {
                if self.graph.is_some() {
                    return Err(Error::ProtocolViolation("graph announced twice".into()));
                }
                self.graph = Some(graph);
                Ok(Vec::new())
            }
            Message::QubitTransfer { qubits } => {
                let m = self.graph()?.vertex_count();
                if qubits.len() != m {
                    return Err(Error::ProtocolViolation(format!(
                        "{} qubits for {m} vertices",
                        qubits.len()
                    )));
                }
                self.attack
                    .validate(m, self.measurement_budget()?, self.ancilla_cap)?;
                for &q in &qubits {
                    env.set_owner(q, Owner::Bob)?;
                }
                self.qubit = qubits;
                self.measured = vec![false; m];
                self.apply_stage(env, 0)?;
                self.entangler = Some(LazyEntangler::new(self.graph()?));
                Ok(Vec::new())
            }
            Message::MeasureRequest { qubit: v, angle } => {
                if v >= self.measured.len() || self.measured[v] {
                    return Err(Error::ProtocolViolation(format!(
                        "cannot measure vertex {v}"
                    )));
                }
                self.count += 1;
                self.apply_stage(env, self.count)?;
                self.complete_edges(env, v)?;
                let basis = Basis::XY(angle + self.angle_shift(v));
                let mode = match &mut self.outcomes {
                    OutcomeSource::Random(rng) => MeasureMode::Random(rng.as_mut()),
                    OutcomeSource::Forced(bits) => {
                        MeasureMode::Forced(*bits.get(self.count - 1).ok_or_else(|| {
                            Error::ProtocolViolation(
                                "more measurements than forced outcomes".into(),
                            )
                        })?)
                    }
                };
                let seen = env.measure(self.qubit[v], basis, mode)?;
                self.measured[v] = true;
                Ok(vec![Message::MeasureResult {
                    qubit: v,
                    outcome: Bit(seen.outcome ^ self.flips(v)),
                }])
            }
            Message::Done => {
                self.apply_stage(env, self.count + 1)?;
                let remaining: Vec<usize> = (0..self.measured.len())
                    .filter(|&v| !self.measured[v])
                    .collect();
                for &v in &remaining {
                    self.complete_edges(env, v)?;
                }
                let graph = self.graph()?;
                let returned: Vec<usize> = graph
                    .outputs()
                    .iter()
                    .copied()
                    .filter(|v| remaining.contains(v))
                    .collect();
                if returned.len() != remaining.len() {
                    return Err(Error::ProtocolViolation(
                        "unmeasured qubits that are not outputs".into(),
                    ));
                }
                for &v in &returned {
                    env.set_owner(self.qubit[v], Owner::Alice)?;
                }
                Ok(vec![Message::OutputTransfer { qubits: returned }])
            }
            other => Err(Error::ProtocolViolation(format!(
                "server cannot handle {other:?}"
            ))),
        }
    }
}
