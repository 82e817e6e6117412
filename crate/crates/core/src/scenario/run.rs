use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::error::{Error, Result};
use crate::graph::dotted_complete;
use crate::mbqc::{
    run_reference, Branch, Circuit, OutputMode, Pattern, PatternInput, PatternOutput,
};
use crate::protocol::{
    run_session, Attack, Client, ClientOptions, ClientSecrets, OutcomeSource, QuantumServer,
    Variant, DEFAULT_ANCILLA_CAP,
};
use crate::sim::seeded_rng;
use crate::verification::{
    choose_pattern, embed, identity_pattern, make_trap_pattern, run_protocol8, EmbeddingSpec,
    EncodingParams,
};

use super::spec::{input_or_default, InputSpec, PatternSpec};
use super::Report;

const SECRETS: u64 = 1;
const SERVER: u64 = 2;
const LAYOUT: u64 = 3;
const REFERENCE: u64 = 4;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ProtocolId {
    /// Basic blind computation, quantum or classical input.
    P1,
    /// Classical input, no input pads.
    P2,
    /// Dummy qubits.
    P3,
    /// A circuit compiled onto the brickwork.
    P4,
    /// A computation hidden in the dotted-complete graph.
    P5,
    /// One random trap.
    P6,
    /// Full verification with a partition of traps and an encoding.
    P8,
}

/// A single protocol session.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub protocol: ProtocolId,
    /// Size of the dotted-complete graph (P5) or a third of it (P8).
    #[serde(rename = "N", default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    /// Encoding distance; shorthand for a repetition encoding when `encoding` is absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub d: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub encoding: Option<EncodingParams>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub circuit: Option<Circuit>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pattern: Option<PatternSpec>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub dummy_hosts: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_mode: Option<OutputMode>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub input: Option<InputSpec>,
    /// Trap vertex for P6; drawn at random when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trap: Option<usize>,
    #[serde(default)]
    pub attack: Attack,
    #[serde(default)]
    pub ancilla_cap: Option<usize>,
    #[serde(default)]
    pub seed: u64,
}

impl RunConfig {
    fn output_mode(&self) -> OutputMode {
        self.output_mode.unwrap_or(OutputMode::Quantum)
    }

    fn encoding(&self) -> Result<EncodingParams> {
        match (self.encoding, self.d) {
            (Some(e), Some(d)) if e.distance() != d => Err(Error::Config(format!(
                "d = {d} disagrees with the encoding's distance {}",
                e.distance()
            ))),
            (Some(e), _) => Ok(e),
            (None, None | Some(1)) => Ok(EncodingParams::Identity),
            (None, Some(d)) => Ok(EncodingParams::RepetitionClassical { d }),
        }
    }

    fn circuit(&self) -> Result<&Circuit> {
        self.circuit
            .as_ref()
            .ok_or_else(|| Error::Config(format!("{:?} needs a circuit", self.protocol)))
    }

    /// The computation for protocols that take a pattern or a circuit.
    fn computation(&self) -> Result<Pattern> {
        match (&self.pattern, &self.circuit) {
            (Some(spec), None) => spec.build_with_dummies(&self.dummy_hosts),
            (None, Some(c)) => {
                let p = identity_pattern(c, self.output_mode())?;
                if self.dummy_hosts.is_empty() {
                    Ok(p)
                } else {
                    p.with_extra_dummies(&self.dummy_hosts)
                }
            }
            (Some(_), Some(_)) => Err(Error::Config(
                "give either a pattern or a circuit, not both".into(),
            )),
            (None, None) => Err(Error::Config(format!(
                "{:?} needs a pattern or a circuit",
                self.protocol
            ))),
        }
    }
}

fn server_for(config: &RunConfig) -> QuantumServer {
    let outcomes = OutcomeSource::Random(Box::new(seeded_rng(config.seed, SERVER)));
    QuantumServer::adversarial(config.attack.clone(), outcomes)
        .with_ancilla_cap(config.ancilla_cap.unwrap_or(DEFAULT_ANCILLA_CAP))
}

fn output_value(output: &PatternOutput, reference: Option<&PatternOutput>) -> serde_json::Value {
    match output {
        PatternOutput::Classical(bits) => json!({"kind": "classical", "bits": bits}),
        quantum => {
            let fidelity = match reference {
                Some(PatternOutput::Quantum(psi)) => quantum.fidelity_with(psi),
                _ => None,
            };
            json!({"kind": "quantum", "fidelity_with_reference": fidelity})
        }
    }
}

/// One blind session of a pattern through the client and a possibly deviating server.
fn blind_session(
    config: &RunConfig,
    pattern: Pattern,
    variant: Variant,
    input: PatternInput,
    extra: serde_json::Value,
) -> Result<Report> {
    let quantum = matches!(input, PatternInput::Quantum(_));
    let secrets = ClientSecrets::draw(
        &pattern,
        variant,
        quantum,
        &mut seeded_rng(config.seed, SECRETS),
    );
    let reference = if pattern.output_mode() == OutputMode::Quantum {
        let mut rng = seeded_rng(config.seed, REFERENCE);
        Some(run_reference(&pattern, &input, Branch::Random(&mut rng))?.output)
    } else {
        None
    };
    let qubits = pattern.vertex_count();
    let client = Client::new(pattern, variant, input, secrets, ClientOptions::default())?;
    let mut server = server_for(config);
    let session = run_session(client, &mut server)?;
    let accept = session.client.accept;
    let mut values = json!({
        "protocol": config.protocol,
        "variant": variant,
        "qubits": qubits,
        "accept": accept,
        "probability": session.probability,
        "transcript_digest": session.transcript_digest,
        "messages": session.transcript.len(),
        "output": output_value(&session.client.output, reference.as_ref()),
    });
    if let (Some(obj), serde_json::Value::Object(more)) = (values.as_object_mut(), extra) {
        obj.extend(more);
    }
    Ok(Report::for_run(
        config,
        accept,
        values,
        BTreeMap::from([("qubits".to_string(), qubits as u64)]),
    ))
}

fn variant_for(pattern: &Pattern, requested: Variant) -> Variant {
    if pattern.dummies().is_empty() && pattern.traps().is_empty() {
        requested
    } else {
        Variant::Dummy
    }
}

/// Runs one session as described by the config.
pub fn execute_run(config: &RunConfig) -> Result<Report> {
    match config.protocol {
        ProtocolId::P1 | ProtocolId::P2 | ProtocolId::P3 => {
            let pattern = config.computation()?;
            let input = input_or_default(config.input.as_ref(), pattern.graph().inputs().len());
            let variant = match config.protocol {
                ProtocolId::P1 => Variant::Basic,
                ProtocolId::P2 => Variant::ClassicalInput,
                _ => Variant::Dummy,
            };
            blind_session(config, pattern, variant, input, json!({}))
        }
        ProtocolId::P4 => {
            let spec = PatternSpec::Circuit {
                circuit: config.circuit()?.clone(),
                output_mode: config.output_mode(),
            };
            let pattern = spec.build_with_dummies(&config.dummy_hosts)?;
            let input = input_or_default(config.input.as_ref(), pattern.graph().inputs().len());
            let variant = variant_for(&pattern, Variant::Basic);
            blind_session(config, pattern, variant, input, json!({}))
        }
        ProtocolId::P5 => {
            let computation = config.computation()?;
            if !computation.dummies().is_empty() {
                return Err(Error::Config(
                    "P5 hides a plain computation; dummy_hosts is not allowed".into(),
                ));
            }
            let size = computation.vertex_count();
            let n = config.n.unwrap_or(size);
            if n < size {
                return Err(Error::CapacityExceeded(format!(
                    "the computation needs {size} vertices, N is {n}"
                )));
            }
            let mut rng = seeded_rng(config.seed, LAYOUT);
            let mut hosts: Vec<usize> = (0..n).collect();
            hosts.shuffle(&mut rng);
            hosts.truncate(size);
            let spec = EmbeddingSpec {
                p_count: n,
                hosts: hosts.clone(),
                white: Default::default(),
                black: Default::default(),
            };
            let embedding = embed(&computation, &spec, &mut rng)?;
            let input = input_or_default(config.input.as_ref(), computation.graph().inputs().len());
            let variant = variant_for(&embedding.pattern, Variant::Basic);
            let graph_size = dotted_complete(n).graph.vertex_count();
            blind_session(
                config,
                embedding.pattern,
                variant,
                input,
                json!({"hosts": hosts, "dotted_vertices": graph_size}),
            )
        }
        ProtocolId::P6 => {
            let base = config.computation()?;
            let trap = match config.trap {
                Some(t) => t,
                None => seeded_rng(config.seed, LAYOUT).gen_range(0..base.vertex_count()),
            };
            let trapped = make_trap_pattern(&base, trap)?;
            let input = trapped.restrict_input(&input_or_default(
                config.input.as_ref(),
                base.graph().inputs().len(),
            ))?;
            blind_session(
                config,
                trapped.pattern,
                Variant::Dummy,
                input,
                json!({"trap": trap}),
            )
        }
        ProtocolId::P8 => {
            let n = config.n.ok_or_else(|| Error::Config("P8 needs N".into()))?;
            let circuit = config.circuit()?;
            let encoding = config.encoding()?;
            let plan = choose_pattern(
                circuit,
                n,
                encoding,
                config.output_mode(),
                &mut seeded_rng(config.seed, LAYOUT),
            )?;
            let input = input_or_default(config.input.as_ref(), circuit.wires);
            let mut server = server_for(config);
            let outcome = run_protocol8(
                &plan,
                &input,
                &mut server,
                &mut seeded_rng(config.seed, SECRETS),
            )?;
            let reference = match (&input, config.output_mode()) {
                (PatternInput::Quantum(amps), OutputMode::Quantum) => {
                    Some(PatternOutput::Quantum(circuit.apply(amps)?))
                }
                (PatternInput::Classical(bits), OutputMode::Quantum) => {
                    let amps = PatternInput::Classical(bits.clone()).to_vector(circuit.wires)?;
                    Some(PatternOutput::Quantum(circuit.apply(&amps)?))
                }
                _ => None,
            };
            let circuit_probability = match (&input, &outcome.decoded) {
                (PatternInput::Classical(bits), Some(decoded)) => {
                    let dist = circuit.x_basis_distribution(bits)?;
                    let index = decoded
                        .bits
                        .iter()
                        .enumerate()
                        .fold(0, |acc, (k, &b)| acc | (b as usize) << k);
                    Some(dist[index])
                }
                _ => None,
            };
            let qubits = plan.pattern().vertex_count();
            let values = json!({
                "protocol": config.protocol,
                "qubits": qubits,
                "accept": outcome.accept,
                "probability": outcome.probability,
                "transcript_digest": outcome.transcript_digest,
                "trap_results": outcome.trap_results,
                "white_traps": plan.traps().white,
                "black_traps": plan.traps().black,
                "decoded": outcome.decoded,
                "circuit_probability_of_output": circuit_probability,
                "output": output_value(&outcome.output, reference.as_ref()),
            });
            let cardinalities = BTreeMap::from([
                ("qubits".to_string(), qubits as u64),
                ("traps".to_string(), plan.traps().traps().len() as u64),
            ]);
            Ok(Report::for_run(
                config,
                outcome.accept,
                values,
                cardinalities,
            ))
        }
    }
}
