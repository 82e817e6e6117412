use std::collections::BTreeMap;

use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::mbqc::{PatternInput, PatternOutput};
use crate::protocol::{run_session, Client, ClientOptions, ClientSecrets, Server, Variant};

use super::embedding::VerificationPlan;
use super::encoding::Decoded;

/// Outcome of a verifiable run.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VerifiedOutcome {
    pub accept: bool,
    /// Pass bit of every trap.
    pub trap_results: BTreeMap<usize, bool>,
    #[serde(skip)]
    pub output: PatternOutput,
    /// Classical output after decoding, if the output is classical.
    pub decoded: Option<Decoded>,
    pub probability: f64,
    pub transcript_digest: String,
}

/// Runs the client of `plan` against `server`. `input` is the logical input of
/// the circuit; classical bits are replicated over the encoding's copies.
pub fn run_protocol8(
    plan: &VerificationPlan,
    input: &PatternInput,
    server: &mut dyn Server,
    rng: &mut impl Rng,
) -> Result<VerifiedOutcome> {
    let physical = match input {
        PatternInput::Classical(bits) => PatternInput::Classical(plan.encoded.encode_input(bits)),
        PatternInput::Quantum(_) if plan.encoded.copies == 1 => input.clone(),
        PatternInput::Quantum(_) => {
            return Err(Error::Config("quantum input cannot be replicated".into()));
        }
    };
    let pattern = plan.pattern().clone();
    let quantum = matches!(physical, PatternInput::Quantum(_));
    let secrets = ClientSecrets::draw(&pattern, Variant::Dummy, quantum, rng);
    let client = Client::new(
        pattern,
        Variant::Dummy,
        physical,
        secrets,
        ClientOptions::default(),
    )?;
    let session = run_session(client, server)?;
    let outcome = session.client;
    let trap_results: BTreeMap<usize, bool> = plan
        .traps()
        .traps()
        .into_iter()
        .map(|t| (t, !outcome.logical[t]))
        .collect();
    let accept = trap_results.values().all(|&pass| pass);
    debug_assert_eq!(accept, outcome.accept);
    let decoded = match &outcome.output {
        PatternOutput::Classical(raw) => Some(plan.encoding.decode(&plan.encoded, raw)?),
        _ => None,
    };
    Ok(VerifiedOutcome {
        accept,
        trap_results,
        output: outcome.output,
        decoded,
        probability: session.probability,
        transcript_digest: session.transcript_digest,
    })
}
