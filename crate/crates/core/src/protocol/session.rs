use crate::digest::sha256_hex;
use crate::error::{Error, Result};
use crate::sim::EnvironmentState;

use super::client::{Client, ClientOutcome};
use super::message::Message;
use super::server::Server;
use super::transport::{MemoryTransport, Transport};

/// Result of a complete session.
#[derive(Clone, Debug, PartialEq)]
pub struct SessionOutcome {
    pub client: ClientOutcome,
    /// Probability of the server's outcome string.
    pub probability: f64,
    /// Every message in the order it was sent.
    pub transcript: Vec<Message>,
    /// SHA-256 of the transcript as NDJSON.
    pub transcript_digest: String,
}

/// Runs a session with the client on one endpoint and the server on the other.
pub fn run_session_over(
    mut client: Client,
    server: &mut dyn Server,
    client_end: &mut dyn Transport,
    server_end: &mut dyn Transport,
    env: &mut EnvironmentState,
) -> Result<SessionOutcome> {
    let mut transcript = Vec::new();
    let mut to_server = client.start(env)?;
    loop {
        let owed_to_server = to_server.len();
        for m in to_server.drain(..) {
            client_end.send(&m)?;
            transcript.push(m);
        }
        let mut owed_to_client = 0;
        for _ in 0..owed_to_server {
            let m = server_end.recv()?;
            for reply in server.on_message(env, m)? {
                server_end.send(&reply)?;
                transcript.push(reply);
                owed_to_client += 1;
            }
        }
        for _ in 0..owed_to_client {
            let m = client_end.recv()?;
            to_server.extend(client.on_message(env, m)?);
        }
        if client.is_finished() {
            break;
        }
        if to_server.is_empty() {
            return Err(Error::ProtocolViolation("session stalled".into()));
        }
    }
    let mut ndjson = String::new();
    for m in &transcript {
        ndjson.push_str(&m.to_line());
        ndjson.push('\n');
    }
    Ok(SessionOutcome {
        client: client.into_outcome()?,
        probability: env.branch_probability(),
        transcript_digest: sha256_hex(ndjson.as_bytes()),
        transcript,
    })
}

/// Runs a session over an in-memory channel with a fresh environment.
pub fn run_session(client: Client, server: &mut dyn Server) -> Result<SessionOutcome> {
    let (mut a, mut b) = MemoryTransport::pair();
    let mut env = EnvironmentState::new();
    run_session_over(client, server, &mut a, &mut b, &mut env)
}

/// Runs a session by handing messages over directly, without a transport or
/// transcript. Returns the client's outcome and the branch probability.
pub fn run_session_direct(
    mut client: Client,
    server: &mut dyn Server,
    env: &mut EnvironmentState,
) -> Result<(ClientOutcome, f64)> {
    let mut to_server = client.start(env)?;
    while !client.is_finished() {
        let mut to_client = Vec::new();
        for m in to_server.drain(..) {
            to_client.extend(server.on_message(env, m)?);
        }
        for m in to_client {
            to_server.extend(client.on_message(env, m)?);
        }
        if !client.is_finished() && to_server.is_empty() {
            return Err(Error::ProtocolViolation("session stalled".into()));
        }
    }
    Ok((client.into_outcome()?, env.branch_probability()))
}
