//! The client/server protocol: messages, transports, both parties and deviations.

mod attack;
mod client;
mod message;
mod secrets;
mod server;
mod session;
mod transport;

pub use attack::{Attack, Deviation, ScheduledDeviation, DEFAULT_ANCILLA_CAP};
pub use client::{
    angle_sequence, measurement_angle, prepare_qubits, Client, ClientOptions, ClientOutcome,
};
pub use message::{Bit, Message};
pub use secrets::{ClientSecrets, Variant};
pub use server::{OutcomeSource, QuantumServer, Server};
pub use session::{run_session, run_session_direct, run_session_over, SessionOutcome};
pub use transport::{MemoryTransport, StreamTransport, Transport};
