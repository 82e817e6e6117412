use serde::{Deserialize, Serialize};

use crate::angle::AngleIndex;
use crate::graph::OpenGraph;
use crate::sim::QubitId;

/// A measurement outcome on the wire, encoded as 0 or 1.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Bit(pub bool);

impl Serialize for Bit {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_u8(self.0 as u8)
    }
}

impl<'de> Deserialize<'de> for Bit {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        match u8::deserialize(d)? {
            0 => Ok(Bit(false)),
            1 => Ok(Bit(true)),
            other => Err(serde::de::Error::custom(format!(
                "outcome must be 0 or 1, got {other}"
            ))),
        }
    }
}

/// Everything exchanged between client and server.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", content = "payload", rename_all = "snake_case")]
pub enum Message {
    GraphAnnounce(OpenGraph),
    /// Hands over physical qubits; entry `v` carries vertex `v`.
    QubitTransfer {
        qubits: Vec<QubitId>,
    },
    MeasureRequest {
        qubit: usize,
        angle: AngleIndex,
    },
    MeasureResult {
        qubit: usize,
        outcome: Bit,
    },
    Done,
    /// Vertices whose qubits are returned unmeasured.
    OutputTransfer {
        qubits: Vec<usize>,
    },
}

impl Message {
    /// One line of NDJSON, without the newline.
    pub fn to_line(&self) -> String {
        serde_json::to_string(self).expect("messages always serialize")
    }
}
