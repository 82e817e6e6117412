//! Scenario configs, their execution and the reports they produce.

mod audit;
mod run;
mod spec;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::digest::sha256_hex;

pub use audit::{
    execute_audit, AttackSet, AuditConfig, AuditKind, Caps, ModeFlag, NamedAttack, DEFAULT_SAMPLES,
};
pub use run::{execute_run, ProtocolId, RunConfig};
pub use spec::{input_or_default, InputSpec, PatternSpec};

/// What a run or an audit writes out.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Report {
    pub command: String,
    /// SHA-256 of the config as compact JSON, after any command-line overrides.
    pub config_digest: String,
    pub seed: u64,
    pub mode: String,
    pub cardinalities: BTreeMap<String, u64>,
    pub values: serde_json::Value,
    pub bound: Option<f64>,
    pub pass: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub accept: Option<bool>,
}

impl Report {
    fn for_run(
        config: &RunConfig,
        accept: bool,
        values: serde_json::Value,
        cardinalities: BTreeMap<String, u64>,
    ) -> Self {
        Report {
            command: "run".into(),
            config_digest: config_digest(config),
            seed: config.seed,
            mode: "session".into(),
            cardinalities,
            values,
            bound: None,
            pass: accept,
            accept: Some(accept),
        }
    }

    /// Pretty JSON with a trailing newline.
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("reports serialize");
        s.push('\n');
        s
    }

    /// 0 on accept or pass, 2 otherwise.
    pub fn exit_code(&self) -> i32 {
        if self.pass {
            0
        } else {
            2
        }
    }
}

/// A report and, for blindness audits, the angle histogram as CSV.
#[derive(Clone, Debug, PartialEq)]
pub struct Execution {
    pub report: Report,
    pub csv: Option<String>,
}

pub fn config_digest<T: Serialize>(config: &T) -> String {
    sha256_hex(&serde_json::to_vec(config).expect("configs serialize"))
}

fn parse<T: serde::de::DeserializeOwned>(text: &str) -> crate::Result<T> {
    serde_json::from_str(text).map_err(|e| crate::Error::Config(e.to_string()))
}

impl RunConfig {
    pub fn from_json(text: &str) -> crate::Result<Self> {
        parse(text)
    }
}

impl AuditConfig {
    pub fn from_json(text: &str) -> crate::Result<Self> {
        parse(text)
    }
}
