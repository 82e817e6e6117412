use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::corpus::{brickwork_pattern, find, line_pattern};
use crate::error::{Error, Result};
use crate::mbqc::{compile_circuit, Circuit, CompileOptions, OutputMode, Pattern, PatternInput};

fn quantum() -> OutputMode {
    OutputMode::Quantum
}

/// Where a pattern comes from.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum PatternSpec {
    Corpus {
        name: String,
    },
    Line {
        angles: Vec<i64>,
        #[serde(default = "quantum")]
        output_mode: OutputMode,
    },
    Brickwork {
        rows: usize,
        cols: usize,
        angles: Vec<i64>,
        #[serde(default = "quantum")]
        output_mode: OutputMode,
    },
    /// Compiled onto a brickwork.
    Circuit {
        circuit: Circuit,
        #[serde(default = "quantum")]
        output_mode: OutputMode,
    },
    Inline {
        pattern: Box<Pattern>,
    },
}

impl PatternSpec {
    pub fn build(&self) -> Result<Pattern> {
        match self {
            PatternSpec::Corpus { name } => {
                find(name).ok_or_else(|| Error::Config(format!("no corpus pattern named {name}")))
            }
            PatternSpec::Line {
                angles,
                output_mode,
            } => line_pattern(angles, *output_mode),
            PatternSpec::Brickwork {
                rows,
                cols,
                angles,
                output_mode,
            } => brickwork_pattern(*rows, *cols, angles, *output_mode),
            PatternSpec::Circuit {
                circuit,
                output_mode,
            } => compile_circuit(
                circuit,
                &CompileOptions {
                    min_cols: 0,
                    output_mode: *output_mode,
                },
            )
            .map(|c| c.pattern),
            PatternSpec::Inline { pattern } => Ok((**pattern).clone()),
        }
    }

    /// Builds the pattern and adds one dummy next to each listed host.
    pub fn build_with_dummies(&self, hosts: &[usize]) -> Result<Pattern> {
        let p = self.build()?;
        if hosts.is_empty() {
            Ok(p)
        } else {
            p.with_extra_dummies(hosts)
        }
    }
}

/// Input to a computation.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum InputSpec {
    Classical {
        bits: Vec<bool>,
    },
    /// Little-endian amplitudes as [re, im] pairs.
    Quantum {
        amplitudes: Vec<[f64; 2]>,
    },
}

impl InputSpec {
    pub fn to_input(&self) -> PatternInput {
        match self {
            InputSpec::Classical { bits } => PatternInput::Classical(bits.clone()),
            InputSpec::Quantum { amplitudes } => PatternInput::Quantum(
                amplitudes
                    .iter()
                    .map(|&[re, im]| Complex64::new(re, im))
                    .collect(),
            ),
        }
    }

    pub fn is_quantum(&self) -> bool {
        matches!(self, InputSpec::Quantum { .. })
    }
}

/// The given input, or all-zero classical bits for `inputs` inputs.
pub fn input_or_default(spec: Option<&InputSpec>, inputs: usize) -> PatternInput {
    spec.map(InputSpec::to_input)
        .unwrap_or_else(|| PatternInput::Classical(vec![false; inputs]))
}
