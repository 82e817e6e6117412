use serde::{Deserialize, Serialize};

use crate::angle::AngleIndex;
use crate::error::{Error, Result};
use crate::graph::{line_flow, OpenGraph};
use crate::mbqc::{
    compile_circuit, Circuit, CompileOptions, Gate, OutputMode, Pattern, PatternBuilder,
};

/// How the logical computation is protected before it is hidden in the big graph.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "provider", rename_all = "snake_case", deny_unknown_fields)]
pub enum EncodingParams {
    /// The computation as compiled, distance 1.
    Identity,
    /// `d` copies of a classical-output computation, majority decoded.
    RepetitionClassical { d: usize },
    /// Parameter record for a topological code; no graph is built.
    ExternalRhg { d: usize },
}

/// Lattice parameters of the topological encoding.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RhgParameters {
    pub distance: usize,
    pub lattice_scale: usize,
    pub levels: usize,
    /// Distance reached at each distillation level, tripling per level.
    pub level_distances: Vec<usize>,
}

impl RhgParameters {
    pub fn for_distance(distance: usize) -> Result<Self> {
        if distance == 0 {
            return Err(Error::Config("code distance must be at least 1".into()));
        }
        let mut levels = 0;
        let mut reach = 1;
        while reach < distance {
            reach *= 3;
            levels += 1;
        }
        let mut level_distances = Vec::with_capacity(levels);
        let mut d = 1;
        for _ in 0..levels {
            d *= 3;
            level_distances.push(d);
        }
        Ok(RhgParameters {
            distance,
            lattice_scale: 5 * distance,
            levels,
            level_distances,
        })
    }

    pub fn validate(&self) -> Result<()> {
        let expected = RhgParameters::for_distance(self.distance)?;
        if *self != expected {
            return Err(Error::Config(format!(
                "inconsistent lattice parameters {self:?}, expected {expected:?}"
            )));
        }
        Ok(())
    }
}

/// A computation pattern ready to be embedded, with what is needed to read it back.
#[derive(Clone, Debug, PartialEq)]
pub struct EncodedComputation {
    pub pattern: Pattern,
    pub copies: usize,
    pub logical_outputs: usize,
}

impl EncodedComputation {
    /// Replicates logical classical input bits over the copies.
    pub fn encode_input(&self, bits: &[bool]) -> Vec<bool> {
        (0..self.copies)
            .flat_map(|_| bits.iter().copied())
            .collect()
    }
}

/// Decoded classical output.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Decoded {
    pub bits: Vec<bool>,
    /// Some copies disagreed.
    pub flagged: bool,
}

impl EncodingParams {
    pub fn distance(self) -> usize {
        match self {
            EncodingParams::Identity => 1,
            EncodingParams::RepetitionClassical { d } | EncodingParams::ExternalRhg { d } => d,
        }
    }

    pub fn parameter_record(self) -> Result<RhgParameters> {
        RhgParameters::for_distance(self.distance())
    }

    pub fn encode(self, circuit: &Circuit, mode: OutputMode) -> Result<EncodedComputation> {
        circuit.validate()?;
        match self {
            EncodingParams::Identity => Ok(EncodedComputation {
                pattern: identity_pattern(circuit, mode)?,
                copies: 1,
                logical_outputs: circuit.wires,
            }),
            EncodingParams::RepetitionClassical { d } => {
                if d == 0 {
                    return Err(Error::Config(
                        "repetition distance must be at least 1".into(),
                    ));
                }
                if mode != OutputMode::Classical {
                    return Err(Error::Config(
                        "the repetition encoding needs classical output".into(),
                    ));
                }
                let one = identity_pattern(circuit, mode)?;
                Ok(EncodedComputation {
                    pattern: disjoint_union(&vec![one; d])?,
                    copies: d,
                    logical_outputs: circuit.wires,
                })
            }
            EncodingParams::ExternalRhg { d } => {
                RhgParameters::for_distance(d)?.validate()?;
                Err(Error::Config(
                    "the topological encoding is a parameter record only".into(),
                ))
            }
        }
    }

    /// Majority vote per logical bit over the copies.
    pub fn decode(self, encoded: &EncodedComputation, raw: &[bool]) -> Result<Decoded> {
        let w = encoded.logical_outputs;
        if raw.len() != w * encoded.copies {
            return Err(Error::SizeMismatch {
                expected: w * encoded.copies,
                actual: raw.len(),
            });
        }
        let mut bits = Vec::with_capacity(w);
        let mut flagged = false;
        for k in 0..w {
            let ones = (0..encoded.copies).filter(|&c| raw[c * w + k]).count();
            flagged |= ones != 0 && ones != encoded.copies;
            bits.push(2 * ones > encoded.copies);
        }
        Ok(Decoded { bits, flagged })
    }
}

/// The smallest plain pattern for the circuit: bare wires, a line for one wire,
/// otherwise compiled brickwork.
pub fn identity_pattern(circuit: &Circuit, mode: OutputMode) -> Result<Pattern> {
    let n = circuit.wires;
    if circuit.gates.is_empty() {
        let graph = OpenGraph::new(n, Vec::new(), (0..n).collect(), (0..n).collect())?;
        let order = match mode {
            OutputMode::Quantum => Vec::new(),
            OutputMode::Classical => (0..n).collect(),
        };
        return PatternBuilder::plain(
            graph,
            vec![AngleIndex::ZERO; n],
            Default::default(),
            order,
            mode,
        )
        .build();
    }
    if n == 1 {
        let mut angles: Vec<AngleIndex> = circuit
            .gates
            .iter()
            .map(|g| match *g {
                Gate::J { angle, .. } => Ok(-angle),
                _ => Err(Error::UnsupportedGate(format!("{g:?} on a single wire"))),
            })
            .collect::<Result<_>>()?;
        angles.push(AngleIndex::ZERO);
        let m = angles.len();
        let measured = if mode == OutputMode::Quantum {
            m - 1
        } else {
            m
        };
        return PatternBuilder::plain(
            OpenGraph::line(m)?,
            angles,
            line_flow(m).successor,
            (0..measured).collect(),
            mode,
        )
        .build();
    }
    Ok(compile_circuit(
        circuit,
        &CompileOptions {
            min_cols: 0,
            output_mode: mode,
        },
    )?
    .pattern)
}

/// Side-by-side copies with labels shifted; inputs, outputs and orders are concatenated.
pub fn disjoint_union(parts: &[Pattern]) -> Result<Pattern> {
    let first = parts
        .first()
        .ok_or_else(|| Error::InvalidPattern("nothing to join".into()))?;
    let mode = first.output_mode();
    let mut edges = Vec::new();
    let mut inputs = Vec::new();
    let mut outputs = Vec::new();
    let mut angles = Vec::new();
    let mut successor = std::collections::BTreeMap::new();
    let mut order = Vec::new();
    let mut offset = 0;
    for p in parts {
        if p.output_mode() != mode
            || !p.dummies().is_empty()
            || !p.traps().is_empty()
            || !p.bridges().is_empty()
        {
            return Err(Error::InvalidPattern(
                "only plain patterns of one output mode can be joined".into(),
            ));
        }
        let g = p.graph();
        edges.extend(g.edges().map(|(a, b)| (a + offset, b + offset)));
        inputs.extend(g.inputs().iter().map(|v| v + offset));
        outputs.extend(g.outputs().iter().map(|v| v + offset));
        angles.extend_from_slice(p.angles());
        successor.extend(
            p.flow()
                .successor
                .iter()
                .map(|(i, j)| (i + offset, j + offset)),
        );
        order.extend(p.order().iter().map(|v| v + offset));
        offset += p.vertex_count();
    }
    PatternBuilder::plain(
        OpenGraph::new(offset, edges, inputs, outputs)?,
        angles,
        successor,
        order,
        mode,
    )
    .build()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parameter_records() {
        let r = EncodingParams::RepetitionClassical { d: 3 }
            .parameter_record()
            .unwrap();
        assert_eq!((r.lattice_scale, r.levels), (15, 1));
        let r = RhgParameters::for_distance(10).unwrap();
        assert_eq!(
            (r.lattice_scale, r.levels, r.level_distances.clone()),
            (50, 3, vec![3, 9, 27])
        );
        r.validate().unwrap();
        let mut bad = r;
        bad.lattice_scale = 10;
        assert!(bad.validate().is_err());
        assert_eq!(RhgParameters::for_distance(1).unwrap().levels, 0);
        assert!(EncodingParams::ExternalRhg { d: 3 }
            .encode(&Circuit::new(1, vec![]).unwrap(), OutputMode::Classical)
            .is_err());
    }

    #[test]
    fn single_wire_is_a_line() {
        let c = Circuit::new(
            1,
            vec![Gate::J {
                wire: 0,
                angle: AngleIndex::new(3),
            }],
        )
        .unwrap();
        let p = identity_pattern(&c, OutputMode::Quantum).unwrap();
        assert_eq!(p.vertex_count(), 2);
        assert_eq!(p.angle(0), AngleIndex::new(5));
    }

    #[test]
    fn repetition_decode() {
        let c = Circuit::new(1, vec![]).unwrap();
        let enc = EncodingParams::RepetitionClassical { d: 3 };
        let e = enc.encode(&c, OutputMode::Classical).unwrap();
        assert_eq!(e.pattern.vertex_count(), 3);
        assert_eq!(e.encode_input(&[true]), vec![true; 3]);
        assert_eq!(
            enc.decode(&e, &[true, false, true]).unwrap(),
            Decoded {
                bits: vec![true],
                flagged: true
            }
        );
        assert_eq!(
            enc.decode(&e, &[false; 3]).unwrap(),
            Decoded {
                bits: vec![false],
                flagged: false
            }
        );
        assert!(enc.encode(&c, OutputMode::Quantum).is_err());
    }
}
