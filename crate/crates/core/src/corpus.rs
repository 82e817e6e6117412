//! Named patterns used by tests, benches and the command line.

use crate::angle::AngleIndex;
use crate::error::{Error, Result};
use crate::graph::{brickwork_flow, build_brickwork, line_flow, OpenGraph};
use crate::mbqc::{
    compile_circuit, Circuit, CompileOptions, Gate, OutputMode, Pattern, PatternBuilder,
};

#[derive(Clone, Debug, PartialEq)]
pub struct CorpusEntry {
    pub name: String,
    pub pattern: Pattern,
}

fn measured_count(total: usize, outputs: usize, mode: OutputMode) -> usize {
    match mode {
        OutputMode::Quantum => total - outputs,
        OutputMode::Classical => total,
    }
}

/// A line whose non-output vertices carry `angles`; the output carries 0.
pub fn line_pattern(angles: &[i64], mode: OutputMode) -> Result<Pattern> {
    let m = angles.len() + 1;
    let mut a: Vec<AngleIndex> = angles.iter().map(|&k| AngleIndex::new(k)).collect();
    a.push(AngleIndex::ZERO);
    PatternBuilder::plain(
        OpenGraph::line(m)?,
        a,
        line_flow(m).successor,
        (0..measured_count(m, 1, mode)).collect(),
        mode,
    )
    .build()
}

/// A brickwork pattern; `angles` is cycled over the non-output vertices in vertex order.
pub fn brickwork_pattern(
    rows: usize,
    cols: usize,
    angles: &[i64],
    mode: OutputMode,
) -> Result<Pattern> {
    if angles.is_empty() {
        return Err(Error::InvalidPattern("no angles given".into()));
    }
    let graph = build_brickwork(rows, cols)?;
    let flow = brickwork_flow(rows, cols)?;
    let n = rows * cols;
    let a = (0..n)
        .map(|v| {
            if v < rows * (cols - 1) {
                AngleIndex::new(angles[v % angles.len()])
            } else {
                AngleIndex::ZERO
            }
        })
        .collect();
    PatternBuilder::plain(
        graph,
        a,
        flow.successor,
        (0..measured_count(n, rows, mode)).collect(),
        mode,
    )
    .build()
}

fn entry(name: &str, pattern: Result<Pattern>) -> CorpusEntry {
    CorpusEntry {
        name: name.to_string(),
        pattern: pattern.expect("corpus patterns are valid"),
    }
}

/// Patterns without dummies: lines, 2x5 brickwork and a compiled circuit.
pub fn plain_patterns() -> Vec<CorpusEntry> {
    let q = OutputMode::Quantum;
    let cnot = Circuit::new(
        2,
        vec![
            Gate::J {
                wire: 0,
                angle: AngleIndex::new(1),
            },
            Gate::Cnot {
                control: 0,
                target: 1,
            },
            Gate::J {
                wire: 1,
                angle: AngleIndex::new(3),
            },
        ],
    )
    .expect("valid circuit");
    vec![
        entry("line-2", line_pattern(&[1], q)),
        entry("line-3", line_pattern(&[3, 6], q)),
        entry("line-4", line_pattern(&[1, 2, 5], q)),
        entry("line-5", line_pattern(&[7, 0, 3, 4], q)),
        entry(
            "brickwork-2x5-a",
            brickwork_pattern(2, 5, &[1, 0, 2, 7, 3, 5, 6, 4], q),
        ),
        entry(
            "brickwork-2x5-b",
            brickwork_pattern(2, 5, &[0, 0, 4, 2, 1, 1, 6, 3], q),
        ),
        entry("brickwork-1x5", brickwork_pattern(1, 5, &[2, 5, 1, 7], q)),
        entry(
            "compiled-cnot",
            compile_circuit(&cnot, &CompileOptions::default()).map(|c| c.pattern),
        ),
    ]
}

/// Dummy-augmented versions of some plain patterns.
pub fn dummy_patterns() -> Vec<CorpusEntry> {
    let q = OutputMode::Quantum;
    let with = |p: Result<Pattern>, hosts: &[usize]| p.and_then(|p| p.with_extra_dummies(hosts));
    vec![
        entry("line-2+d1", with(line_pattern(&[1], q), &[1])),
        entry("line-3+d2", with(line_pattern(&[3, 6], q), &[0, 2])),
        entry("line-4+d3", with(line_pattern(&[1, 2, 5], q), &[0, 1, 3])),
        entry(
            "brickwork-2x5-a+d2",
            with(
                brickwork_pattern(2, 5, &[1, 0, 2, 7, 3, 5, 6, 4], q),
                &[2, 7],
            ),
        ),
    ]
}

/// Every corpus pattern.
pub fn correctness_corpus() -> Vec<CorpusEntry> {
    let mut all = plain_patterns();
    all.extend(dummy_patterns());
    all
}

/// Classical-output versions of the lines, for classical sessions.
pub fn classical_patterns() -> Vec<CorpusEntry> {
    let c = OutputMode::Classical;
    vec![
        entry("line-2-classical", line_pattern(&[1], c)),
        entry("line-3-classical", line_pattern(&[4, 0], c)),
        entry(
            "brickwork-2x5-classical",
            brickwork_pattern(2, 5, &[1, 0, 2, 7, 3, 5, 6, 4], c),
        ),
    ]
}

/// Looks a pattern up by name in every list above.
pub fn find(name: &str) -> Option<Pattern> {
    correctness_corpus()
        .into_iter()
        .chain(classical_patterns())
        .find(|e| e.name == name)
        .map(|e| e.pattern)
}
