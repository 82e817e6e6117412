use std::collections::VecDeque;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::pattern::{OutputMode, Pattern, PatternBuilder};
use crate::angle::AngleIndex;
use crate::error::{Error, Result};
use crate::graph::{brickwork_flow, brickwork_vertex, build_brickwork};
use crate::sim::{matmul2, LocalOp, Matrix2};

/// A gate of the supported universal set.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "gate", rename_all = "snake_case", deny_unknown_fields)]
pub enum Gate {
    /// H Z(angle) on one wire.
    J {
        wire: usize,
        angle: AngleIndex,
    },
    Cnot {
        control: usize,
        target: usize,
    },
    Cz {
        a: usize,
        b: usize,
    },
}

/// A circuit on `wires` qubits. Classical inputs and outputs use the X basis.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Circuit {
    pub wires: usize,
    pub gates: Vec<Gate>,
}

fn j_matrix(angle: AngleIndex) -> Matrix2 {
    matmul2(&LocalOp::H.matrix(), &LocalOp::Phase(angle).matrix())
}

fn apply_one(state: &mut [Complex64], wire: usize, m: &Matrix2) {
    let bit = 1 << wire;
    for i in 0..state.len() {
        if i & bit == 0 {
            let (a0, a1) = (state[i], state[i | bit]);
            state[i] = m[0][0] * a0 + m[0][1] * a1;
            state[i | bit] = m[1][0] * a0 + m[1][1] * a1;
        }
    }
}

impl Circuit {
    pub fn new(wires: usize, gates: Vec<Gate>) -> Result<Self> {
        let c = Circuit { wires, gates };
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<()> {
        if self.wires == 0 {
            return Err(Error::InvalidDimension(
                "a circuit needs at least one wire".into(),
            ));
        }
        for g in &self.gates {
            let (a, b) = match *g {
                Gate::J { wire, .. } => (wire, wire),
                Gate::Cnot { control, target } => (control, target),
                Gate::Cz { a, b } => (a, b),
            };
            if a >= self.wires || b >= self.wires {
                return Err(Error::UnsupportedGate(format!(
                    "{g:?} touches a wire outside 0..{}",
                    self.wires
                )));
            }
            if !matches!(g, Gate::J { .. }) && a == b {
                return Err(Error::UnsupportedGate(format!(
                    "{g:?} acts twice on one wire"
                )));
            }
        }
        Ok(())
    }

    /// Applies the circuit to a little-endian state over the wires.
    pub fn apply(&self, input: &[Complex64]) -> Result<Vec<Complex64>> {
        if input.len() != 1 << self.wires {
            return Err(Error::SizeMismatch {
                expected: 1 << self.wires,
                actual: input.len(),
            });
        }
        let mut state = input.to_vec();
        for g in &self.gates {
            match *g {
                Gate::J { wire, angle } => apply_one(&mut state, wire, &j_matrix(angle)),
                Gate::Cnot { control, target } => {
                    for i in 0..state.len() {
                        if i >> control & 1 == 1 && i >> target & 1 == 0 {
                            state.swap(i, i | 1 << target);
                        }
                    }
                }
                Gate::Cz { a, b } => {
                    for (i, amp) in state.iter_mut().enumerate() {
                        if i >> a & 1 == 1 && i >> b & 1 == 1 {
                            *amp = -*amp;
                        }
                    }
                }
            }
        }
        Ok(state)
    }

    /// Probability of each X-basis output string (little-endian index) for X-basis input bits.
    pub fn x_basis_distribution(&self, input_bits: &[bool]) -> Result<Vec<f64>> {
        let input =
            super::reference::PatternInput::Classical(input_bits.to_vec()).to_vector(self.wires)?;
        let mut state = self.apply(&input)?;
        for w in 0..self.wires {
            apply_one(&mut state, w, &LocalOp::H.matrix());
        }
        Ok(state.iter().map(|a| a.norm_sqr()).collect())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CompileOptions {
    /// Lower bound on the number of brickwork columns; padding uses identity bricks.
    #[serde(default)]
    pub min_cols: usize,
    pub output_mode: OutputMode,
}

impl Default for CompileOptions {
    fn default() -> Self {
        CompileOptions {
            min_cols: 0,
            output_mode: OutputMode::Quantum,
        }
    }
}

/// A brickwork pattern produced from a circuit.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Compiled {
    pub pattern: Pattern,
    pub rows: usize,
    pub cols: usize,
}

/// Measurement angles of a two-row brick: (pre columns, inner columns) per row.
type BrickRow = ([i64; 2], [i64; 2]);

/// CNOT with the upper row as control.
pub const CNOT_DOWN: [BrickRow; 2] = [([6, 0], [0, 0]), ([0, 6], [0, 2])];
/// CNOT with the lower row as control.
pub const CNOT_UP: [BrickRow; 2] = [([0, 6], [0, 2]), ([6, 0], [0, 0])];

/// Four measurement angles equivalent to a single measurement at angle k, in column order.
pub const FOUR_COLUMN_EXPANSION: [[i64; 4]; 8] = [
    [0, 2, 2, 2],
    [0, 2, 2, 3],
    [0, 6, 6, 0],
    [0, 2, 2, 5],
    [0, 2, 2, 6],
    [0, 2, 2, 7],
    [0, 2, 2, 0],
    [0, 2, 2, 1],
];

#[derive(Clone, Copy, Debug, PartialEq)]
enum Item {
    /// A measurement angle.
    Measure(AngleIndex),
    /// Index into the lowered two-qubit gate list.
    Pair(usize),
}

fn lower(circuit: &Circuit) -> (Vec<VecDeque<Item>>, Vec<(usize, usize)>) {
    let mut queues = vec![VecDeque::new(); circuit.wires];
    let mut pairs = Vec::new();
    let mut push_pair = |queues: &mut Vec<VecDeque<Item>>, control: usize, target: usize| {
        let id = pairs.len();
        pairs.push((control, target));
        queues[control].push_back(Item::Pair(id));
        queues[target].push_back(Item::Pair(id));
    };
    for g in &circuit.gates {
        match *g {
            Gate::J { wire, angle } => queues[wire].push_back(Item::Measure(-angle)),
            Gate::Cnot { control, target } => push_pair(&mut queues, control, target),
            Gate::Cz { a, b } => {
                queues[b].push_back(Item::Measure(AngleIndex::ZERO));
                push_pair(&mut queues, a, b);
                queues[b].push_back(Item::Measure(AngleIndex::ZERO));
            }
        }
    }
    (queues, pairs)
}

fn pending_run(queue: &VecDeque<Item>) -> usize {
    queue
        .iter()
        .take_while(|it| matches!(it, Item::Measure(_)))
        .count()
}

/// Takes up to `len` columns of measurements from the front of the queue, padded with identity pairs.
fn fill(queue: &mut VecDeque<Item>, len: usize) -> Vec<AngleIndex> {
    let mut run = pending_run(queue);
    if run % 2 == 1 && run < len {
        let Some(Item::Measure(last)) = queue.remove(run - 1) else {
            unreachable!("run consists of measurements")
        };
        for (k, &a) in FOUR_COLUMN_EXPANSION[last.value() as usize]
            .iter()
            .enumerate()
        {
            queue.insert(run - 1 + k, Item::Measure(AngleIndex::new(a)));
        }
        run += 3;
    }
    let take = run.min(len) & !1;
    let mut out: Vec<AngleIndex> = queue
        .drain(..take)
        .map(|it| match it {
            Item::Measure(a) => a,
            Item::Pair(_) => unreachable!("run consists of measurements"),
        })
        .collect();
    out.resize(len, AngleIndex::ZERO);
    out
}

/// Compiles a nearest-neighbour circuit onto a brickwork pattern.
pub fn compile_circuit(circuit: &Circuit, options: &CompileOptions) -> Result<Compiled> {
    circuit.validate()?;
    let rows = circuit.wires;
    let (mut queues, pairs) = lower(circuit);
    for &(c, t) in &pairs {
        if c.abs_diff(t) != 1 {
            return Err(Error::UnsupportedGate(format!(
                "two-qubit gate on wires {c} and {t} is not nearest-neighbour"
            )));
        }
    }
    // Each slot holds 4 columns per row; slot k covers columns 4k+1..4k+4.
    let mut slots: Vec<Vec<[AngleIndex; 4]>> = Vec::new();
    let done = |queues: &Vec<VecDeque<Item>>| queues.iter().all(|q| q.is_empty());
    let mut idle_slots = 0;
    while !done(&queues) || slots.len() % 2 == 0 {
        let parity = slots.len() % 2;
        let mut slot = vec![[AngleIndex::ZERO; 4]; rows];
        let mut handled = vec![false; rows];
        let before: usize = queues.iter().map(|q| q.len()).sum();
        let mut a = parity;
        while a + 1 < rows {
            let (top, bottom) = (a, a + 1);
            let front_top = queues[top].front().copied();
            let front_bottom = queues[bottom].front().copied();
            match (front_top, front_bottom) {
                (Some(Item::Pair(x)), Some(Item::Pair(y))) if x == y => {
                    let table = if pairs[x].0 == top {
                        CNOT_DOWN
                    } else {
                        CNOT_UP
                    };
                    for (row, (pre, inner)) in [top, bottom].into_iter().zip(table) {
                        slot[row] = [pre[0], pre[1], inner[0], inner[1]].map(AngleIndex::new);
                        queues[row].pop_front();
                    }
                }
                _ => {
                    for row in [top, bottom] {
                        let pre = fill(&mut queues[row], 2);
                        slot[row] = [pre[0], pre[1], AngleIndex::ZERO, AngleIndex::ZERO];
                    }
                }
            }
            handled[top] = true;
            handled[bottom] = true;
            a += 2;
        }
        for row in (0..rows).filter(|&r| !handled[r]) {
            let run = fill(&mut queues[row], 4);
            slot[row] = [run[0], run[1], run[2], run[3]];
        }
        let after: usize = queues.iter().map(|q| q.len()).sum();
        idle_slots = if after == before && !done(&queues) {
            idle_slots + 1
        } else {
            0
        };
        if idle_slots > 2 {
            return Err(Error::UnsupportedGate(
                "two-qubit gates cannot be scheduled".into(),
            ));
        }
        slots.push(slot);
    }
    let needed_cols = 4 * slots.len() + 1;
    while 4 * slots.len() + 1 < options.min_cols || (4 * slots.len() + 1) % 8 != 5 {
        slots.push(vec![[AngleIndex::ZERO; 4]; rows]);
    }
    debug_assert!(needed_cols % 8 == 5);
    let cols = 4 * slots.len() + 1;

    let graph = build_brickwork(rows, cols)?;
    let flow = brickwork_flow(rows, cols)?;
    let mut angles = vec![AngleIndex::ZERO; rows * cols];
    for (k, slot) in slots.iter().enumerate() {
        for (row, cells) in slot.iter().enumerate() {
            for (c, &angle) in cells.iter().enumerate() {
                angles[brickwork_vertex(rows, row + 1, 4 * k + c + 1)] = angle;
            }
        }
    }
    let measured = match options.output_mode {
        OutputMode::Quantum => rows * (cols - 1),
        OutputMode::Classical => rows * cols,
    };
    let pattern = PatternBuilder::plain(
        graph,
        angles,
        flow.successor,
        (0..measured).collect(),
        options.output_mode,
    )
    .build()?;
    Ok(Compiled {
        pattern,
        rows,
        cols,
    })
}
