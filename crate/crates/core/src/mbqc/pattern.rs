use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::angle::AngleIndex;
use crate::error::{Error, Result};
use crate::graph::{Flow, OpenGraph};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OutputMode {
    /// Output qubits are returned unmeasured.
    Quantum,
    /// Output qubits are measured in the X basis and only bits come back.
    Classical,
}

/// A measurement pattern: graph, angles, flow, order and the special vertex sets.
///
/// Dummies are prepared in a computational basis state, traps are isolated
/// check qubits, and bridge vertices are Pauli-Y measured to join their two
/// neighbours. The flow lives on the computation graph that remains once
/// dummies and traps are removed and bridges are applied.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "PatternDoc", into = "PatternDoc")]
pub struct Pattern {
    graph: OpenGraph,
    angles: Vec<AngleIndex>,
    flow: Flow,
    order: Vec<usize>,
    dummies: BTreeSet<usize>,
    traps: BTreeSet<usize>,
    bridges: BTreeSet<usize>,
    output_mode: OutputMode,
    computation: ComputationGraph,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct PatternDoc {
    graph: OpenGraph,
    angles: Vec<AngleIndex>,
    flow: Flow,
    order: Vec<usize>,
    dummies: BTreeSet<usize>,
    traps: BTreeSet<usize>,
    #[serde(default, skip_serializing_if = "BTreeSet::is_empty")]
    bridges: BTreeSet<usize>,
    output_mode: OutputMode,
}

impl TryFrom<PatternDoc> for Pattern {
    type Error = Error;
    fn try_from(doc: PatternDoc) -> Result<Self> {
        let expected = full_order(&doc.graph, &doc.order, doc.output_mode);
        if doc.flow.order != expected {
            return Err(Error::InvalidPattern(
                "flow order must be the measurement order followed by the unmeasured outputs"
                    .into(),
            ));
        }
        PatternBuilder {
            graph: doc.graph,
            angles: doc.angles,
            successor: doc.flow.successor,
            order: doc.order,
            dummies: doc.dummies,
            traps: doc.traps,
            bridges: doc.bridges,
            output_mode: doc.output_mode,
        }
        .build()
    }
}

impl From<Pattern> for PatternDoc {
    fn from(p: Pattern) -> Self {
        PatternDoc {
            graph: p.graph,
            angles: p.angles,
            flow: p.flow,
            order: p.order,
            dummies: p.dummies,
            traps: p.traps,
            bridges: p.bridges,
            output_mode: p.output_mode,
        }
    }
}

/// The graph the computation actually runs on, in the original labels.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ComputationGraph {
    /// Vertices that are neither dummies, traps nor bridges.
    pub vertices: BTreeSet<usize>,
    /// Adjacency after removing dummies/traps and applying bridges; empty for removed vertices.
    pub adjacency: Vec<BTreeSet<usize>>,
    /// The two vertices each bridge joins at the moment it is measured.
    pub bridge_ends: BTreeMap<usize, (usize, usize)>,
}

fn full_order(graph: &OpenGraph, order: &[usize], mode: OutputMode) -> Vec<usize> {
    let mut full = order.to_vec();
    if mode == OutputMode::Quantum {
        full.extend(graph.outputs().iter().copied().collect::<BTreeSet<_>>());
    }
    full
}

/// Field-by-field constructor; `build` validates everything.
#[derive(Clone, Debug)]
pub struct PatternBuilder {
    pub graph: OpenGraph,
    pub angles: Vec<AngleIndex>,
    pub successor: BTreeMap<usize, usize>,
    pub order: Vec<usize>,
    pub dummies: BTreeSet<usize>,
    pub traps: BTreeSet<usize>,
    pub bridges: BTreeSet<usize>,
    pub output_mode: OutputMode,
}

impl PatternBuilder {
    /// A pattern with no special vertices; order is the given one.
    pub fn plain(
        graph: OpenGraph,
        angles: Vec<AngleIndex>,
        successor: BTreeMap<usize, usize>,
        order: Vec<usize>,
        output_mode: OutputMode,
    ) -> Self {
        PatternBuilder {
            graph,
            angles,
            successor,
            order,
            dummies: BTreeSet::new(),
            traps: BTreeSet::new(),
            bridges: BTreeSet::new(),
            output_mode,
        }
    }

    pub fn build(self) -> Result<Pattern> {
        let m = self.graph.vertex_count();
        let bad = |msg: String| Err(Error::InvalidPattern(msg));
        if self.angles.len() != m {
            return bad(format!("{} angles for {m} vertices", self.angles.len()));
        }
        for set in [&self.dummies, &self.traps, &self.bridges] {
            if let Some(&v) = set.iter().find(|&&v| v >= m) {
                return bad(format!("vertex {v} out of range"));
            }
        }
        if !self.dummies.is_disjoint(&self.traps)
            || !self.dummies.is_disjoint(&self.bridges)
            || !self.traps.is_disjoint(&self.bridges)
        {
            return bad("dummy, trap and bridge sets must be disjoint".into());
        }
        for &v in self.graph.inputs() {
            if self.dummies.contains(&v) || self.traps.contains(&v) || self.bridges.contains(&v) {
                return bad(format!("input {v} cannot be a dummy, trap or bridge"));
            }
        }
        for &v in self.graph.outputs() {
            if self.bridges.contains(&v) {
                return bad(format!("output {v} cannot be a bridge"));
            }
            if self.angles[v] != AngleIndex::ZERO {
                return bad(format!("output {v} must carry angle 0"));
            }
        }
        for &v in self.dummies.iter().chain(&self.traps) {
            if self.angles[v] != AngleIndex::ZERO {
                return bad(format!("dummy or trap {v} must carry angle 0"));
            }
        }
        for &t in &self.traps {
            if let Some(&u) = self
                .graph
                .neighbors(t)
                .iter()
                .find(|u| !self.dummies.contains(u))
            {
                return bad(format!("trap {t} has non-dummy neighbour {u}"));
            }
        }
        for &b in &self.bridges {
            if self.angles[b] != AngleIndex::HALF_PI {
                return bad(format!("bridge {b} must carry angle 2 (Pauli Y)"));
            }
        }

        let measured: BTreeSet<usize> = match self.output_mode {
            OutputMode::Classical => (0..m).collect(),
            OutputMode::Quantum => (0..m).filter(|v| !self.graph.is_output(*v)).collect(),
        };
        let mut position = vec![usize::MAX; m];
        for (k, &v) in self.order.iter().enumerate() {
            if v >= m || !measured.contains(&v) {
                return bad(format!("order lists {v}, which is not measured"));
            }
            if position[v] != usize::MAX {
                return bad(format!("order lists {v} twice"));
            }
            position[v] = k;
        }
        if self.order.len() != measured.len() {
            return bad("order must list every measured vertex".into());
        }

        let bridge_order: Vec<usize> = self
            .order
            .iter()
            .copied()
            .filter(|v| self.bridges.contains(v))
            .collect();
        let computation =
            computation_graph(&self.graph, &self.dummies, &self.traps, &bridge_order)?;
        if let Some(&last_bridge) = bridge_order.last() {
            if let Some(&v) = computation
                .vertices
                .iter()
                .find(|&&v| position[v] < position[last_bridge])
            {
                return bad(format!(
                    "computation vertex {v} is measured before bridge {last_bridge}"
                ));
            }
        }
        check_computation_flow(&self.graph, &computation, &self.successor, &position)
            .map_err(Error::InvalidFlow)?;

        let flow = Flow {
            successor: self.successor,
            order: full_order(&self.graph, &self.order, self.output_mode),
        };
        Ok(Pattern {
            graph: self.graph,
            angles: self.angles,
            flow,
            order: self.order,
            dummies: self.dummies,
            traps: self.traps,
            bridges: self.bridges,
            output_mode: self.output_mode,
            computation,
        })
    }
}

fn computation_graph(
    graph: &OpenGraph,
    dummies: &BTreeSet<usize>,
    traps: &BTreeSet<usize>,
    bridge_order: &[usize],
) -> Result<ComputationGraph> {
    let bridges: BTreeSet<usize> = bridge_order.iter().copied().collect();
    let m = graph.vertex_count();
    let removed = |v: &usize| dummies.contains(v) || traps.contains(v);
    let mut adjacency: Vec<BTreeSet<usize>> = (0..m)
        .map(|v| {
            if removed(&v) {
                BTreeSet::new()
            } else {
                graph
                    .neighbors(v)
                    .iter()
                    .copied()
                    .filter(|u| !removed(u))
                    .collect()
            }
        })
        .collect();
    let mut bridge_ends = BTreeMap::new();
    for &b in bridge_order {
        let ends: Vec<usize> = adjacency[b].iter().copied().collect();
        if ends.len() != 2 {
            return Err(Error::InvalidDegree {
                vertex: b,
                degree: ends.len(),
            });
        }
        let (x, y) = (ends[0], ends[1]);
        adjacency[x].remove(&b);
        adjacency[y].remove(&b);
        adjacency[b].clear();
        if !adjacency[x].remove(&y) {
            adjacency[x].insert(y);
            adjacency[y].insert(x);
        } else {
            adjacency[y].remove(&x);
        }
        bridge_ends.insert(b, (x, y));
    }
    let vertices = (0..m)
        .filter(|v| !removed(v) && !bridges.contains(v))
        .collect();
    Ok(ComputationGraph {
        vertices,
        adjacency,
        bridge_ends,
    })
}

/// Flow conditions on the computation graph. Components without an output
/// carry no data and may be left without successors.
fn check_computation_flow(
    graph: &OpenGraph,
    comp: &ComputationGraph,
    successor: &BTreeMap<usize, usize>,
    position: &[usize],
) -> std::result::Result<(), String> {
    let outputs: BTreeSet<usize> = graph.outputs().iter().copied().collect();
    let mut live = BTreeSet::new();
    let mut seen = BTreeSet::new();
    for &start in &comp.vertices {
        if !seen.insert(start) {
            continue;
        }
        let mut component = vec![start];
        let mut stack = vec![start];
        while let Some(v) = stack.pop() {
            for &u in &comp.adjacency[v] {
                if seen.insert(u) {
                    component.push(u);
                    stack.push(u);
                }
            }
        }
        if component.iter().any(|v| outputs.contains(v)) {
            live.extend(component);
        }
    }
    for &v in &live {
        if !outputs.contains(&v) && !successor.contains_key(&v) {
            return Err(format!("vertex {v} feeds an output but has no successor"));
        }
    }
    let mut images = BTreeSet::new();
    for (&i, &fi) in successor {
        if !comp.vertices.contains(&i) || !comp.vertices.contains(&fi) {
            return Err(format!("flow pair ({i},{fi}) leaves the computation graph"));
        }
        if outputs.contains(&i) {
            return Err(format!("output {i} has a successor"));
        }
        if !images.insert(fi) {
            return Err(format!("vertex {fi} is the successor of two vertices"));
        }
        if graph.is_input(fi) {
            return Err(format!("successor {fi} of {i} is an input"));
        }
        if !comp.adjacency[i].contains(&fi) {
            return Err(format!("successor {fi} is not a neighbour of {i}"));
        }
        if position[i] >= position[fi] {
            return Err(format!("{i} is not measured before its successor {fi}"));
        }
        for &j in &comp.adjacency[fi] {
            if position[j] < position[i] {
                return Err(format!("neighbour {j} of f({i}) = {fi} precedes {i}"));
            }
        }
    }
    Ok(())
}

impl Pattern {
    pub fn graph(&self) -> &OpenGraph {
        &self.graph
    }

    pub fn angles(&self) -> &[AngleIndex] {
        &self.angles
    }

    pub fn angle(&self, v: usize) -> AngleIndex {
        self.angles[v]
    }

    pub fn flow(&self) -> &Flow {
        &self.flow
    }

    /// Measured vertices in measurement order.
    pub fn order(&self) -> &[usize] {
        &self.order
    }

    pub fn dummies(&self) -> &BTreeSet<usize> {
        &self.dummies
    }

    pub fn traps(&self) -> &BTreeSet<usize> {
        &self.traps
    }

    pub fn bridges(&self) -> &BTreeSet<usize> {
        &self.bridges
    }

    pub fn output_mode(&self) -> OutputMode {
        self.output_mode
    }

    pub fn computation(&self) -> &ComputationGraph {
        &self.computation
    }

    pub fn vertex_count(&self) -> usize {
        self.graph.vertex_count()
    }

    pub fn is_measured(&self, v: usize) -> bool {
        self.output_mode == OutputMode::Classical || !self.graph.is_output(v)
    }

    /// Outputs that carry computation data (not dummies or traps), in output order.
    pub fn data_outputs(&self) -> Vec<usize> {
        self.graph
            .outputs()
            .iter()
            .copied()
            .filter(|v| !self.dummies.contains(v) && !self.traps.contains(v))
            .collect()
    }

    /// Traps that are returned unmeasured (quantum output mode only).
    pub fn output_traps(&self) -> Vec<usize> {
        self.traps
            .iter()
            .copied()
            .filter(|&t| !self.is_measured(t))
            .collect()
    }

    /// Number of dummy neighbours of `v` whose prepared bit is set.
    pub fn dummy_parity(&self, v: usize, dummy_bits: &[bool]) -> bool {
        self.graph
            .neighbors(v)
            .iter()
            .filter(|u| self.dummies.contains(u))
            .fold(false, |acc, &u| acc ^ dummy_bits[u])
    }

    /// Rebuilds the pattern with the same fields but a different measurement order.
    pub fn with_order(&self, order: Vec<usize>) -> Result<Pattern> {
        self.to_builder_with(|b| b.order = order)
    }

    pub fn to_builder(&self) -> PatternBuilder {
        PatternBuilder {
            graph: self.graph.clone(),
            angles: self.angles.clone(),
            successor: self.flow.successor.clone(),
            order: self.order.clone(),
            dummies: self.dummies.clone(),
            traps: self.traps.clone(),
            bridges: self.bridges.clone(),
            output_mode: self.output_mode,
        }
    }

    fn to_builder_with(&self, edit: impl FnOnce(&mut PatternBuilder)) -> Result<Pattern> {
        let mut b = self.to_builder();
        edit(&mut b);
        b.build()
    }

    /// Adds one fresh dummy per entry of `hosts`, attached to that vertex and
    /// measured before everything else.
    pub fn with_extra_dummies(&self, hosts: &[usize]) -> Result<Pattern> {
        let m = self.vertex_count();
        let mut edges: Vec<(usize, usize)> = self.graph.edges().collect();
        for (k, &h) in hosts.iter().enumerate() {
            if h >= m || self.dummies.contains(&h) || self.traps.contains(&h) {
                return Err(Error::InvalidPattern(format!(
                    "vertex {h} cannot host a dummy"
                )));
            }
            edges.push((m + k, h));
        }
        let graph = OpenGraph::new(
            m + hosts.len(),
            edges,
            self.graph.inputs().to_vec(),
            self.graph.outputs().to_vec(),
        )?;
        let mut b = self.to_builder();
        b.graph = graph;
        b.angles
            .extend(std::iter::repeat(AngleIndex::ZERO).take(hosts.len()));
        b.order = (m..m + hosts.len())
            .chain(self.order.iter().copied())
            .collect();
        b.dummies.extend(m..m + hosts.len());
        b.build()
    }

    /// The same computation on the graph with dummies deleted, vertices relabelled
    /// in increasing order. Returns the map from old labels to new ones.
    pub fn without_dummies(&self) -> Result<(Pattern, BTreeMap<usize, usize>)> {
        let keep: BTreeSet<usize> = (0..self.vertex_count())
            .filter(|v| !self.dummies.contains(v))
            .collect();
        let (graph, relabel) = self.graph.induced(&keep);
        let map = |v: &usize| relabel[v];
        let pattern = PatternBuilder {
            graph,
            angles: keep.iter().map(|&v| self.angles[v]).collect(),
            successor: self
                .flow
                .successor
                .iter()
                .map(|(i, j)| (map(i), map(j)))
                .collect(),
            order: self
                .order
                .iter()
                .filter(|v| keep.contains(v))
                .map(map)
                .collect(),
            dummies: BTreeSet::new(),
            traps: self.traps.iter().map(map).collect(),
            bridges: self.bridges.iter().map(map).collect(),
            output_mode: self.output_mode,
        }
        .build()?;
        Ok((pattern, relabel))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{brickwork_flow, build_brickwork, line_flow};

    fn line_pattern(m: usize, mode: OutputMode) -> Pattern {
        let g = OpenGraph::line(m).unwrap();
        let f = line_flow(m);
        let mut angles = vec![AngleIndex::new(1); m];
        angles[m - 1] = AngleIndex::ZERO;
        let order = match mode {
            OutputMode::Quantum => (0..m - 1).collect(),
            OutputMode::Classical => (0..m).collect(),
        };
        PatternBuilder::plain(g, angles, f.successor, order, mode)
            .build()
            .unwrap()
    }

    #[test]
    fn json_round_trip_is_exact() {
        for mode in [OutputMode::Quantum, OutputMode::Classical] {
            let p = line_pattern(3, mode);
            let text = serde_json::to_string(&p).unwrap();
            let back: Pattern = serde_json::from_str(&text).unwrap();
            assert_eq!(back, p);
            assert_eq!(serde_json::to_string(&back).unwrap(), text);
        }
        let text = serde_json::to_string(&line_pattern(2, OutputMode::Quantum)).unwrap();
        assert!(text.starts_with(r#"{"graph":"#));
        assert!(text.ends_with(r#""dummies":[],"traps":[],"output_mode":"quantum"}"#));
    }

    #[test]
    fn brickwork_flow_is_accepted() {
        let g = build_brickwork(2, 5).unwrap();
        let f = brickwork_flow(2, 5).unwrap();
        let order: Vec<usize> = (0..8).collect();
        let p = PatternBuilder::plain(
            g,
            vec![AngleIndex::ZERO; 10],
            f.successor.clone(),
            order,
            OutputMode::Quantum,
        )
        .build()
        .unwrap();
        assert_eq!(p.flow(), &f);
    }

    #[test]
    fn bad_order_is_rejected() {
        let g = OpenGraph::line(3).unwrap();
        let f = line_flow(3);
        let p = PatternBuilder::plain(
            g,
            vec![AngleIndex::ZERO; 3],
            f.successor,
            vec![1, 0],
            OutputMode::Quantum,
        )
        .build();
        assert!(matches!(p, Err(Error::InvalidFlow(_))));
    }

    #[test]
    fn trap_must_be_surrounded_by_dummies() {
        let g = OpenGraph::new(3, [(0, 1), (1, 2)], vec![], vec![]).unwrap();
        let mut b = PatternBuilder::plain(
            g,
            vec![AngleIndex::ZERO; 3],
            BTreeMap::new(),
            vec![0, 1, 2],
            OutputMode::Quantum,
        );
        b.traps.insert(1);
        b.dummies.insert(0);
        assert!(b.clone().build().is_err());
        b.dummies.insert(2);
        let p = b.build().unwrap();
        assert!(p.computation().vertices.is_empty());
    }

    #[test]
    fn removing_dummies_relabels() {
        let g = OpenGraph::new(4, [(0, 1), (1, 2), (1, 3)], vec![0], vec![2]).unwrap();
        let mut b = PatternBuilder::plain(
            g,
            vec![
                AngleIndex::new(1),
                AngleIndex::new(2),
                AngleIndex::ZERO,
                AngleIndex::ZERO,
            ],
            [(0, 1), (1, 2)].into_iter().collect(),
            vec![3, 0, 1],
            OutputMode::Quantum,
        );
        b.dummies.insert(3);
        let p = b.build().unwrap();
        let (q, map) = p.without_dummies().unwrap();
        assert_eq!(q, line_pattern_with(&[1, 2]));
        assert_eq!(map.len(), 3);
    }

    fn line_pattern_with(angles: &[i64]) -> Pattern {
        let m = angles.len() + 1;
        let mut a: Vec<AngleIndex> = angles.iter().map(|&k| AngleIndex::new(k)).collect();
        a.push(AngleIndex::ZERO);
        PatternBuilder::plain(
            OpenGraph::line(m).unwrap(),
            a,
            line_flow(m).successor,
            (0..m - 1).collect(),
            OutputMode::Quantum,
        )
        .build()
        .unwrap()
    }
}
