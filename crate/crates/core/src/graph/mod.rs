//! Open graphs and the graph families used by the protocols.

mod brickwork;
mod dotted;
mod flow;

pub use brickwork::{brickwork_flow, brickwork_vertex, build_brickwork};
pub use dotted::{
    break_vertex, bridge, complete_graph, dot_transform, dotted_complete, partition_plan,
    reduction_plan, DottedGraph, Reduction, ReductionPlan,
};
pub use flow::{check_flow, line_flow, validate_flow, Flow};

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// An undirected simple graph with designated input and output vertices.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "GraphDoc", into = "GraphDoc")]
pub struct OpenGraph {
    vertex_count: usize,
    edges: BTreeSet<(usize, usize)>,
    inputs: Vec<usize>,
    outputs: Vec<usize>,
    adjacency: Vec<BTreeSet<usize>>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct GraphDoc {
    m: usize,
    edges: Vec<[usize; 2]>,
    inputs: Vec<usize>,
    outputs: Vec<usize>,
}

impl TryFrom<GraphDoc> for OpenGraph {
    type Error = Error;
    fn try_from(doc: GraphDoc) -> Result<Self> {
        OpenGraph::new(
            doc.m,
            doc.edges.iter().map(|e| (e[0], e[1])),
            doc.inputs,
            doc.outputs,
        )
    }
}

impl From<OpenGraph> for GraphDoc {
    fn from(g: OpenGraph) -> Self {
        GraphDoc {
            m: g.vertex_count,
            edges: g.edges.iter().map(|&(a, b)| [a, b]).collect(),
            inputs: g.inputs,
            outputs: g.outputs,
        }
    }
}

fn canonical(a: usize, b: usize) -> (usize, usize) {
    if a < b {
        (a, b)
    } else {
        (b, a)
    }
}

fn check_vertex_list(name: &str, list: &[usize], m: usize) -> Result<()> {
    let mut seen = BTreeSet::new();
    for &v in list {
        if v >= m {
            return Err(Error::InvalidGraph(format!(
                "{name} vertex {v} out of range"
            )));
        }
        if !seen.insert(v) {
            return Err(Error::InvalidGraph(format!(
                "{name} vertex {v} listed twice"
            )));
        }
    }
    Ok(())
}

impl OpenGraph {
    pub fn new(
        vertex_count: usize,
        edges: impl IntoIterator<Item = (usize, usize)>,
        inputs: Vec<usize>,
        outputs: Vec<usize>,
    ) -> Result<Self> {
        let mut set = BTreeSet::new();
        let mut adjacency = vec![BTreeSet::new(); vertex_count];
        for (a, b) in edges {
            if a == b {
                return Err(Error::InvalidGraph(format!("self-loop on {a}")));
            }
            if a >= vertex_count || b >= vertex_count {
                return Err(Error::InvalidGraph(format!("edge ({a},{b}) out of range")));
            }
            if !set.insert(canonical(a, b)) {
                return Err(Error::InvalidGraph(format!("duplicate edge ({a},{b})")));
            }
            adjacency[a].insert(b);
            adjacency[b].insert(a);
        }
        check_vertex_list("input", &inputs, vertex_count)?;
        check_vertex_list("output", &outputs, vertex_count)?;
        Ok(OpenGraph {
            vertex_count,
            edges: set,
            inputs,
            outputs,
            adjacency,
        })
    }

    /// A graph with no designated inputs or outputs.
    pub fn closed(
        vertex_count: usize,
        edges: impl IntoIterator<Item = (usize, usize)>,
    ) -> Result<Self> {
        Self::new(vertex_count, edges, Vec::new(), Vec::new())
    }

    /// Path 0 - 1 - ... - (m-1) with input 0 and output m-1.
    pub fn line(m: usize) -> Result<Self> {
        if m == 0 {
            return Err(Error::InvalidDimension(
                "a line needs at least one vertex".into(),
            ));
        }
        Self::new(m, (1..m).map(|v| (v - 1, v)), vec![0], vec![m - 1])
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.edges.iter().copied()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        self.edges.contains(&canonical(a, b))
    }

    pub fn neighbors(&self, v: usize) -> &BTreeSet<usize> {
        &self.adjacency[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adjacency[v].len()
    }

    pub fn inputs(&self) -> &[usize] {
        &self.inputs
    }

    pub fn outputs(&self) -> &[usize] {
        &self.outputs
    }

    pub fn is_input(&self, v: usize) -> bool {
        self.inputs.contains(&v)
    }

    pub fn is_output(&self, v: usize) -> bool {
        self.outputs.contains(&v)
    }

    /// Same vertices and edges with a different interface.
    pub fn with_io(&self, inputs: Vec<usize>, outputs: Vec<usize>) -> Result<Self> {
        Self::new(self.vertex_count, self.edges(), inputs, outputs)
    }

    /// Adds the edge if absent, removes it if present.
    pub fn toggle_edge(&mut self, a: usize, b: usize) {
        let e = canonical(a, b);
        if self.edges.remove(&e) {
            self.adjacency[a].remove(&b);
            self.adjacency[b].remove(&a);
        } else {
            self.edges.insert(e);
            self.adjacency[a].insert(b);
            self.adjacency[b].insert(a);
        }
    }

    /// Deletes `v` with its incident edges; vertices above `v` shift down by one.
    pub fn remove_vertex(&self, v: usize) -> Result<Self> {
        if v >= self.vertex_count {
            return Err(Error::InvalidGraph(format!("vertex {v} out of range")));
        }
        let shift = |u: usize| if u > v { u - 1 } else { u };
        let edges = self
            .edges()
            .filter(|&(a, b)| a != v && b != v)
            .map(|(a, b)| (shift(a), shift(b)));
        let keep = |list: &[usize]| {
            list.iter()
                .filter(|&&u| u != v)
                .map(|&u| shift(u))
                .collect()
        };
        Self::new(
            self.vertex_count - 1,
            edges,
            keep(&self.inputs),
            keep(&self.outputs),
        )
    }

    /// The subgraph induced on `keep`, relabelled in increasing order.
    /// Returns the graph and the map from old labels to new ones.
    pub fn induced(&self, keep: &BTreeSet<usize>) -> (Self, BTreeMap<usize, usize>) {
        let relabel: BTreeMap<usize, usize> =
            keep.iter().enumerate().map(|(k, &v)| (v, k)).collect();
        let edges: Vec<_> = self
            .edges()
            .filter_map(|(a, b)| Some((*relabel.get(&a)?, *relabel.get(&b)?)))
            .collect();
        let map_list = |list: &[usize]| {
            list.iter()
                .filter_map(|v| relabel.get(v).copied())
                .collect()
        };
        let g = Self::new(
            keep.len(),
            edges,
            map_list(&self.inputs),
            map_list(&self.outputs),
        )
        .expect("induced subgraph of a valid graph is valid");
        (g, relabel)
    }

    /// Connected components, each sorted, ordered by smallest vertex.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let mut seen = vec![false; self.vertex_count];
        let mut out = Vec::new();
        for start in 0..self.vertex_count {
            if seen[start] {
                continue;
            }
            let mut comp = Vec::new();
            let mut stack = vec![start];
            seen[start] = true;
            while let Some(v) = stack.pop() {
                comp.push(v);
                for &u in &self.adjacency[v] {
                    if !seen[u] {
                        seen[u] = true;
                        stack.push(u);
                    }
                }
            }
            comp.sort_unstable();
            out.push(comp);
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_self_loops_and_duplicates() {
        assert!(OpenGraph::closed(2, [(0, 0)]).is_err());
        assert!(OpenGraph::closed(2, [(0, 1), (1, 0)]).is_err());
        assert!(OpenGraph::closed(2, [(0, 2)]).is_err());
        assert!(OpenGraph::new(2, [], vec![3], vec![]).is_err());
    }

    #[test]
    fn json_is_canonical() {
        let g = OpenGraph::new(3, [(2, 1), (1, 0)], vec![0], vec![2]).unwrap();
        let text = serde_json::to_string(&g).unwrap();
        assert_eq!(
            text,
            r#"{"m":3,"edges":[[0,1],[1,2]],"inputs":[0],"outputs":[2]}"#
        );
        let back: OpenGraph = serde_json::from_str(&text).unwrap();
        assert_eq!(back, g);
    }

    #[test]
    fn remove_vertex_relabels() {
        let g = OpenGraph::line(4).unwrap();
        let h = g.remove_vertex(1).unwrap();
        assert_eq!(h.vertex_count(), 3);
        assert_eq!(h.edges().collect::<Vec<_>>(), vec![(1, 2)]);
        assert_eq!(h.inputs(), &[0]);
        assert_eq!(h.outputs(), &[2]);
    }

    #[test]
    fn components_of_path_minus_middle() {
        let g = OpenGraph::closed(3, [(0, 1), (1, 2)]).unwrap();
        assert_eq!(g.components(), vec![vec![0, 1, 2]]);
        let h = OpenGraph::closed(3, []).unwrap();
        assert_eq!(h.components().len(), 3);
    }
}
