use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::OpenGraph;
use crate::error::{Error, Result};

/// A graph whose every original edge has been subdivided by an added vertex.
///
/// P-vertices keep their original labels `0..n`; the added A-vertices follow in
/// canonical edge order.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DottedGraph {
    pub graph: OpenGraph,
    pub p_vertices: Vec<usize>,
    pub a_vertices: Vec<usize>,
    pub edge_of: BTreeMap<usize, (usize, usize)>,
}

impl DottedGraph {
    /// The A-vertex subdividing the original edge {p, q}, if any.
    pub fn a_vertex_between(&self, p: usize, q: usize) -> Option<usize> {
        let key = if p < q { (p, q) } else { (q, p) };
        self.edge_of
            .iter()
            .find(|(_, &e)| e == key)
            .map(|(&a, _)| a)
    }
}

/// K_n on vertices `0..n`.
pub fn complete_graph(n: usize) -> OpenGraph {
    let edges = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j)));
    OpenGraph::closed(n, edges).expect("complete graph is valid")
}

pub fn dot_transform(g: &OpenGraph) -> DottedGraph {
    let n = g.vertex_count();
    let mut edges = Vec::new();
    let mut edge_of = BTreeMap::new();
    let mut a_vertices = Vec::new();
    for (k, (p, q)) in g.edges().enumerate() {
        let a = n + k;
        edges.push((p, a));
        edges.push((q, a));
        edge_of.insert(a, (p, q));
        a_vertices.push(a);
    }
    let graph = OpenGraph::new(
        n + a_vertices.len(),
        edges,
        g.inputs().to_vec(),
        g.outputs().to_vec(),
    )
    .expect("dotted graph of a valid graph is valid");
    DottedGraph {
        graph,
        p_vertices: (0..n).collect(),
        a_vertices,
        edge_of,
    }
}

/// The dotted-complete graph on `n` P-vertices.
pub fn dotted_complete(n: usize) -> DottedGraph {
    dot_transform(&complete_graph(n))
}

/// Joins the two neighbours of a degree-2 vertex and deletes it.
///
/// If the neighbours are already adjacent the edge between them is removed
/// instead, which is what a Pauli-Y measurement does to the graph state.
pub fn bridge(g: &OpenGraph, v: usize) -> Result<OpenGraph> {
    if v >= g.vertex_count() {
        return Err(Error::InvalidGraph(format!("vertex {v} out of range")));
    }
    let nbrs: Vec<usize> = g.neighbors(v).iter().copied().collect();
    if nbrs.len() != 2 {
        return Err(Error::InvalidDegree {
            vertex: v,
            degree: nbrs.len(),
        });
    }
    let mut joined = g.clone();
    joined.toggle_edge(nbrs[0], nbrs[1]);
    joined.remove_vertex(v)
}

/// Deletes a vertex and its incident edges.
pub fn break_vertex(g: &OpenGraph, v: usize) -> Result<OpenGraph> {
    g.remove_vertex(v)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Reduction {
    Bridge,
    Break,
}

/// How every A-vertex of a dotted graph is eliminated.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReductionPlan {
    pub assignment: BTreeMap<usize, Reduction>,
}

impl ReductionPlan {
    /// Applies the plan, highest A-vertex first so P-vertex labels never move.
    pub fn replay(&self, dotted: &DottedGraph) -> Result<OpenGraph> {
        let mut g = dotted.graph.clone();
        for (&a, &op) in self.assignment.iter().rev() {
            g = match op {
                Reduction::Bridge => bridge(&g, a)?,
                Reduction::Break => break_vertex(&g, a)?,
            };
        }
        Ok(g)
    }
}

/// Bridge the A-vertex of every pair that is adjacent in `target`, break the rest.
pub fn reduction_plan(n: usize, target: &OpenGraph) -> Result<ReductionPlan> {
    if target.vertex_count() != n {
        return Err(Error::SizeMismatch {
            expected: n,
            actual: target.vertex_count(),
        });
    }
    let dotted = dotted_complete(n);
    let assignment = dotted
        .edge_of
        .iter()
        .map(|(&a, &(p, q))| {
            let op = if target.has_edge(p, q) {
                Reduction::Bridge
            } else {
                Reduction::Break
            };
            (a, op)
        })
        .collect();
    Ok(ReductionPlan { assignment })
}

/// A-vertices of the dotted-complete graph on `3n` P-vertices whose endpoints
/// lie in different parts.
pub fn partition_plan(n: usize, parts: &[Vec<usize>; 3]) -> Result<BTreeSet<usize>> {
    let total = 3 * n;
    let mut label = vec![usize::MAX; total];
    for (k, part) in parts.iter().enumerate() {
        if part.len() != n {
            return Err(Error::InvalidPartition(format!(
                "part {} has {} vertices, expected {n}",
                k + 1,
                part.len()
            )));
        }
        for &p in part {
            if p >= total || label[p] != usize::MAX {
                return Err(Error::InvalidPartition(format!(
                    "vertex {p} is out of range or repeated"
                )));
            }
            label[p] = k;
        }
    }
    let dotted = dotted_complete(total);
    Ok(dotted
        .edge_of
        .iter()
        .filter(|(_, &(p, q))| label[p] != label[q])
        .map(|(&a, _)| a)
        .collect())
}
