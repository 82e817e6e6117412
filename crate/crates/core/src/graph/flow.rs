use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::OpenGraph;
use crate::error::{Error, Result};

/// A flow function together with a total measurement order.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "FlowDoc", into = "FlowDoc")]
pub struct Flow {
    pub successor: BTreeMap<usize, usize>,
    pub order: Vec<usize>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct FlowDoc {
    successor: Vec<[usize; 2]>,
    order: Vec<usize>,
}

impl TryFrom<FlowDoc> for Flow {
    type Error = Error;
    fn try_from(doc: FlowDoc) -> Result<Self> {
        let mut successor = BTreeMap::new();
        for [i, j] in doc.successor {
            if successor.insert(i, j).is_some() {
                return Err(Error::InvalidFlow(format!("vertex {i} has two successors")));
            }
        }
        Ok(Flow {
            successor,
            order: doc.order,
        })
    }
}

impl From<Flow> for FlowDoc {
    fn from(f: Flow) -> Self {
        FlowDoc {
            successor: f.successor.into_iter().map(|(i, j)| [i, j]).collect(),
            order: f.order,
        }
    }
}

impl Flow {
    /// Inverse of the successor map.
    pub fn predecessors(&self) -> BTreeMap<usize, usize> {
        self.successor.iter().map(|(&i, &j)| (j, i)).collect()
    }
}

/// The flow of `OpenGraph::line(m)`.
pub fn line_flow(m: usize) -> Flow {
    Flow {
        successor: (1..m).map(|v| (v - 1, v)).collect(),
        order: (0..m).collect(),
    }
}

/// Checks the flow conditions, reporting the first violation found.
pub fn check_flow(g: &OpenGraph, flow: &Flow) -> std::result::Result<(), String> {
    let m = g.vertex_count();
    let mut position = vec![usize::MAX; m];
    for (k, &v) in flow.order.iter().enumerate() {
        if v >= m {
            return Err(format!("order mentions vertex {v} outside the graph"));
        }
        if position[v] != usize::MAX {
            return Err(format!("vertex {v} appears twice in the order"));
        }
        position[v] = k;
    }
    if let Some(v) = position.iter().position(|&p| p == usize::MAX) {
        return Err(format!("vertex {v} is missing from the order"));
    }
    let outputs: BTreeSet<usize> = g.outputs().iter().copied().collect();
    for v in 0..m {
        let in_domain = flow.successor.contains_key(&v);
        if outputs.contains(&v) && in_domain {
            return Err(format!("output {v} has a successor"));
        }
        if !outputs.contains(&v) && !in_domain {
            return Err(format!("non-output {v} has no successor"));
        }
    }
    let mut images = BTreeSet::new();
    for (&i, &fi) in &flow.successor {
        if fi >= m {
            return Err(format!("successor {fi} of {i} is outside the graph"));
        }
        if !images.insert(fi) {
            return Err(format!("vertex {fi} is the successor of two vertices"));
        }
        if g.is_input(fi) {
            return Err(format!("successor {fi} of {i} is an input"));
        }
        if !g.has_edge(i, fi) {
            return Err(format!("successor {fi} is not a neighbour of {i}"));
        }
        if position[i] >= position[fi] {
            return Err(format!("{i} is not measured before its successor {fi}"));
        }
        for &j in g.neighbors(fi) {
            if position[j] < position[i] {
                return Err(format!("neighbour {j} of f({i}) = {fi} precedes {i}"));
            }
        }
    }
    Ok(())
}

/// True iff `flow` is a flow of `g` compatible with its stored order.
pub fn validate_flow(g: &OpenGraph, flow: &Flow) -> bool {
    check_flow(g, flow).is_ok()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn line_flow_is_valid() {
        for m in 1..6 {
            assert!(validate_flow(&OpenGraph::line(m).unwrap(), &line_flow(m)));
        }
    }

    #[test]
    fn successor_before_vertex_is_rejected() {
        let g = OpenGraph::line(3).unwrap();
        let mut f = line_flow(3);
        f.order = vec![1, 0, 2];
        assert!(!validate_flow(&g, &f));
    }

    #[test]
    fn neighbour_condition_on_three_path() {
        // Path 0-1-2 with 1 as the only output; 0 and 2 both flow into 1.
        let g = OpenGraph::new(3, [(0, 1), (1, 2)], vec![], vec![1]).unwrap();
        let successor = [(0, 1), (2, 1)].into_iter().collect();
        let f = Flow {
            successor,
            order: vec![2, 0, 1],
        };
        let err = check_flow(&g, &f).unwrap_err();
        assert!(
            err.contains("successor of two") || err.contains("precedes"),
            "{err}"
        );
        // Only 0 flows; output 2 neighbours f(0) but is ordered before 0.
        let g = OpenGraph::new(3, [(0, 1), (1, 2)], vec![], vec![1, 2]).unwrap();
        let f = Flow {
            successor: [(0, 1)].into_iter().collect(),
            order: vec![2, 0, 1],
        };
        assert!(check_flow(&g, &f).unwrap_err().contains("precedes"));
        let f = Flow {
            successor: [(0, 1)].into_iter().collect(),
            order: vec![0, 2, 1],
        };
        assert!(validate_flow(&g, &f));
    }

    #[test]
    fn json_round_trip() {
        let f = line_flow(4);
        let text = serde_json::to_string(&f).unwrap();
        assert_eq!(
            text,
            r#"{"successor":[[0,1],[1,2],[2,3]],"order":[0,1,2,3]}"#
        );
        assert_eq!(serde_json::from_str::<Flow>(&text).unwrap(), f);
    }
}
