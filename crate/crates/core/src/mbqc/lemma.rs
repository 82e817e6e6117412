use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::angle::AngleIndex;
use crate::error::{Error, Result};
use crate::graph::{break_vertex, bridge, dotted_complete, reduction_plan, OpenGraph, Reduction};
use crate::sim::{fidelity, Basis, EnvironmentState, LocalOp, MeasureMode, PrepSpec};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PauliBasis {
    Y,
    Z,
}

/// The graph state on `g`, little-endian over vertex labels.
pub fn graph_state(g: &OpenGraph) -> Result<Vec<Complex64>> {
    let mut env = EnvironmentState::new();
    let q = env.allocate(&vec![
        PrepSpec::PlusTheta(AngleIndex::ZERO);
        g.vertex_count()
    ])?;
    for (a, b) in g.edges() {
        env.apply_cz(q[a], q[b])?;
    }
    let mut state = vec![Complex64::new(1.0, 0.0)];
    let mut placed = 0;
    // Registers are disjoint components; tensor them in label order.
    let mut order = Vec::new();
    for comp in g.components() {
        let amps = env.state_vector(&comp.iter().map(|&v| q[v]).collect::<Vec<_>>())?;
        let mut next = vec![Complex64::new(0.0, 0.0); state.len() * amps.len()];
        for (ib, &vb) in amps.iter().enumerate() {
            for (ia, &va) in state.iter().enumerate() {
                next[ia | ib << placed] = va * vb;
            }
        }
        state = next;
        placed += comp.len();
        order.extend(comp);
    }
    Ok(permute(&state, &order))
}

/// Reorders a state whose bit k belongs to `layout[k]` into label order.
fn permute(state: &[Complex64], layout: &[usize]) -> Vec<Complex64> {
    let mut out = vec![Complex64::new(0.0, 0.0); state.len()];
    for (i, &a) in state.iter().enumerate() {
        let j = layout
            .iter()
            .enumerate()
            .fold(0, |acc, (bit, &v)| acc | (i >> bit & 1) << v);
        out[j] = a;
    }
    out
}

/// State of the remaining vertices after measuring `v` of the graph state,
/// labelled as in `g.remove_vertex(v)`. Returns `None` for an impossible outcome.
pub fn measured_graph_state(
    g: &OpenGraph,
    v: usize,
    basis: PauliBasis,
    outcome: bool,
) -> Result<Option<Vec<Complex64>>> {
    let m = g.vertex_count();
    if v >= m {
        return Err(Error::InvalidGraph(format!("vertex {v} out of range")));
    }
    let mut env = EnvironmentState::new().with_factoring(false);
    let amps = graph_state(g)?;
    let q = env.allocate_register(amps)?;
    let basis = match basis {
        PauliBasis::Y => Basis::XY(AngleIndex::HALF_PI),
        PauliBasis::Z => Basis::PauliZ,
    };
    let seen = env.measure(q[v], basis, MeasureMode::Forced(outcome))?;
    if seen.null_branch {
        return Ok(None);
    }
    let rest: Vec<usize> = (0..m).filter(|&u| u != v).map(|u| q[u]).collect();
    Ok(Some(env.state_vector(&rest)?))
}

/// What the measurement is expected to leave behind: for Y the bridged graph
/// with a quarter turn about Z on both neighbours, for Z the broken graph with
/// Z on every neighbour when the outcome is 1.
pub fn predicted_graph_state(
    g: &OpenGraph,
    v: usize,
    basis: PauliBasis,
    outcome: bool,
) -> Result<Vec<Complex64>> {
    let shift = |u: usize| if u > v { u - 1 } else { u };
    let (reduced, op) = match basis {
        PauliBasis::Y => {
            let turn = if outcome {
                AngleIndex::new(6)
            } else {
                AngleIndex::HALF_PI
            };
            (bridge(g, v)?, LocalOp::Phase(turn))
        }
        PauliBasis::Z => (
            break_vertex(g, v)?,
            if outcome {
                LocalOp::Z
            } else {
                LocalOp::Phase(AngleIndex::ZERO)
            },
        ),
    };
    let mut env = EnvironmentState::new().with_factoring(false);
    let q = env.allocate_register(graph_state(&reduced)?)?;
    for &u in g.neighbors(v) {
        env.apply_local(q[shift(u)], &op)?;
    }
    env.state_vector(&q)
}

/// Fidelity between the measured and predicted states (1 for an impossible outcome).
pub fn pauli_lemma_fidelity(
    g: &OpenGraph,
    v: usize,
    basis: PauliBasis,
    outcome: bool,
) -> Result<f64> {
    match measured_graph_state(g, v, basis, outcome)? {
        None => Ok(1.0),
        Some(actual) => Ok(fidelity(
            &actual,
            &predicted_graph_state(g, v, basis, outcome)?,
        )),
    }
}

/// Carves `target` out of the dotted-complete graph on its vertex count by
/// measuring every A-vertex (Y to bridge, Z to break) with the given outcomes,
/// in increasing label order. Returns the fidelity of the P-vertices' state with
/// the target graph state after the tracked Z rotations, or `None` when the
/// outcome string is impossible.
pub fn simulate_reduction(target: &OpenGraph, outcomes: &[bool]) -> Result<Option<f64>> {
    let n = target.vertex_count();
    let dotted = dotted_complete(n);
    let plan = reduction_plan(n, target)?;
    if outcomes.len() != plan.assignment.len() {
        return Err(Error::SizeMismatch {
            expected: plan.assignment.len(),
            actual: outcomes.len(),
        });
    }
    let mut env = EnvironmentState::new().with_factoring(false);
    let q = env.allocate_register(graph_state(&dotted.graph)?)?;
    let mut turn = vec![AngleIndex::ZERO; n];
    for ((&a, &op), &outcome) in plan.assignment.iter().zip(outcomes) {
        let (p, r) = dotted.edge_of[&a];
        let (basis, shift) = match op {
            Reduction::Bridge => (
                Basis::XY(AngleIndex::HALF_PI),
                if outcome {
                    AngleIndex::new(6)
                } else {
                    AngleIndex::HALF_PI
                },
            ),
            Reduction::Break => (Basis::PauliZ, AngleIndex::pi_if(outcome)),
        };
        if env
            .measure(q[a], basis, MeasureMode::Forced(outcome))?
            .null_branch
        {
            return Ok(None);
        }
        turn[p] += shift;
        turn[r] += shift;
    }
    let actual = env.state_vector(&q[..n])?;
    let mut expected = EnvironmentState::new().with_factoring(false);
    let e = expected.allocate_register(graph_state(target)?)?;
    for (p, &t) in turn.iter().enumerate() {
        expected.apply_local(e[p], &LocalOp::Phase(t))?;
    }
    Ok(Some(fidelity(&actual, &expected.state_vector(&e)?)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn path_bridge_gives_edge() {
        let path = OpenGraph::closed(3, [(0, 1), (1, 2)]).unwrap();
        for outcome in [false, true] {
            assert!(pauli_lemma_fidelity(&path, 1, PauliBasis::Y, outcome).unwrap() > 1.0 - 1e-12);
            assert!(pauli_lemma_fidelity(&path, 1, PauliBasis::Z, outcome).unwrap() > 1.0 - 1e-12);
        }
    }

    #[test]
    fn triangle_bridge_removes_edge() {
        let tri = OpenGraph::closed(3, [(0, 1), (1, 2), (0, 2)]).unwrap();
        for outcome in [false, true] {
            assert!(pauli_lemma_fidelity(&tri, 1, PauliBasis::Y, outcome).unwrap() > 1.0 - 1e-12);
        }
    }

    #[test]
    fn triangle_from_dotted_k3() {
        let tri = OpenGraph::closed(3, [(0, 1), (1, 2), (0, 2)]).unwrap();
        for mask in 0..8u32 {
            let outcomes: Vec<bool> = (0..3).map(|k| mask >> k & 1 == 1).collect();
            let f = simulate_reduction(&tri, &outcomes).unwrap().unwrap();
            assert!(f > 1.0 - 1e-12);
        }
    }

    #[test]
    fn graph_state_of_an_edge() {
        let g = OpenGraph::closed(3, [(0, 2)]).unwrap();
        let psi = graph_state(&g).unwrap();
        let h = 1.0 / 8f64.sqrt();
        for (i, a) in psi.iter().enumerate() {
            let sign = if i & 0b101 == 0b101 { -1.0 } else { 1.0 };
            assert!((a - Complex64::new(sign * h, 0.0)).norm() < 1e-15);
        }
    }
}
