use std::collections::BTreeSet;

use crate::error::Result;
use crate::graph::OpenGraph;
use crate::sim::{EnvironmentState, QubitId};

/// Applies the CZs of a graph on demand.
///
/// CZs commute with measurements of other qubits, so a vertex only needs its
/// incident edges in place right before it is measured or handed over. This
/// keeps registers small for wide patterns.
#[derive(Clone, Debug)]
pub struct LazyEntangler {
    pending: Vec<BTreeSet<usize>>,
}

impl LazyEntangler {
    pub fn new(graph: &OpenGraph) -> Self {
        LazyEntangler {
            pending: (0..graph.vertex_count())
                .map(|v| graph.neighbors(v).clone())
                .collect(),
        }
    }

    /// Whether every edge at `v` has been applied.
    pub fn is_complete(&self, v: usize) -> bool {
        self.pending[v].is_empty()
    }

    /// Applies every outstanding edge at `v`; `qubit` maps vertices to qubits.
    pub fn entangle_around(
        &mut self,
        env: &mut EnvironmentState,
        qubit: &[QubitId],
        v: usize,
    ) -> Result<()> {
        let rest = std::mem::take(&mut self.pending[v]);
        for u in rest {
            self.pending[u].remove(&v);
            env.apply_cz(qubit[v], qubit[u])?;
        }
        Ok(())
    }

    pub fn entangle_all(&mut self, env: &mut EnvironmentState, qubit: &[QubitId]) -> Result<()> {
        for v in 0..self.pending.len() {
            self.entangle_around(env, qubit, v)?;
        }
        Ok(())
    }
}
