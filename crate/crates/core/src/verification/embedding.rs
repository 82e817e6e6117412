use std::collections::{BTreeMap, BTreeSet};

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::angle::AngleIndex;
use crate::error::{Error, Result};
use crate::graph::{dotted_complete, DottedGraph, OpenGraph};
use crate::mbqc::{Circuit, OutputMode, Pattern, PatternBuilder};

use super::encoding::{EncodedComputation, EncodingParams};
use super::trap::TrapConfig;

/// Three equal parts of the P-vertices `0..3n`, each sorted.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Partition {
    pub parts: [Vec<usize>; 3],
}

impl Partition {
    pub fn part_size(&self) -> usize {
        self.parts[0].len()
    }

    /// A-vertices of the dotted-complete graph joining two vertices of part `k`.
    pub fn inner_a_vertices(&self, dotted: &DottedGraph, k: usize) -> BTreeSet<usize> {
        let part = &self.parts[k];
        dotted
            .edge_of
            .iter()
            .filter(|(_, (p, q))| part.contains(p) && part.contains(q))
            .map(|(&a, _)| a)
            .collect()
    }
}

pub fn sample_partition(n: usize, rng: &mut impl Rng) -> Partition {
    let mut all: Vec<usize> = (0..3 * n).collect();
    all.shuffle(rng);
    let mut parts: [Vec<usize>; 3] = [
        all[..n].to_vec(),
        all[n..2 * n].to_vec(),
        all[2 * n..].to_vec(),
    ];
    for p in &mut parts {
        p.sort_unstable();
    }
    Partition { parts }
}

/// Every ordered partition of `0..3n` into three parts of size `n`.
pub fn all_partitions(n: usize) -> Vec<Partition> {
    fn subsets(
        pool: &[usize],
        k: usize,
        start: usize,
        cur: &mut Vec<usize>,
        out: &mut Vec<Vec<usize>>,
    ) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..pool.len() {
            cur.push(pool[i]);
            subsets(pool, k, i + 1, cur, out);
            cur.pop();
        }
    }
    let all: Vec<usize> = (0..3 * n).collect();
    let mut firsts = Vec::new();
    subsets(&all, n, 0, &mut Vec::new(), &mut firsts);
    let mut out = Vec::new();
    for first in firsts {
        let rest: Vec<usize> = all.iter().copied().filter(|v| !first.contains(v)).collect();
        let mut seconds = Vec::new();
        subsets(&rest, n, 0, &mut Vec::new(), &mut seconds);
        for second in seconds {
            let third = rest
                .iter()
                .copied()
                .filter(|v| !second.contains(v))
                .collect();
            out.push(Partition {
                parts: [first.clone(), second, third],
            });
        }
    }
    out
}

/// Must-precede pairs of a plain pattern's flow: i before f(i) and before every
/// other neighbour of f(i).
pub fn flow_constraints(pattern: &Pattern) -> Vec<(usize, usize)> {
    let comp = pattern.computation();
    let mut pairs = Vec::new();
    for (&i, &fi) in &pattern.flow().successor {
        pairs.push((i, fi));
        for &j in &comp.adjacency[fi] {
            if j != i {
                pairs.push((i, j));
            }
        }
    }
    pairs
}

/// A linear extension of `constraints` over `items`, picking uniformly among the
/// available items at each step. Not uniform over all extensions.
pub fn random_linear_extension(
    items: &[usize],
    constraints: &[(usize, usize)],
    rng: &mut impl Rng,
) -> Result<Vec<usize>> {
    let index: BTreeMap<usize, usize> = items.iter().enumerate().map(|(k, &v)| (v, k)).collect();
    let mut indegree = vec![0usize; items.len()];
    let mut after: Vec<Vec<usize>> = vec![Vec::new(); items.len()];
    for &(a, b) in constraints {
        if let (Some(&ka), Some(&kb)) = (index.get(&a), index.get(&b)) {
            after[ka].push(kb);
            indegree[kb] += 1;
        }
    }
    let mut ready: Vec<usize> = (0..items.len()).filter(|&k| indegree[k] == 0).collect();
    let mut out = Vec::with_capacity(items.len());
    while !ready.is_empty() {
        let pick = ready.swap_remove(rng.gen_range(0..ready.len()));
        out.push(items[pick]);
        for &k in &after[pick] {
            indegree[k] -= 1;
            if indegree[k] == 0 {
                ready.push(k);
            }
        }
        ready.sort_unstable();
    }
    if out.len() != items.len() {
        return Err(Error::InvalidFlow(
            "measurement constraints are cyclic".into(),
        ));
    }
    Ok(out)
}

/// 1-based position of the A-vertex between P-ranks `i < j` (1-based) among all
/// A-vertices of the dotted-complete graph on `n_p` vertices.
pub fn a_position(n_p: usize, i: usize, j: usize) -> usize {
    n_p * (i - 1) + j - i * (i + 1) / 2
}

/// What to place where when hiding a computation in a dotted-complete graph.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EmbeddingSpec {
    pub p_count: usize,
    /// P-vertex hosting each vertex of the computation pattern.
    pub hosts: Vec<usize>,
    pub white: BTreeSet<usize>,
    pub black: BTreeSet<usize>,
}

/// The embedded pattern and the dotted graph it lives on.
#[derive(Clone, Debug, PartialEq)]
pub struct Embedding {
    pub pattern: Pattern,
    pub dotted: DottedGraph,
    pub traps: TrapConfig,
    /// P-vertex measurement order, outputs last.
    pub p_order: Vec<usize>,
}

/// Hides a plain pattern in the dotted-complete graph: A-vertices between
/// adjacent hosts are bridged, traps are placed, everything else is a dummy.
/// A-vertices are measured first, then P-vertices in a random order that
/// respects the computation's flow.
pub fn embed(computation: &Pattern, spec: &EmbeddingSpec, rng: &mut impl Rng) -> Result<Embedding> {
    if !computation.dummies().is_empty()
        || !computation.traps().is_empty()
        || !computation.bridges().is_empty()
    {
        return Err(Error::InvalidPattern(
            "only plain patterns can be embedded".into(),
        ));
    }
    let n_p = spec.p_count;
    if spec.hosts.len() != computation.vertex_count() {
        return Err(Error::SizeMismatch {
            expected: computation.vertex_count(),
            actual: spec.hosts.len(),
        });
    }
    let mut guest = vec![None; n_p];
    for (i, &p) in spec.hosts.iter().enumerate() {
        if p >= n_p || guest[p].is_some() {
            return Err(Error::InvalidPattern(format!(
                "host {p} out of range or used twice"
            )));
        }
        guest[p] = Some(i);
    }
    if spec.white.iter().any(|&p| p >= n_p || guest[p].is_some()) {
        return Err(Error::InvalidPattern(
            "white traps must be free P-vertices".into(),
        ));
    }
    let dotted = dotted_complete(n_p);
    let total = dotted.graph.vertex_count();
    if spec.black.iter().any(|a| !dotted.edge_of.contains_key(a)) {
        return Err(Error::InvalidPattern(
            "black traps must be A-vertices".into(),
        ));
    }

    let cg = computation.graph();
    let graph = OpenGraph::new(
        total,
        dotted.graph.edges(),
        cg.inputs().iter().map(|&v| spec.hosts[v]).collect(),
        cg.outputs().iter().map(|&v| spec.hosts[v]).collect(),
    )?;
    let mut angles = vec![AngleIndex::ZERO; total];
    for (i, &p) in spec.hosts.iter().enumerate() {
        angles[p] = computation.angle(i);
    }
    let mut bridges = BTreeSet::new();
    for (&a, &(p, q)) in &dotted.edge_of {
        if let (Some(i), Some(j)) = (guest[p], guest[q]) {
            if cg.has_edge(i, j) {
                bridges.insert(a);
                angles[a] = AngleIndex::HALF_PI;
            }
        }
    }
    let traps: BTreeSet<usize> = spec.white.union(&spec.black).copied().collect();
    let dummies: BTreeSet<usize> = (0..total)
        .filter(|v| {
            !traps.contains(v) && !bridges.contains(v) && !(*v < n_p && guest[*v].is_some())
        })
        .collect();

    let constraints: Vec<(usize, usize)> = flow_constraints(computation)
        .into_iter()
        .map(|(a, b)| (spec.hosts[a], spec.hosts[b]))
        .collect();
    let measured_p: Vec<usize> = (0..n_p)
        .filter(|&p| !is_unmeasured(computation, &guest, p))
        .collect();
    let mut p_order = random_linear_extension(&measured_p, &constraints, rng)?;
    let returned: Vec<usize> = (0..n_p)
        .filter(|&p| is_unmeasured(computation, &guest, p))
        .collect();
    let mut rank = vec![0; n_p];
    for (k, &p) in p_order.iter().chain(&returned).enumerate() {
        rank[p] = k + 1;
    }
    let mut a_order: Vec<(usize, usize)> = dotted
        .edge_of
        .iter()
        .map(|(&a, &(p, q))| {
            let (i, j) = (rank[p].min(rank[q]), rank[p].max(rank[q]));
            (a_position(n_p, i, j), a)
        })
        .collect();
    a_order.sort_unstable();
    let order: Vec<usize> = a_order
        .iter()
        .map(|&(_, a)| a)
        .chain(p_order.iter().copied())
        .collect();

    let pattern = PatternBuilder {
        graph,
        angles,
        successor: computation
            .flow()
            .successor
            .iter()
            .map(|(&i, &j)| (spec.hosts[i], spec.hosts[j]))
            .collect(),
        order,
        dummies: dummies.clone(),
        traps: traps.clone(),
        bridges,
        output_mode: computation.output_mode(),
    }
    .build()?;
    p_order.extend(returned);
    Ok(Embedding {
        pattern,
        dotted,
        traps: TrapConfig {
            white: spec.white.clone(),
            black: spec.black.clone(),
            dummies,
        },
        p_order,
    })
}

fn is_unmeasured(computation: &Pattern, guest: &[Option<usize>], p: usize) -> bool {
    match guest[p] {
        Some(i) => !computation.is_measured(i),
        None => false,
    }
}

/// A full verifiable run's measurement pattern and the secrets behind its layout.
#[derive(Clone, Debug, PartialEq)]
pub struct VerificationPlan {
    pub n: usize,
    pub encoding: EncodingParams,
    pub encoded: EncodedComputation,
    pub partition: Partition,
    pub embedding: Embedding,
}

impl VerificationPlan {
    pub fn pattern(&self) -> &Pattern {
        &self.embedding.pattern
    }

    pub fn traps(&self) -> &TrapConfig {
        &self.embedding.traps
    }
}

/// Picks a random partition of the 3n P-vertices, hosts the encoded computation
/// in the first part, white traps on the second part's P-vertices and black
/// traps on the third part's inner A-vertices.
pub fn choose_pattern(
    circuit: &Circuit,
    n: usize,
    encoding: EncodingParams,
    mode: OutputMode,
    rng: &mut impl Rng,
) -> Result<VerificationPlan> {
    if n == 0 {
        return Err(Error::Config("N must be at least 1".into()));
    }
    let encoded = encoding.encode(circuit, mode)?;
    let size = encoded.pattern.vertex_count();
    if size > n {
        return Err(Error::CapacityExceeded(format!(
            "the encoded computation needs {size} vertices, N is {n}"
        )));
    }
    let partition = sample_partition(n, rng);
    let dotted_n = dotted_complete(3 * n);
    let spec = EmbeddingSpec {
        p_count: 3 * n,
        hosts: partition.parts[0][..size].to_vec(),
        white: partition.parts[1].iter().copied().collect(),
        black: partition.inner_a_vertices(&dotted_n, 2),
    };
    let embedding = embed(&encoded.pattern, &spec, rng)?;
    Ok(VerificationPlan {
        n,
        encoding,
        encoded,
        partition,
        embedding,
    })
}
