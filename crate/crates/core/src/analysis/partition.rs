use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::dotted_complete;
use crate::sim::seeded_rng;
use crate::verification::{all_partitions, sample_partition, Partition};

/// Largest N for exhaustive enumeration (1680 partitions at N = 3).
pub const EXHAUSTIVE_N_CAP: usize = 3;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum PartitionMode {
    Exhaustive,
    Sampled { samples: u64, seed: u64 },
}

/// Miss probability for one set of flipped P-positions.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MissLine {
    pub positions: Vec<usize>,
    pub miss: f64,
    pub bound: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PartitionStats {
    pub n: usize,
    pub mode: PartitionMode,
    pub partitions: u64,
    /// Probability each P-vertex is a white trap.
    pub white_probability: Vec<f64>,
    /// Probability each A-vertex is a black trap.
    pub black_probability: Vec<f64>,
    /// (N-1)/(3(3N-1)).
    pub black_expected: f64,
    pub misses: Vec<MissLine>,
}

/// Trap placement statistics over random equal partitions of K̃_3N's P-vertices.
/// A flip set is missed when none of its positions is a white trap.
pub fn partition_stats(
    n: usize,
    flips: &[BTreeSet<usize>],
    mode: PartitionMode,
) -> Result<PartitionStats> {
    if n == 0 {
        return Err(Error::Config("N must be at least 1".into()));
    }
    let p_count = 3 * n;
    if let Some(bad) = flips.iter().flatten().find(|&&p| p >= p_count) {
        return Err(Error::Config(format!(
            "flip position {bad} is not a P-vertex"
        )));
    }
    let partitions: Vec<Partition> = match mode {
        PartitionMode::Exhaustive => {
            if n > EXHAUSTIVE_N_CAP {
                return Err(Error::CapExceeded {
                    what: "N for exhaustive partitions",
                    limit: EXHAUSTIVE_N_CAP,
                    requested: n,
                });
            }
            all_partitions(n)
        }
        PartitionMode::Sampled { samples, seed } => {
            let mut rng = seeded_rng(seed, 0);
            (0..samples)
                .map(|_| sample_partition(n, &mut rng))
                .collect()
        }
    };
    let total = partitions.len() as f64;
    if partitions.is_empty() {
        return Err(Error::Config("at least one sample is needed".into()));
    }
    let dotted = dotted_complete(p_count);
    let mut white = vec![0u64; p_count];
    let mut black = vec![0u64; dotted.a_vertices.len()];
    let mut missed = vec![0u64; flips.len()];
    for part in &partitions {
        for &p in &part.parts[1] {
            white[p] += 1;
        }
        for a in part.inner_a_vertices(&dotted, 2) {
            black[a - p_count] += 1;
        }
        for (k, set) in flips.iter().enumerate() {
            if set.iter().all(|p| !part.parts[1].contains(p)) {
                missed[k] += 1;
            }
        }
    }
    Ok(PartitionStats {
        n,
        mode,
        partitions: partitions.len() as u64,
        white_probability: white.iter().map(|&c| c as f64 / total).collect(),
        black_probability: black.iter().map(|&c| c as f64 / total).collect(),
        black_expected: (n - 1) as f64 / (3 * (3 * n - 1)) as f64,
        misses: flips
            .iter()
            .zip(&missed)
            .map(|(set, &c)| MissLine {
                positions: set.iter().copied().collect(),
                miss: c as f64 / total,
                bound: (2.0f64 / 3.0).powi(set.len() as i32),
            })
            .collect(),
    })
}

/// Every set of `w` distinct P-positions among `p_count`.
pub fn position_sets(p_count: usize, w: usize) -> Vec<BTreeSet<usize>> {
    fn go(
        p_count: usize,
        w: usize,
        start: usize,
        cur: &mut Vec<usize>,
        out: &mut Vec<BTreeSet<usize>>,
    ) {
        if cur.len() == w {
            out.push(cur.iter().copied().collect());
            return;
        }
        for p in start..p_count {
            cur.push(p);
            go(p_count, w, p + 1, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(p_count, w, 0, &mut Vec::new(), &mut out);
    out
}
