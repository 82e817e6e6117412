use std::collections::{BTreeMap, BTreeSet};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::analysis::{
    blindness_audit, bound_suite, partition_stats, pauli_label, pauli_strings, position_sets,
    AuditMode, Bound, IncorrectnessOracle, IncorrectnessResult, PartitionMode, TrapPlacement,
    BOUND_TOLERANCE, DEFAULT_CELL_CAP, EXACT_QUBIT_CAP,
};
use crate::error::{Error, Result};
use crate::mbqc::OutputMode;
use crate::protocol::{Attack, Variant};
use crate::sim::seeded_rng;

use super::spec::{input_or_default, InputSpec, PatternSpec};
use super::{config_digest, Execution, Report};

/// Samples used when sampling is requested without a count.
pub const DEFAULT_SAMPLES: u64 = 4096;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModeFlag {
    #[default]
    Exact,
    Sample,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NamedAttack {
    pub label: String,
    pub attack: Attack,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AttackSet {
    /// Every Pauli string applied right after entangling, identity included.
    #[default]
    AllPauli,
    List(Vec<NamedAttack>),
}

/// Enumeration limits.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Caps {
    #[serde(default = "default_qubits")]
    pub qubits: usize,
    #[serde(default = "default_cells")]
    pub cells: u64,
}

fn default_qubits() -> usize {
    EXACT_QUBIT_CAP
}

fn default_cells() -> u64 {
    DEFAULT_CELL_CAP
}

impl Default for Caps {
    fn default() -> Self {
        Caps {
            qubits: EXACT_QUBIT_CAP,
            cells: DEFAULT_CELL_CAP,
        }
    }
}

fn basic() -> Variant {
    Variant::Basic
}

fn default_weights() -> Vec<usize> {
    vec![1, 2, 3]
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum AuditKind {
    Blindness {
        pattern: PatternSpec,
        #[serde(default, skip_serializing_if = "Vec::is_empty")]
        dummy_hosts: Vec<usize>,
        #[serde(default = "basic")]
        variant: Variant,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        input: Option<InputSpec>,
    },
    /// Probability of accepting a wrong output with one random trap, per attack.
    PIncorrect {
        pattern: PatternSpec,
        #[serde(default)]
        input_bits: Vec<bool>,
        #[serde(default = "single")]
        placement: TrapPlacement,
        #[serde(default)]
        attacks: AttackSet,
    },
    /// As above, checked against a bound (by default the single-trap bound for the pattern size).
    BoundSuite {
        pattern: PatternSpec,
        #[serde(default)]
        input_bits: Vec<bool>,
        #[serde(default = "single")]
        placement: TrapPlacement,
        #[serde(default)]
        attacks: AttackSet,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        bound: Option<Bound>,
    },
    PartitionStats {
        #[serde(rename = "N")]
        n: usize,
        /// Numbers of distinct flipped P-positions to test.
        #[serde(default = "default_weights")]
        flip_weights: Vec<usize>,
    },
}

fn single() -> TrapPlacement {
    TrapPlacement::Single
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AuditConfig {
    pub audit: AuditKind,
    #[serde(default)]
    pub mode: ModeFlag,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub samples: Option<u64>,
    /// Sample instead of failing when exact enumeration exceeds a cap.
    #[serde(default)]
    pub fallback: bool,
    #[serde(default)]
    pub caps: Caps,
    #[serde(default)]
    pub seed: u64,
}

fn cap_exceeded(e: &Error) -> bool {
    matches!(e, Error::CapExceeded { .. })
}

struct Outcome {
    mode: String,
    cardinalities: BTreeMap<String, u64>,
    values: serde_json::Value,
    bound: Option<f64>,
    pass: bool,
    csv: Option<String>,
}

/// Runs an audit; `jobs` threads evaluate independent attacks.
pub fn execute_audit(config: &AuditConfig, jobs: usize) -> Result<Execution> {
    let samples = config.samples.unwrap_or(DEFAULT_SAMPLES);
    let outcome = match &config.audit {
        AuditKind::Blindness {
            pattern,
            dummy_hosts,
            variant,
            input,
        } => blindness(
            config,
            pattern.build_with_dummies(dummy_hosts)?,
            *variant,
            input.as_ref(),
            samples,
        )?,
        AuditKind::PIncorrect {
            pattern,
            input_bits,
            placement,
            attacks,
        } => incorrectness(
            config, pattern, input_bits, placement, attacks, None, samples, jobs,
        )?,
        AuditKind::BoundSuite {
            pattern,
            input_bits,
            placement,
            attacks,
            bound,
        } => {
            let p = pattern.build()?;
            let bound = bound.unwrap_or(Bound::Poly {
                m: p.vertex_count(),
                classical: p.output_mode() == OutputMode::Classical,
            });
            incorrectness(
                config,
                pattern,
                input_bits,
                placement,
                attacks,
                Some(bound),
                samples,
                jobs,
            )?
        }
        AuditKind::PartitionStats { n, flip_weights } => {
            partitions(config, *n, flip_weights, samples)?
        }
    };
    Ok(Execution {
        report: Report {
            command: "audit".into(),
            config_digest: config_digest(config),
            seed: config.seed,
            mode: outcome.mode,
            cardinalities: outcome.cardinalities,
            values: outcome.values,
            bound: outcome.bound,
            pass: outcome.pass,
            accept: None,
        },
        csv: outcome.csv,
    })
}

fn blindness(
    config: &AuditConfig,
    pattern: crate::mbqc::Pattern,
    variant: Variant,
    input: Option<&InputSpec>,
    samples: u64,
) -> Result<Outcome> {
    let input = input_or_default(input, pattern.graph().inputs().len());
    let sampled = AuditMode::MonteCarlo {
        samples,
        seed: config.seed,
    };
    let run = |mode| blindness_audit(&pattern, variant, &input, mode, config.caps.qubits);
    let report = match config.mode {
        ModeFlag::Sample => run(sampled)?,
        ModeFlag::Exact => match run(AuditMode::Exact) {
            Err(e) if config.fallback && cap_exceeded(&e) => run(sampled)?,
            other => other?,
        },
    };
    let (mode, tolerance, pass) = match report.mode {
        AuditMode::Exact => (
            "exact",
            1e-9,
            report.histogram_flat() && report.bob_state_distance <= 1e-9,
        ),
        AuditMode::MonteCarlo { samples, .. } => {
            let tolerance = 3.0 * (1u64 << report.qubits) as f64 / (samples as f64).sqrt();
            ("sample", tolerance, report.bob_state_distance <= tolerance)
        }
    };
    Ok(Outcome {
        mode: mode.into(),
        cardinalities: report.cardinalities.iter().cloned().collect(),
        values: json!({
            "qubits": report.qubits,
            "variant": variant,
            "delta_histogram": report.delta_histogram,
            "histogram_flat": report.histogram_flat(),
            "bob_state_distance": report.bob_state_distance,
            "distance_tolerance": tolerance,
            "transcript_probability_range": report.transcript_probability_range,
        }),
        bound: None,
        pass,
        csv: Some(report.histogram_csv()),
    })
}

fn attack_list(attacks: &AttackSet, vertices: usize) -> Vec<(String, Attack)> {
    match attacks {
        AttackSet::AllPauli => pauli_strings(vertices)
            .into_iter()
            .map(|s| (pauli_label(&s), Attack::pauli_string(&s)))
            .collect(),
        AttackSet::List(list) => list
            .iter()
            .map(|a| (a.label.clone(), a.attack.clone()))
            .collect(),
    }
}

fn pool(jobs: usize) -> Result<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .map_err(|e| Error::Config(format!("thread pool: {e}")))
}

#[allow(clippy::too_many_arguments)]
fn incorrectness(
    config: &AuditConfig,
    spec: &PatternSpec,
    input_bits: &[bool],
    placement: &TrapPlacement,
    attacks: &AttackSet,
    bound: Option<Bound>,
    samples: u64,
    jobs: usize,
) -> Result<Outcome> {
    let base = spec.build()?;
    let oracle = IncorrectnessOracle::new(&base, input_bits, placement, config.caps.cells);
    let exact_cap_hit = match &oracle {
        Err(e) => cap_exceeded(e),
        Ok(_) => false,
    };
    let attacks = attack_list(attacks, base.vertex_count());
    let pool = pool(jobs)?;
    let use_sampling = config.mode == ModeFlag::Sample || (exact_cap_hit && config.fallback);
    if !use_sampling {
        let oracle = oracle?;
        let results: Vec<(String, IncorrectnessResult)> = pool.install(|| {
            attacks
                .par_iter()
                .map(|(label, attack)| oracle.evaluate(attack).map(|r| (label.clone(), r)))
                .collect::<Result<_>>()
        })?;
        let cardinalities = BTreeMap::from([
            ("attacks".to_string(), attacks.len() as u64),
            ("cells_per_attack".to_string(), oracle.cells()),
            (
                "placements".to_string(),
                results
                    .first()
                    .map_or(0, |(_, r)| r.placements.len() as u64),
            ),
        ]);
        let (values, bound_value, pass) = match bound {
            Some(b) => {
                let suite = bound_suite(&results, b);
                let pass = suite.pass;
                (
                    json!({"bound_kind": b, "suite": suite}),
                    Some(suite.bound),
                    pass,
                )
            }
            None => {
                let pass = results.iter().all(|(_, r)| {
                    (r.mass - 1.0).abs() <= BOUND_TOLERANCE
                        && r.p_incorrect >= -BOUND_TOLERANCE
                        && r.p_incorrect <= 1.0 + BOUND_TOLERANCE
                });
                let lines: Vec<_> = results
                    .iter()
                    .map(|(label, r)| json!({"label": label, "p_incorrect": r.p_incorrect, "mass": r.mass}))
                    .collect();
                (json!({"attacks": lines}), None, pass)
            }
        };
        return Ok(Outcome {
            mode: "exact".into(),
            cardinalities,
            values,
            bound: bound_value,
            pass,
            csv: None,
        });
    }
    // The sampler keeps the placement enumeration and draws secrets.
    let oracle = IncorrectnessOracle::new(&base, input_bits, placement, u64::MAX)?;
    let estimates = pool.install(|| {
        attacks
            .par_iter()
            .enumerate()
            .map(|(k, (label, attack))| {
                let mut rng = seeded_rng(config.seed, 100 + k as u64);
                oracle
                    .estimate(attack, samples, &mut rng)
                    .map(|e| (label.clone(), e))
            })
            .collect::<Result<Vec<_>>>()
    })?;
    let bound_value = bound.map(Bound::value);
    let pass = estimates.iter().all(|(_, e)| match bound_value {
        Some(b) => e.p_incorrect - e.half_width <= b + BOUND_TOLERANCE,
        None => e.p_incorrect >= -BOUND_TOLERANCE && e.p_incorrect <= 1.0 + BOUND_TOLERANCE,
    });
    let lines: Vec<_> = estimates
        .iter()
        .map(|(label, e)| {
            json!({
                "label": label,
                "p_incorrect": e.p_incorrect,
                "half_width": e.half_width,
                "margin": bound_value.map(|b| b - e.p_incorrect),
            })
        })
        .collect();
    Ok(Outcome {
        mode: "sample".into(),
        cardinalities: BTreeMap::from([
            ("attacks".to_string(), attacks.len() as u64),
            ("samples_per_placement".to_string(), samples),
        ]),
        values: json!({"bound_kind": bound, "attacks": lines}),
        bound: bound_value,
        pass,
        csv: None,
    })
}

fn partitions(config: &AuditConfig, n: usize, weights: &[usize], samples: u64) -> Result<Outcome> {
    let flips: Vec<BTreeSet<usize>> = weights
        .iter()
        .flat_map(|&w| position_sets(3 * n, w))
        .collect();
    let sampled = PartitionMode::Sampled {
        samples,
        seed: config.seed,
    };
    let stats = match config.mode {
        ModeFlag::Sample => partition_stats(n, &flips, sampled)?,
        ModeFlag::Exact => match partition_stats(n, &flips, PartitionMode::Exhaustive) {
            Err(e) if config.fallback && cap_exceeded(&e) => partition_stats(n, &flips, sampled)?,
            other => other?,
        },
    };
    let (mode, slack) = match stats.mode {
        PartitionMode::Exhaustive => ("exact", 1e-12),
        PartitionMode::Sampled { samples, .. } => ("sample", 3.0 / (samples as f64).sqrt()),
    };
    let white_expected = 1.0 / 3.0;
    let pass = stats
        .white_probability
        .iter()
        .all(|p| (p - white_expected).abs() <= slack)
        && stats
            .black_probability
            .iter()
            .all(|p| (p - stats.black_expected).abs() <= slack)
        && stats.misses.iter().all(|m| m.miss <= m.bound + slack);
    Ok(Outcome {
        mode: mode.into(),
        cardinalities: BTreeMap::from([
            ("partitions".to_string(), stats.partitions),
            ("flip_sets".to_string(), flips.len() as u64),
        ]),
        values: serde_json::to_value(&stats).expect("stats serialize"),
        bound: None,
        pass,
        csv: None,
    })
}
