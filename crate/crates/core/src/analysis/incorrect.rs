use std::collections::BTreeSet;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::angle::AngleIndex;
use crate::error::{Error, Result};
use crate::mbqc::{
    branch_enumerate, OutputMode, Pattern, PatternInput, PatternOutput, DEFAULT_BRANCH_CAP,
};
use crate::protocol::{
    run_session_direct, Attack, Client, ClientOptions, ClientSecrets, OutcomeSource, QuantumServer,
    Variant,
};
use crate::sim::{DensityMatrix, EnvironmentState, Pauli};
use crate::verification::{incorrect_projector, make_trap_pattern_sets, TrapPattern, TrapState};

use super::space::SecretSpace;

/// Default ceiling on (secrets x branches) cells per attack.
pub const DEFAULT_CELL_CAP: u64 = 1 << 26;

/// Branches below this probability carry no mass worth evaluating.
const NEGLIGIBLE: f64 = 1e-15;

/// Where the traps go; the choice is uniform over the listed options.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "sets", rename_all = "snake_case")]
pub enum TrapPlacement {
    /// One trap at any vertex.
    Single,
    /// One of the given trap sets.
    Sets(Vec<BTreeSet<usize>>),
}

#[derive(Clone, Debug, PartialEq)]
enum Ideal {
    Quantum(Vec<Complex64>, DMatrix<Complex64>),
    Classical(Vec<bool>),
}

/// One trap layout with everything precomputed.
#[derive(Clone, Debug)]
struct Prepared {
    traps: BTreeSet<usize>,
    trap: TrapPattern,
    input: PatternInput,
    ideal: Ideal,
    space: SecretSpace,
}

/// Result for one trap layout.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PlacementOutcome {
    pub traps: Vec<usize>,
    pub p_incorrect: f64,
    pub mass: f64,
    pub secrets: u64,
    pub branches: u64,
}

/// Exact probability of accepting an incorrect output under one attack.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IncorrectnessResult {
    pub p_incorrect: f64,
    /// Total probability over every secret and branch; 1 up to rounding.
    pub mass: f64,
    pub placements: Vec<PlacementOutcome>,
    pub cells: u64,
}

/// Exact enumeration over trap placement, angles, flips, dummy bits and server
/// outcomes for trap patterns carved out of a base pattern with classical input.
#[derive(Clone, Debug)]
pub struct IncorrectnessOracle {
    base: Pattern,
    prepared: Vec<Prepared>,
    cell_cap: u64,
}

fn ideal_output(trap: &TrapPattern, input: &PatternInput) -> Result<Ideal> {
    let runs = branch_enumerate(&trap.pattern, input, DEFAULT_BRANCH_CAP)?;
    let live: Vec<_> = runs.into_iter().filter(|r| r.probability > 1e-12).collect();
    let first = live
        .first()
        .ok_or_else(|| Error::NonDeterministic("no branch has positive probability".into()))?;
    match (&first.output, trap.pattern.output_mode()) {
        (PatternOutput::Classical(bits), OutputMode::Classical) => {
            if live.iter().any(|r| r.output != first.output) {
                return Err(Error::NonDeterministic(
                    "classical output varies between branches".into(),
                ));
            }
            Ok(Ideal::Classical(bits.clone()))
        }
        (PatternOutput::Quantum(psi), OutputMode::Quantum) => {
            for r in &live {
                if r.output.fidelity_with(psi).unwrap_or(0.0) < 1.0 - 1e-9 {
                    return Err(Error::NonDeterministic(
                        "quantum output varies between branches".into(),
                    ));
                }
            }
            let traps = vec![
                TrapState::Output {
                    theta: AngleIndex::ZERO
                };
                trap.pattern.output_traps().len()
            ];
            let proj = incorrect_projector(psi, &traps)?;
            Ok(Ideal::Quantum(psi.clone(), proj))
        }
        _ => Err(Error::NonDeterministic(
            "data outputs are entangled with discarded qubits".into(),
        )),
    }
}

impl IncorrectnessOracle {
    pub fn new(
        base: &Pattern,
        input_bits: &[bool],
        placement: &TrapPlacement,
        cell_cap: u64,
    ) -> Result<Self> {
        let sets: Vec<BTreeSet<usize>> = match placement {
            TrapPlacement::Single => (0..base.vertex_count())
                .map(|t| BTreeSet::from([t]))
                .collect(),
            TrapPlacement::Sets(sets) => sets.clone(),
        };
        if sets.is_empty() {
            return Err(Error::Config("no trap placement given".into()));
        }
        let input = PatternInput::Classical(input_bits.to_vec());
        let mut prepared = Vec::with_capacity(sets.len());
        for traps in sets {
            let trap = make_trap_pattern_sets(base, &traps)?;
            let restricted = trap.restrict_input(&input)?;
            let ideal = ideal_output(&trap, &restricted)?;
            let space = SecretSpace::new(&trap.pattern, Variant::Dummy, false);
            let branches = 1u64 << trap.pattern.order().len();
            let cells = space.size()?.saturating_mul(branches);
            if cells > cell_cap {
                return Err(Error::CapExceeded {
                    what: "enumeration cells per placement",
                    limit: cell_cap as usize,
                    requested: cells.min(usize::MAX as u64) as usize,
                });
            }
            prepared.push(Prepared {
                traps,
                trap,
                input: restricted,
                ideal,
                space,
            });
        }
        Ok(IncorrectnessOracle {
            base: base.clone(),
            prepared,
            cell_cap,
        })
    }

    pub fn base(&self) -> &Pattern {
        &self.base
    }

    pub fn cell_cap(&self) -> u64 {
        self.cell_cap
    }

    /// Cells evaluated per attack.
    pub fn cells(&self) -> u64 {
        self.prepared
            .iter()
            .map(|p| p.space.size().unwrap_or(0) << p.trap.pattern.order().len())
            .sum()
    }

    pub fn evaluate(&self, attack: &Attack) -> Result<IncorrectnessResult> {
        let mut placements = Vec::with_capacity(self.prepared.len());
        let mut cells = 0;
        for prep in &self.prepared {
            let outcome = evaluate_placement(prep, attack)?;
            cells += outcome.secrets * outcome.branches;
            placements.push(outcome);
        }
        let k = placements.len() as f64;
        Ok(IncorrectnessResult {
            p_incorrect: placements.iter().map(|p| p.p_incorrect).sum::<f64>() / k,
            mass: placements.iter().map(|p| p.mass).sum::<f64>() / k,
            placements,
            cells,
        })
    }
}

/// Incorrect-and-accepted probability and total branch mass for one secret assignment.
fn secret_contribution(
    prep: &Prepared,
    attack: &Attack,
    secrets: &ClientSecrets,
) -> Result<(f64, f64)> {
    let pattern = &prep.trap.pattern;
    let options = ClientOptions {
        skip_output_trap_measurement: pattern.output_mode() == OutputMode::Quantum,
    };
    let steps = pattern.order().len();
    let mut incorrect = 0.0;
    let mut mass = 0.0;
    for branch in 0..1u64 << steps {
        let outcomes: Vec<bool> = (0..steps).map(|k| branch >> k & 1 == 1).collect();
        let client = Client::new(
            pattern.clone(),
            Variant::Dummy,
            prep.input.clone(),
            secrets.clone(),
            options,
        )?;
        let mut server =
            QuantumServer::adversarial(attack.clone(), OutcomeSource::Forced(outcomes));
        let mut env = EnvironmentState::new();
        let (out, probability) = run_session_direct(client, &mut server, &mut env)?;
        mass += probability;
        if probability < NEGLIGIBLE || !out.accept {
            continue;
        }
        let wrong = match &prep.ideal {
            Ideal::Classical(bits) => match &out.output {
                PatternOutput::Classical(seen) => (seen != bits) as u8 as f64,
                _ => return Err(Error::ProtocolViolation("expected classical output".into())),
            },
            Ideal::Quantum(_, proj) => {
                let joint: DensityMatrix = out
                    .joint_output
                    .ok_or_else(|| Error::ProtocolViolation("joint output missing".into()))?;
                joint.expectation(proj)?
            }
        };
        incorrect += probability * wrong;
    }
    Ok((incorrect, mass))
}

fn evaluate_placement(prep: &Prepared, attack: &Attack) -> Result<PlacementOutcome> {
    let secrets_count = prep.space.size()?;
    let mut incorrect = 0.0;
    let mut mass = 0.0;
    for secrets in prep.space.iter()? {
        let (i, m) = secret_contribution(prep, attack, &secrets)?;
        incorrect += i;
        mass += m;
    }
    let norm = secrets_count as f64;
    Ok(PlacementOutcome {
        traps: prep.traps.iter().copied().collect(),
        p_incorrect: incorrect / norm,
        mass: mass / norm,
        secrets: secrets_count,
        branches: 1 << prep.trap.pattern.order().len(),
    })
}

/// Stratified Monte Carlo estimate: equal samples per trap placement, every
/// branch enumerated for each sampled secret assignment.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SampledIncorrectness {
    pub p_incorrect: f64,
    /// Half width of the 95% normal confidence interval.
    pub half_width: f64,
    pub samples_per_placement: u64,
}

impl IncorrectnessOracle {
    pub fn estimate(
        &self,
        attack: &Attack,
        samples_per_placement: u64,
        rng: &mut impl Rng,
    ) -> Result<SampledIncorrectness> {
        if samples_per_placement < 2 {
            return Err(Error::Config(
                "at least two samples per placement are needed".into(),
            ));
        }
        let k = self.prepared.len() as f64;
        let n = samples_per_placement as f64;
        let mut mean = 0.0;
        let mut variance = 0.0;
        for prep in &self.prepared {
            let draws: Vec<f64> = (0..samples_per_placement)
                .map(|_| {
                    let secrets =
                        ClientSecrets::draw(&prep.trap.pattern, Variant::Dummy, false, rng);
                    secret_contribution(prep, attack, &secrets).map(|(i, _)| i)
                })
                .collect::<Result<_>>()?;
            let m = draws.iter().sum::<f64>() / n;
            let v = draws.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (n - 1.0);
            mean += m / k;
            variance += v / n / (k * k);
        }
        Ok(SampledIncorrectness {
            p_incorrect: mean,
            half_width: 1.96 * variance.sqrt(),
            samples_per_placement,
        })
    }
}

/// Every Pauli string on `m` qubits, identity first.
pub fn pauli_strings(m: usize) -> Vec<Vec<Pauli>> {
    const ALL: [Pauli; 4] = [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z];
    (0..4usize.pow(m as u32))
        .map(|mut k| {
            (0..m)
                .map(|_| {
                    let p = ALL[k % 4];
                    k /= 4;
                    p
                })
                .collect()
        })
        .collect()
}

/// The bound an attack is checked against.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Bound {
    /// One random trap among `m` qubits.
    Poly { m: usize, classical: bool },
    /// A constant fraction `c` of traps and an encoding of distance `d`.
    Amplified { c: f64, d: u32, classical: bool },
}

impl Bound {
    pub fn value(self) -> f64 {
        match self {
            Bound::Poly { m, classical: true } => 1.0 - 1.0 / m as f64,
            Bound::Poly {
                m,
                classical: false,
            } => 1.0 - 1.0 / (2 * m) as f64,
            Bound::Amplified {
                c,
                d,
                classical: true,
            } => (1.0 - c).powi(d as i32),
            Bound::Amplified {
                c,
                d,
                classical: false,
            } => (1.0 - c / 2.0).powi(d as i32),
        }
    }
}

/// One attack's line in a bound check.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AttackLine {
    pub label: String,
    pub p_incorrect: f64,
    pub mass: f64,
    pub margin: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub bound: f64,
    pub attacks: Vec<AttackLine>,
    pub worst_margin: f64,
    pub pass: bool,
}

/// Tolerance on rounding when comparing against a bound or the unit mass.
pub const BOUND_TOLERANCE: f64 = 1e-9;

/// Checks every result against the bound and the sum rule.
pub fn bound_suite(results: &[(String, IncorrectnessResult)], bound: Bound) -> BoundReport {
    let b = bound.value();
    let attacks: Vec<AttackLine> = results
        .iter()
        .map(|(label, r)| AttackLine {
            label: label.clone(),
            p_incorrect: r.p_incorrect,
            mass: r.mass,
            margin: b - r.p_incorrect,
        })
        .collect();
    let worst_margin = attacks
        .iter()
        .map(|a| a.margin)
        .fold(f64::INFINITY, f64::min);
    let pass = attacks.iter().all(|a| {
        a.margin >= -BOUND_TOLERANCE
            && (a.mass - 1.0).abs() <= BOUND_TOLERANCE
            && a.p_incorrect >= -BOUND_TOLERANCE
    });
    BoundReport {
        bound: b,
        attacks,
        worst_margin,
        pass,
    }
}

/// Short label such as "IXZ" for a Pauli string.
pub fn pauli_label(paulis: &[Pauli]) -> String {
    paulis
        .iter()
        .map(|p| match p {
            Pauli::I => 'I',
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        })
        .collect()
}
