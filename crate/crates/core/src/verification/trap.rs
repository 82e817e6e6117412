use std::collections::BTreeSet;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::angle::AngleIndex;
use crate::error::{Error, Result};
use crate::mbqc::{Pattern, PatternInput};

/// Where the traps sit and which dummies isolate them.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrapConfig {
    /// Traps on P-vertices (or the single trap of a trap pattern).
    pub white: BTreeSet<usize>,
    /// Traps on A-vertices.
    pub black: BTreeSet<usize>,
    pub dummies: BTreeSet<usize>,
}

impl TrapConfig {
    pub fn traps(&self) -> BTreeSet<usize> {
        self.white.union(&self.black).copied().collect()
    }
}

/// A base pattern with one or more isolated traps carved out of it.
#[derive(Clone, Debug, PartialEq)]
pub struct TrapPattern {
    pub pattern: Pattern,
    pub config: TrapConfig,
    /// Positions (in the base input list) of the inputs that still carry data.
    pub kept_inputs: Vec<usize>,
}

impl TrapPattern {
    /// The base input restricted to the kept inputs. Quantum data can only be
    /// restricted when nothing is dropped.
    pub fn restrict_input(&self, input: &PatternInput) -> Result<PatternInput> {
        match input {
            PatternInput::Classical(bits) => Ok(PatternInput::Classical(
                self.kept_inputs
                    .iter()
                    .map(|&k| {
                        bits.get(k).copied().ok_or(Error::SizeMismatch {
                            expected: k + 1,
                            actual: bits.len(),
                        })
                    })
                    .collect::<Result<_>>()?,
            )),
            PatternInput::Quantum(_) => {
                let n = input_count(input)?;
                if self.kept_inputs.len() != n {
                    return Err(Error::InvalidPattern(
                        "a trap or dummy would discard quantum input data".into(),
                    ));
                }
                Ok(input.clone())
            }
        }
    }
}

fn input_count(input: &PatternInput) -> Result<usize> {
    match input {
        PatternInput::Classical(bits) => Ok(bits.len()),
        PatternInput::Quantum(amps) => {
            let n = amps.len().trailing_zeros() as usize;
            if amps.len() != 1 << n {
                return Err(Error::DimensionMismatch(format!(
                    "{} amplitudes",
                    amps.len()
                )));
            }
            Ok(n)
        }
    }
}

/// Turns vertex `t` into an isolated trap: its neighbours become dummies and
/// both get angle 0. Inputs that become dummies or traps stop carrying data.
pub fn make_trap_pattern(base: &Pattern, t: usize) -> Result<TrapPattern> {
    make_trap_pattern_sets(base, &BTreeSet::from([t]))
}

/// Like [`make_trap_pattern`] with several traps at once; traps must be pairwise non-adjacent.
pub fn make_trap_pattern_sets(base: &Pattern, traps: &BTreeSet<usize>) -> Result<TrapPattern> {
    let m = base.vertex_count();
    if !base.dummies().is_empty() || !base.traps().is_empty() || !base.bridges().is_empty() {
        return Err(Error::InvalidPattern(
            "trap patterns are built from plain patterns".into(),
        ));
    }
    if traps.is_empty() {
        return Err(Error::InvalidPattern("no trap given".into()));
    }
    if let Some(&t) = traps.iter().find(|&&t| t >= m) {
        return Err(Error::InvalidPattern(format!("trap {t} out of range")));
    }
    let graph = base.graph();
    let dummies: BTreeSet<usize> = traps
        .iter()
        .flat_map(|&t| graph.neighbors(t).iter().copied())
        .collect();
    if let Some(&t) = traps.iter().find(|t| dummies.contains(t)) {
        return Err(Error::InvalidPattern(format!(
            "trap {t} neighbours another trap"
        )));
    }
    let removed = |v: &usize| traps.contains(v) || dummies.contains(v);
    let kept_inputs: Vec<usize> = graph
        .inputs()
        .iter()
        .enumerate()
        .filter(|(_, v)| !removed(v))
        .map(|(k, _)| k)
        .collect();
    let inputs: Vec<usize> = kept_inputs.iter().map(|&k| graph.inputs()[k]).collect();

    let mut b = base.to_builder();
    b.graph = graph.with_io(inputs, graph.outputs().to_vec())?;
    for v in traps.iter().chain(&dummies) {
        b.angles[*v] = AngleIndex::ZERO;
    }
    b.successor.retain(|i, j| !removed(i) && !removed(j));
    b.dummies = dummies.clone();
    b.traps = traps.clone();
    Ok(TrapPattern {
        pattern: b.build()?,
        config: TrapConfig {
            white: traps.clone(),
            black: BTreeSet::new(),
            dummies,
        },
        kept_inputs,
    })
}

/// The state an unattacked trap ends up in.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TrapState {
    /// A returned trap, |+_theta>.
    Output { theta: AngleIndex },
    /// A measured trap whose classical result should equal the flip bit.
    Measured { flip: bool },
}

impl TrapState {
    fn vector(self) -> [Complex64; 2] {
        match self {
            TrapState::Output { theta } => {
                let h = std::f64::consts::FRAC_1_SQRT_2;
                [
                    Complex64::new(h, 0.0),
                    Complex64::from_polar(h, theta.radians()),
                ]
            }
            TrapState::Measured { flip: false } => {
                [Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)]
            }
            TrapState::Measured { flip: true } => {
                [Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)]
            }
        }
    }
}

/// (I - |ideal><ideal|) on the outputs, tensored with the projector onto every
/// unattacked trap state. Outputs occupy the low bits, traps follow in order.
pub fn incorrect_projector(ideal: &[Complex64], traps: &[TrapState]) -> Result<DMatrix<Complex64>> {
    let dim = ideal.len();
    if dim == 0 || !dim.is_power_of_two() {
        return Err(Error::DimensionMismatch(format!(
            "ideal vector of length {dim}"
        )));
    }
    let norm: f64 = ideal.iter().map(|a| a.norm_sqr()).sum();
    if (norm - 1.0).abs() > 1e-9 {
        return Err(Error::DimensionMismatch(format!(
            "ideal vector has norm {}",
            norm.sqrt()
        )));
    }
    let psi = DMatrix::from_column_slice(dim, 1, ideal);
    let mut proj = DMatrix::<Complex64>::identity(dim, dim) - &psi * psi.adjoint();
    for &t in traps {
        let eta = DMatrix::from_column_slice(2, 1, &t.vector());
        proj = (&eta * eta.adjoint()).kronecker(&proj);
    }
    Ok(proj)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::line_pattern;
    use crate::mbqc::OutputMode;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn middle_of_three_path() {
        let base = line_pattern(&[1, 2], OutputMode::Quantum).unwrap();
        let tp = make_trap_pattern(&base, 1).unwrap();
        assert_eq!(tp.config.dummies, BTreeSet::from([0, 2]));
        assert!(tp.kept_inputs.is_empty());
        assert!(tp.pattern.computation().vertices.is_empty());
        assert!(tp.pattern.graph().inputs().is_empty());
    }

    #[test]
    fn trap_out_of_range() {
        let base = line_pattern(&[1, 2], OutputMode::Quantum).unwrap();
        assert!(make_trap_pattern(&base, 3).is_err());
        assert!(make_trap_pattern_sets(&base, &BTreeSet::from([0, 1])).is_err());
    }

    #[test]
    fn projector_small_case() {
        let p =
            incorrect_projector(&[c(1.0), c(0.0)], &[TrapState::Measured { flip: false }]).unwrap();
        let mut expected = DMatrix::<Complex64>::zeros(4, 4);
        expected[(1, 1)] = c(1.0);
        assert_eq!(p, expected);
    }

    #[test]
    fn projector_laws() {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let ideal = [c(h), Complex64::new(0.0, h)];
        let traps = [
            TrapState::Output {
                theta: AngleIndex::new(3),
            },
            TrapState::Measured { flip: true },
        ];
        let p = incorrect_projector(&ideal, &traps).unwrap();
        assert!((&p * &p - &p).norm() < 1e-10);
        assert!((p.adjoint() - &p).norm() < 1e-10);
        let mut good = DMatrix::from_column_slice(2, 1, &ideal);
        for t in traps {
            good = DMatrix::from_column_slice(2, 1, &t.vector()).kronecker(&good);
        }
        assert!((&p * good).norm() < 1e-10);
    }

    #[test]
    fn rejects_bad_ideal() {
        assert!(incorrect_projector(&[c(1.0), c(1.0)], &[]).is_err());
        assert!(incorrect_projector(&[c(1.0), c(0.0), c(0.0)], &[]).is_err());
    }
}
