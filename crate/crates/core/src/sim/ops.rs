use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::angle::AngleIndex;
use crate::error::{Error, Result};

pub type Matrix2 = [[Complex64; 2]; 2];

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);
const I: Complex64 = Complex64::new(0.0, 1.0);
const UNITARY_TOLERANCE: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    pub const ALL: [Pauli; 4] = [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z];

    /// Whether the operator flips a computational basis state.
    pub fn flips_bit(self) -> bool {
        matches!(self, Pauli::X | Pauli::Y)
    }

    /// Whether the operator flips the outcome of an XY-plane measurement.
    pub fn flips_phase(self) -> bool {
        matches!(self, Pauli::Z | Pauli::Y)
    }
}

/// A single-qubit gate.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum LocalOp {
    Pauli(Pauli),
    H,
    S,
    Sdg,
    /// diag(1, e^{i k pi/4})
    Phase(AngleIndex),
    Unitary(Matrix2),
}

impl LocalOp {
    pub const X: LocalOp = LocalOp::Pauli(Pauli::X);
    pub const Y: LocalOp = LocalOp::Pauli(Pauli::Y);
    pub const Z: LocalOp = LocalOp::Pauli(Pauli::Z);

    /// Wraps a custom matrix after checking that it is unitary.
    pub fn unitary(m: Matrix2) -> Result<LocalOp> {
        let dev = unitarity_deviation(&m);
        if dev > UNITARY_TOLERANCE {
            return Err(Error::NonUnitary(dev));
        }
        Ok(LocalOp::Unitary(m))
    }

    pub fn matrix(&self) -> Matrix2 {
        let h = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        match *self {
            LocalOp::Pauli(Pauli::I) => [[ONE, ZERO], [ZERO, ONE]],
            LocalOp::Pauli(Pauli::X) => [[ZERO, ONE], [ONE, ZERO]],
            LocalOp::Pauli(Pauli::Y) => [[ZERO, -I], [I, ZERO]],
            LocalOp::Pauli(Pauli::Z) => [[ONE, ZERO], [ZERO, -ONE]],
            LocalOp::H => [[h, h], [h, -h]],
            LocalOp::S => [[ONE, ZERO], [ZERO, I]],
            LocalOp::Sdg => [[ONE, ZERO], [ZERO, -I]],
            LocalOp::Phase(k) => [[ONE, ZERO], [ZERO, k.phase()]],
            LocalOp::Unitary(m) => m,
        }
    }
}

/// Largest entry of |U^dagger U - I|.
pub fn unitarity_deviation(m: &Matrix2) -> f64 {
    let mut worst: f64 = 0.0;
    for r in 0..2 {
        for c in 0..2 {
            let mut acc = ZERO;
            for row in m {
                acc += row[r].conj() * row[c];
            }
            if r == c {
                acc -= ONE;
            }
            worst = worst.max(acc.norm());
        }
    }
    worst
}

pub fn matmul2(a: &Matrix2, b: &Matrix2) -> Matrix2 {
    let mut out = [[ZERO; 2]; 2];
    for r in 0..2 {
        for c in 0..2 {
            out[r][c] = a[r][0] * b[0][c] + a[r][1] * b[1][c];
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtin_gates_are_unitary() {
        let ops = [
            LocalOp::X,
            LocalOp::Y,
            LocalOp::Z,
            LocalOp::H,
            LocalOp::S,
            LocalOp::Sdg,
            LocalOp::Phase(AngleIndex::new(3)),
        ];
        for op in ops {
            assert!(unitarity_deviation(&op.matrix()) < 1e-15);
        }
    }

    #[test]
    fn non_unitary_is_rejected() {
        let m = [[ONE, ONE], [ZERO, ONE]];
        assert!(matches!(LocalOp::unitary(m), Err(Error::NonUnitary(_))));
    }
}
