use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};

/// A density operator on a small number of qubits.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    matrix: DMatrix<Complex64>,
}

impl DensityMatrix {
    pub fn from_matrix(matrix: DMatrix<Complex64>) -> Result<Self> {
        if !matrix.is_square() || !matrix.nrows().is_power_of_two() {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} is not a qubit operator",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        Ok(DensityMatrix { matrix })
    }

    /// |psi><psi| (no normalization is applied).
    pub fn from_pure(psi: &[Complex64]) -> Self {
        let v = DVector::from_column_slice(psi);
        DensityMatrix {
            matrix: &v * v.adjoint(),
        }
    }

    pub fn maximally_mixed(qubits: usize) -> Self {
        let dim = 1usize << qubits;
        DensityMatrix {
            matrix: DMatrix::identity(dim, dim) * Complex64::new(1.0 / dim as f64, 0.0),
        }
    }

    pub fn zeros(qubits: usize) -> Self {
        let dim = 1usize << qubits;
        DensityMatrix {
            matrix: DMatrix::zeros(dim, dim),
        }
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn qubits(&self) -> usize {
        self.dim().trailing_zeros() as usize
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.matrix
    }

    pub fn trace(&self) -> Complex64 {
        self.matrix.trace()
    }

    /// Adds `weight * other` in place.
    pub fn accumulate(&mut self, other: &DensityMatrix, weight: f64) {
        self.matrix += &other.matrix * Complex64::new(weight, 0.0);
    }

    pub fn scale(&mut self, factor: f64) {
        self.matrix *= Complex64::new(factor, 0.0);
    }

    /// Adds `weight * |psi><psi|` in place.
    pub fn accumulate_pure(&mut self, psi: &[Complex64], weight: f64) {
        let n = self.dim();
        for r in 0..n {
            let a = psi[r] * weight;
            if a == Complex64::new(0.0, 0.0) {
                continue;
            }
            for (c, &b) in psi.iter().enumerate() {
                self.matrix[(r, c)] += a * b.conj();
            }
        }
    }

    /// Eigenvalues of the Hermitian part.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let herm = (&self.matrix + self.matrix.adjoint()) * Complex64::new(0.5, 0.0);
        herm.symmetric_eigenvalues().iter().copied().collect()
    }

    /// Hermitian, positive semidefinite and unit trace, all within `tol`.
    pub fn is_valid(&self, tol: f64) -> bool {
        let herm_dev = (&self.matrix - self.matrix.adjoint())
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max);
        let trace = self.trace();
        herm_dev <= tol
            && (trace.re - 1.0).abs() <= tol
            && trace.im.abs() <= tol
            && self.eigenvalues().iter().all(|&e| e >= -tol)
    }

    /// Tr(P rho) for an operator on the same space.
    pub fn expectation(&self, operator: &DMatrix<Complex64>) -> Result<f64> {
        if operator.nrows() != self.dim() || operator.ncols() != self.dim() {
            return Err(Error::DimensionMismatch(format!(
                "operator is {}x{}, state is {}x{}",
                operator.nrows(),
                operator.ncols(),
                self.dim(),
                self.dim()
            )));
        }
        Ok((operator * &self.matrix).trace().re)
    }

    /// <phi| rho |phi>.
    pub fn fidelity_with(&self, phi: &[Complex64]) -> f64 {
        let v = DVector::from_column_slice(phi);
        (v.adjoint() * &self.matrix * &v)[(0, 0)].re
    }
}

/// Half the trace norm of `a - b`.
pub fn trace_distance(a: &DensityMatrix, b: &DensityMatrix) -> f64 {
    let diff = DensityMatrix {
        matrix: &a.matrix - &b.matrix,
    };
    0.5 * diff.eigenvalues().iter().map(|e| e.abs()).sum::<f64>()
}

/// |<reference|state>|^2 for normalized pure states.
pub fn fidelity(state: &[Complex64], reference: &[Complex64]) -> f64 {
    let overlap: Complex64 = reference.iter().zip(state).map(|(r, s)| r.conj() * s).sum();
    overlap.norm_sqr().min(1.0)
}
