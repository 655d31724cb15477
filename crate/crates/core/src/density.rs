//! Density matrices: validated construction, purity, fidelity against pure
//! states, and the dominant eigenvector used as the effective pure state of a
//! weakly mixed source.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{hermitian_eigen, hermiticity_deviation, CMatrix};
use crate::state::StateVector;

const HERMITICITY_TOL: f64 = 1e-12;
const TRACE_TOL: f64 = 1e-12;
const EIGENVALUE_TOL: f64 = 1e-10;
const DEGENERACY_GAP: f64 = 1e-10;

#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    mat: CMatrix,
}

/// Dominant eigenpair of a density matrix. `degenerate` flags a top
/// eigenvalue gap below 1e-10, where the returned vector is a deterministic
/// but physically arbitrary pick from the top eigenspace.
#[derive(Clone, Debug)]
pub struct DominantMode {
    pub vector: StateVector,
    pub eigenvalue: f64,
    pub degenerate: bool,
}

impl DensityMatrix {
    /// Validates Hermiticity, unit trace, and positive semidefiniteness.
    pub fn new(mat: CMatrix) -> Result<Self> {
        if mat.nrows() != mat.ncols() || mat.nrows() == 0 {
            return Err(Error::DimensionMismatch(format!(
                "density matrix must be square and nonempty, got {}x{}",
                mat.nrows(),
                mat.ncols()
            )));
        }
        let deviation = hermiticity_deviation(&mat);
        if deviation > HERMITICITY_TOL {
            return Err(Error::NotHermitian { deviation });
        }
        let trace = mat.trace();
        if (trace.re - 1.0).abs() > TRACE_TOL || trace.im.abs() > TRACE_TOL {
            return Err(Error::NonUnitTrace { trace: trace.re });
        }
        let (values, _) = hermitian_eigen(&mat);
        if let Some(&min) = values.last() {
            if min < -EIGENVALUE_TOL {
                return Err(Error::NotPositiveSemidefinite { value: min });
            }
        }
        Ok(DensityMatrix { mat })
    }

    pub fn from_pure(state: &StateVector) -> Self {
        let c = state.coefficients();
        let d = c.len();
        let mat = CMatrix::from_fn(d, d, |i, k| c[i] * c[k].conj());
        DensityMatrix { mat }
    }

    /// Convex mixture of density matrices; weights must be nonnegative and
    /// sum to 1 within 1e-12.
    pub fn mixture(parts: &[(f64, DensityMatrix)]) -> Result<Self> {
        if parts.is_empty() {
            return Err(Error::InvalidConfig("mixture of zero parts".into()));
        }
        let dim = parts[0].1.dim();
        if parts.iter().any(|(w, rho)| *w < 0.0 || rho.dim() != dim) {
            return Err(Error::InvalidConfig(
                "mixture needs nonnegative weights and equal dimensions".into(),
            ));
        }
        let total: f64 = parts.iter().map(|(w, _)| w).sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidConfig(format!(
                "mixture weights sum to {total}, expected 1"
            )));
        }
        let mut mat = CMatrix::zeros(dim, dim);
        for (w, rho) in parts {
            mat += &rho.mat * Complex64::new(*w, 0.0);
        }
        Self::new(mat)
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        let mat = CMatrix::identity(dim, dim) * Complex64::new(1.0 / dim as f64, 0.0);
        DensityMatrix { mat }
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.mat
    }

    pub fn element(&self, row: usize, col: usize) -> Complex64 {
        self.mat[(row, col)]
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.dim()).map(|i| self.mat[(i, i)].re).collect()
    }

    /// Tr(rho^2), computed as the squared Frobenius norm.
    pub fn purity(&self) -> f64 {
        self.mat.iter().map(|z| z.norm_sqr()).sum()
    }

    /// sqrt(<psi|rho|psi>), the fidelity between a pure state and rho.
    pub fn fidelity_with_pure(&self, state: &StateVector) -> Result<f64> {
        if state.dim() != self.dim() {
            return Err(Error::DimensionMismatch(format!(
                "density dim {} vs state dim {}",
                self.dim(),
                state.dim()
            )));
        }
        let c = state.coefficients();
        let mut acc = Complex64::default();
        for i in 0..self.dim() {
            for k in 0..self.dim() {
                acc += c[i].conj() * self.mat[(i, k)] * c[k];
            }
        }
        Ok(acc.re.max(0.0).sqrt().min(1.0))
    }

    /// Eigenvector of the largest eigenvalue, phase-canonicalized. Within a
    /// degenerate top eigenspace the pick is the eigenvector whose largest
    /// component has the lowest index.
    pub fn dominant_eigenvector(&self) -> Result<DominantMode> {
        let (values, vectors) = hermitian_eigen(&self.mat);
        let top = values[0];
        let degenerate = values.len() > 1 && top - values[1] < DEGENERACY_GAP;
        let mut column = 0;
        if degenerate {
            let argmax = |col: usize| {
                let mut best = 0;
                let mut best_mag = 0.0;
                for row in 0..self.dim() {
                    let mag = vectors[(row, col)].norm_sqr();
                    if mag > best_mag {
                        best = row;
                        best_mag = mag;
                    }
                }
                best
            };
            for col in 1..values.len() {
                if top - values[col] >= DEGENERACY_GAP {
                    break;
                }
                if argmax(col) < argmax(column) {
                    column = col;
                }
            }
        }
        let coeffs: Vec<Complex64> = (0..self.dim()).map(|row| vectors[(row, column)]).collect();
        let anchor = largest_index(&coeffs);
        let vector = StateVector::normalized(coeffs, anchor)?;
        Ok(DominantMode { vector, eigenvalue: values[column], degenerate })
    }
}

fn largest_index(c: &[Complex64]) -> usize {
    let mut best = 0;
    let mut best_mag = c[0].norm_sqr();
    for (i, z) in c.iter().enumerate().skip(1) {
        if z.norm_sqr() > best_mag {
            best = i;
            best_mag = z.norm_sqr();
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn bell() -> StateVector {
        StateVector::normalized(
            vec![c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)],
            0,
        )
        .unwrap()
    }

    #[test]
    fn pure_state_has_unit_purity() {
        let rho = DensityMatrix::from_pure(&bell());
        assert_relative_eq!(rho.purity(), 1.0, epsilon = 1e-13);
        assert_relative_eq!(rho.fidelity_with_pure(&bell()).unwrap(), 1.0, epsilon = 1e-13);
    }

    #[test]
    fn mixture_purity_matches_matrix_square() {
        // 0.9 |psi><psi| + 0.1 I/4, purity checked against an explicit
        // matrix product rather than the Frobenius shortcut.
        let rho = DensityMatrix::mixture(&[
            (0.9, DensityMatrix::from_pure(&bell())),
            (0.1, DensityMatrix::maximally_mixed(4)),
        ])
        .unwrap();
        let square = rho.matrix() * rho.matrix();
        let trace_sq = square.trace().re;
        assert_relative_eq!(rho.purity(), trace_sq, epsilon = 1e-13);
        assert_relative_eq!(rho.purity(), 0.8575, epsilon = 1e-12);
    }

    #[test]
    fn construction_validates() {
        let not_trace_one = CMatrix::identity(3, 3);
        assert!(matches!(
            DensityMatrix::new(not_trace_one),
            Err(Error::NonUnitTrace { .. })
        ));
        let negative = CMatrix::from_row_slice(
            2,
            2,
            &[c(1.5, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(-0.5, 0.0)],
        );
        assert!(matches!(
            DensityMatrix::new(negative),
            Err(Error::NotPositiveSemidefinite { .. })
        ));
        let skew = CMatrix::from_row_slice(
            2,
            2,
            &[c(0.5, 0.0), c(0.1, 0.0), c(-0.1, 0.0), c(0.5, 0.0)],
        );
        assert!(matches!(DensityMatrix::new(skew), Err(Error::NotHermitian { .. })));
        assert!(DensityMatrix::new(DensityMatrix::maximally_mixed(5).mat).is_ok());
    }

    #[test]
    fn mixture_weights_validated() {
        let parts = [(0.6, DensityMatrix::maximally_mixed(2)), (0.3, DensityMatrix::maximally_mixed(2))];
        assert!(DensityMatrix::mixture(&parts).is_err());
    }

    #[test]
    fn dominant_eigenvector_of_weak_mixture() {
        let psi = bell();
        let rho = DensityMatrix::mixture(&[
            (0.9, DensityMatrix::from_pure(&psi)),
            (0.1, DensityMatrix::maximally_mixed(4)),
        ])
        .unwrap();
        let dominant = rho.dominant_eigenvector().unwrap();
        assert!(!dominant.degenerate);
        assert_relative_eq!(dominant.eigenvalue, 0.9 + 0.1 / 4.0, epsilon = 1e-12);
        assert_relative_eq!(dominant.vector.fidelity(&psi).unwrap(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn degenerate_top_space_is_flagged() {
        let dominant = DensityMatrix::maximally_mixed(3).dominant_eigenvector().unwrap();
        assert!(dominant.degenerate);
        assert_relative_eq!(dominant.eigenvalue, 1.0 / 3.0, epsilon = 1e-12);
    }
}
