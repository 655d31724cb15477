//! Hermitian observables and their expectation values.

use num_complex::Complex64;

use crate::density::DensityMatrix;
use crate::error::{Error, Result};
use crate::linalg::{hermiticity_deviation, CMatrix};
use crate::sparse::SparseState;
use crate::state::StateVector;

const HERMITICITY_TOL: f64 = 1e-12;
const PROJECTOR_TOL: f64 = 1e-10;

#[derive(Clone, Debug, PartialEq)]
pub struct HermitianObservable {
    mat: CMatrix,
}

impl HermitianObservable {
    /// Validates Hermiticity and wraps the matrix.
    pub fn new(mat: CMatrix) -> Result<Self> {
        if mat.nrows() != mat.ncols() || mat.nrows() == 0 {
            return Err(Error::DimensionMismatch(format!(
                "observable must be square and nonempty, got {}x{}",
                mat.nrows(),
                mat.ncols()
            )));
        }
        let deviation = hermiticity_deviation(&mat);
        if deviation > HERMITICITY_TOL {
            return Err(Error::NotHermitian { deviation });
        }
        Ok(HermitianObservable { mat })
    }

    /// Rank-one projector |s><s| onto a sparse direction, Hermitian by
    /// construction.
    pub fn projector(direction: &SparseState, dim: usize) -> Result<Self> {
        if direction.max_index() as usize >= dim {
            return Err(Error::IndexOutOfRange {
                index: direction.max_index() as usize,
                dim,
            });
        }
        let mut mat = CMatrix::zeros(dim, dim);
        for &(i, ci) in direction.entries() {
            for &(k, ck) in direction.entries() {
                mat[(i as usize, k as usize)] = ci * ck.conj();
            }
        }
        Ok(HermitianObservable { mat })
    }

    /// Like [`HermitianObservable::new`] but additionally requires O^2 = O.
    pub fn new_projector(mat: CMatrix) -> Result<Self> {
        let obs = Self::new(mat)?;
        let deviation = (&obs.mat * &obs.mat - &obs.mat).norm();
        if deviation > PROJECTOR_TOL {
            return Err(Error::NotProjector { deviation });
        }
        Ok(obs)
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.mat
    }

    /// <psi|O|psi>, guaranteed real for Hermitian O.
    pub fn expectation_state(&self, state: &StateVector) -> Result<f64> {
        if state.dim() != self.dim() {
            return Err(Error::DimensionMismatch(format!(
                "observable dim {} vs state dim {}",
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
        Ok(acc.re)
    }

    /// Tr(rho O).
    pub fn expectation_density(&self, rho: &DensityMatrix) -> Result<f64> {
        if rho.dim() != self.dim() {
            return Err(Error::DimensionMismatch(format!(
                "observable dim {} vs density dim {}",
                self.dim(),
                rho.dim()
            )));
        }
        let m = rho.matrix();
        let mut acc = Complex64::default();
        for i in 0..self.dim() {
            for k in 0..self.dim() {
                acc += m[(i, k)] * self.mat[(k, i)];
            }
        }
        Ok(acc.re)
    }
}
