//! Weighted projector decompositions of column operators.
//!
//! The column operator C_j = |a><j| is not Hermitian, so it cannot be
//! measured as a single observable. It can be written as a finite sum
//! C_j = sum_q w_q P_q of rank-one projectors P_q = |s_q><s_q| with complex
//! weights, and each projector expectation is a plain detection probability.
//!
//! With the two-mode directions s_q = (|a> + e^{i th_q} |j>)/sqrt(2) and
//! th_q = 2 pi q / N, the projector expansion of P_q carries phase factors
//! e^{i n th_q} with n in {-1, 0, +1} on the |a><j|, diagonal, and |j><a|
//! parts. Choosing weights w_q = (2/N) e^{i th_q} makes the sum over q kill
//! every part except |a><j| as long as N >= 3, which gives the three-term
//! single-system recipe. For a product target |a1 a2><j1 j2| the same idea
//! needs the joint phases n1 + n2 in {-2..2} to cancel except at n = -2, so
//! the phase step must divide the circle five ways: factors
//! s_{m,q} = (|a_m> + e^{i 2 pi q / 5} |j_m>)/sqrt(2) with weights
//! w_q = (4/5) e^{i 4 pi q / 5}. Every weight set sums to zero, which is why
//! measured projector outcomes can be combined into an expectation that is
//! insensitive to a constant background.

pub mod de;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::f64::consts::TAU;

use crate::basis::Dims;
use crate::density::DensityMatrix;
use crate::error::{Error, Result};
use crate::linalg::CMatrix;
use crate::sparse::{joint_entries, SparseState};
use crate::state::StateVector;

/// The non-Hermitian operator |a><j| on a mode space of the given shape,
/// with `reference` = a and `target` = j as flat indices.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ColumnOperator {
    dims: Dims,
    reference: usize,
    target: usize,
}

impl ColumnOperator {
    pub fn new(dims: Dims, reference: usize, target: usize) -> Result<Self> {
        let total = dims.total();
        if total == 0 {
            return Err(Error::DimensionMismatch("empty mode space".into()));
        }
        for index in [reference, target] {
            if index >= total {
                return Err(Error::IndexOutOfRange { index, dim: total });
            }
        }
        Ok(ColumnOperator { dims, reference, target })
    }

    pub fn dims(&self) -> Dims {
        self.dims
    }

    pub fn reference(&self) -> usize {
        self.reference
    }

    pub fn target(&self) -> usize {
        self.target
    }

    /// Dense |a><j|: a single 1 in row a, column j.
    pub fn to_matrix(&self) -> CMatrix {
        let total = self.dims.total();
        let mut mat = CMatrix::zeros(total, total);
        mat[(self.reference, self.target)] = Complex64::new(1.0, 0.0);
        mat
    }

    /// <psi| C_j |psi> = <psi|a> c_j = conj(c_a) c_j.
    pub fn expectation_state(&self, state: &StateVector) -> Result<Complex64> {
        if state.dim() != self.dims.total() {
            return Err(Error::DimensionMismatch(format!(
                "operator dim {} vs state dim {}",
                self.dims.total(),
                state.dim()
            )));
        }
        Ok(state.coefficient(self.reference).conj() * state.coefficient(self.target))
    }

    /// Tr(rho C_j) = <j|rho|a>.
    pub fn expectation_density(&self, rho: &DensityMatrix) -> Result<Complex64> {
        if rho.dim() != self.dims.total() {
            return Err(Error::DimensionMismatch(format!(
                "operator dim {} vs density dim {}",
                self.dims.total(),
                rho.dim()
            )));
        }
        Ok(rho.element(self.target, self.reference))
    }
}

/// One weighted projector. `factors` holds one unit direction per subsystem;
/// the projector is onto their tensor product.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProjectorTerm {
    pub weight: Complex64,
    pub factors: Vec<SparseState>,
}

impl ProjectorTerm {
    /// Direction entries as flat joint indices.
    pub fn joint_entries(&self, dims: Dims) -> Vec<(usize, Complex64)> {
        joint_entries(&self.factors, dims.d2)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProjectorDecomposition {
    dims: Dims,
    reference: usize,
    target: usize,
    terms: Vec<ProjectorTerm>,
    residual: f64,
}

impl ProjectorDecomposition {
    fn assemble(op: ColumnOperator, terms: Vec<ProjectorTerm>) -> Self {
        let residual = residual_against(&terms, &op);
        ProjectorDecomposition {
            dims: op.dims(),
            reference: op.reference(),
            target: op.target(),
            terms,
            residual,
        }
    }

    pub fn dims(&self) -> Dims {
        self.dims
    }

    pub fn reference(&self) -> usize {
        self.reference
    }

    pub fn target(&self) -> usize {
        self.target
    }

    pub fn operator(&self) -> ColumnOperator {
        ColumnOperator { dims: self.dims, reference: self.reference, target: self.target }
    }

    pub fn terms(&self) -> &[ProjectorTerm] {
        &self.terms
    }

    /// Frobenius distance between sum_q w_q P_q and |a><j|, recorded at
    /// construction.
    pub fn residual(&self) -> f64 {
        self.residual
    }

    pub fn weight_sum(&self) -> Complex64 {
        self.terms.iter().map(|t| t.weight).sum()
    }
}

/// Frobenius norm of sum_q w_q |s_q><s_q| - |a><j|.
///
/// All terms and the target vanish outside the union of the direction
/// supports, so the difference is evaluated on that subspace only; the value
/// is exact even when the ambient joint dimension is enormous.
pub fn residual_against(terms: &[ProjectorTerm], op: &ColumnOperator) -> f64 {
    let mut positions: BTreeMap<usize, usize> = BTreeMap::new();
    let slot = |positions: &mut BTreeMap<usize, usize>, index: usize| {
        let next = positions.len();
        *positions.entry(index).or_insert(next)
    };
    let entries: Vec<Vec<(usize, Complex64)>> =
        terms.iter().map(|t| t.joint_entries(op.dims())).collect();
    for term in &entries {
        for &(i, _) in term {
            slot(&mut positions, i);
        }
    }
    slot(&mut positions, op.reference());
    slot(&mut positions, op.target());
    let n = positions.len();
    let mut acc = vec![Complex64::default(); n * n];
    for (term, entry) in terms.iter().zip(&entries) {
        for &(i, ci) in entry {
            let row = positions[&i];
            for &(k, ck) in entry {
                acc[row * n + positions[&k]] += term.weight * ci * ck.conj();
            }
        }
    }
    acc[positions[&op.reference()] * n + positions[&op.target()]] -= Complex64::new(1.0, 0.0);
    acc.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Four-projector decomposition of |0><1| on a qubit, the Pauli route:
/// |0><1| = (X + iY)/2 expanded over the X and Y eigenprojectors.
pub fn pauli_qubit() -> ProjectorDecomposition {
    use std::f64::consts::{FRAC_PI_2, PI};
    let op = ColumnOperator::new(Dims::single(2), 0, 1).expect("qubit operator");
    let term = |re: f64, im: f64, phase: f64| ProjectorTerm {
        weight: Complex64::new(re, im),
        factors: vec![SparseState::superposition(0, 1, phase).expect("qubit superposition")],
    };
    let terms = vec![
        term(0.5, 0.0, 0.0),
        term(-0.5, 0.0, PI),
        term(0.0, 0.5, FRAC_PI_2),
        term(0.0, -0.5, -FRAC_PI_2),
    ];
    ProjectorDecomposition::assemble(op, terms)
}

/// Three-projector decomposition of |a><j| on a single system, a != j.
pub fn three_projector(dim: usize, reference: usize, target: usize) -> Result<ProjectorDecomposition> {
    let op = ColumnOperator::new(Dims::single(dim), reference, target)?;
    if reference == target {
        return Err(Error::InvalidConfig(
            "three-projector form needs target distinct from reference".into(),
        ));
    }
    let terms = (0..3)
        .map(|q| {
            let phase = TAU * q as f64 / 3.0;
            Ok(ProjectorTerm {
                weight: Complex64::from_polar(2.0 / 3.0, phase),
                factors: vec![SparseState::superposition(
                    reference as u32,
                    target as u32,
                    phase,
                )?],
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ProjectorDecomposition::assemble(op, terms))
}

/// Five-projector decomposition of |a1 a2><j1 j2| when both components
/// differ from the reference. Each term measures a product of local
/// two-mode superpositions, so no joint (entangled) projector is needed.
pub fn five_projector_joint(
    dims: Dims,
    reference: (usize, usize),
    target: (usize, usize),
) -> Result<ProjectorDecomposition> {
    let (a1, a2) = reference;
    let (j1, j2) = target;
    if !dims.is_bipartite() {
        return Err(Error::InvalidConfig("five-projector form needs a bipartite shape".into()));
    }
    if a1 >= dims.d1 || j1 >= dims.d1 || a2 >= dims.d2 || j2 >= dims.d2 {
        return Err(Error::IndexOutOfRange {
            index: a1.max(j1).max(a2).max(j2),
            dim: dims.d1.max(dims.d2),
        });
    }
    if j1 == a1 || j2 == a2 {
        return Err(Error::InvalidConfig(
            "five-projector form needs both target components off the reference".into(),
        ));
    }
    let op = ColumnOperator::new(dims, dims.flatten(a1, a2), dims.flatten(j1, j2))?;
    let terms = (0..5)
        .map(|q| {
            let phase = TAU * q as f64 / 5.0;
            Ok(ProjectorTerm {
                weight: Complex64::from_polar(4.0 / 5.0, 2.0 * phase),
                factors: vec![
                    SparseState::superposition(a1 as u32, j1 as u32, phase)?,
                    SparseState::superposition(a2 as u32, j2 as u32, phase)?,
                ],
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ProjectorDecomposition::assemble(op, terms))
}

/// Three-projector decomposition of a joint target that matches the
/// reference on exactly one subsystem: that subsystem is pinned to its
/// reference mode and the other carries the usual three-phase cycle.
pub fn fixed_subsystem_joint(
    dims: Dims,
    reference: (usize, usize),
    target: (usize, usize),
) -> Result<ProjectorDecomposition> {
    let (a1, a2) = reference;
    let (j1, j2) = target;
    if !dims.is_bipartite() {
        return Err(Error::InvalidConfig("joint form needs a bipartite shape".into()));
    }
    if (j1 == a1) == (j2 == a2) {
        return Err(Error::InvalidConfig(
            "fixed-subsystem form needs the target to match the reference on exactly one subsystem"
                .into(),
        ));
    }
    let op = ColumnOperator::new(dims, dims.flatten(a1, a2), dims.flatten(j1, j2))?;
    let terms = (0..3)
        .map(|q| {
            let phase = TAU * q as f64 / 3.0;
            let factors = if j1 == a1 {
                vec![
                    SparseState::basis(a1 as u32),
                    SparseState::superposition(a2 as u32, j2 as u32, phase)?,
                ]
            } else {
                vec![
                    SparseState::superposition(a1 as u32, j1 as u32, phase)?,
                    SparseState::basis(a2 as u32),
                ]
            };
            Ok(ProjectorTerm { weight: Complex64::from_polar(2.0 / 3.0, phase), factors })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ProjectorDecomposition::assemble(op, terms))
}

/// The target equal to the reference needs a single projector: |a><a| with
/// weight one.
pub fn reference_projector(dims: Dims, reference: usize) -> Result<ProjectorDecomposition> {
    let op = ColumnOperator::new(dims, reference, reference)?;
    let factors = if dims.is_bipartite() {
        let (a1, a2) = dims.split(reference);
        vec![SparseState::basis(a1 as u32), SparseState::basis(a2 as u32)]
    } else {
        vec![SparseState::basis(reference as u32)]
    };
    let terms = vec![ProjectorTerm { weight: Complex64::new(1.0, 0.0), factors }];
    Ok(ProjectorDecomposition::assemble(op, terms))
}

/// Picks the right analytic decomposition for any column operator: one term
/// on the reference itself, three when the target moves on one subsystem
/// only (or on a single system), five when both subsystems move.
pub fn decompose_column(op: &ColumnOperator) -> Result<ProjectorDecomposition> {
    let dims = op.dims();
    if op.target() == op.reference() {
        return reference_projector(dims, op.reference());
    }
    if !dims.is_bipartite() {
        return three_projector(dims.total(), op.reference(), op.target());
    }
    let a = dims.split(op.reference());
    let j = dims.split(op.target());
    if j.0 != a.0 && j.1 != a.1 {
        five_projector_joint(dims, a, j)
    } else {
        fixed_subsystem_joint(dims, a, j)
    }
}
