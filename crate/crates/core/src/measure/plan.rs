//! Measurement plans: every projector setting needed to read out a full
//! state, deduplicated across coefficients.
//!
//! A plan has one coefficient block per flat target index. The reference
//! coefficient costs a single setting, targets that move on one subsystem
//! cost three, and joint moves cost five, so a D x D bipartite plan needs
//! 5 (D-1)^2 + 6 (D-1) + 1 distinct settings. Settings are shared by exact
//! bit pattern; the monitor setting, the projector onto the reference mode
//! itself, is measured at the head of every block to calibrate slow source
//! drift away.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::collections::HashMap;

use crate::basis::{Basis, Dims};
use crate::decomp::{decompose_column, ColumnOperator};
use crate::error::{Error, Result};
use crate::linalg::CMatrix;
use crate::sparse::{joint_entries, SparseState};

/// A projector direction to set on the apparatus, one factor per subsystem.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Setting {
    pub factors: Vec<SparseState>,
}

impl Setting {
    pub fn joint_entries(&self, dims: Dims) -> Vec<(usize, Complex64)> {
        joint_entries(&self.factors, dims.d2)
    }

    /// <s|psi> against flat joint coefficients.
    pub fn amplitude(&self, psi: &[Complex64], dims: Dims) -> Complex64 {
        self.joint_entries(dims)
            .iter()
            .map(|&(i, c)| c.conj() * psi[i])
            .sum()
    }

    pub fn probability_pure(&self, psi: &[Complex64], dims: Dims) -> f64 {
        self.amplitude(psi, dims).norm_sqr()
    }

    pub fn probability_density(&self, rho: &CMatrix, dims: Dims) -> f64 {
        let entries = self.joint_entries(dims);
        let mut acc = Complex64::default();
        for &(i, ci) in &entries {
            for &(k, ck) in &entries {
                acc += ci.conj() * rho[(i, k)] * ck;
            }
        }
        acc.re.clamp(0.0, 1.0)
    }

    fn bit_key(&self) -> Vec<u64> {
        let mut key = Vec::with_capacity(1 + self.factors.len() * 7);
        key.push(self.factors.len() as u64);
        for factor in &self.factors {
            factor.bit_key(&mut key);
        }
        key
    }
}

/// One weighted reference to a shared setting.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PlanTerm {
    pub setting: u32,
    pub weight: Complex64,
}

/// The measurements backing one state coefficient.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PlanCoefficient {
    pub target: usize,
    /// Diagonal blocks integrate longer; see [`crate::ShotModel`].
    pub diagonal: bool,
    pub terms: Vec<PlanTerm>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MeasurementPlan {
    pub dims: Dims,
    pub basis: Basis,
    pub reference: usize,
    pub settings: Vec<Setting>,
    /// Setting measured at the head of every block: the projector onto the
    /// reference mode.
    pub monitor: u32,
    pub coefficients: Vec<PlanCoefficient>,
}

impl MeasurementPlan {
    pub fn setting_count(&self) -> usize {
        self.settings.len()
    }

    pub fn setting(&self, id: u32) -> &Setting {
        &self.settings[id as usize]
    }
}

/// Picks the reference mode: the index of the largest probability, lowest
/// index on exact ties.
pub fn choose_reference(probabilities: &[f64]) -> usize {
    let mut best = 0;
    for (i, &p) in probabilities.iter().enumerate().skip(1) {
        if p > probabilities[best] {
            best = i;
        }
    }
    best
}

/// Whether a coefficient block gets the long integration time: the reference
/// itself always does, and bipartite targets do when the basis pairs them on
/// the correlated diagonal.
fn is_diagonal(dims: Dims, basis: Basis, reference: usize, target: usize) -> bool {
    if target == reference {
        return true;
    }
    if !dims.is_bipartite() {
        return false;
    }
    let (j1, j2) = dims.split(target);
    basis.diagonal_pair(j1, j2)
}

/// Builds the complete plan for every coefficient of a state of the given
/// shape, measured against the given reference mode.
pub fn build_full_plan(dims: Dims, basis: Basis, reference: usize) -> Result<MeasurementPlan> {
    let total = dims.total();
    if total == 0 {
        return Err(Error::DimensionMismatch("empty mode space".into()));
    }
    if reference >= total {
        return Err(Error::IndexOutOfRange { index: reference, dim: total });
    }
    if let Some(m) = basis.mode_count() {
        let per_subsystem_ok = m == dims.d1 && (!dims.is_bipartite() || m == dims.d2);
        if !per_subsystem_ok {
            return Err(Error::InvalidBasis(format!(
                "basis has {m} modes per subsystem, shape is {}x{}",
                dims.d1, dims.d2
            )));
        }
    }

    let mut settings: Vec<Setting> = Vec::new();
    let mut ids: HashMap<Vec<u64>, u32> = HashMap::new();
    let mut coefficients = Vec::with_capacity(total);
    for target in 0..total {
        let dec = decompose_column(&ColumnOperator::new(dims, reference, target)?)?;
        let terms = dec
            .terms()
            .iter()
            .map(|term| {
                let setting = Setting { factors: term.factors.clone() };
                let id = match ids.entry(setting.bit_key()) {
                    std::collections::hash_map::Entry::Occupied(e) => *e.get(),
                    std::collections::hash_map::Entry::Vacant(e) => {
                        let id = settings.len() as u32;
                        settings.push(setting);
                        e.insert(id);
                        id
                    }
                };
                PlanTerm { setting: id, weight: term.weight }
            })
            .collect();
        coefficients.push(PlanCoefficient {
            target,
            diagonal: is_diagonal(dims, basis, reference, target),
            terms,
        });
    }
    let monitor = coefficients[reference].terms[0].setting;
    Ok(MeasurementPlan { dims, basis, reference, settings, monitor, coefficients })
}

/// Closed-form setting count of a full plan.
pub fn expected_setting_count(dims: Dims) -> usize {
    let (d1, d2) = (dims.d1, dims.d2);
    5 * (d1 - 1) * (d2 - 1) + 3 * (d1 - 1) + 3 * (d2 - 1) + 1
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::state::StateVector;
    use approx::assert_abs_diff_eq;

    #[test]
    fn choose_reference_breaks_ties_low() {
        assert_eq!(choose_reference(&[0.2, 0.5, 0.5]), 1);
        assert_eq!(choose_reference(&[0.7]), 0);
        assert_eq!(choose_reference(&[0.1, 0.0, 0.9]), 2);
    }

    #[test]
    fn setting_counts_match_the_closed_form() {
        for (d1, d2) in [(1, 1), (2, 1), (5, 1), (2, 2), (3, 4), (5, 5)] {
            let dims = Dims { d1, d2 };
            let plan = build_full_plan(dims, Basis::Flat, 0).unwrap();
            assert_eq!(plan.setting_count(), expected_setting_count(dims), "shape {d1}x{d2}");
            assert_eq!(plan.coefficients.len(), dims.total());
        }
    }

    #[test]
    fn interned_settings_are_pairwise_distinct() {
        let plan = build_full_plan(Dims::bipartite(3, 3), Basis::Flat, 4).unwrap();
        for (i, a) in plan.settings.iter().enumerate() {
            for b in plan.settings.iter().skip(i + 1) {
                assert_ne!(a.bit_key(), b.bit_key());
            }
        }
    }

    #[test]
    fn term_counts_and_weight_sums_per_block() {
        let dims = Dims::bipartite(2, 2);
        let plan = build_full_plan(dims, Basis::Flat, 0).unwrap();
        let lens: Vec<usize> = plan.coefficients.iter().map(|c| c.terms.len()).collect();
        assert_eq!(lens, vec![1, 3, 3, 5]);
        for coeff in &plan.coefficients {
            let sum: Complex64 = coeff.terms.iter().map(|t| t.weight).sum();
            if coeff.target == plan.reference {
                assert_abs_diff_eq!(sum.re, 1.0, epsilon = 1e-15);
                assert_abs_diff_eq!(sum.im, 0.0, epsilon = 1e-15);
            } else {
                assert!(sum.norm() < 1e-15);
            }
        }
    }

    #[test]
    fn monitor_is_the_reference_projector() {
        let plan = build_full_plan(Dims::bipartite(3, 3), Basis::Flat, 4).unwrap();
        let monitor = plan.setting(plan.monitor);
        assert_eq!(monitor.factors.len(), 2);
        assert_eq!(monitor.factors[0], SparseState::basis(1));
        assert_eq!(monitor.factors[1], SparseState::basis(1));
        assert_eq!(plan.coefficients[4].terms[0].setting, plan.monitor);
    }

    #[test]
    fn diagonal_flags_follow_the_basis() {
        let basis = Basis::OamWalsh { l_max: 1, k_max: 0 };
        let dims = Dims::bipartite(3, 3);
        let plan = build_full_plan(dims, basis, dims.flatten(1, 1)).unwrap();
        let idx = |l1: i64, l2: i64| {
            dims.flatten(
                basis.index_of(l1, 0).unwrap(),
                basis.index_of(l2, 0).unwrap(),
            )
        };
        assert!(plan.coefficients[idx(1, -1)].diagonal);
        assert!(plan.coefficients[idx(-1, 1)].diagonal);
        assert!(plan.coefficients[idx(0, 0)].diagonal);
        assert!(!plan.coefficients[idx(1, 1)].diagonal);
        assert!(!plan.coefficients[idx(1, 0)].diagonal);

        let flat = build_full_plan(Dims::single(4), Basis::Flat, 2).unwrap();
        let diagonals: Vec<bool> = flat.coefficients.iter().map(|c| c.diagonal).collect();
        assert_eq!(diagonals, vec![false, false, true, false]);
    }

    #[test]
    fn plan_terms_reproduce_column_expectations() {
        // The weighted sum of setting probabilities must equal
        // conj(c_a) c_j for every coefficient block.
        let mut rng = crate::rng::derive_rng(17, &[3]);
        let dims = Dims::bipartite(3, 3);
        let psi = crate::studies::random_bipartite_state(3, 3, &mut rng);
        let plan = build_full_plan(dims, Basis::Flat, 2).unwrap();
        for coeff in &plan.coefficients {
            let mut combined = Complex64::default();
            for term in &coeff.terms {
                let p = plan.setting(term.setting).probability_pure(psi.coefficients(), dims);
                combined += term.weight * p;
            }
            let expected = psi.coefficient(2).conj() * psi.coefficient(coeff.target);
            assert_abs_diff_eq!(combined.re, expected.re, epsilon = 1e-13);
            assert_abs_diff_eq!(combined.im, expected.im, epsilon = 1e-13);
        }
    }

    #[test]
    fn plan_serde_round_trip() {
        let plan = build_full_plan(Dims::bipartite(2, 3), Basis::Flat, 1).unwrap();
        let json = serde_json::to_string(&plan).unwrap();
        let back: MeasurementPlan = serde_json::from_str(&json).unwrap();
        assert_eq!(plan, back);
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(build_full_plan(Dims::single(4), Basis::Flat, 4).is_err());
        let basis = Basis::OamWalsh { l_max: 1, k_max: 0 };
        assert!(build_full_plan(Dims::bipartite(3, 4), basis, 0).is_err());
        assert!(build_full_plan(Dims::single(5), basis, 0).is_err());
    }

    #[test]
    fn probability_helpers_match_dense_math() {
        let psi = StateVector::normalized(
            vec![
                Complex64::new(0.5, 0.1),
                Complex64::new(-0.2, 0.4),
                Complex64::new(0.1, 0.0),
                Complex64::new(0.3, -0.6),
            ],
            0,
        )
        .unwrap();
        let dims = Dims::bipartite(2, 2);
        let setting = Setting {
            factors: vec![
                SparseState::superposition(0, 1, 0.3).unwrap(),
                SparseState::superposition(0, 1, -1.1).unwrap(),
            ],
        };
        let dense: Vec<Complex64> = {
            let f1 = setting.factors[0].to_dense(2);
            let f2 = setting.factors[1].to_dense(2);
            (0..4).map(|i| f1[i / 2] * f2[i % 2]).collect()
        };
        let amp_expected: Complex64 =
            dense.iter().zip(psi.coefficients()).map(|(s, c)| s.conj() * c).sum();
        let p = setting.probability_pure(psi.coefficients(), dims);
        assert_abs_diff_eq!(p, amp_expected.norm_sqr(), epsilon = 1e-14);
        let rho = crate::density::DensityMatrix::from_pure(&psi);
        assert_abs_diff_eq!(
            setting.probability_density(rho.matrix(), dims),
            p,
            epsilon = 1e-14
        );
    }
}
