//! Random-projection tomography used to cross-check the direct readout.
//!
//! The check mirrors a lab validation run: reconstruct the state once with
//! the column-operator pipeline, then independently estimate the full
//! density matrix from batches of random two-mode projectors by linear
//! inversion, and compare the two.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::seq::SliceRandom;
use rand::Rng;
use rand_distr::{Distribution, Poisson};
use serde::{Deserialize, Serialize};

use crate::density::DensityMatrix;
use crate::error::{Error, Result};
use crate::linalg::{hermitian_eigen, CMatrix};
use crate::measure::plan::{build_full_plan, choose_reference};
use crate::measure::reconstruct::reconstruct;
use crate::measure::shot::{simulate_counts, NoiseMode, ShotModel, Source};
use crate::rng::{derive_rng, derive_seed};
use crate::sparse::SparseState;
use crate::state::StateVector;

/// Projective settings for tomography: the `d` basis projectors first, then
/// two-mode superpositions (|m> + e^{ia}|n>)/sqrt(2) with random phases.
/// Pairs (m, n) are drawn in shuffled full sweeps of all d(d-1)/2 pairs, and
/// each visit emits the two quadratures a and a + pi/2 so the pair's real
/// and imaginary parts stay jointly well conditioned no matter how the
/// phases land. A batch big enough to hold one sweep constrains every
/// density-matrix element; draw order and phases are deterministic per seed.
pub fn random_projector_settings(dim: usize, count: usize, seed: u64) -> Vec<SparseState> {
    let mut rng = derive_rng(seed, &[0]);
    let mut settings = Vec::with_capacity(count);
    for i in 0..dim.min(count) {
        settings.push(SparseState::basis(i as u32));
    }
    if dim < 2 {
        settings.truncate(count);
        return settings;
    }
    let mut pairs: Vec<(u32, u32)> = (0..dim as u32)
        .flat_map(|m| (m + 1..dim as u32).map(move |n| (m, n)))
        .collect();
    'fill: while settings.len() < count {
        pairs.shuffle(&mut rng);
        for &(m, n) in &pairs {
            let alpha = rng.gen_range(0.0..std::f64::consts::TAU);
            for quadrature in [alpha, alpha + std::f64::consts::FRAC_PI_2] {
                if settings.len() == count {
                    break 'fill;
                }
                settings.push(
                    SparseState::superposition(m, n, quadrature).expect("pair indices differ"),
                );
            }
        }
    }
    settings
}

fn pair_param_index(i: usize, k: usize, dim: usize) -> usize {
    debug_assert!(i < k && k < dim);
    let pair = i * (2 * dim - i - 1) / 2 + (k - i - 1);
    dim + 2 * pair
}

/// Least-squares density-matrix estimate from projector outcomes, followed
/// by a positive-semidefinite projection and trace renormalization.
///
/// `outcomes` can be raw counts, count rates, or frequencies: anything
/// proportional to the Born probabilities, since the final normalization
/// absorbs the overall scale. Rows are inverse-variance weighted for
/// counting noise, taking `max(outcome, 1)` as the variance of each
/// outcome; with probabilities or frequencies that reduces to an unweighted
/// fit. The solve runs over d^2 real parameters (diagonal plus off-diagonal
/// real and imaginary parts), so the settings must constrain all of them.
pub fn reconstruct_density_linear(
    dim: usize,
    settings: &[SparseState],
    outcomes: &[f64],
) -> Result<DensityMatrix> {
    if dim == 0 {
        return Err(Error::DimensionMismatch("empty mode space".into()));
    }
    if settings.len() != outcomes.len() {
        return Err(Error::DimensionMismatch(format!(
            "{} settings vs {} outcomes",
            settings.len(),
            outcomes.len()
        )));
    }
    let params = dim * dim;
    let mut normal = DMatrix::<f64>::zeros(params, params);
    let mut moment = DVector::<f64>::zeros(params);
    let mut row: Vec<(usize, f64)> = Vec::with_capacity(4);
    for (setting, &outcome) in settings.iter().zip(outcomes) {
        if !outcome.is_finite() {
            return Err(Error::InvalidConfig(format!("non-finite outcome {outcome}")));
        }
        row.clear();
        let entries = setting.entries();
        for &(i, si) in entries {
            let i = i as usize;
            if i >= dim {
                return Err(Error::IndexOutOfRange { index: i, dim });
            }
            row.push((i, si.norm_sqr()));
        }
        for (a, &(i, si)) in entries.iter().enumerate() {
            for &(k, sk) in entries.iter().skip(a + 1) {
                let cross = si.conj() * sk;
                let base = pair_param_index(i as usize, k as usize, dim);
                row.push((base, 2.0 * cross.re));
                row.push((base + 1, -2.0 * cross.im));
            }
        }
        let weight = 1.0 / outcome.max(1.0);
        for &(pa, va) in &row {
            moment[pa] += weight * va * outcome;
            for &(pb, vb) in &row {
                normal[(pa, pb)] += weight * va * vb;
            }
        }
    }

    let eig = normal.symmetric_eigen();
    let max_eig = eig.eigenvalues.iter().cloned().fold(0.0f64, f64::max);
    let min_eig = eig.eigenvalues.iter().cloned().fold(f64::INFINITY, f64::min);
    if !(max_eig > 0.0) || min_eig <= 1e-10 * max_eig {
        return Err(Error::RankDeficient);
    }
    let projected = eig.eigenvectors.transpose() * &moment;
    let mut solution = DVector::<f64>::zeros(params);
    for i in 0..params {
        solution += eig.eigenvectors.column(i) * (projected[i] / eig.eigenvalues[i]);
    }

    let mut rho = CMatrix::zeros(dim, dim);
    for i in 0..dim {
        rho[(i, i)] = Complex64::new(solution[i], 0.0);
        for k in i + 1..dim {
            let base = pair_param_index(i, k, dim);
            let z = Complex64::new(solution[base], solution[base + 1]);
            rho[(i, k)] = z;
            rho[(k, i)] = z.conj();
        }
    }

    let (values, vectors) = hermitian_eigen(&rho);
    let trace: f64 = values.iter().sum();
    if trace <= 1e-12 {
        return Err(Error::DegenerateState);
    }
    let spectrum = project_onto_simplex(values.iter().map(|&v| v / trace));
    let mut psd = CMatrix::zeros(dim, dim);
    for (i, &v) in spectrum.iter().enumerate() {
        if v == 0.0 {
            continue;
        }
        let col = vectors.column(i);
        let scale = Complex64::new(v, 0.0);
        for r in 0..dim {
            for c in 0..dim {
                psd[(r, c)] += scale * col[r] * col[c].conj();
            }
        }
    }
    let mut hermitized = (&psd + psd.adjoint()) * Complex64::new(0.5, 0.0);
    hermitized /= Complex64::new(hermitized.trace().re, 0.0);
    DensityMatrix::new(hermitized)
}

/// Euclidean projection of a descending-sorted spectrum onto the probability
/// simplex. Unlike clip-and-rescale this shifts the whole spectrum uniformly,
/// so a handful of small negative eigenvalues does not bleed weight out of
/// the dominant ones. A spectrum that is already on the simplex comes back
/// unchanged.
fn project_onto_simplex(values: impl Iterator<Item = f64>) -> Vec<f64> {
    let sorted: Vec<f64> = values.collect();
    let mut prefix = 0.0;
    let mut shift = 0.0;
    for (i, &v) in sorted.iter().enumerate() {
        prefix += v;
        let candidate = (prefix - 1.0) / (i + 1) as f64;
        if v - candidate > 0.0 {
            shift = candidate;
        }
    }
    sorted.iter().map(|&v| (v - shift).max(0.0)).collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CrossValidationOptions {
    pub batches: usize,
    pub settings_per_batch: usize,
    /// Counts per second a unit-probability tomography projector would see.
    pub tomography_rate: f64,
    /// Integration time per tomography setting, seconds.
    pub integration_time: f64,
    /// Shot model for the direct arm; its noise mode also selects exact or
    /// Poisson counts for the tomography arm.
    pub shot: ShotModel,
    pub seed: u64,
}

impl Default for CrossValidationOptions {
    fn default() -> Self {
        CrossValidationOptions {
            batches: 8,
            settings_per_batch: 1000,
            tomography_rate: 18_000.0,
            integration_time: 1.0,
            shot: ShotModel::default(),
            seed: 0,
        }
    }
}

impl CrossValidationOptions {
    pub fn validate(&self) -> Result<()> {
        if self.batches == 0 || self.settings_per_batch == 0 {
            return Err(Error::InvalidConfig(
                "batches and settings_per_batch must be at least 1".into(),
            ));
        }
        if !(self.tomography_rate > 0.0 && self.tomography_rate.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "tomography_rate must be positive, got {}",
                self.tomography_rate
            )));
        }
        if !(self.integration_time > 0.0 && self.integration_time.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "integration_time must be positive, got {}",
                self.integration_time
            )));
        }
        self.shot.validate()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BatchReport {
    /// sqrt(<psi_direct| rho_batch |psi_direct>).
    pub fidelity: f64,
    pub purity: f64,
    /// Mean relative gap between observed count rates and the rates the
    /// batch's density estimate predicts.
    pub rate_error: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CrossValidationReport {
    pub options: CrossValidationOptions,
    /// Fidelity of the direct-readout arm against the true state.
    pub direct_fidelity: f64,
    pub batches: Vec<BatchReport>,
    pub mean_fidelity: f64,
    pub fidelity_std: f64,
    pub mean_purity: f64,
    pub purity_std: f64,
    pub mean_rate_error: f64,
}

fn sample_std(xs: &[f64], mean: f64) -> f64 {
    if xs.len() < 2 {
        return 0.0;
    }
    (xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (xs.len() - 1) as f64).sqrt()
}

/// Runs both arms on the same state: direct column-operator readout, and
/// `batches` independent tomography batches scored against the direct
/// estimate.
pub fn cross_validate(
    state: &StateVector,
    options: &CrossValidationOptions,
) -> Result<CrossValidationReport> {
    options.validate()?;
    let dim = state.dim();

    let reference = choose_reference(&state.born_probabilities());
    let plan = build_full_plan(state.dims(), state.basis(), reference)?;
    let record = simulate_counts(
        Source::Pure(state),
        &plan,
        &options.shot,
        derive_seed(options.seed, &[0]),
    )?;
    let direct = reconstruct(&record, &plan)?;
    let direct_fidelity = direct.fidelity(state)?;

    let expected_counts =
        |p: f64| p * options.tomography_rate * options.integration_time;
    let mut batches = Vec::with_capacity(options.batches);
    for b in 0..options.batches {
        let settings = random_projector_settings(
            dim,
            options.settings_per_batch,
            derive_seed(options.seed, &[1, b as u64]),
        );
        let mut rng = derive_rng(options.seed, &[2, b as u64]);
        let counts: Vec<f64> = settings
            .iter()
            .map(|s| {
                let lambda = expected_counts(s.probability_pure(state.coefficients()));
                match options.shot.noise {
                    NoiseMode::Exact => lambda,
                    NoiseMode::Poisson => {
                        if lambda > 0.0 {
                            Poisson::new(lambda).expect("positive finite rate").sample(&mut rng)
                        } else {
                            0.0
                        }
                    }
                }
            })
            .collect();
        let rho = reconstruct_density_linear(dim, &settings, &counts)?;

        let observed_rates: Vec<f64> =
            counts.iter().map(|&n| n / options.integration_time).collect();
        let predicted: Vec<f64> =
            settings.iter().map(|s| s.probability_density(rho.matrix())).collect();
        let kappa = {
            let num: f64 =
                observed_rates.iter().zip(&predicted).map(|(&r, &p)| r * p).sum();
            let den: f64 = predicted.iter().map(|&p| p * p).sum();
            if den > 0.0 { num / den } else { 0.0 }
        };
        let mean_rate =
            observed_rates.iter().sum::<f64>() / observed_rates.len() as f64;
        let rate_error = if mean_rate > 0.0 {
            observed_rates
                .iter()
                .zip(&predicted)
                .map(|(&r, &p)| (r - kappa * p).abs())
                .sum::<f64>()
                / observed_rates.len() as f64
                / mean_rate
        } else {
            0.0
        };

        batches.push(BatchReport {
            fidelity: rho.fidelity_with_pure(&direct)?,
            purity: rho.purity(),
            rate_error,
        });
    }

    let fidelities: Vec<f64> = batches.iter().map(|b| b.fidelity).collect();
    let purities: Vec<f64> = batches.iter().map(|b| b.purity).collect();
    let mean_fidelity = fidelities.iter().sum::<f64>() / fidelities.len() as f64;
    let mean_purity = purities.iter().sum::<f64>() / purities.len() as f64;
    let mean_rate_error =
        batches.iter().map(|b| b.rate_error).sum::<f64>() / batches.len() as f64;
    Ok(CrossValidationReport {
        options: *options,
        direct_fidelity,
        batches,
        mean_fidelity,
        fidelity_std: sample_std(&fidelities, mean_fidelity),
        mean_purity,
        purity_std: sample_std(&purities, mean_purity),
        mean_rate_error,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::studies::demo::{generate_demo_state, DemoStateParams};
    use crate::studies::random_pure_state;
    use approx::assert_abs_diff_eq;

    #[test]
    fn settings_are_unit_norm_two_mode_and_deterministic() {
        let settings = random_projector_settings(4, 50, 9);
        assert_eq!(settings.len(), 50);
        for (i, s) in settings.iter().enumerate() {
            assert!(s.entries().len() <= 2);
            let norm: f64 = s.entries().iter().map(|(_, c)| c.norm_sqr()).sum();
            assert_abs_diff_eq!(norm, 1.0, epsilon = 1e-12);
            if i < 4 {
                assert_eq!(s.entries().len(), 1);
                assert_eq!(s.entries()[0].0, i as u32);
            }
        }
        assert_eq!(settings, random_projector_settings(4, 50, 9));
        assert!(random_projector_settings(4, 0, 9).is_empty());
        assert_eq!(random_projector_settings(6, 3, 9).len(), 3);
    }

    #[test]
    fn sweeps_cover_every_pair() {
        let dim = 5;
        let pair_count = dim * (dim - 1) / 2;
        let settings = random_projector_settings(dim, dim + 2 * pair_count, 4);
        let mut seen = vec![0usize; pair_count];
        for s in settings.iter().skip(dim) {
            let e = s.entries();
            let (m, n) = (e[0].0 as usize, e[1].0 as usize);
            seen[m * (2 * dim - m - 1) / 2 + (n - m - 1)] += 1;
        }
        assert!(seen.iter().all(|&c| c == 2), "pair coverage {seen:?}");
    }

    #[test]
    fn design_matrix_spans_the_density_space_at_d4() {
        // Verified through the solver itself: a full-rank design
        // reconstructs an arbitrary density matrix from exact frequencies.
        let mut rng = crate::rng::derive_rng(21, &[0]);
        let rho = crate::studies::random_density_matrix(4, 4, 0.5, &mut rng).unwrap();
        let settings = random_projector_settings(4, 1000, 5);
        let frequencies: Vec<f64> =
            settings.iter().map(|s| s.probability_density(rho.matrix())).collect();
        let estimate = reconstruct_density_linear(4, &settings, &frequencies).unwrap();
        let distance = crate::linalg::frobenius_distance(estimate.matrix(), rho.matrix());
        assert!(distance < 1e-9, "recovery distance {distance}");
    }

    #[test]
    fn exact_frequencies_recover_a_pure_state() {
        let psi = random_pure_state(4, &mut crate::rng::derive_rng(22, &[0]));
        let settings = random_projector_settings(4, 200, 6);
        let frequencies: Vec<f64> =
            settings.iter().map(|s| s.probability_pure(psi.coefficients())).collect();
        let rho = reconstruct_density_linear(4, &settings, &frequencies).unwrap();
        assert!(rho.fidelity_with_pure(&psi).unwrap() > 0.999);
        assert!(rho.purity() > 0.999);
    }

    #[test]
    fn uniform_frequencies_recover_the_maximally_mixed_state() {
        let dim = 4;
        let settings = random_projector_settings(dim, 100, 7);
        let uniform = DensityMatrix::maximally_mixed(dim);
        let frequencies: Vec<f64> =
            settings.iter().map(|s| s.probability_density(uniform.matrix())).collect();
        let rho = reconstruct_density_linear(dim, &settings, &frequencies).unwrap();
        let distance = crate::linalg::frobenius_distance(rho.matrix(), uniform.matrix());
        assert!(distance < 1e-6, "distance from I/d: {distance}");
    }

    #[test]
    fn uncovered_pairs_are_reported_as_rank_deficient() {
        let settings: Vec<SparseState> = (0..4).map(SparseState::basis).collect();
        let frequencies = vec![0.25; 4];
        assert!(matches!(
            reconstruct_density_linear(4, &settings, &frequencies),
            Err(Error::RankDeficient)
        ));
    }

    #[test]
    fn mismatched_inputs_are_rejected() {
        let settings = random_projector_settings(4, 10, 8);
        assert!(reconstruct_density_linear(4, &settings, &[0.1; 9]).is_err());
        assert!(reconstruct_density_linear(2, &settings, &[0.1; 10]).is_err());
    }

    #[test]
    fn exact_cross_validation_is_a_clean_round_trip() {
        let state = generate_demo_state(&DemoStateParams {
            l_max: 1,
            k_max: 0,
            ..DemoStateParams::default()
        })
        .unwrap();
        let options = CrossValidationOptions {
            batches: 3,
            settings_per_batch: 120,
            shot: ShotModel::exact(),
            ..CrossValidationOptions::default()
        };
        let report = cross_validate(&state, &options).unwrap();
        assert!(report.direct_fidelity > 1.0 - 1e-10);
        assert_eq!(report.batches.len(), 3);
        for batch in &report.batches {
            assert!(batch.fidelity > 0.999, "batch fidelity {}", batch.fidelity);
            assert!(batch.purity > 0.999, "batch purity {}", batch.purity);
            assert!(batch.rate_error < 1e-6, "rate error {}", batch.rate_error);
        }
    }

    #[test]
    fn poisson_cross_validation_tracks_the_truth_with_spread() {
        let state = generate_demo_state(&DemoStateParams::five_mode_subset()).unwrap();
        let options =
            CrossValidationOptions { batches: 8, seed: 2, ..CrossValidationOptions::default() };
        let report = cross_validate(&state, &options).unwrap();
        assert!(report.mean_fidelity > 0.97, "mean fidelity {}", report.mean_fidelity);
        assert!(report.mean_purity > 0.9, "mean purity {}", report.mean_purity);
        assert!(report.fidelity_std < 0.05);
        assert!(report.mean_rate_error > 0.0);
        let rerun = cross_validate(&state, &options).unwrap();
        assert_eq!(report, rerun);
    }

    #[test]
    fn rate_error_shrinks_with_longer_integration() {
        let state = generate_demo_state(&DemoStateParams::five_mode_subset()).unwrap();
        let base = CrossValidationOptions {
            batches: 2,
            settings_per_batch: 700,
            seed: 3,
            ..CrossValidationOptions::default()
        };
        let short = cross_validate(&state, &base).unwrap();
        let long = cross_validate(
            &state,
            &CrossValidationOptions { integration_time: 25.0, ..base },
        )
        .unwrap();
        assert!(
            long.mean_rate_error < short.mean_rate_error,
            "rate error did not shrink: {} vs {}",
            long.mean_rate_error,
            short.mean_rate_error
        );
    }
}
