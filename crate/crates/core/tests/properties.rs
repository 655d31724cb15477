//! Randomized invariants. Each test states a law the library must satisfy on
//! any input, then drives it with random instances: round trips stay exact,
//! noise only ever degrades gracefully, plans never alias distinct
//! projectors, and reconstructions never produce an object that violates the
//! density-matrix contract.

use std::collections::HashSet;

use num_complex::Complex64;
use proptest::prelude::*;
use rand::Rng;
use qdirect_core::rng::{derive_rng, derive_seed};
use qdirect_core::state::normalize_in_place;
use qdirect_core::{
    build_full_plan, choose_reference, generate_demo_state, random_bipartite_state,
    random_density_matrix, random_projector_settings, random_pure_state, reconstruct,
    reconstruct_density_linear, run_mixed_state_study, simulate_counts, Basis, DemoStateParams,
    Dims, Error, HermitianObservable, MixedStudyConfig, ShotModel, Source, SparseState,
};

#[test]
fn exact_round_trips_are_lossless_across_the_small_shape_grid() {
    for d1 in 2..=6usize {
        for d2 in 2..=6usize {
            for trial in 0..4u64 {
                let mut rng = derive_rng(400, &[d1 as u64, d2 as u64, trial]);
                let psi = random_bipartite_state(d1, d2, &mut rng);
                let reference = choose_reference(&psi.born_probabilities());
                let plan =
                    build_full_plan(Dims::bipartite(d1, d2), Basis::Flat, reference).unwrap();
                let record =
                    simulate_counts(Source::Pure(&psi), &plan, &ShotModel::exact(), 0).unwrap();
                let estimate = reconstruct(&record, &plan).unwrap();
                let fidelity = estimate.fidelity(&psi).unwrap();
                assert!(
                    fidelity > 1.0 - 1e-10,
                    "{d1}x{d2} trial {trial}: fidelity {fidelity}"
                );
            }
        }
    }
}

#[test]
fn median_fidelity_never_drops_as_counts_grow() {
    let psi = generate_demo_state(&DemoStateParams::five_mode_subset()).unwrap();
    let reference = choose_reference(&psi.born_probabilities());
    let plan = build_full_plan(psi.dims(), psi.basis(), reference).unwrap();
    let mut medians = Vec::new();
    for (arm, rate) in [90.0, 900.0, 9000.0].into_iter().enumerate() {
        let shot = ShotModel { reference_rate: rate, ..ShotModel::default() };
        let mut fidelities: Vec<f64> = (0..50u64)
            .map(|seed| {
                let record = simulate_counts(
                    Source::Pure(&psi),
                    &plan,
                    &shot,
                    derive_seed(410, &[arm as u64, seed]),
                )
                .unwrap();
                reconstruct(&record, &plan).unwrap().fidelity(&psi).unwrap()
            })
            .collect();
        fidelities.sort_by(|a, b| a.total_cmp(b));
        medians.push(0.5 * (fidelities[24] + fidelities[25]));
    }
    assert!(
        medians[0] <= medians[1] && medians[1] <= medians[2],
        "medians not monotone across count decades: {medians:?}"
    );
}

#[test]
fn rank_one_studies_are_exact_at_every_dimension() {
    let config = MixedStudyConfig {
        dims: vec![4, 16, 64],
        ranks: vec![1],
        purities: vec![1.0],
        trials: 20,
        fidelity_threshold: 0.99,
        seed: 420,
    };
    let result = run_mixed_state_study(&config).unwrap();
    for cell in &result.cells {
        assert!(cell.feasible);
        for (i, f) in cell.fidelities.iter().enumerate() {
            assert!(
                *f > 1.0 - 1e-10,
                "d {} trial {i}: fidelity {f}",
                cell.dim
            );
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn exact_mixed_records_reconstruct_the_reference_column(
        seed in any::<u64>(),
        dim in 3usize..=8,
        rank in 2usize..=3,
    ) {
        let mut rng = derive_rng(430, &[seed]);
        let purity = 0.5 * (1.0 / rank as f64 + 1.0);
        let rho = random_density_matrix(dim, rank, purity, &mut rng).unwrap();
        let reference = choose_reference(&rho.diagonal());
        let plan = build_full_plan(Dims::single(dim), Basis::Flat, reference).unwrap();
        let record = simulate_counts(Source::Mixed(&rho), &plan, &ShotModel::exact(), 0).unwrap();
        let estimate = reconstruct(&record, &plan).unwrap();
        let mut column: Vec<Complex64> =
            (0..dim).map(|j| rho.element(j, reference)).collect();
        normalize_in_place(&mut column, reference).unwrap();
        for (j, (got, want)) in estimate.coefficients().iter().zip(&column).enumerate() {
            prop_assert!(
                (got - want).norm() < 1e-10,
                "coefficient {j}: {got} vs {want}"
            );
        }
    }

    #[test]
    fn plans_cover_every_coefficient_once_and_never_alias_settings(
        d1 in 2usize..=5,
        d2 in 1usize..=5,
        reference_pick in any::<u64>(),
    ) {
        let dims = if d2 == 1 { Dims::single(d1 * 3) } else { Dims::bipartite(d1, d2) };
        let reference = (reference_pick % dims.total() as u64) as usize;
        let plan = build_full_plan(dims, Basis::Flat, reference).unwrap();

        prop_assert_eq!(plan.coefficients.len(), dims.total());
        for (i, coefficient) in plan.coefficients.iter().enumerate() {
            prop_assert_eq!(coefficient.target, i);
            for term in &coefficient.terms {
                prop_assert!((term.setting as usize) < plan.setting_count());
            }
        }
        prop_assert!((plan.monitor as usize) < plan.setting_count());

        let mut seen = HashSet::new();
        for id in 0..plan.setting_count() {
            let setting = plan.setting(id as u32);
            let mut key = vec![setting.factors.len() as u64];
            for factor in &setting.factors {
                factor.bit_key(&mut key);
            }
            prop_assert!(seen.insert(key), "setting {id} duplicates another direction");
        }
    }

    #[test]
    fn linear_reconstruction_yields_a_valid_density_or_a_typed_error(
        seed in any::<u64>(),
        dim in 2usize..=6,
        scale in 1.0f64..200.0,
    ) {
        let count = dim * dim * 3;
        let settings = random_projector_settings(dim, count, derive_seed(440, &[seed]));
        let mut rng = derive_rng(441, &[seed]);
        let outcomes: Vec<f64> = (0..count).map(|_| rng.gen_range(0.0..scale)).collect();
        match reconstruct_density_linear(dim, &settings, &outcomes) {
            Ok(rho) => {
                let trace: f64 = (0..dim).map(|i| rho.element(i, i).re).sum();
                prop_assert!((trace - 1.0).abs() < 1e-9);
                prop_assert!(rho.purity() <= 1.0 + 1e-9);
            }
            Err(Error::RankDeficient | Error::DegenerateState) => {}
            Err(other) => prop_assert!(false, "unexpected error {other:?}"),
        }
    }

    #[test]
    fn orthonormal_projector_expectations_sum_to_one(
        seed in any::<u64>(),
        dim in 2usize..=8,
    ) {
        let mut rng = derive_rng(450, &[seed]);
        let rank = 1 + (seed % dim as u64) as usize;
        let purity = 0.5 * (1.0 / rank as f64 + 1.0);
        let rho = random_density_matrix(dim, rank, purity, &mut rng).unwrap();
        let psi = random_pure_state(dim, &mut rng);
        let unitary = qdirect_core::linalg::random_unitary(dim, &mut rng);
        let mut density_total = 0.0;
        let mut pure_total = 0.0;
        for col in 0..dim {
            let column: Vec<Complex64> = (0..dim).map(|r| unitary[(r, col)]).collect();
            let direction = SparseState::from_dense(&column).unwrap();
            let projector = HermitianObservable::projector(&direction, dim).unwrap();
            density_total += projector.expectation_density(&rho).unwrap();
            pure_total += projector.expectation_state(&psi).unwrap();
        }
        prop_assert!((density_total - 1.0).abs() < 1e-10, "density sum {density_total}");
        prop_assert!((pure_total - 1.0).abs() < 1e-10, "pure sum {pure_total}");
    }
}
