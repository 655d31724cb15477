//! Projective count simulation against a shared photon source.
//!
//! Counts accumulate at `probability * reference_rate * duration`, where the
//! reference rate is the count rate a unit-probability projector would see.
//! In `Poisson` mode the expected count is modulated by a slow sinusoidal
//! source drift and then sampled; the per-block monitor measurement lets the
//! reconstruction divide that drift back out. `Exact` mode returns the
//! expected counts themselves with no drift, so a reconstruction from exact
//! counts is limited only by floating-point rounding.

use rand::Rng;
use rand_distr::{Distribution, Poisson};
use serde::{Deserialize, Serialize};

use crate::basis::{Basis, Dims};
use crate::density::DensityMatrix;
use crate::error::{Error, Result};
use crate::measure::plan::MeasurementPlan;
use crate::rng::derive_rng;
use crate::state::StateVector;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NoiseMode {
    /// Expected counts, no drift, no sampling.
    Exact,
    /// Poisson-sampled counts with sinusoidal source drift.
    Poisson,
}

/// Detector and source parameters for a simulated run.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ShotModel {
    /// Counts per second on a unit-probability projector.
    pub reference_rate: f64,
    /// Integration time for off-diagonal coefficient blocks, seconds.
    pub t_off_diagonal: f64,
    /// Integration time for the monitor and diagonal blocks, seconds.
    pub t_diagonal: f64,
    /// Relative amplitude of the slow source-intensity drift.
    pub drift_amplitude: f64,
    /// Drift period in seconds.
    pub drift_period: f64,
    pub noise: NoiseMode,
}

impl Default for ShotModel {
    fn default() -> Self {
        ShotModel {
            reference_rate: 900.0,
            t_off_diagonal: 1.0,
            t_diagonal: 20.0,
            drift_amplitude: 0.1,
            drift_period: 86_400.0,
            noise: NoiseMode::Poisson,
        }
    }
}

impl ShotModel {
    pub fn exact() -> Self {
        ShotModel { noise: NoiseMode::Exact, ..ShotModel::default() }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.reference_rate > 0.0 && self.reference_rate.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "reference_rate must be positive, got {}",
                self.reference_rate
            )));
        }
        for (name, t) in [
            ("t_off_diagonal", self.t_off_diagonal),
            ("t_diagonal", self.t_diagonal),
        ] {
            if !(t > 0.0 && t.is_finite()) {
                return Err(Error::InvalidConfig(format!("{name} must be positive, got {t}")));
            }
        }
        if !(0.0..1.0).contains(&self.drift_amplitude) {
            return Err(Error::InvalidConfig(format!(
                "drift_amplitude must lie in [0, 1), got {}",
                self.drift_amplitude
            )));
        }
        if !(self.drift_period > 0.0 && self.drift_period.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "drift_period must be positive, got {}",
                self.drift_period
            )));
        }
        Ok(())
    }

    /// Source intensity multiplier at absolute time `t`.
    pub fn drift(&self, t: f64) -> f64 {
        1.0 + self.drift_amplitude * (2.0 * std::f64::consts::PI * t / self.drift_period).sin()
    }

    fn duration_for(&self, diagonal: bool) -> f64 {
        if diagonal {
            self.t_diagonal
        } else {
            self.t_off_diagonal
        }
    }
}

/// The state feeding the apparatus.
#[derive(Clone, Copy, Debug)]
pub enum Source<'a> {
    Pure(&'a StateVector),
    Mixed(&'a DensityMatrix),
}

impl Source<'_> {
    fn probability(&self, plan: &MeasurementPlan, setting: u32) -> f64 {
        let s = plan.setting(setting);
        let p = match self {
            Source::Pure(psi) => s.probability_pure(psi.coefficients(), plan.dims),
            Source::Mixed(rho) => s.probability_density(rho.matrix(), plan.dims),
        };
        p.clamp(0.0, 1.0)
    }

    fn dim(&self) -> usize {
        match self {
            Source::Pure(psi) => psi.dim(),
            Source::Mixed(rho) => rho.dim(),
        }
    }
}

/// One integrated projective measurement.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Measurement {
    pub setting: u32,
    /// Born probability the counts were drawn against.
    pub probability: f64,
    /// Absolute start time, seconds from the beginning of the run.
    pub start: f64,
    pub duration: f64,
    pub counts: f64,
}

/// Monitor plus projector measurements for one coefficient.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BlockRecord {
    pub target: usize,
    pub monitor: Measurement,
    pub projectors: Vec<Measurement>,
}

/// Everything a reconstruction needs from a simulated run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CountRecord {
    pub seed: u64,
    pub shot: ShotModel,
    pub dims: Dims,
    pub basis: Basis,
    pub reference: usize,
    pub blocks: Vec<BlockRecord>,
}

fn draw_counts(shot: &ShotModel, rng: &mut impl Rng, p: f64, start: f64, duration: f64) -> f64 {
    match shot.noise {
        NoiseMode::Exact => p * shot.reference_rate * duration,
        NoiseMode::Poisson => {
            let lambda =
                p * shot.reference_rate * duration * shot.drift(start + 0.5 * duration);
            if lambda > 0.0 {
                Poisson::new(lambda).expect("positive finite rate").sample(rng)
            } else {
                0.0
            }
        }
    }
}

/// Walks the plan block by block, measuring the monitor and then each
/// projector in turn on a shared clock. Counts for block `b`, slot `s` are
/// drawn from an RNG stream keyed by `(seed, b, s)` (slot 0 is the monitor),
/// so records are reproducible and independent of execution order.
pub fn simulate_counts(
    source: Source,
    plan: &MeasurementPlan,
    shot: &ShotModel,
    seed: u64,
) -> Result<CountRecord> {
    shot.validate()?;
    if source.dim() != plan.dims.total() {
        return Err(Error::DimensionMismatch(format!(
            "state dimension {} does not match plan dimension {}",
            source.dim(),
            plan.dims.total()
        )));
    }

    let mut clock = 0.0;
    let mut blocks = Vec::with_capacity(plan.coefficients.len());
    for (b, coeff) in plan.coefficients.iter().enumerate() {
        let measure = |setting: u32, slot: u64, duration: f64, clock: &mut f64| {
            let p = source.probability(plan, setting);
            let mut rng = derive_rng(seed, &[b as u64, slot]);
            let counts = draw_counts(shot, &mut rng, p, *clock, duration);
            let m = Measurement { setting, probability: p, start: *clock, duration, counts };
            *clock += duration;
            m
        };
        let monitor = measure(plan.monitor, 0, shot.t_diagonal, &mut clock);
        let duration = shot.duration_for(coeff.diagonal);
        let projectors = coeff
            .terms
            .iter()
            .enumerate()
            .map(|(k, term)| measure(term.setting, k as u64 + 1, duration, &mut clock))
            .collect();
        blocks.push(BlockRecord { target: coeff.target, monitor, projectors });
    }

    Ok(CountRecord {
        seed,
        shot: *shot,
        dims: plan.dims,
        basis: plan.basis,
        reference: plan.reference,
        blocks,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measure::plan::build_full_plan;
    use num_complex::Complex64;
    use approx::assert_abs_diff_eq;

    fn demo_state() -> StateVector {
        StateVector::normalized(
            vec![
                Complex64::new(0.8, 0.0),
                Complex64::new(0.3, 0.2),
                Complex64::new(-0.1, 0.4),
                Complex64::new(0.2, -0.2),
            ],
            0,
        )
        .unwrap()
    }

    #[test]
    fn exact_counts_match_born_probabilities() {
        let psi = demo_state();
        let plan = build_full_plan(Dims::bipartite(2, 2), Basis::Flat, 0).unwrap();
        let shot = ShotModel::exact();
        let record = simulate_counts(Source::Pure(&psi), &plan, &shot, 1).unwrap();
        assert_eq!(record.blocks.len(), 4);
        let mut expected_clock = 0.0;
        for (block, coeff) in record.blocks.iter().zip(&plan.coefficients) {
            let p_ref = plan
                .setting(plan.monitor)
                .probability_pure(psi.coefficients(), plan.dims);
            assert_abs_diff_eq!(block.monitor.probability, p_ref, epsilon = 1e-15);
            assert_abs_diff_eq!(
                block.monitor.counts,
                p_ref * 900.0 * 20.0,
                epsilon = 1e-9
            );
            assert_abs_diff_eq!(block.monitor.start, expected_clock, epsilon = 1e-12);
            expected_clock += shot.t_diagonal;
            let duration = if coeff.diagonal { shot.t_diagonal } else { shot.t_off_diagonal };
            for (m, term) in block.projectors.iter().zip(&coeff.terms) {
                assert_eq!(m.setting, term.setting);
                let p = plan.setting(m.setting).probability_pure(psi.coefficients(), plan.dims);
                assert_abs_diff_eq!(m.counts, p * 900.0 * duration, epsilon = 1e-9);
                assert_abs_diff_eq!(m.start, expected_clock, epsilon = 1e-12);
                expected_clock += duration;
            }
        }
    }

    #[test]
    fn runs_are_deterministic_per_seed() {
        let psi = demo_state();
        let plan = build_full_plan(Dims::bipartite(2, 2), Basis::Flat, 0).unwrap();
        let shot = ShotModel::default();
        let a = simulate_counts(Source::Pure(&psi), &plan, &shot, 9).unwrap();
        let b = simulate_counts(Source::Pure(&psi), &plan, &shot, 9).unwrap();
        assert_eq!(a, b);
        let c = simulate_counts(Source::Pure(&psi), &plan, &shot, 10).unwrap();
        let same = a
            .blocks
            .iter()
            .zip(&c.blocks)
            .all(|(x, y)| x.monitor.counts == y.monitor.counts);
        assert!(!same, "different seeds should give different counts");
    }

    #[test]
    fn poisson_counts_average_to_the_drifted_mean() {
        let psi = demo_state();
        let plan = build_full_plan(Dims::bipartite(2, 2), Basis::Flat, 0).unwrap();
        let shot = ShotModel { drift_amplitude: 0.0, ..ShotModel::default() };
        let mut total = 0.0;
        let runs = 400;
        for seed in 0..runs {
            let record = simulate_counts(Source::Pure(&psi), &plan, &shot, seed).unwrap();
            total += record.blocks[0].monitor.counts;
        }
        let mean = total / runs as f64;
        let expected = psi.probability(0) * 900.0 * 20.0;
        // standard error ~ sqrt(expected / runs) ~ 5.4
        assert!(
            (mean - expected).abs() < 20.0,
            "mean {mean} too far from expected {expected}"
        );
    }

    #[test]
    fn mixed_source_uses_density_probabilities() {
        let psi = demo_state();
        let rho = DensityMatrix::from_pure(&psi);
        let plan = build_full_plan(Dims::bipartite(2, 2), Basis::Flat, 0).unwrap();
        let shot = ShotModel::exact();
        let pure = simulate_counts(Source::Pure(&psi), &plan, &shot, 1).unwrap();
        let mixed = simulate_counts(Source::Mixed(&rho), &plan, &shot, 1).unwrap();
        for (a, b) in pure.blocks.iter().zip(&mixed.blocks) {
            assert_abs_diff_eq!(a.monitor.counts, b.monitor.counts, epsilon = 1e-9);
            for (x, y) in a.projectors.iter().zip(&b.projectors) {
                assert_abs_diff_eq!(x.counts, y.counts, epsilon = 1e-9);
            }
        }
    }

    #[test]
    fn drift_stays_inside_the_configured_band() {
        let shot = ShotModel::default();
        for i in 0..200 {
            let t = i as f64 * 1000.0;
            let d = shot.drift(t);
            assert!((0.9..=1.1).contains(&d), "drift {d} out of band at t={t}");
        }
        let exact = ShotModel::exact();
        assert_eq!(exact.noise, NoiseMode::Exact);
    }

    #[test]
    fn validation_rejects_bad_models() {
        let mut m = ShotModel::default();
        m.reference_rate = 0.0;
        assert!(m.validate().is_err());
        let mut m = ShotModel::default();
        m.t_diagonal = -1.0;
        assert!(m.validate().is_err());
        let mut m = ShotModel::default();
        m.drift_amplitude = 1.0;
        assert!(m.validate().is_err());
        let mut m = ShotModel::default();
        m.drift_period = 0.0;
        assert!(m.validate().is_err());
    }

    #[test]
    fn dimension_mismatch_is_rejected() {
        let psi = demo_state();
        let plan = build_full_plan(Dims::single(3), Basis::Flat, 0).unwrap();
        let err = simulate_counts(Source::Pure(&psi), &plan, &ShotModel::exact(), 0);
        assert!(err.is_err());
    }

    #[test]
    fn shot_model_serde_round_trip() {
        let shot = ShotModel::default();
        let json = serde_json::to_string(&shot).unwrap();
        assert!(json.contains("\"noise\":\"poisson\""));
        let back: ShotModel = serde_json::from_str(&json).unwrap();
        assert_eq!(shot, back);
        let partial: ShotModel = serde_json::from_str("{\"noise\":\"exact\"}").unwrap();
        assert_eq!(partial.noise, NoiseMode::Exact);
        assert_eq!(partial.reference_rate, 900.0);
    }
}
