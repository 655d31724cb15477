//! Mixed-state robustness study: how well the column-operator readout
//! recovers the dominant eigenvector of an unknown mixed state.
//!
//! Each trial draws a random density matrix of prescribed dimension, rank,
//! and purity, picks the reference from its diagonal, runs the exact-mode
//! measurement pipeline, and scores the reconstruction against the state's
//! dominant eigenvector. No count noise enters: the study isolates the bias
//! that mixedness itself introduces into a pure-state readout.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::basis::{Basis, Dims};
use crate::error::{Error, Result};
use crate::measure::plan::{build_full_plan, choose_reference};
use crate::measure::reconstruct::reconstruct;
use crate::measure::shot::{simulate_counts, ShotModel, Source};
use crate::rng::derive_rng;
use crate::studies::random_density_matrix;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct MixedStudyConfig {
    pub dims: Vec<usize>,
    pub ranks: Vec<usize>,
    pub purities: Vec<f64>,
    /// Trials per feasible (dim, rank, purity) cell.
    pub trials: usize,
    /// A trial succeeds when fidelity exceeds this.
    pub fidelity_threshold: f64,
    pub seed: u64,
}

impl Default for MixedStudyConfig {
    fn default() -> Self {
        MixedStudyConfig {
            dims: vec![4, 16, 64],
            ranks: vec![1, 2, 4],
            purities: vec![0.25, 0.5, 0.7, 0.85, 1.0],
            trials: 200,
            fidelity_threshold: 0.99,
            seed: 1,
        }
    }
}

impl MixedStudyConfig {
    pub fn validate(&self) -> Result<()> {
        if self.dims.is_empty() || self.ranks.is_empty() || self.purities.is_empty() {
            return Err(Error::InvalidConfig(
                "dims, ranks, and purities must all be non-empty".into(),
            ));
        }
        if let Some(&d) = self.dims.iter().find(|&&d| d < 2) {
            return Err(Error::InvalidConfig(format!("dimension {d} below 2")));
        }
        if self.ranks.contains(&0) {
            return Err(Error::InvalidConfig("rank 0 requested".into()));
        }
        if let Some(&p) = self.purities.iter().find(|&&p| !(p > 0.0 && p <= 1.0 + 1e-9)) {
            return Err(Error::InvalidConfig(format!("purity {p} outside (0, 1]")));
        }
        if self.trials == 0 {
            return Err(Error::InvalidConfig("at least one trial required".into()));
        }
        if !(self.fidelity_threshold > 0.0 && self.fidelity_threshold <= 1.0) {
            return Err(Error::InvalidConfig(format!(
                "fidelity threshold {} outside (0, 1]",
                self.fidelity_threshold
            )));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FidelityQuantiles {
    pub min: f64,
    pub q25: f64,
    pub median: f64,
    pub q75: f64,
    pub max: f64,
}

impl FidelityQuantiles {
    fn from_samples(samples: &[f64]) -> Self {
        let mut sorted = samples.to_vec();
        sorted.sort_by(f64::total_cmp);
        let at = |q: f64| {
            let pos = q * (sorted.len() - 1) as f64;
            let lo = pos.floor() as usize;
            let hi = pos.ceil() as usize;
            sorted[lo] + (sorted[hi] - sorted[lo]) * (pos - lo as f64)
        };
        FidelityQuantiles {
            min: sorted[0],
            q25: at(0.25),
            median: at(0.5),
            q75: at(0.75),
            max: sorted[sorted.len() - 1],
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StudyCell {
    pub dim: usize,
    pub rank: usize,
    pub purity: f64,
    /// False when the purity is unreachable at this rank; such cells are
    /// skipped, not failed.
    pub feasible: bool,
    /// Raw per-trial fidelities against the dominant eigenvector.
    pub fidelities: Vec<f64>,
    pub successes: usize,
    pub success_fraction: f64,
    pub quantiles: Option<FidelityQuantiles>,
    /// Trials whose top eigenvalue was degenerate, where "the" dominant
    /// eigenvector is an arbitrary pick inside the eigenspace.
    pub degenerate_trials: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StudyResult {
    pub config: MixedStudyConfig,
    pub cells: Vec<StudyCell>,
}

impl StudyResult {
    pub fn cell(&self, dim: usize, rank: usize, purity: f64) -> Option<&StudyCell> {
        self.cells
            .iter()
            .find(|c| c.dim == dim && c.rank == rank && c.purity == purity)
    }
}

fn run_trial(dim: usize, rank: usize, purity: f64, seed: u64, salts: &[u64]) -> Result<(f64, bool)> {
    let mut rng = derive_rng(seed, salts);
    let rho = random_density_matrix(dim, rank, purity, &mut rng)?;
    let dominant = rho.dominant_eigenvector()?;
    let reference = choose_reference(&rho.diagonal());
    let plan = build_full_plan(Dims::single(dim), Basis::Flat, reference)?;
    let record = simulate_counts(Source::Mixed(&rho), &plan, &ShotModel::exact(), 0)?;
    let estimate = reconstruct(&record, &plan)?;
    let fidelity = estimate.fidelity(&dominant.vector)?;
    Ok((fidelity, dominant.degenerate))
}

/// Runs the full study grid. Infeasible cells (purity below 1/rank, or rank
/// above the dimension) are reported with `feasible: false` and skipped.
pub fn run_mixed_state_study(config: &MixedStudyConfig) -> Result<StudyResult> {
    config.validate()?;
    let mut cells = Vec::new();
    let mut cell_index = 0u64;
    for &dim in &config.dims {
        for &rank in &config.ranks {
            for &purity in &config.purities {
                let ci = cell_index;
                cell_index += 1;
                let feasible =
                    rank <= dim && purity + 1e-9 >= 1.0 / rank as f64 && purity <= 1.0 + 1e-9;
                if !feasible {
                    cells.push(StudyCell {
                        dim,
                        rank,
                        purity,
                        feasible,
                        fidelities: Vec::new(),
                        successes: 0,
                        success_fraction: 0.0,
                        quantiles: None,
                        degenerate_trials: 0,
                    });
                    continue;
                }
                let outcomes: Vec<(f64, bool)> = (0..config.trials)
                    .into_par_iter()
                    .map(|trial| run_trial(dim, rank, purity, config.seed, &[ci, trial as u64]))
                    .collect::<Result<_>>()?;
                let fidelities: Vec<f64> = outcomes.iter().map(|&(f, _)| f).collect();
                let successes =
                    fidelities.iter().filter(|&&f| f > config.fidelity_threshold).count();
                let degenerate_trials = outcomes.iter().filter(|&&(_, d)| d).count();
                cells.push(StudyCell {
                    dim,
                    rank,
                    purity,
                    feasible,
                    successes,
                    success_fraction: successes as f64 / config.trials as f64,
                    quantiles: Some(FidelityQuantiles::from_samples(&fidelities)),
                    fidelities,
                    degenerate_trials,
                });
            }
        }
    }
    Ok(StudyResult { config: config.clone(), cells })
}
