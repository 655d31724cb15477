//! Differential-evolution search for projector decompositions.
//!
//! The analytic recipes fix the number of terms; this search asks the
//! opposite question: given a term budget Q, how close can a weighted sum of
//! Q projectors get to a column operator? Each candidate term is encoded as
//! 2d direction reals plus a weight magnitude and phase, and a DE/best/1/bin
//! scheme evolves the population against the Frobenius residual. The run is
//! fully deterministic for a given seed.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use rand::Rng;

use crate::error::{Error, Result};
use crate::rng::derive_rng;
use crate::sparse::SparseState;

use super::{residual_against, ColumnOperator, ProjectorDecomposition, ProjectorTerm};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DESearchConfig {
    /// Term budget Q.
    pub terms: usize,
    pub population: usize,
    pub max_generations: usize,
    /// Mutation scale F; every trial vector draws its own scale uniformly
    /// from [0.5 F, 1.5 F].
    pub differential_weight: f64,
    /// Crossover probability CR.
    pub crossover_rate: f64,
    /// Residual at which the search stops and reports convergence.
    pub target_residual: f64,
    /// Upper bound on |w| for every term weight.
    pub weight_magnitude_max: f64,
    pub seed: u64,
}

impl Default for DESearchConfig {
    fn default() -> Self {
        DESearchConfig {
            terms: 3,
            population: 40,
            max_generations: 500,
            differential_weight: 0.7,
            crossover_rate: 0.9,
            target_residual: 1e-6,
            weight_magnitude_max: 2.0,
            seed: 0,
        }
    }
}

impl DESearchConfig {
    fn validate(&self) -> Result<()> {
        if self.terms == 0 {
            return Err(Error::InvalidConfig("term budget must be at least 1".into()));
        }
        if self.population < 4 {
            return Err(Error::InvalidConfig("population must be at least 4".into()));
        }
        if self.max_generations == 0 {
            return Err(Error::InvalidConfig("need at least one generation".into()));
        }
        if !(self.differential_weight > 0.0 && self.differential_weight <= 2.0) {
            return Err(Error::InvalidConfig("differential weight must be in (0, 2]".into()));
        }
        if !(0.0..=1.0).contains(&self.crossover_rate) {
            return Err(Error::InvalidConfig("crossover rate must be in [0, 1]".into()));
        }
        if !(self.target_residual > 0.0) || !(self.weight_magnitude_max > 0.0) {
            return Err(Error::InvalidConfig(
                "target residual and weight bound must be positive".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Clone, Debug)]
pub struct SearchOutcome {
    pub decomposition: ProjectorDecomposition,
    /// Whether the residual target was reached within the generation budget.
    pub converged: bool,
    /// Generations actually evolved.
    pub generations: usize,
    /// Best residual after each generation, starting with the initial
    /// population.
    pub residual_history: Vec<f64>,
}

struct Genome<'a> {
    dim: usize,
    terms: usize,
    weight_max: f64,
    op: &'a ColumnOperator,
}

impl Genome<'_> {
    fn stride(&self) -> usize {
        2 * self.dim + 2
    }

    fn len(&self) -> usize {
        self.terms * self.stride()
    }

    fn bounds(&self, gene: usize) -> (f64, f64) {
        let offset = gene % self.stride();
        if offset < 2 * self.dim {
            (-1.0, 1.0)
        } else if offset == 2 * self.dim {
            (0.0, self.weight_max)
        } else {
            (-PI, PI)
        }
    }

    fn decode(&self, genes: &[f64]) -> Option<Vec<ProjectorTerm>> {
        let mut terms = Vec::with_capacity(self.terms);
        for chunk in genes.chunks(self.stride()) {
            let entries: Vec<(u32, Complex64)> = (0..self.dim)
                .map(|i| (i as u32, Complex64::new(chunk[2 * i], chunk[2 * i + 1])))
                .collect();
            let norm_sqr: f64 = entries.iter().map(|(_, c)| c.norm_sqr()).sum();
            if norm_sqr < 1e-18 {
                return None;
            }
            let direction = SparseState::new(entries).ok()?;
            let weight = Complex64::from_polar(chunk[2 * self.dim], chunk[2 * self.dim + 1]);
            terms.push(ProjectorTerm { weight, factors: vec![direction] });
        }
        Some(terms)
    }

    fn fitness(&self, genes: &[f64]) -> f64 {
        match self.decode(genes) {
            Some(terms) => residual_against(&terms, self.op),
            None => f64::INFINITY,
        }
    }
}

/// Searches for a decomposition of `op` with `config.terms` projector terms.
/// When the budget admits no exact decomposition the best found one is
/// returned with `converged = false`.
pub fn de_search(op: &ColumnOperator, config: &DESearchConfig) -> Result<SearchOutcome> {
    config.validate()?;
    let genome = Genome {
        dim: op.dims().total(),
        terms: config.terms,
        weight_max: config.weight_magnitude_max,
        op,
    };
    let len = genome.len();

    let mut init_rng = derive_rng(config.seed, &[u64::MAX]);
    let mut population: Vec<Vec<f64>> = (0..config.population)
        .map(|_| {
            (0..len)
                .map(|g| {
                    let (lo, hi) = genome.bounds(g);
                    init_rng.gen_range(lo..=hi)
                })
                .collect()
        })
        .collect();
    let mut fitness: Vec<f64> = population.par_iter().map(|x| genome.fitness(x)).collect();

    let argmin = |fitness: &[f64]| {
        let mut best = 0;
        for i in 1..fitness.len() {
            if fitness[i] < fitness[best] {
                best = i;
            }
        }
        best
    };
    let mut best = argmin(&fitness);
    let mut history = vec![fitness[best]];
    let mut generations = 0;
    let mut refresh_rng = derive_rng(config.seed, &[u64::MAX - 1]);
    let mut stagnant = 0usize;

    for generation in 1..=config.max_generations {
        if fitness[best] <= config.target_residual {
            break;
        }
        generations = generation;
        let best_genes = population[best].clone();
        let trials: Vec<Vec<f64>> = (0..config.population)
            .map(|i| {
                let mut rng = derive_rng(config.seed, &[generation as u64, i as u64]);
                let r1 = loop {
                    let r = rng.gen_range(0..config.population);
                    if r != i {
                        break r;
                    }
                };
                let r2 = loop {
                    let r = rng.gen_range(0..config.population);
                    if r != i && r != r1 {
                        break r;
                    }
                };
                let scale = config.differential_weight * rng.gen_range(0.5..1.5);
                let forced = rng.gen_range(0..len);
                (0..len)
                    .map(|g| {
                        if g == forced || rng.gen::<f64>() < config.crossover_rate {
                            let (lo, hi) = genome.bounds(g);
                            let mutant = best_genes[g]
                                + scale * (population[r1][g] - population[r2][g]);
                            mutant.clamp(lo, hi)
                        } else {
                            population[i][g]
                        }
                    })
                    .collect()
            })
            .collect();
        let trial_fitness: Vec<f64> = trials.par_iter().map(|x| genome.fitness(x)).collect();
        for i in 0..config.population {
            if trial_fitness[i] <= fitness[i] {
                population[i] = trials[i].clone();
                fitness[i] = trial_fitness[i];
            }
        }
        let previous = fitness[best];
        best = argmin(&fitness);
        if fitness[best] < previous * (1.0 - 1e-12) {
            stagnant = 0;
        } else {
            stagnant += 1;
        }
        // A population that collapsed into a local optimum, typically one
        // with a dead term, produces vanishing differentials and can never
        // leave on its own. Reseeding the worst half restores the diversity
        // the mutation step feeds on while keeping everything found so far.
        if stagnant >= 50 {
            stagnant = 0;
            let mut order: Vec<usize> = (0..config.population).collect();
            order.sort_by(|&a, &b| fitness[b].total_cmp(&fitness[a]));
            for &i in order.iter().take(config.population / 2) {
                population[i] = (0..len)
                    .map(|g| {
                        let (lo, hi) = genome.bounds(g);
                        refresh_rng.gen_range(lo..=hi)
                    })
                    .collect();
                fitness[i] = genome.fitness(&population[i]);
            }
            best = argmin(&fitness);
        }
        history.push(fitness[best]);
    }

    let terms = genome
        .decode(&population[best])
        .ok_or(Error::DegenerateState)?
        .into_iter()
        .map(|t| ProjectorTerm {
            weight: t.weight,
            factors: t.factors.iter().map(|f| f.gauged()).collect(),
        })
        .collect();
    let decomposition = ProjectorDecomposition::assemble(*op, terms);
    let converged = decomposition.residual() <= config.target_residual
        || fitness[best] <= config.target_residual;
    Ok(SearchOutcome { decomposition, converged, generations, residual_history: history })
}
