//! Genetic algorithm over restoration plans.
//!
//! Individuals are flattened recovery vectors (aligned with the scenario's
//! damaged links in ascending id order). Fitness is `mu*D + (1-mu)*E` plus a
//! linear overspend penalty; the efficiency term defaults to the full
//! bi-level objective (an equilibrium re-solve per individual) with a
//! surrogate switch for speed. Fitness evaluations run in parallel; breeding
//! is sequential with per-child random streams derived from
//! `(seed, generation, slot)`, so results are identical across thread counts.

use std::time::Instant;

use rand::distributions::uniform::SampleUniform;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::demand::DemandTable;
use crate::error::{Error, Result};
use crate::network::Network;
use crate::objective::{enforce_budget, ObjectiveOptions};
use crate::scalar::{cast, Scalar};
use crate::scenario::{DamagedLink, Scenario};
use crate::solution::{elapsed_s, EnergyContext, FitnessMode, Solution};

/// How parents are picked for breeding.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SelectionMethod {
    /// Random subset of `tournament_size`, keep the fitness argmin.
    #[default]
    Tournament,
    /// Sampling weighted by inverse fitness.
    WeightedRandom,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaConfig<S = f64> {
    pub population_size: usize,
    /// Probability that a child undergoes one budget-preserving transfer.
    pub mutation_rate: f64,
    pub tournament_size: usize,
    /// Linear cost-overrun multiplier in the fitness.
    pub penalty_multiplier: S,
    pub generations: usize,
    /// Carry the best individual into the next generation unchanged.
    pub elitism: bool,
    pub rng_seed: u64,
    pub selection: SelectionMethod,
    pub fitness: FitnessMode,
    pub options: ObjectiveOptions,
    /// Optional wall-clock cap; the run stops early (and reports
    /// `converged = false`) once exceeded.
    pub max_seconds: Option<f64>,
}

impl<S: Scalar> Default for GaConfig<S> {
    fn default() -> Self {
        GaConfig {
            population_size: 50,
            mutation_rate: 0.1,
            tournament_size: 3,
            penalty_multiplier: cast(7000.0),
            generations: 200,
            elitism: true,
            rng_seed: 0,
            selection: SelectionMethod::Tournament,
            fitness: FitnessMode::FullUe,
            options: ObjectiveOptions::default(),
            max_seconds: None,
        }
    }
}

impl<S: Scalar> GaConfig<S> {
    fn validate(&self) -> Result<()> {
        if self.population_size < 2 {
            return Err(Error::invalid("population must have at least 2 individuals"));
        }
        if !(0.0..=1.0).contains(&self.mutation_rate) {
            return Err(Error::invalid("mutation rate must lie in [0, 1]"));
        }
        if self.tournament_size < 2 || self.tournament_size > self.population_size {
            return Err(Error::invalid("tournament size must lie in [2, population]"));
        }
        if self.generations == 0 {
            return Err(Error::invalid("at least one generation is required"));
        }
        if self.penalty_multiplier < S::zero() {
            return Err(Error::invalid("penalty multiplier must be non-negative"));
        }
        Ok(())
    }
}

/// One population member: a flattened recovery vector plus its cached
/// fitness (recomputed whenever the vector changes, never compared stale).
#[derive(Debug, Clone, PartialEq)]
pub struct Individual<S = f64> {
    /// Recovery per damaged link, ascending link id.
    pub recovery: Vec<S>,
    /// `mu*D + (1-mu)*E + overspend penalty`; lower is better.
    pub fitness: S,
    /// Cost within budget (the penalty term is zero).
    pub feasible: bool,
}

/// Per-generation progress sample.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaTraceRow<S = f64> {
    pub generation: usize,
    pub best: S,
    pub mean: S,
    pub elapsed_s: f64,
}

/// One-shot fitness of a recovery vector: `mu*D + (1-mu)*E` plus
/// `rho * max(0, cost - B)`. Equilibrium failures surface as infinite
/// fitness (the individual is dominated, not dropped).
pub fn ga_fitness<S: Scalar>(
    recovery: &[S],
    rho: S,
    fitness: FitnessMode,
    options: ObjectiveOptions,
    sc: &Scenario<S>,
    net: &Network<S>,
    dem: &DemandTable<S>,
) -> Result<S> {
    let ctx = EnergyContext::new(net, dem, sc, options, fitness)?;
    if recovery.len() != ctx.dimension() {
        return Err(Error::invalid(format!(
            "recovery vector has {} entries, scenario damages {} links",
            recovery.len(),
            ctx.dimension()
        )));
    }
    let mut scratch = ctx.scratch();
    Ok(ctx.ga_fitness(recovery, &mut scratch, rho))
}

/// Picks the fitness argmin of a uniform random subset of `tournament_size`
/// members (without replacement); ties keep the lower population index.
pub fn tournament_select<'p, S: Scalar, R: Rng>(
    population: &'p [Individual<S>],
    tournament_size: usize,
    rng: &mut R,
) -> Result<&'p Individual<S>> {
    if tournament_size == 0 || tournament_size > population.len() {
        return Err(Error::invalid("tournament size must lie in [1, population]"));
    }
    let mut indices: Vec<usize> = (0..population.len()).collect();
    for t in 0..tournament_size {
        let j = rng.gen_range(t..indices.len());
        indices.swap(t, j);
    }
    let winner = indices[..tournament_size]
        .iter()
        .copied()
        .min_by(|&a, &b| {
            population[a]
                .fitness
                .partial_cmp(&population[b].fitness)
                .unwrap_or(std::cmp::Ordering::Equal)
                .then(a.cmp(&b))
        })
        .expect("tournament is non-empty");
    Ok(&population[winner])
}

/// Samples one member with probability inversely proportional to fitness.
pub fn weighted_select<'p, S, R>(
    population: &'p [Individual<S>],
    rng: &mut R,
) -> Result<&'p Individual<S>>
where
    S: Scalar + SampleUniform,
    R: Rng,
{
    if population.is_empty() {
        return Err(Error::invalid("population is empty"));
    }
    let floor: S = cast(1e-12);
    let weights: Vec<S> = population
        .iter()
        .map(|ind| {
            if ind.fitness.is_finite() {
                S::one() / ind.fitness.max(floor)
            } else {
                S::zero()
            }
        })
        .collect();
    let total: S = weights.iter().copied().sum();
    if !(total > S::zero()) {
        return Ok(&population[0]);
    }
    let draw = rng.gen_range(S::zero()..total);
    let mut acc = S::zero();
    for (ind, &w) in population.iter().zip(&weights) {
        acc += w;
        if draw < acc {
            return Ok(ind);
        }
    }
    Ok(population.last().expect("population is non-empty"))
}

/// Single-point crossover: a random cut `p in [1, len-1]` swaps suffixes.
/// Both children are repaired onto the budget and clamped into capacity
/// bounds before they are returned.
pub fn crossover<S, R>(
    parent1: &[S],
    parent2: &[S],
    damaged: &[DamagedLink<S>],
    budget: S,
    rng: &mut R,
) -> Result<(Vec<S>, Vec<S>)>
where
    S: Scalar,
    R: Rng,
{
    if parent1.len() != parent2.len() {
        return Err(Error::invalid("parents must have equal length"));
    }
    if parent1.len() < 2 {
        return Err(Error::invalid("crossover needs at least two genes"));
    }
    let point = rng.gen_range(1..parent1.len());
    let mut child1: Vec<S> = parent1[..point]
        .iter()
        .chain(&parent2[point..])
        .copied()
        .collect();
    let mut child2: Vec<S> = parent2[..point]
        .iter()
        .chain(&parent1[point..])
        .copied()
        .collect();
    enforce_budget(&mut child1, damaged, budget);
    enforce_budget(&mut child2, damaged, budget);
    Ok((child1, child2))
}

/// With probability `mutation_rate`, moves a uniform random amount (up to
/// the source's whole allocation, clamped by the sink's spare headroom) from
/// one funded link to another. Total cost is preserved; no eligible pair
/// means no-op.
pub fn mutate<S, R>(
    recovery: &mut [S],
    damaged: &[DamagedLink<S>],
    mutation_rate: f64,
    rng: &mut R,
) where
    S: Scalar + SampleUniform,
    R: Rng,
{
    if mutation_rate <= 0.0 || !rng.gen_bool(mutation_rate.min(1.0)) {
        return;
    }
    let n = recovery.len();
    let sources: Vec<usize> = (0..n).filter(|&k| recovery[k] > S::zero()).collect();
    if sources.is_empty() {
        return;
    }
    let i = sources[rng.gen_range(0..sources.len())];
    let sinks: Vec<usize> = (0..n)
        .filter(|&j| j != i && damaged[j].headroom - recovery[j] > S::zero())
        .collect();
    if sinks.is_empty() {
        return;
    }
    let j = sinks[rng.gen_range(0..sinks.len())];
    let drawn = rng.gen_range(S::zero()..=recovery[i]);
    let amount = drawn.min(damaged[j].headroom - recovery[j]);
    recovery[i] = recovery[i] - amount;
    recovery[j] = recovery[j] + amount;
}

fn child_rng(seed: u64, generation: usize, slot: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(((generation as u64) << 32) | slot as u64);
    rng
}

/// Runs the genetic algorithm and returns the best individual ever seen
/// (re-scored with a full equilibrium re-solve) plus the per-generation
/// trace.
pub fn run_ga<S>(
    cfg: &GaConfig<S>,
    sc: &Scenario<S>,
    net: &Network<S>,
    dem: &DemandTable<S>,
) -> Result<(Solution<S>, Vec<GaTraceRow<S>>)>
where
    S: Scalar + SampleUniform,
{
    let start = Instant::now();
    cfg.validate()?;
    let ctx = EnergyContext::new(net, dem, sc, cfg.options, cfg.fitness)?;
    let n = ctx.dimension();
    if n == 0 {
        let solution = ctx.make_solution(&[], "ga", elapsed_s(start), 0, true)?;
        return Ok((solution, Vec::new()));
    }
    let rho = cfg.penalty_multiplier;
    let budget_tolerance: S = cast(1e-9);

    let evaluate = |genomes: &[Vec<S>]| -> Vec<S> {
        genomes
            .par_iter()
            .map_init(
                || ctx.scratch(),
                |scratch, genome| ctx.ga_fitness(genome, scratch, rho),
            )
            .collect()
    };
    let mut evaluations = 0u64;

    // Generation 0: uniform random plans repaired onto the budget.
    let genomes: Vec<Vec<S>> = (0..cfg.population_size)
        .map(|slot| ctx.random_plan(&mut child_rng(cfg.rng_seed, 0, slot)))
        .collect();
    let fitnesses = evaluate(&genomes);
    evaluations += genomes.len() as u64;
    let mut population: Vec<Individual<S>> = genomes
        .into_iter()
        .zip(fitnesses)
        .map(|(recovery, fitness)| {
            let cost: S = recovery.iter().copied().sum();
            Individual {
                recovery,
                fitness,
                feasible: cost <= sc.budget + budget_tolerance,
            }
        })
        .collect();

    let best_index = |pop: &[Individual<S>]| -> usize {
        let mut best = 0;
        for (i, ind) in pop.iter().enumerate().skip(1) {
            if ind.fitness < pop[best].fitness {
                best = i;
            }
        }
        best
    };
    let mut best_ever = population[best_index(&population)].clone();

    let mut trace = Vec::with_capacity(cfg.generations + 1);
    let mean_of = |pop: &[Individual<S>]| -> S {
        pop.iter().map(|i| i.fitness).sum::<S>() / cast::<S>(pop.len() as f64)
    };
    trace.push(GaTraceRow {
        generation: 0,
        best: population[best_index(&population)].fitness,
        mean: mean_of(&population),
        elapsed_s: elapsed_s(start),
    });

    let mut converged = true;
    for generation in 1..=cfg.generations {
        if let Some(cap) = cfg.max_seconds {
            if elapsed_s(start) > cap {
                converged = false;
                break;
            }
        }

        let mut children: Vec<Vec<S>> = Vec::with_capacity(cfg.population_size);
        let mut carried: Option<Individual<S>> = None;
        if cfg.elitism {
            carried = Some(population[best_index(&population)].clone());
        }
        while children.len() + carried.iter().count() < cfg.population_size {
            let slot = children.len() + carried.iter().count();
            let mut rng = child_rng(cfg.rng_seed, generation, slot);
            let p1 = select(&population, cfg, &mut rng)?;
            let p2 = select(&population, cfg, &mut rng)?;
            let (mut c1, mut c2) = if n >= 2 {
                crossover(&p1.recovery, &p2.recovery, &ctx.damaged, sc.budget, &mut rng)?
            } else {
                (p1.recovery.clone(), p2.recovery.clone())
            };
            mutate(&mut c1, &ctx.damaged, cfg.mutation_rate, &mut rng);
            children.push(c1);
            if children.len() + carried.iter().count() < cfg.population_size {
                mutate(&mut c2, &ctx.damaged, cfg.mutation_rate, &mut rng);
                children.push(c2);
            }
        }

        let fitnesses = evaluate(&children);
        evaluations += children.len() as u64;
        let mut next: Vec<Individual<S>> = Vec::with_capacity(cfg.population_size);
        if let Some(elite) = carried {
            next.push(elite);
        }
        next.extend(children.into_iter().zip(fitnesses).map(|(recovery, fitness)| {
            let cost: S = recovery.iter().copied().sum();
            Individual {
                recovery,
                fitness,
                feasible: cost <= sc.budget + budget_tolerance,
            }
        }));
        population = next;

        let generation_best = &population[best_index(&population)];
        if generation_best.fitness < best_ever.fitness {
            best_ever = generation_best.clone();
        }
        trace.push(GaTraceRow {
            generation,
            best: generation_best.fitness,
            mean: mean_of(&population),
            elapsed_s: elapsed_s(start),
        });
    }

    let mut best = best_ever.recovery;
    enforce_budget(&mut best, &ctx.damaged, sc.budget);
    let solution = ctx.make_solution(&best, "ga", elapsed_s(start), evaluations, converged)?;
    Ok((solution, trace))
}

fn select<'p, S>(
    population: &'p [Individual<S>],
    cfg: &GaConfig<S>,
    rng: &mut ChaCha8Rng,
) -> Result<&'p Individual<S>>
where
    S: Scalar + SampleUniform,
{
    match cfg.selection {
        SelectionMethod::Tournament => tournament_select(population, cfg.tournament_size, rng),
        SelectionMethod::WeightedRandom => weighted_select(population, rng),
    }
}
