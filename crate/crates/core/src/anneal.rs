//! Simulated-annealing minimizer of the penalty Hamiltonian, a greedy
//! marginal-improvement baseline, and an exhaustive grid oracle.
//!
//! The annealer is a classical stand-in for a hardware constrained-quadratic
//! solver: it walks continuous recovery vectors with budget-preserving
//! transfers and single-link perturbations, accepts uphill moves with
//! Metropolis probability `exp(-dH/T)`, and cools geometrically. Restarts run
//! in parallel on independent random streams; the winner is the
//! lexicographically smallest `(best energy, restart index)`.

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

/// Annealer schedule and search parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnnealConfig<S = f64> {
    /// Starting temperature; `None` derives it as the standard deviation of
    /// the energy over 100 random feasible plans.
    pub initial_temperature: Option<S>,
    /// Geometric cooling ratio in (0, 1).
    pub cooling_factor: S,
    /// Proposals per temperature level; `None` derives `50 * |damaged|`.
    pub steps_per_temperature: Option<usize>,
    /// Cooling stops once the temperature falls below this fraction of the
    /// initial temperature.
    pub min_temperature_fraction: S,
    /// Single-link perturbation half-width, as a fraction of link headroom.
    pub move_scale: S,
    pub rng_seed: u64,
    pub restarts: usize,
    pub fitness: FitnessMode,
    pub options: ObjectiveOptions,
}

impl<S: Scalar> Default for AnnealConfig<S> {
    fn default() -> Self {
        AnnealConfig {
            initial_temperature: None,
            cooling_factor: cast(0.95),
            steps_per_temperature: None,
            min_temperature_fraction: cast(1e-6),
            move_scale: cast(0.25),
            rng_seed: 0,
            restarts: 3,
            fitness: FitnessMode::Surrogate,
            options: ObjectiveOptions::default(),
        }
    }
}

impl<S: Scalar> AnnealConfig<S> {
    fn validate(&self) -> Result<()> {
        if let Some(t) = self.initial_temperature {
            if !(t > S::zero()) {
                return Err(Error::invalid("initial temperature must be positive"));
            }
        }
        if !(self.cooling_factor > S::zero() && self.cooling_factor < S::one()) {
            return Err(Error::invalid("cooling factor must lie in (0, 1)"));
        }
        if self.steps_per_temperature == Some(0) {
            return Err(Error::invalid("steps per temperature must be at least 1"));
        }
        if !(self.min_temperature_fraction > S::zero() && self.min_temperature_fraction < S::one()) {
            return Err(Error::invalid("minimum temperature fraction must lie in (0, 1)"));
        }
        if !(self.move_scale > S::zero()) {
            return Err(Error::invalid("move scale must be positive"));
        }
        if self.restarts == 0 {
            return Err(Error::invalid("at least one restart is required"));
        }
        Ok(())
    }
}

/// One energy-trace sample, taken at the end of each temperature level of the
/// winning restart.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SaTraceRow<S = f64> {
    /// Proposals evaluated so far in this restart.
    pub step: u64,
    pub temperature: S,
    pub current: S,
    pub best: S,
}

struct RestartOutcome<S> {
    best: Vec<S>,
    best_energy: S,
    trace: Vec<SaTraceRow<S>>,
    evaluations: u64,
}

/// Runs simulated annealing and returns the best solution (re-scored with a
/// full equilibrium re-solve) together with the winning restart's energy
/// trace.
pub fn run_sa<S>(
    cfg: &AnnealConfig<S>,
    sc: &Scenario<S>,
    net: &Network<S>,
    dem: &DemandTable<S>,
) -> Result<(Solution<S>, Vec<SaTraceRow<S>>)>
where
    S: Scalar + SampleUniform,
{
    let start = Instant::now();
    cfg.validate()?;
    let ctx = EnergyContext::new(net, dem, sc, cfg.options, cfg.fitness)?;
    let n = ctx.dimension();
    if n == 0 {
        let solution = ctx.make_solution(&[], "sa", elapsed_s(start), 0, true)?;
        return Ok((solution, Vec::new()));
    }

    let mut evaluations = 0u64;
    let initial_temperature = match cfg.initial_temperature {
        Some(t) => t,
        None => {
            let (t, seen) = estimate_temperature(&ctx, cfg.rng_seed)?;
            evaluations += seen;
            t
        }
    };
    let steps = cfg.steps_per_temperature.unwrap_or(50 * n);
    let floor = initial_temperature * cfg.min_temperature_fraction;

    let outcomes: Vec<Result<RestartOutcome<S>>> = (0..cfg.restarts)
        .into_par_iter()
        .map(|restart| run_restart(&ctx, cfg, initial_temperature, floor, steps, restart))
        .collect();
    let mut winner: Option<(usize, RestartOutcome<S>)> = None;
    for (idx, outcome) in outcomes.into_iter().enumerate() {
        let outcome = outcome?;
        evaluations += outcome.evaluations;
        let better = match &winner {
            None => true,
            Some((_, incumbent)) => outcome.best_energy < incumbent.best_energy,
        };
        if better {
            winner = Some((idx, outcome));
        }
    }
    let (_, mut outcome) = winner.expect("at least one restart ran");

    // The penalty only guards the budget during the walk; the returned plan
    // must satisfy it outright.
    enforce_budget(&mut outcome.best, &ctx.damaged, sc.budget);
    evaluations += trim_inert_capacity(&ctx, &mut outcome.best)?;
    let solution = ctx.make_solution(&outcome.best, "sa", elapsed_s(start), evaluations, true)?;
    Ok((solution, outcome.trace))
}

/// Zeroes any allocation whose removal leaves the energy no worse: capacity
/// that buys nothing is never worth its cost. When the walk's energy is
/// exactly flat along a dimension (for example a link that carries no
/// reference flow while the equity weight is zero), accepted zero-delta moves
/// leave arbitrary spend behind; this pass removes it deterministically.
/// Any allocation with even a slight effect survives, because removing it
/// strictly raises the energy.
fn trim_inert_capacity<S>(ctx: &EnergyContext<S>, plan: &mut [S]) -> Result<u64>
where
    S: Scalar,
{
    let mut scratch = ctx.scratch();
    let mut energy = ctx.energy(plan, &mut scratch)?;
    let mut evaluations = 1u64;
    for i in 0..plan.len() {
        if plan[i] <= S::zero() {
            continue;
        }
        let kept = plan[i];
        plan[i] = S::zero();
        let trimmed = ctx.energy(plan, &mut scratch)?;
        evaluations += 1;
        if trimmed <= energy {
            energy = trimmed;
        } else {
            plan[i] = kept;
        }
    }
    Ok(evaluations)
}

/// Standard deviation of the energy over 100 random feasible plans (random
/// stream 0, shared by all restarts).
fn estimate_temperature<S>(ctx: &EnergyContext<S>, seed: u64) -> Result<(S, u64)>
where
    S: Scalar + SampleUniform,
{
    const SAMPLES: usize = 100;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut scratch = ctx.scratch();
    let mut energies = Vec::with_capacity(SAMPLES);
    for _ in 0..SAMPLES {
        let plan = ctx.random_plan(&mut rng);
        energies.push(ctx.energy(&plan, &mut scratch)?);
    }
    let count: S = cast(SAMPLES as f64);
    let mean = energies.iter().copied().sum::<S>() / count;
    let variance = energies
        .iter()
        .map(|&e| (e - mean) * (e - mean))
        .sum::<S>()
        / count;
    let sd = variance.sqrt();
    let temperature = if sd > S::zero() { sd } else { S::one() };
    Ok((temperature, SAMPLES as u64))
}

fn run_restart<S>(
    ctx: &EnergyContext<S>,
    cfg: &AnnealConfig<S>,
    initial_temperature: S,
    floor: S,
    steps: usize,
    restart: usize,
) -> Result<RestartOutcome<S>>
where
    S: Scalar + SampleUniform,
{
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.rng_seed);
    rng.set_stream(restart as u64 + 1);
    let mut scratch = ctx.scratch();

    let mut current = ctx.random_plan(&mut rng);
    let mut current_energy = ctx.energy(&current, &mut scratch)?;
    let mut best = current.clone();
    let mut best_energy = current_energy;
    let mut proposal = current.clone();
    let mut evaluations = 1u64;
    let mut step_count = 0u64;
    let mut trace = Vec::new();

    let mut temperature = initial_temperature;
    while temperature > floor {
        for _ in 0..steps {
            proposal.copy_from_slice(&current);
            propose_move(&mut proposal, &ctx.damaged, cfg.move_scale, &mut rng);
            let energy = ctx.energy(&proposal, &mut scratch)?;
            evaluations += 1;
            step_count += 1;
            let accept = if energy <= current_energy {
                true
            } else {
                let delta = energy - current_energy;
                rng.gen_range(S::zero()..S::one()) < (-delta / temperature).exp()
            };
            if accept {
                std::mem::swap(&mut current, &mut proposal);
                current_energy = energy;
                if current_energy < best_energy {
                    best_energy = current_energy;
                    best.copy_from_slice(&current);
                }
            }
        }
        trace.push(SaTraceRow {
            step: step_count,
            temperature,
            current: current_energy,
            best: best_energy,
        });
        temperature = temperature * cfg.cooling_factor;
    }

    Ok(RestartOutcome {
        best,
        best_energy,
        trace,
        evaluations,
    })
}

/// Mutates `plan` in place with one of two moves: a budget-preserving
/// transfer between two links, or a single-link perturbation. Results always
/// stay inside `[0, headroom]` per link.
fn propose_move<S, R>(plan: &mut [S], damaged: &[DamagedLink<S>], move_scale: S, rng: &mut R)
where
    S: Scalar + SampleUniform,
    R: Rng,
{
    let n = plan.len();
    if rng.gen_bool(0.5) {
        // Budget-preserving transfer: from a funded link to another with
        // spare headroom. Falls through to a perturbation when no pair
        // qualifies.
        let sources: Vec<usize> = (0..n).filter(|&k| plan[k] > S::zero()).collect();
        if !sources.is_empty() {
            let i = sources[rng.gen_range(0..sources.len())];
            let sinks: Vec<usize> = (0..n)
                .filter(|&j| j != i && damaged[j].headroom - plan[j] > S::zero())
                .collect();
            if !sinks.is_empty() {
                let j = sinks[rng.gen_range(0..sinks.len())];
                let ceiling = plan[i].min(damaged[j].headroom - plan[j]);
                if ceiling > S::zero() {
                    let amount = rng.gen_range(S::zero()..=ceiling);
                    plan[i] = (plan[i] - amount).max(S::zero());
                    plan[j] = (plan[j] + amount).min(damaged[j].headroom);
                    return;
                }
            }
        }
    }
    // Single-link perturbation, clamped into bounds.
    let k = rng.gen_range(0..n);
    let width = move_scale * damaged[k].headroom;
    if width > S::zero() {
        let delta = rng.gen_range(-width..=width);
        plan[k] = (plan[k] + delta).max(S::zero()).min(damaged[k].headroom);
    }
}

/// Greedy baseline configuration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GreedyConfig<S = f64> {
    /// Capacity allocated per improving move.
    pub step: S,
    pub fitness: FitnessMode,
    pub options: ObjectiveOptions,
}

impl<S: Scalar> Default for GreedyConfig<S> {
    fn default() -> Self {
        GreedyConfig {
            step: S::one(),
            fitness: FitnessMode::Surrogate,
            options: ObjectiveOptions::default(),
        }
    }
}

/// Repeatedly gives `step` capacity to the link whose increment lowers the
/// energy the most, until the budget is exhausted or no move improves.
pub fn greedy_marginal<S>(
    cfg: &GreedyConfig<S>,
    sc: &Scenario<S>,
    net: &Network<S>,
    dem: &DemandTable<S>,
) -> Result<Solution<S>>
where
    S: Scalar,
{
    let start = Instant::now();
    if !(cfg.step > S::zero()) {
        return Err(Error::invalid("greedy step must be positive"));
    }
    let ctx = EnergyContext::new(net, dem, sc, cfg.options, cfg.fitness)?;
    let n = ctx.dimension();
    let mut scratch = ctx.scratch();
    let mut current = vec![S::zero(); n];
    let mut current_energy = ctx.energy(&current, &mut scratch)?;
    let mut evaluations = 1u64;
    let mut remaining = sc.budget;
    let tiny: S = cast(1e-12);

    while remaining > tiny {
        let mut best_move: Option<(usize, S)> = None;
        let mut best_energy = current_energy;
        for k in 0..n {
            let room = ctx.damaged[k].headroom - current[k];
            let increment = cfg.step.min(room).min(remaining);
            if !(increment > S::zero()) {
                continue;
            }
            current[k] = current[k] + increment;
            let energy = ctx.energy(&current, &mut scratch)?;
            evaluations += 1;
            current[k] = current[k] - increment;
            if energy < best_energy {
                best_energy = energy;
                best_move = Some((k, increment));
            }
        }
        match best_move {
            Some((k, increment)) => {
                current[k] = current[k] + increment;
                current_energy = best_energy;
                remaining = remaining - increment;
            }
            None => break,
        }
    }

    ctx.make_solution(&current, "greedy", elapsed_s(start), evaluations, true)
}

/// Brute-force oracle configuration.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BruteForceConfig {
    /// Grid levels per link: candidate recoveries `{0, h/(g-1), ..., h}`.
    pub levels: usize,
    pub fitness: FitnessMode,
    pub options: ObjectiveOptions,
}

impl Default for BruteForceConfig {
    fn default() -> Self {
        BruteForceConfig {
            levels: 6,
            fitness: FitnessMode::Surrogate,
            options: ObjectiveOptions::default(),
        }
    }
}

/// Search-space ceiling for [`brute_force`].
pub const BRUTE_FORCE_LIMIT: u64 = 10_000_000;

/// Exhaustively enumerates every recovery vector on the per-link grid and
/// returns the exact grid minimizer of the energy. Ties keep the first
/// vector in lexicographic grid order.
pub fn brute_force<S>(
    cfg: &BruteForceConfig,
    sc: &Scenario<S>,
    net: &Network<S>,
    dem: &DemandTable<S>,
) -> Result<Solution<S>>
where
    S: Scalar,
{
    let start = Instant::now();
    if cfg.levels == 0 {
        return Err(Error::invalid("grid needs at least one level"));
    }
    let ctx = EnergyContext::new(net, dem, sc, cfg.options, cfg.fitness)?;
    let n = ctx.dimension();
    let combos = (cfg.levels as f64).powi(n as i32);
    if !(combos <= BRUTE_FORCE_LIMIT as f64) {
        return Err(Error::SearchSpaceTooLarge {
            levels: cfg.levels,
            links: n,
            limit: BRUTE_FORCE_LIMIT,
        });
    }
    if n == 0 {
        return ctx.make_solution(&[], "oracle", elapsed_s(start), 1, true);
    }

    let grids: Vec<Vec<S>> = ctx
        .damaged
        .iter()
        .map(|d| {
            (0..cfg.levels)
                .map(|level| {
                    if cfg.levels == 1 {
                        S::zero()
                    } else {
                        d.headroom * cast::<S>(level as f64 / (cfg.levels - 1) as f64)
                    }
                })
                .collect()
        })
        .collect();

    let mut scratch = ctx.scratch();
    let mut indices = vec![0usize; n];
    let mut candidate: Vec<S> = (0..n).map(|k| grids[k][0]).collect();
    let mut best = candidate.clone();
    let mut best_energy = ctx.energy(&candidate, &mut scratch)?;
    let mut evaluations = 1u64;

    // Odometer with the last link fastest: lexicographic over index tuples.
    loop {
        let mut pos = n;
        while pos > 0 {
            pos -= 1;
            indices[pos] += 1;
            if indices[pos] < cfg.levels {
                candidate[pos] = grids[pos][indices[pos]];
                break;
            }
            indices[pos] = 0;
            candidate[pos] = grids[pos][0];
            if pos == 0 {
                let solution =
                    ctx.make_solution(&best, "oracle", elapsed_s(start), evaluations, true)?;
                return Ok(solution);
            }
        }
        let energy = ctx.energy(&candidate, &mut scratch)?;
        evaluations += 1;
        if energy < best_energy {
            best_energy = energy;
            best.copy_from_slice(&candidate);
        }
    }
}

/// Energy of an arbitrary recovery vector under the same precomputation a
/// solver would use; exposed for oracle-style comparisons in tests and the
/// command-line report path.
pub fn solver_energy<S: Scalar>(
    sc: &Scenario<S>,
    net: &Network<S>,
    dem: &DemandTable<S>,
    recovery: &[S],
    fitness: FitnessMode,
    options: ObjectiveOptions,
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
    ctx.energy(recovery, &mut scratch)
}
