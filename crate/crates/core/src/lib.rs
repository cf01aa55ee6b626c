//! Equitable post-disaster road-network restoration planning.
//!
//! The library models a road network whose links have lost capacity, finds
//! the resulting user-equilibrium traffic pattern, and searches for the best
//! way to spend a limited repair budget. "Best" balances two costs through
//! `R = mu*D + (1-mu)*E`: the network-wide travel-time deficiency `D` left
//! after repairs, and an equity term `E` measuring how unevenly recovery is
//! distributed across income groups.
//!
//! Main pieces:
//!
//! - [`network`], [`demand`], [`scenario`]: input model — directed links with
//!   BPR congestion parameters, origin–destination trip tables, and damage
//!   scenarios (residual capacities, budget, objective weights, zone incomes).
//! - [`assign`]: Frank–Wolfe user-equilibrium assignment with BPR travel
//!   times, relative-gap convergence, and flow-conservation checks.
//! - [`objective`]: travel-time deficiency (full and surrogate), Gini-style
//!   equity measures, the combined resilience score, quadratic budget and
//!   capacity penalties, and budget projection for repair plans.
//! - [`anneal`]: simulated annealing over the penalized objective, a greedy
//!   marginal-improvement baseline, and an exhaustive grid oracle for small
//!   instances.
//! - [`ga`]: a genetic algorithm with budget-repairing crossover and
//!   cost-preserving mutation.
//! - [`cqm`]: a client for an external constrained-quadratic-model solving
//!   service, plus an offline scripted stand-in for tests.
//! - [`dataset`]: the built-in Sioux Falls benchmark (network, trips, and a
//!   damage scenario) used by the command-line tool's defaults.
//!
//! Everything numerical is generic over the scalar type through the
//! [`scalar::Scalar`] trait (any `num_traits::Float`, in practice `f32` or
//! `f64`). The unsuffixed type names default to `f64`; `*32` aliases below
//! select single precision.

pub mod anneal;
pub mod assign;
pub mod cqm;
pub mod dataset;
pub mod demand;
pub mod error;
pub mod ga;
pub mod network;
pub mod objective;
pub mod scalar;
pub mod scenario;
pub mod solution;

#[cfg(test)]
mod fixtures;

pub use anneal::{
    brute_force, greedy_marginal, run_sa, solver_energy, AnnealConfig, BruteForceConfig,
    GreedyConfig, SaTraceRow, BRUTE_FORCE_LIMIT,
};
pub use assign::{
    all_or_nothing, bpr_integral, bpr_time, conservation_residual, solve_ue, AssignmentResult,
    CapacityVector, UEParams, EPSILON_CAPACITY,
};
pub use cqm::{build_payload, submit_cqm, CqmClient, CqmClientConfig, CqmError, CqmPayload};
pub use demand::{parse_trips, serialize_trips, DemandTable};
pub use error::{Error, Result};
pub use ga::{ga_fitness, run_ga, GaConfig, GaTraceRow, SelectionMethod};
pub use network::{parse_network, serialize_network, Link, LinkId, Network, ParseOptions, ZoneId};
pub use objective::{
    deficiency_full, deficiency_surrogate, effective_capacities, enforce_budget, equity_literal,
    equity_quadratic, equity_responsive, gini, hamiltonian, resilience, score_plan, EquityMode,
    ObjectiveBreakdown, ObjectiveOptions, PenaltyMode, RestorationPlan,
};
pub use scenario::{
    classify_links_by_income, load_scenario, parse_scenario, validate, DamagedLink, IncomeClass,
    Scenario, Violation,
};
pub use solution::{FitnessMode, Solution};

/// Single-precision aliases; the unsuffixed names default to `f64`.
pub type Network32 = network::Network<f32>;
pub type Link32 = network::Link<f32>;
pub type DemandTable32 = demand::DemandTable<f32>;
pub type Scenario32 = scenario::Scenario<f32>;
pub type RestorationPlan32 = objective::RestorationPlan<f32>;
pub type Solution32 = solution::Solution<f32>;
