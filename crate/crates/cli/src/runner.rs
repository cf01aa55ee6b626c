//! Solver dispatch: one (solver, budget, mu, seed) run on loaded inputs.

use std::collections::BTreeMap;

use netmend_core::anneal::{brute_force, greedy_marginal, run_sa, AnnealConfig, BruteForceConfig, GreedyConfig, SaTraceRow};
use netmend_core::cqm::{submit_cqm, CqmClient, CqmClientConfig};
use netmend_core::demand::DemandTable;
use netmend_core::ga::{run_ga, GaConfig, GaTraceRow};
use netmend_core::network::{LinkId, Network};
use netmend_core::objective::{EquityMode, ObjectiveOptions, PenaltyMode};
use netmend_core::scenario::{classify_links_by_income, IncomeClass, Scenario};
use netmend_core::solution::{FitnessMode, Solution};
use netmend_core::Result as CoreResult;

use crate::args::{EquityKind, FitnessKind, ObjectiveArgs, PenaltyKind, SolverKind, CQM_TOKEN_ENV};

/// Progress trace of the solver that ran, when it produces one.
#[derive(Debug)]
pub enum Trace {
    Sa(Vec<SaTraceRow>),
    Ga(Vec<GaTraceRow>),
    None,
}

/// Everything needed to run one solver on one scenario configuration.
#[derive(Debug, Clone)]
pub struct RunSpec {
    pub solver: SolverKind,
    pub seed: u64,
    pub options: ObjectiveOptions,
    pub fitness: Option<FitnessKind>,
    pub cqm_endpoint: Option<String>,
}

impl RunSpec {
    pub fn from_args(
        solver: SolverKind,
        seed: u64,
        objective: &ObjectiveArgs,
        cqm_endpoint: Option<String>,
    ) -> Self {
        RunSpec {
            solver,
            seed,
            options: objective_options(objective),
            fitness: objective.fitness,
            cqm_endpoint,
        }
    }

    fn fitness_for(&self, default: FitnessMode) -> FitnessMode {
        match self.fitness {
            Some(FitnessKind::Surrogate) => FitnessMode::Surrogate,
            Some(FitnessKind::Full) => FitnessMode::FullUe,
            None => default,
        }
    }
}

fn objective_options(args: &ObjectiveArgs) -> ObjectiveOptions {
    ObjectiveOptions {
        equity: match args.equity {
            EquityKind::Literal => EquityMode::Literal,
            EquityKind::Quadratic => EquityMode::Quadratic,
            EquityKind::Responsive => EquityMode::Responsive,
        },
        penalty: match args.penalty {
            PenaltyKind::Equality => PenaltyMode::Equality,
            PenaltyKind::OneSided => PenaltyMode::OneSided,
        },
    }
}

/// Runs the chosen solver. The scenario carries the budget and mu; the spec
/// carries everything else.
pub fn run_solver(
    spec: &RunSpec,
    sc: &Scenario,
    net: &Network,
    dem: &DemandTable,
) -> CoreResult<(Solution, Trace)> {
    match spec.solver {
        SolverKind::Sa => {
            let cfg = AnnealConfig {
                rng_seed: spec.seed,
                fitness: spec.fitness_for(FitnessMode::Surrogate),
                options: spec.options,
                ..AnnealConfig::default()
            };
            let (solution, trace) = run_sa(&cfg, sc, net, dem)?;
            Ok((solution, Trace::Sa(trace)))
        }
        SolverKind::Ga => {
            let cfg = GaConfig {
                rng_seed: spec.seed,
                fitness: spec.fitness_for(FitnessMode::FullUe),
                options: spec.options,
                ..GaConfig::default()
            };
            let (solution, trace) = run_ga(&cfg, sc, net, dem)?;
            Ok((solution, Trace::Ga(trace)))
        }
        SolverKind::Greedy => {
            let cfg = GreedyConfig {
                fitness: spec.fitness_for(FitnessMode::Surrogate),
                options: spec.options,
                ..GreedyConfig::default()
            };
            Ok((greedy_marginal(&cfg, sc, net, dem)?, Trace::None))
        }
        SolverKind::Oracle => {
            let cfg = BruteForceConfig {
                fitness: spec.fitness_for(FitnessMode::Surrogate),
                options: spec.options,
                ..BruteForceConfig::default()
            };
            Ok((brute_force(&cfg, sc, net, dem)?, Trace::None))
        }
        SolverKind::Cqm => {
            let endpoint = spec.cqm_endpoint.clone().ok_or_else(|| {
                netmend_core::Error::Invalid(
                    "the cqm solver needs --cqm-endpoint (token read from NETMEND_CQM_TOKEN)"
                        .to_string(),
                )
            })?;
            let token = std::env::var(CQM_TOKEN_ENV).ok();
            let client = CqmClient::new(CqmClientConfig::new(endpoint, token))?;
            let solution = submit_cqm(sc, net, dem, spec.options, &client)?;
            Ok((solution, Trace::None))
        }
    }
}

/// Link income classes for aggregation, computed once per dataset.
pub fn classification(
    net: &Network,
    sc: &Scenario,
) -> CoreResult<BTreeMap<LinkId, IncomeClass>> {
    classify_links_by_income(net, sc)
}

/// Serializes a trace: sa rows are per temperature level, ga rows per
/// generation. Solvers without a trace yield no file content.
pub fn trace_csv(trace: &Trace) -> Option<String> {
    match trace {
        Trace::Sa(rows) => {
            let mut out = String::from("step,temperature,current_H,best_H\n");
            for r in rows {
                out.push_str(&format!("{},{},{},{}\n", r.step, r.temperature, r.current, r.best));
            }
            Some(out)
        }
        Trace::Ga(rows) => {
            let mut out = String::from("generation,best_fitness,mean_fitness,elapsed_s\n");
            for r in rows {
                out.push_str(&format!("{},{},{},{}\n", r.generation, r.best, r.mean, r.elapsed_s));
            }
            Some(out)
        }
        Trace::None => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::args::ObjectiveArgs;
    use netmend_core::dataset::sioux_falls;

    fn objective() -> ObjectiveArgs {
        ObjectiveArgs {
            equity: EquityKind::Responsive,
            penalty: PenaltyKind::Equality,
            fitness: None,
        }
    }

    #[test]
    fn cqm_without_endpoint_is_a_configuration_error() {
        let (net, dem, sc) = sioux_falls();
        let spec = RunSpec::from_args(SolverKind::Cqm, 0, &objective(), None);
        let err = run_solver(&spec, &sc, &net, &dem).unwrap_err();
        assert!(err.to_string().contains("--cqm-endpoint"));
    }

    #[test]
    fn greedy_runs_and_respects_budget() {
        let (net, dem, mut sc) = sioux_falls();
        sc.budget = 20.0;
        let spec = RunSpec::from_args(SolverKind::Greedy, 0, &objective(), None);
        let (solution, trace) = run_solver(&spec, &sc, &net, &dem).unwrap();
        assert!(solution.plan.cost() <= 20.0 + 1e-6);
        assert!(trace_csv(&trace).is_none());
    }

    #[test]
    fn sa_trace_serializes_with_header() {
        let (net, dem, mut sc) = sioux_falls();
        sc.budget = 10.0;
        let spec = RunSpec::from_args(SolverKind::Sa, 3, &objective(), None);
        let (_, trace) = run_solver(&spec, &sc, &net, &dem).unwrap();
        let text = trace_csv(&trace).unwrap();
        assert!(text.starts_with("step,temperature,current_H,best_H\n"));
        assert!(text.lines().count() > 1);
    }
}
