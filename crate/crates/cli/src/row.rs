//! Report rows: one solver run, its objective breakdown, and the restored
//! capacity per income group.

use std::collections::BTreeMap;

use netmend_core::network::LinkId;
use netmend_core::scenario::IncomeClass;
use netmend_core::solution::Solution;
use serde::{Deserialize, Serialize};

/// One line of a report: inputs that identify the run, the scored plan, and
/// the per-income-group split of the restored capacity.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportRow {
    pub solver: String,
    pub budget: f64,
    pub mu: f64,
    pub seed: u64,
    #[serde(rename = "D")]
    pub deficiency: f64,
    #[serde(rename = "E")]
    pub equity: f64,
    #[serde(rename = "R")]
    pub objective: f64,
    #[serde(rename = "H")]
    pub hamiltonian: f64,
    pub cost: f64,
    pub wall_time_s: f64,
    pub low: f64,
    pub average: f64,
    pub high: f64,
    /// "ok", or the failure that kept this cell from producing a plan.
    pub status: String,
}

/// Restored capacity per income class; buckets partition the plan's total.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GroupCapacities {
    pub low: f64,
    pub average: f64,
    pub high: f64,
}

impl GroupCapacities {
    pub fn total(&self) -> f64 {
        self.low + self.average + self.high
    }
}

/// Sums the plan's restored capacity per income class of the link.
pub fn aggregate_by_income(
    solution: &Solution,
    classification: &BTreeMap<LinkId, IncomeClass>,
) -> GroupCapacities {
    let mut groups = GroupCapacities { low: 0.0, average: 0.0, high: 0.0 };
    for (id, amount) in solution.plan.iter() {
        match classification.get(&id) {
            Some(IncomeClass::Low) => groups.low += amount,
            Some(IncomeClass::Average) => groups.average += amount,
            Some(IncomeClass::High) => groups.high += amount,
            // classify_links_by_income covers every damaged link; an absent
            // entry would mean the classification came from elsewhere.
            None => groups.average += amount,
        }
    }
    groups
}

/// Builds the row for a completed run.
pub fn row_from_solution(
    solution: &Solution,
    budget: f64,
    mu: f64,
    seed: u64,
    classification: &BTreeMap<LinkId, IncomeClass>,
) -> ReportRow {
    let groups = aggregate_by_income(solution, classification);
    ReportRow {
        solver: solution.solver.to_string(),
        budget,
        mu,
        seed,
        deficiency: solution.breakdown.deficiency,
        equity: solution.breakdown.equity,
        objective: solution.breakdown.objective,
        hamiltonian: solution.breakdown.hamiltonian,
        cost: solution.plan.cost(),
        wall_time_s: solution.wall_time_s,
        low: groups.low,
        average: groups.average,
        high: groups.high,
        status: if solution.feasible { "ok".to_string() } else { "infeasible".to_string() },
    }
}

/// Builds the row for a cell whose solver returned an error; numeric fields
/// are NaN so they cannot be mistaken for results.
pub fn failure_row(
    solver: &str,
    budget: f64,
    mu: f64,
    seed: u64,
    wall_time_s: f64,
    message: &str,
) -> ReportRow {
    ReportRow {
        solver: solver.to_string(),
        budget,
        mu,
        seed,
        deficiency: f64::NAN,
        equity: f64::NAN,
        objective: f64::NAN,
        hamiltonian: f64::NAN,
        cost: f64::NAN,
        wall_time_s,
        low: f64::NAN,
        average: f64::NAN,
        high: f64::NAN,
        status: format!("error: {message}"),
    }
}
