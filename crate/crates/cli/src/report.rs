//! Post-hoc comparison of report rows: best result per (budget, solver),
//! budget-utilization flags, and tidy plot data.

use serde::Serialize;

use crate::inputs::{CliError, CliResult};
use crate::row::ReportRow;

/// Best row (lowest H) for one solver at one budget.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComparisonRow {
    pub budget: f64,
    pub solver: String,
    pub best_h: f64,
    pub cost: f64,
    pub wall_time_s: f64,
    /// Share of the budget the best plan spends.
    pub budget_utilization: f64,
    /// "full" at ≥ 97% spend, "under" below — the gap worth flagging when
    /// solvers are compared on equal budgets.
    pub utilization_flag: String,
}

/// One tidy long-format observation for external plotting.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PlotRow {
    pub variable: String,
    pub group: String,
    pub budget: f64,
    pub value: f64,
}

/// Compares solvers per budget over successful rows. Needs at least two
/// distinct solvers to compare.
pub fn compare_report(rows: &[ReportRow]) -> CliResult<Vec<ComparisonRow>> {
    let mut solvers: Vec<&str> = rows.iter().map(|r| r.solver.as_str()).collect();
    solvers.sort_unstable();
    solvers.dedup();
    if solvers.len() < 2 {
        return Err(CliError::input("need two solvers to compare"));
    }

    let mut keys: Vec<(u64, &str)> = Vec::new();
    let mut out: Vec<ComparisonRow> = Vec::new();
    for row in rows.iter().filter(|r| r.status == "ok" && r.hamiltonian.is_finite()) {
        let key = (row.budget.to_bits(), row.solver.as_str());
        let slot = keys.iter().position(|k| *k == key);
        let better = match slot {
            Some(i) => row.hamiltonian < out[i].best_h,
            None => true,
        };
        if !better {
            continue;
        }
        let utilization = if row.budget > 0.0 { row.cost / row.budget } else { 1.0 };
        let comparison = ComparisonRow {
            budget: row.budget,
            solver: row.solver.clone(),
            best_h: row.hamiltonian,
            cost: row.cost,
            wall_time_s: row.wall_time_s,
            budget_utilization: utilization,
            utilization_flag: if utilization >= 0.97 { "full" } else { "under" }.to_string(),
        };
        match slot {
            Some(i) => out[i] = comparison,
            None => {
                keys.push(key);
                out.push(comparison);
            }
        }
    }
    out.sort_by(|a, b| {
        a.budget
            .partial_cmp(&b.budget)
            .unwrap()
            .then_with(|| a.solver.cmp(&b.solver))
    });
    Ok(out)
}

/// Flattens rows for plotting: restored capacity per income group plus the
/// per-run scalars, one observation per line.
pub fn plot_rows(rows: &[ReportRow]) -> Vec<PlotRow> {
    let mut out = Vec::new();
    for row in rows.iter().filter(|r| r.status == "ok") {
        let run = format!("{}/mu={}/seed={}", row.solver, row.mu, row.seed);
        for (class, value) in [("low", row.low), ("average", row.average), ("high", row.high)] {
            out.push(PlotRow {
                variable: "restored_capacity".to_string(),
                group: format!("{run}/{class}"),
                budget: row.budget,
                value,
            });
        }
        for (variable, value) in [
            ("deficiency", row.deficiency),
            ("equity", row.equity),
            ("objective", row.objective),
            ("hamiltonian", row.hamiltonian),
            ("cost", row.cost),
            ("wall_time_s", row.wall_time_s),
        ] {
            out.push(PlotRow {
                variable: variable.to_string(),
                group: run.clone(),
                budget: row.budget,
                value,
            });
        }
    }
    out
}
