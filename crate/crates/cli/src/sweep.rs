//! Budget × mu × solver × seed sweeps: cells run in parallel, rows stream
//! out in grid order as they complete, and a failed cell becomes a row
//! rather than aborting the sweep.

use std::collections::BTreeMap;
use std::sync::mpsc;
use std::time::Instant;

use netmend_core::demand::DemandTable;
use netmend_core::network::{LinkId, Network};
use netmend_core::scenario::{IncomeClass, Scenario};

use crate::args::{ObjectiveArgs, SolverKind};
use crate::inputs::{CliError, CliResult};
use crate::row::{failure_row, row_from_solution, ReportRow};
use crate::runner::{run_solver, RunSpec};

/// The grid to sweep. Rows are emitted in the order budgets → mus → solvers
/// → seeds, regardless of which cell finishes first.
#[derive(Debug, Clone)]
pub struct SweepSpec {
    pub budgets: Vec<f64>,
    pub mus: Vec<f64>,
    pub solvers: Vec<SolverKind>,
    pub seeds: Vec<u64>,
}

impl SweepSpec {
    pub fn validate(&self) -> CliResult<()> {
        if self.budgets.is_empty() || self.mus.is_empty() || self.solvers.is_empty() || self.seeds.is_empty() {
            return Err(CliError::input("sweep lists (budgets, mus, solvers, seeds) must be non-empty"));
        }
        if let Some(b) = self.budgets.iter().find(|b| **b < 0.0) {
            return Err(CliError::input(format!("budget {b} is negative")));
        }
        if let Some(m) = self.mus.iter().find(|m| !(0.0..=1.0).contains(*m)) {
            return Err(CliError::input(format!("mu {m} outside [0, 1]")));
        }
        Ok(())
    }

    /// Cells in canonical (grid) order.
    pub fn cells(&self, objective: &ObjectiveArgs, cqm_endpoint: Option<&String>) -> Vec<Cell> {
        let mut cells = Vec::new();
        for &budget in &self.budgets {
            for &mu in &self.mus {
                for &solver in &self.solvers {
                    for &seed in &self.seeds {
                        cells.push(Cell {
                            budget,
                            mu,
                            spec: RunSpec::from_args(solver, seed, objective, cqm_endpoint.cloned()),
                        });
                    }
                }
            }
        }
        cells
    }
}

/// One grid point.
#[derive(Debug, Clone)]
pub struct Cell {
    pub budget: f64,
    pub mu: f64,
    pub spec: RunSpec,
}

fn run_cell(
    cell: &Cell,
    net: &Network,
    dem: &DemandTable,
    base: &Scenario,
    classes: &BTreeMap<LinkId, IncomeClass>,
) -> ReportRow {
    let mut sc = base.clone();
    sc.budget = cell.budget;
    sc.mu = cell.mu;
    let started = Instant::now();
    match run_solver(&cell.spec, &sc, net, dem) {
        Ok((solution, _)) => row_from_solution(&solution, cell.budget, cell.mu, cell.spec.seed, classes),
        Err(err) => failure_row(
            cell.spec.solver.name(),
            cell.budget,
            cell.mu,
            cell.spec.seed,
            started.elapsed().as_secs_f64(),
            &err.to_string(),
        ),
    }
}

/// Runs every cell, up to `jobs` at a time, calling `emit` for each row in
/// canonical order as soon as that row's turn is complete. `emit` failures
/// stop the sweep's output but finished cells are never recomputed.
pub fn run_sweep(
    cells: &[Cell],
    net: &Network,
    dem: &DemandTable,
    base: &Scenario,
    classes: &BTreeMap<LinkId, IncomeClass>,
    jobs: Option<usize>,
    mut emit: impl FnMut(ReportRow) -> CliResult<()>,
) -> CliResult<()> {
    let pool = {
        let mut builder = rayon::ThreadPoolBuilder::new();
        if let Some(n) = jobs {
            if n == 0 {
                return Err(CliError::input("--jobs must be at least 1"));
            }
            builder = builder.num_threads(n);
        }
        builder.build().map_err(|e| CliError::input(format!("cannot build thread pool: {e}")))?
    };

    let (tx, rx) = mpsc::channel::<(usize, ReportRow)>();
    std::thread::scope(|scope| -> CliResult<()> {
        scope.spawn(|| {
            pool.scope(|s| {
                for (idx, cell) in cells.iter().enumerate() {
                    let tx = tx.clone();
                    s.spawn(move |_| {
                        let row = run_cell(cell, net, dem, base, classes);
                        // the receiver only disappears on writer failure
                        let _ = tx.send((idx, row));
                    });
                }
            });
            drop(tx);
        });

        let mut next = 0usize;
        let mut parked: BTreeMap<usize, ReportRow> = BTreeMap::new();
        for (idx, row) in rx {
            parked.insert(idx, row);
            while let Some(row) = parked.remove(&next) {
                emit(row)?;
                next += 1;
            }
        }
        Ok(())
    })
}
