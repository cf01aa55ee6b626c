//! Subcommand orchestration: wire parsed arguments to the library, write
//! outputs, and map outcomes to exit codes.

use std::fs::{self, File, OpenOptions};
use std::io::Write;
use std::path::{Path, PathBuf};

use netmend_core::assign::{conservation_residual, solve_ue, CapacityVector, UEParams};
use serde::Serialize;

use crate::args::{AssignArgs, Cli, Command, FormatKind, ReportArgs, SolveArgs, SweepArgs};
use crate::inputs::{load, CliError, CliResult, Inputs};
use crate::report::{compare_report, plot_rows};
use crate::row::{row_from_solution, ReportRow};
use crate::runner::{classification, run_solver, trace_csv, RunSpec};
use crate::sweep::{run_sweep, SweepSpec};

/// Runs one parsed command line to completion.
pub fn dispatch(cli: Cli) -> CliResult<()> {
    match cli.command {
        Command::Solve(args) => solve(args),
        Command::Sweep(args) => sweep(args),
        Command::Assign(args) => assign(args),
        Command::Report(args) => report(args),
        Command::Validate(args) => validate(args),
    }
}

// ---------------------------------------------------------------------------
// Row output

/// Serializes rows of any shape to CSV text, header first.
fn csv_text<T: Serialize>(rows: &[T]) -> CliResult<String> {
    let mut writer = csv::Writer::from_writer(Vec::new());
    for row in rows {
        writer.serialize(row).map_err(|e| CliError::input(format!("cannot encode row: {e}")))?;
    }
    let bytes = writer.into_inner().map_err(|e| CliError::input(format!("cannot encode rows: {e}")))?;
    String::from_utf8(bytes).map_err(|e| CliError::input(format!("row encoding is not utf-8: {e}")))
}

/// Serializes rows as JSON Lines (one object per line), the appendable
/// structured variant.
fn json_lines<T: Serialize>(rows: &[T]) -> CliResult<String> {
    let mut out = String::new();
    for row in rows {
        let line = serde_json::to_string(row)
            .map_err(|e| CliError::input(format!("cannot encode row: {e}")))?;
        out.push_str(&line);
        out.push('\n');
    }
    Ok(out)
}

fn write_output(path: Option<&Path>, text: &str) -> CliResult<()> {
    match path {
        Some(path) => fs::write(path, text)
            .map_err(|e| CliError::input(format!("cannot write {}: {e}", path.display()))),
        None => {
            print!("{text}");
            std::io::stdout().flush().map_err(CliError::from)
        }
    }
}

/// Incremental row writer for sweeps: appends to a file (adding the CSV
/// header only when the file starts empty) or streams to stdout, flushing
/// after every row so interrupted sweeps keep their finished rows.
struct RowSink {
    format: FormatKind,
    target: Option<File>,
    header_due: bool,
}

impl RowSink {
    fn open(path: Option<&PathBuf>, format: FormatKind) -> CliResult<Self> {
        match path {
            Some(path) => {
                let file = OpenOptions::new()
                    .create(true)
                    .append(true)
                    .open(path)
                    .map_err(|e| CliError::input(format!("cannot open {}: {e}", path.display())))?;
                let empty = file
                    .metadata()
                    .map_err(|e| CliError::input(format!("cannot stat {}: {e}", path.display())))?
                    .len()
                    == 0;
                Ok(RowSink { format, target: Some(file), header_due: empty })
            }
            None => Ok(RowSink { format, target: None, header_due: true }),
        }
    }

    fn write(&mut self, row: &ReportRow) -> CliResult<()> {
        let text = match self.format {
            FormatKind::Csv => {
                let full = csv_text(std::slice::from_ref(row))?;
                if self.header_due {
                    full
                } else {
                    // drop the header line the encoder always produces
                    full.split_once('\n').map(|(_, rest)| rest.to_string()).unwrap_or(full)
                }
            }
            FormatKind::Json => json_lines(std::slice::from_ref(row))?,
        };
        self.header_due = false;
        match &mut self.target {
            Some(file) => {
                file.write_all(text.as_bytes()).map_err(CliError::from)?;
                file.flush().map_err(CliError::from)
            }
            None => {
                print!("{text}");
                std::io::stdout().flush().map_err(CliError::from)
            }
        }
    }
}

// ---------------------------------------------------------------------------
// solve

fn solve(args: SolveArgs) -> CliResult<()> {
    let Inputs { net, dem, sc } = load(&args.input)?.with_overrides(args.budget, args.mu)?;
    let classes = classification(&net, &sc)?;
    let spec = RunSpec::from_args(args.solver, args.seed, &args.objective, args.cqm_endpoint.clone());
    let (solution, trace) = run_solver(&spec, &sc, &net, &dem)?;
    let row = row_from_solution(&solution, sc.budget, sc.mu, args.seed, &classes);

    eprintln!(
        "{} on {} damaged links  budget {}  mu {}  seed {}",
        row.solver,
        sc.damaged.len(),
        row.budget,
        row.mu,
        row.seed
    );
    eprintln!(
        "H {:.6}  (D {:.6}, E {:.6}, R {:.6})",
        row.hamiltonian, row.deficiency, row.equity, row.objective
    );
    eprintln!(
        "cost {:.4} of {} ({})  restored: low {:.3}, average {:.3}, high {:.3}",
        row.cost,
        row.budget,
        if solution.feasible { "feasible" } else { "infeasible" },
        row.low,
        row.average,
        row.high
    );
    eprintln!(
        "wall time {:.3} s  evaluations {}  converged {}",
        row.wall_time_s, solution.evaluations, solution.converged
    );

    if let Some(path) = &args.trace_out {
        match trace_csv(&trace) {
            Some(text) => fs::write(path, text)
                .map_err(|e| CliError::input(format!("cannot write {}: {e}", path.display())))?,
            None => eprintln!("note: the {} solver emits no trace", row.solver),
        }
    }

    let text = match args.format {
        FormatKind::Csv => csv_text(std::slice::from_ref(&row))?,
        FormatKind::Json => {
            let mut text = serde_json::to_string_pretty(&row)
                .map_err(|e| CliError::input(format!("cannot encode row: {e}")))?;
            text.push('\n');
            text
        }
    };
    write_output(args.out.as_deref(), &text)?;

    if solution.feasible {
        Ok(())
    } else {
        Err(CliError::Infeasible("solver returned an infeasible plan".to_string()))
    }
}

// ---------------------------------------------------------------------------
// sweep

fn sweep(args: SweepArgs) -> CliResult<()> {
    let Inputs { net, dem, sc } = load(&args.input)?;
    let spec = SweepSpec {
        budgets: args.budgets.clone(),
        mus: args.mus.clone(),
        solvers: args.solvers.clone(),
        seeds: args.seeds.clone(),
    };
    spec.validate()?;
    let classes = classification(&net, &sc)?;
    let cells = spec.cells(&args.objective, args.cqm_endpoint.as_ref());
    eprintln!("sweep: {} cells ({} budgets x {} mus x {} solvers x {} seeds)",
        cells.len(), spec.budgets.len(), spec.mus.len(), spec.solvers.len(), spec.seeds.len());

    let mut sink = RowSink::open(args.out.as_ref(), args.format)?;
    let mut written = 0usize;
    run_sweep(&cells, &net, &dem, &sc, &classes, args.jobs, |row| {
        sink.write(&row)?;
        written += 1;
        Ok(())
    })?;
    eprintln!("sweep: wrote {written} rows");
    Ok(())
}

// ---------------------------------------------------------------------------
// assign

#[derive(Serialize)]
struct FlowRow {
    link: u32,
    from: u32,
    to: u32,
    capacity: f64,
    flow: f64,
    time: f64,
}

#[derive(Serialize)]
struct AssignSummary {
    total_travel_time: f64,
    iterations: usize,
    relative_gap: f64,
    converged: bool,
    conservation_residual: f64,
    flows: Vec<FlowRow>,
}

fn assign(args: AssignArgs) -> CliResult<()> {
    let Inputs { net, dem, sc } = load(&args.input)?;
    let caps = if args.damaged {
        CapacityVector::unrestored(&net, &sc)?
    } else {
        CapacityVector::intact(&net)
    };
    let params = UEParams::from_scenario(&sc);
    let result = solve_ue(&net, &dem, &caps, &params)?;
    let residual = conservation_residual(&net, &dem, &result.flows);

    eprintln!(
        "equilibrium on the {} network: total travel time {:.4}",
        if args.damaged { "damaged" } else { "intact" },
        result.total_travel_time
    );
    eprintln!(
        "iterations {}  relative gap {:.3e}  converged {}  conservation residual {:.3e}",
        result.iterations, result.relative_gap, result.converged, residual
    );

    let flows: Vec<FlowRow> = net
        .links()
        .iter()
        .enumerate()
        .map(|(i, link)| FlowRow {
            link: link.id.0,
            from: link.from.0,
            to: link.to.0,
            capacity: caps.as_slice()[i],
            flow: result.flows[i],
            time: result.times[i],
        })
        .collect();

    let text = match args.format {
        FormatKind::Csv => csv_text(&flows)?,
        FormatKind::Json => {
            let summary = AssignSummary {
                total_travel_time: result.total_travel_time,
                iterations: result.iterations,
                relative_gap: result.relative_gap,
                converged: result.converged,
                conservation_residual: residual,
                flows,
            };
            let mut text = serde_json::to_string_pretty(&summary)
                .map_err(|e| CliError::input(format!("cannot encode result: {e}")))?;
            text.push('\n');
            text
        }
    };
    write_output(args.out.as_deref(), &text)
}

// ---------------------------------------------------------------------------
// report

fn read_rows(path: &Path) -> CliResult<Vec<ReportRow>> {
    let mut reader = csv::Reader::from_path(path)
        .map_err(|e| CliError::input(format!("cannot read {}: {e}", path.display())))?;
    let mut rows = Vec::new();
    for record in reader.deserialize::<ReportRow>() {
        rows.push(record.map_err(|e| CliError::input(format!("bad row in {}: {e}", path.display())))?);
    }
    Ok(rows)
}

fn report(args: ReportArgs) -> CliResult<()> {
    let rows = read_rows(&args.input)?;
    let comparison = compare_report(&rows)?;

    let text = match args.format {
        FormatKind::Csv => csv_text(&comparison)?,
        FormatKind::Json => {
            let mut text = serde_json::to_string_pretty(&comparison)
                .map_err(|e| CliError::input(format!("cannot encode comparison: {e}")))?;
            text.push('\n');
            text
        }
    };
    write_output(args.out.as_deref(), &text)?;

    if let Some(path) = &args.plot_out {
        let plot = plot_rows(&rows);
        fs::write(path, csv_text(&plot)?)
            .map_err(|e| CliError::input(format!("cannot write {}: {e}", path.display())))?;
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// validate

fn validate(args: crate::args::InputArgs) -> CliResult<()> {
    // load() runs full validation and reports every violation at once
    let Inputs { net, dem, sc } = load(&args)?;
    let damaged = sc.damaged_links(&net)?;
    let headroom: f64 = damaged.iter().map(|d| d.headroom).sum();
    println!(
        "ok: {} zones, {} links, demand total {:.3}, {} damaged links, recoverable headroom {:.2}, budget {}",
        dem.zones(),
        net.num_links(),
        dem.total(),
        damaged.len(),
        headroom,
        sc.budget
    );
    Ok(())
}
