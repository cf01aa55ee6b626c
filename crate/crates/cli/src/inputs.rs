//! Input loading: files when given, the built-in dataset otherwise, plus
//! validation and per-run overrides.

use std::fmt;
use std::fs;
use std::path::Path;
use std::process::ExitCode;

use netmend_core::cqm::CqmError;
use netmend_core::dataset;
use netmend_core::demand::{parse_trips, DemandTable};
use netmend_core::network::{parse_network, Network, ParseOptions};
use netmend_core::scenario::{load_scenario, validate, Scenario};
use netmend_core::Error as CoreError;

use crate::args::InputArgs;

/// CLI failure, carrying the process exit code: 1 when a solver produced or
/// reported an infeasible outcome, 2 for bad input or configuration.
#[derive(Debug)]
pub enum CliError {
    Input(String),
    Infeasible(String),
}

impl CliError {
    pub fn exit_code(&self) -> ExitCode {
        match self {
            CliError::Infeasible(_) => ExitCode::from(1),
            CliError::Input(_) => ExitCode::from(2),
        }
    }

    pub fn input(msg: impl Into<String>) -> Self {
        CliError::Input(msg.into())
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Input(msg) | CliError::Infeasible(msg) => write!(f, "{msg}"),
        }
    }
}

impl From<CoreError> for CliError {
    fn from(err: CoreError) -> Self {
        match &err {
            CoreError::Cqm(CqmError::Infeasible(_)) => CliError::Infeasible(err.to_string()),
            _ => CliError::Input(err.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(err: std::io::Error) -> Self {
        CliError::Input(err.to_string())
    }
}

pub type CliResult<T> = Result<T, CliError>;

/// A fully loaded and validated problem instance.
#[derive(Debug)]
pub struct Inputs {
    pub net: Network,
    pub dem: DemandTable,
    pub sc: Scenario,
}

fn read(path: &Path, what: &str) -> CliResult<String> {
    fs::read_to_string(path)
        .map_err(|e| CliError::input(format!("cannot read {what} file {}: {e}", path.display())))
}

/// Loads the three inputs, falling back to the built-in Sioux Falls dataset
/// for any file not given. The triple is validated as a whole; any violation
/// is an input error.
pub fn load(args: &InputArgs) -> CliResult<Inputs> {
    let net = match &args.network {
        Some(path) => parse_network(&read(path, "network")?, &ParseOptions::default())?,
        None => dataset::sioux_falls_network(),
    };
    let dem = match &args.trips {
        Some(path) => parse_trips(&read(path, "trips")?)?,
        None => dataset::sioux_falls_demand(),
    };
    let sc = match &args.scenario {
        Some(path) => load_scenario(path)?,
        None => dataset::sioux_falls_scenario(),
    };
    let inputs = Inputs { net, dem, sc };
    inputs.check()?;
    Ok(inputs)
}

impl Inputs {
    fn check(&self) -> CliResult<()> {
        let violations = validate(&self.net, &self.dem, &self.sc);
        if violations.is_empty() {
            return Ok(());
        }
        let lines: Vec<String> = violations.iter().map(|v| v.to_string()).collect();
        Err(CliError::input(format!("scenario failed validation:\n{}", lines.join("\n"))))
    }

    /// Applies per-run overrides and re-checks the affected fields.
    pub fn with_overrides(mut self, budget: Option<f64>, mu: Option<f64>) -> CliResult<Self> {
        if let Some(b) = budget {
            if b < 0.0 {
                return Err(CliError::input(format!("budget {b} is negative")));
            }
            self.sc.budget = b;
        }
        if let Some(m) = mu {
            if !(0.0..=1.0).contains(&m) {
                return Err(CliError::input(format!("mu {m} outside [0, 1]")));
            }
            self.sc.mu = m;
        }
        Ok(self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::args::InputArgs;
    use std::path::PathBuf;

    fn no_files() -> InputArgs {
        InputArgs { network: None, trips: None, scenario: None }
    }

    #[test]
    fn builtin_dataset_loads_and_validates() {
        let inputs = load(&no_files()).unwrap();
        assert_eq!(inputs.net.num_links(), 76);
        assert_eq!(inputs.sc.damaged.len(), 25);
    }

    #[test]
    fn missing_trips_file_is_an_input_error_naming_the_path() {
        let args = InputArgs {
            network: None,
            trips: Some(PathBuf::from("/nonexistent/trips.txt")),
            scenario: None,
        };
        let err = load(&args).unwrap_err();
        assert!(matches!(err, CliError::Input(_)));
        assert!(err.to_string().contains("/nonexistent/trips.txt"));
    }

    #[test]
    fn override_rejects_bad_mu() {
        let err = load(&no_files()).unwrap().with_overrides(None, Some(1.5)).unwrap_err();
        assert!(err.to_string().contains("mu"));
    }
}
