//! `qsl`: command-line experiments on quantum speed limits.
//!
//! Exit codes: 0 success, 2 usage or input schema, 3 physical invariant
//! violated by the input, 4 numerical failure or failed self-check.

pub mod commands;
pub mod error;
pub mod input;
pub mod output;
pub mod svg;
pub mod sweep;

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand};
use serde_json::json;

use qsl_core::dynamics::{SearchOptions, DEFAULT_ORTHO_TOL};

use crate::commands::Report;
use crate::error::{CliError, CliResult};
use crate::output::write_atomic;
use crate::sweep::{scalar_search_options, SweepConfig};

#[derive(Debug, Parser)]
#[command(name = "qsl", version, about = "Quantum speed limit experiments", allow_negative_numbers = true)]
pub struct Cli {
    /// Write the command's CSV table here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Write an SVG plot here (fig1 only).
    #[arg(long, global = true)]
    pub svg: Option<PathBuf>,
    /// Search horizon for orthogonality times (default: 20 speed-limit times).
    #[arg(long, global = true)]
    pub horizon: Option<f64>,
    /// Survival value treated as orthogonal.
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    /// Print a JSON result envelope instead of text.
    #[arg(long, global = true)]
    pub json: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Speed-limit time for given mean energy and spread.
    #[command(allow_negative_numbers = true)]
    Bound {
        #[arg(long)]
        energy: f64,
        #[arg(long)]
        spread: f64,
    },
    /// First orthogonality time of a state read from a JSON file.
    Tperp {
        state_file: PathBuf,
        /// Subtract the ground energy instead of rejecting an unshifted Hamiltonian.
        #[arg(long)]
        shift: bool,
    },
    /// Orthogonality time of the collective qubit model against omega / omega0.
    #[command(allow_negative_numbers = true)]
    Fig1 {
        #[arg(long, default_value_t = 9)]
        m: usize,
        #[arg(long, default_value_t = 1.0)]
        omega0: f64,
        #[arg(long, default_value_t = 0.0)]
        start: f64,
        #[arg(long, default_value_t = 10.0)]
        stop: f64,
        #[arg(long, default_value_t = 0.25)]
        step: f64,
        /// Append the omega0 = 0 limit as a row with omega_ratio `inf`.
        #[arg(long)]
        limit_row: bool,
    },
    /// Correlated N-level chains against the separable bound.
    #[command(allow_negative_numbers = true)]
    EntScan {
        #[arg(long, value_delimiter = ',', default_values_t = [2usize, 3, 5])]
        n: Vec<usize>,
        #[arg(long, value_delimiter = ',', default_values_t = [2usize, 3, 4])]
        m: Vec<usize>,
        #[arg(long, default_value_t = 1.0)]
        omega0: f64,
    },
    /// Two-party separable mixture that saturates the speed limit.
    #[command(allow_negative_numbers = true)]
    MixtureDemo {
        #[arg(long, default_value_t = 1.0)]
        omega: f64,
        /// Number of survival samples on [0, 2 pi / omega].
        #[arg(long, default_value_t = 201)]
        samples: usize,
    },
    /// Independent groups of collectively coupled qubits.
    #[command(allow_negative_numbers = true)]
    Groups {
        #[arg(long)]
        groups: usize,
        #[arg(long)]
        per_group: usize,
        #[arg(long)]
        omega0: f64,
        #[arg(long)]
        omega: f64,
    },
}

impl Cli {
    fn check_globals(&self) -> CliResult<()> {
        if let Some(h) = self.horizon {
            if !(h.is_finite() && h > 0.0) {
                return Err(CliError::Usage(format!("--horizon must be > 0, got {h}")));
            }
        }
        if let Some(t) = self.tol {
            if !(t.is_finite() && t > 0.0) {
                return Err(CliError::Usage(format!("--tol must be > 0, got {t}")));
            }
        }
        if self.svg.is_some() && !matches!(self.command, Command::Fig1 { .. }) {
            return Err(CliError::Usage("--svg is only supported by fig1".into()));
        }
        Ok(())
    }

    fn dense_options(&self) -> SearchOptions {
        SearchOptions {
            horizon: self.horizon,
            ortho_tol: self.tol.unwrap_or(DEFAULT_ORTHO_TOL),
            ..SearchOptions::default()
        }
    }

    fn scalar_options(&self) -> SearchOptions {
        scalar_search_options(self.horizon, self.tol)
    }
}

pub fn execute(cli: &Cli) -> CliResult<Report> {
    cli.check_globals()?;
    match &cli.command {
        Command::Bound { energy, spread } => commands::cmd_bound(*energy, *spread),
        Command::Tperp { state_file, shift } => {
            commands::cmd_tperp(state_file, *shift, &cli.dense_options())
        }
        Command::Fig1 { m, omega0, start, stop, step, limit_row } => {
            let cfg = SweepConfig {
                m: *m,
                omega0: *omega0,
                start: *start,
                stop: *stop,
                step: *step,
                limit_row: *limit_row,
            };
            commands::cmd_fig1(&cfg, &cli.scalar_options(), cli.svg.is_some())
        }
        Command::EntScan { n, m, omega0 } => {
            commands::cmd_ent_scan(n, m, *omega0, &cli.dense_options())
        }
        Command::MixtureDemo { omega, samples } => {
            commands::cmd_mixture_demo(*omega, *samples, &cli.dense_options())
        }
        Command::Groups { groups, per_group, omega0, omega } => {
            commands::cmd_groups(*groups, *per_group, *omega0, *omega, &cli.scalar_options())
        }
    }
}

fn command_name(cmd: &Command) -> &'static str {
    match cmd {
        Command::Bound { .. } => "bound",
        Command::Tperp { .. } => "tperp",
        Command::Fig1 { .. } => "fig1",
        Command::EntScan { .. } => "ent-scan",
        Command::MixtureDemo { .. } => "mixture-demo",
        Command::Groups { .. } => "groups",
    }
}

/// Runs a parsed command, writes its files and prints its report.
pub fn run(cli: &Cli, stdout: &mut dyn Write, stderr: &mut dyn Write) -> CliResult<()> {
    let report = execute(cli)?;
    if let (Some(path), Some(csv)) = (&cli.out, &report.csv) {
        write_atomic(path, csv.as_bytes())?;
    }
    if let (Some(path), Some(svg)) = (&cli.svg, &report.svg) {
        write_atomic(path, svg.as_bytes())?;
    }
    let csv_to_stdout = cli.out.is_none() && report.csv.is_some();
    let io = |source| CliError::Io {
        path: PathBuf::from("<stdout>"),
        source,
    };
    if cli.json {
        let mut envelope = json!({
            "command": command_name(&cli.command),
            "ok": true,
            "result": report.json,
        });
        if csv_to_stdout {
            envelope["csv"] = json!(report.csv);
        }
        writeln!(stdout, "{envelope}").map_err(io)?;
    } else if csv_to_stdout {
        stderr.write_all(report.text.as_bytes()).map_err(io)?;
        stdout.write_all(report.csv.as_deref().unwrap_or_default().as_bytes()).map_err(io)?;
    } else {
        stdout.write_all(report.text.as_bytes()).map_err(io)?;
    }
    Ok(())
}

/// Entry point shared by the binary and the tests; returns the exit code.
pub fn main_with_args<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let rendered = e.render().to_string();
            let _ = if code == 0 { stdout.write_all(rendered.as_bytes()) } else { stderr.write_all(rendered.as_bytes()) };
            return code;
        }
    };
    match run(&cli, stdout, stderr) {
        Ok(()) => 0,
        Err(err) => {
            let code = err.exit_code();
            let _ = writeln!(stderr, "error: {err}");
            if cli.json {
                let envelope = json!({
                    "command": command_name(&cli.command),
                    "ok": false,
                    "exit_code": code,
                    "error": err.to_string(),
                });
                let _ = writeln!(stdout, "{envelope}");
            }
            code
        }
    }
}
