//! Orthogonality time of the collective qubit model over a grid of
//! interaction strengths.

use qsl_core::constructions::{collective_t_perp_with, CollectiveSpec};
use qsl_core::dynamics::SearchOptions;

use crate::error::{CliError, CliResult};
use crate::output::{cell, opt_cell, CsvTable};

pub const MAX_GRID_POINTS: usize = 100_000;

pub const SWEEP_COLUMNS: [&str; 4] = ["omega_ratio", "t_perp", "t_qsl", "ratio"];

#[derive(Debug, Clone, PartialEq)]
pub struct SweepConfig {
    pub m: usize,
    pub omega0: f64,
    pub start: f64,
    pub stop: f64,
    pub step: f64,
    /// Append the `omega0 = 0` limit as a final row with ratio `inf`.
    pub limit_row: bool,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            m: 9,
            omega0: 1.0,
            start: 0.0,
            stop: 10.0,
            step: 0.25,
            limit_row: false,
        }
    }
}

impl SweepConfig {
    pub fn validate(&self) -> CliResult<()> {
        let usage = |msg: String| Err(CliError::Usage(msg));
        if self.m == 0 {
            return usage("--m must be >= 1".into());
        }
        if !(self.omega0.is_finite() && self.omega0 > 0.0) {
            return usage(format!(
                "--omega0 must be > 0 (got {}); use --limit-row for the omega0 = 0 limit",
                self.omega0
            ));
        }
        if !(self.step.is_finite() && self.step > 0.0) {
            return usage(format!("--step must be > 0, got {}", self.step));
        }
        if !(self.start.is_finite() && self.stop.is_finite() && self.start >= 0.0) {
            return usage("--start and --stop must be finite and nonnegative".into());
        }
        if self.start > self.stop {
            return usage(format!("--start {} exceeds --stop {}", self.start, self.stop));
        }
        let n = ((self.stop - self.start) / self.step + 1e-9).floor() + 1.0;
        if n > MAX_GRID_POINTS as f64 {
            return usage(format!("grid has {n:.0} points, limit is {MAX_GRID_POINTS}"));
        }
        Ok(())
    }

    /// Grid points `start + i * step` up to `stop`, computed without
    /// accumulating round-off.
    pub fn grid(&self) -> Vec<f64> {
        let n = ((self.stop - self.start) / self.step + 1e-9).floor() as usize + 1;
        (0..n).map(|i| self.start + i as f64 * self.step).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRow {
    /// `omega / omega0`; infinite for the limit row.
    pub omega_ratio: f64,
    pub t_perp: Option<f64>,
    pub t_qsl: f64,
}

impl SweepRow {
    pub fn ratio(&self) -> Option<f64> {
        self.t_perp.map(|t| t / self.t_qsl)
    }
}

fn row_for(spec: &CollectiveSpec, omega_ratio: f64, opts: &SearchOptions) -> CliResult<SweepRow> {
    let out = collective_t_perp_with(spec, opts)?;
    Ok(SweepRow {
        omega_ratio,
        t_perp: out.t_perp,
        t_qsl: spec.qsl_time(),
    })
}

pub fn run_sweep(cfg: &SweepConfig, opts: &SearchOptions) -> CliResult<Vec<SweepRow>> {
    cfg.validate()?;
    let mut rows = cfg
        .grid()
        .into_iter()
        .map(|r| {
            let spec = CollectiveSpec::new(cfg.m, cfg.omega0, r * cfg.omega0)?;
            row_for(&spec, r, opts)
        })
        .collect::<CliResult<Vec<_>>>()?;
    if cfg.limit_row {
        let spec = CollectiveSpec::new(cfg.m, 0.0, cfg.omega0)?;
        rows.push(row_for(&spec, f64::INFINITY, opts)?);
    }
    Ok(rows)
}

pub fn sweep_table(rows: &[SweepRow]) -> CsvTable {
    let mut table = CsvTable::new(&SWEEP_COLUMNS);
    for row in rows {
        table.push(vec![
            cell(row.omega_ratio),
            opt_cell(row.t_perp),
            cell(row.t_qsl),
            opt_cell(row.ratio()),
        ]);
    }
    table
}

/// Search options for the scalar overlap: the default amplitude tolerance
/// unless the caller overrides it.
pub fn scalar_search_options(horizon: Option<f64>, tol: Option<f64>) -> SearchOptions {
    SearchOptions {
        horizon,
        ortho_tol: tol.unwrap_or(qsl_core::constructions::COLLECTIVE_AMPLITUDE_TOL.powi(2)),
        ..SearchOptions::default()
    }
}
