//! Number formatting, CSV tables and atomic file writes.

use std::io::Write;
use std::path::Path;

use crate::error::{CliError, CliResult};

/// Significant digits written to CSV files.
pub const CSV_DIGITS: usize = 12;

/// C-style `%.{digits}g`: fixed or scientific notation, whichever is shorter
/// for the exponent, with trailing zeros removed.
pub fn format_g(x: f64, digits: usize) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0".into();
    }
    let digits = digits.max(1);
    // The exponent after rounding to `digits` significant digits.
    let sci = format!("{:.*e}", digits - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent marker present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if exp < -4 || exp >= digits as i32 {
        let exp_sign = if exp < 0 { '-' } else { '+' };
        format!("{}e{}{:02}", trim_zeros(mantissa), exp_sign, exp.abs())
    } else {
        let decimals = (digits as i32 - 1 - exp).max(0) as usize;
        trim_zeros(&format!("{:.*}", decimals, x)).to_string()
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// CSV cell for a number.
pub fn cell(x: f64) -> String {
    format_g(x, CSV_DIGITS)
}

/// CSV cell for an optional number; `None` is an empty field.
pub fn opt_cell(x: Option<f64>) -> String {
    x.map(cell).unwrap_or_default()
}

/// Header plus rows, rendered with `\n` line endings and no trailing delimiter.
#[derive(Debug, Clone, PartialEq)]
pub struct CsvTable {
    header: Vec<String>,
    rows: Vec<Vec<String>>,
}

impl CsvTable {
    pub fn new(header: &[&str]) -> Self {
        Self {
            header: header.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn rows(&self) -> &[Vec<String>] {
        &self.rows
    }

    pub fn render(&self) -> String {
        let mut out = self.header.join(",");
        out.push('\n');
        for row in &self.rows {
            out.push_str(&row.join(","));
            out.push('\n');
        }
        out
    }
}

/// Writes `contents` to a temporary file next to `path` and renames it into
/// place, so readers never see a partial file.
pub fn write_atomic(path: &Path, contents: &[u8]) -> CliResult<()> {
    let io_err = |source| CliError::Io {
        path: path.to_path_buf(),
        source,
    };
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(io_err)?;
    tmp.write_all(contents).map_err(io_err)?;
    tmp.as_file().sync_all().map_err(io_err)?;
    tmp.persist(path).map_err(|e| io_err(e.error))?;
    Ok(())
}

/// Human-readable number: shortest round-trip representation.
pub fn num(x: f64) -> String {
    format!("{x:?}")
}
