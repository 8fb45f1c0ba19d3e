//! First-zero search for nonnegative band-limited signals.
//!
//! A signal whose highest angular frequency is `w` cannot pass through a
//! zero and back between samples spaced by a fraction of `pi / w`, so a
//! uniform scan brackets every local minimum; each bracket is then refined
//! with golden-section search.

use std::f64::consts::PI;

use crate::error::{QslError, Result};

/// Upper limit on scan samples for a single search.
pub const MAX_SCAN_SAMPLES: usize = 50_000_000;

const INV_PHI: f64 = 0.618_033_988_749_894_9;
const GOLDEN_MAX_ITER: usize = 400;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScanOutcome {
    /// Location of the first refined minimum whose value is at most the tolerance.
    pub first_zero: Option<f64>,
    /// Smallest value seen up to the point the scan stopped.
    pub min_value: f64,
    pub t_at_min: f64,
}

/// Golden-section search for the minimum of `f` on `[a, b]`.
///
/// Returns `(x_min, f_min)`; the endpoints are included as candidates.
pub fn golden_section_minimize(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> (f64, f64) {
    let (fa, fb) = (f(a), f(b));
    let mut best = if fa <= fb { (a, fa) } else { (b, fb) };

    let mut x1 = b - INV_PHI * (b - a);
    let mut x2 = a + INV_PHI * (b - a);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    for _ in 0..GOLDEN_MAX_ITER {
        if (b - a) <= 4.0 * f64::EPSILON * a.abs().max(b.abs()).max(1.0) {
            break;
        }
        if f1 <= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - INV_PHI * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + INV_PHI * (b - a);
            f2 = f(x2);
        }
    }
    for (x, fx) in [(x1, f1), (x2, f2)] {
        if fx < best.1 {
            best = (x, fx);
        }
    }
    best
}

/// Scans `f` on `(0, horizon]` with step `scan_fraction * pi / max_frequency`
/// and returns the first local minimum whose refined value is `<= tol`.
///
/// `f` must be nonnegative with no spectral content above `max_frequency`.
pub fn first_zero(
    f: impl Fn(f64) -> f64,
    max_frequency: f64,
    horizon: f64,
    tol: f64,
    scan_fraction: f64,
) -> Result<ScanOutcome> {
    if !(max_frequency.is_finite() && max_frequency > 0.0) {
        return Err(QslError::InvalidOptions(format!(
            "max frequency must be positive, got {max_frequency}"
        )));
    }
    if !(horizon.is_finite() && horizon > 0.0) {
        return Err(QslError::InvalidOptions(format!("horizon must be positive, got {horizon}")));
    }
    if !(tol > 0.0) {
        return Err(QslError::InvalidOptions(format!("tolerance must be positive, got {tol}")));
    }
    if !(scan_fraction > 0.0 && scan_fraction <= 1.0) {
        return Err(QslError::InvalidOptions(format!(
            "scan fraction must lie in (0, 1], got {scan_fraction}"
        )));
    }

    let step = scan_fraction * PI / max_frequency;
    let n_steps = (horizon / step).ceil();
    if n_steps > MAX_SCAN_SAMPLES as f64 {
        return Err(QslError::InvalidOptions(format!(
            "scan needs {n_steps:.0} samples (limit {MAX_SCAN_SAMPLES}); reduce the horizon"
        )));
    }
    let n_steps = n_steps as usize;
    let time = |i: usize| (i as f64 * step).min(horizon);

    let mut outcome = ScanOutcome {
        first_zero: None,
        min_value: f(0.0),
        t_at_min: 0.0,
    };
    let note = |t: f64, v: f64, out: &mut ScanOutcome| {
        if v < out.min_value {
            out.min_value = v;
            out.t_at_min = t;
        }
    };

    // Sliding window of three samples: (i-2, i-1, i).
    let mut prev2 = outcome.min_value;
    let mut prev1 = f(time(1));
    note(time(1), prev1, &mut outcome);
    if n_steps == 1 {
        let (x, v) = golden_section_minimize(&f, 0.0, horizon);
        note(x, v, &mut outcome);
        if v <= tol {
            outcome.first_zero = Some(x);
        }
        return Ok(outcome);
    }
    for i in 2..=n_steps {
        let current = f(time(i));
        note(time(i), current, &mut outcome);
        let is_min = prev1 <= prev2 && prev1 <= current;
        let at_end = i == n_steps && current <= prev1;
        for (lo, hi) in [(is_min, (i - 2, i)), (at_end, (i - 1, i))]
            .into_iter()
            .filter_map(|(hit, range)| hit.then_some(range))
        {
            let (x, v) = golden_section_minimize(&f, time(lo), time(hi));
            note(x, v, &mut outcome);
            if v <= tol {
                outcome.first_zero = Some(x);
                return Ok(outcome);
            }
        }
        prev2 = prev1;
        prev1 = current;
    }
    Ok(outcome)
}
