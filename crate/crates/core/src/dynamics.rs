//! Exact unitary evolution and the first-orthogonality-time solver.

use num_complex::Complex64;

use crate::bounds::{qsl_time, BoundTime};
use crate::error::{QslError, Result};
use crate::qcore::{
    energy_stats, raw_overlap, spectral_decompose, CVector, Hamiltonian, QuantumState, Spectrum,
    StateView,
};
use crate::search;

/// Survival value at or below which a state counts as orthogonal.
pub const DEFAULT_ORTHO_TOL: f64 = 1e-9;
pub const DEFAULT_SCAN_FRACTION: f64 = 0.25;
/// Default horizon in units of the state's speed-limit time.
pub const DEFAULT_HORIZON_FACTOR: f64 = 20.0;

/// Eigenbasis couplings smaller than this do not contribute a frequency.
const COUPLING_CUTOFF: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SearchOptions {
    /// `None` selects `DEFAULT_HORIZON_FACTOR` times the speed-limit time.
    pub horizon: Option<f64>,
    pub ortho_tol: f64,
    pub scan_fraction: f64,
}

impl Default for SearchOptions {
    fn default() -> Self {
        Self {
            horizon: None,
            ortho_tol: DEFAULT_ORTHO_TOL,
            scan_fraction: DEFAULT_SCAN_FRACTION,
        }
    }
}

impl SearchOptions {
    pub fn with_horizon(horizon: f64) -> Self {
        Self {
            horizon: Some(horizon),
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if let Some(h) = self.horizon {
            if !(h.is_finite() && h > 0.0) {
                return Err(QslError::InvalidOptions(format!("horizon must be > 0, got {h}")));
            }
        }
        if !(self.ortho_tol.is_finite() && self.ortho_tol > 0.0) {
            return Err(QslError::InvalidOptions(format!(
                "ortho_tol must be > 0, got {}",
                self.ortho_tol
            )));
        }
        if !(self.scan_fraction > 0.0 && self.scan_fraction <= 1.0) {
            return Err(QslError::InvalidOptions(format!(
                "scan_fraction must lie in (0, 1], got {}",
                self.scan_fraction
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OrthogonalityResult {
    /// First orthogonality time, if reached within the horizon.
    pub t_perp: Option<f64>,
    /// Smallest survival value seen.
    pub min_overlap: f64,
    pub t_at_min: f64,
    pub horizon: f64,
}

impl OrthogonalityResult {
    pub fn is_found(&self) -> bool {
        self.t_perp.is_some()
    }
}

/// `exp(-iHt)` applied to a pure state, or `U rho U†` for a mixed one.
pub fn evolve<S: QuantumState>(state: &S, h: &Hamiltonian, t: f64) -> Result<S> {
    state.layout().ensure_same(h.layout())?;
    if !t.is_finite() {
        return Err(QslError::InvalidParameter(format!("time must be finite, got {t}")));
    }
    Ok(state.propagated(h.spectrum(), t))
}

/// `Tr[rho(t) rho]`, computed by explicit evolution.
pub fn survival<S: QuantumState>(state: &S, h: &Hamiltonian, t: f64) -> Result<f64> {
    let evolved = evolve(state, h, t)?;
    Ok(raw_overlap(evolved.view(), state.view()).clamp(0.0, 1.0))
}

/// Survival probability expressed in the eigenbasis of `H`, cheap to evaluate
/// at many times.
///
/// For a pure state this is `|sum_j w_j exp(-i lambda_j t)|^2`. For a mixed
/// state `rho = sum_n p_n |phi_n><phi_n|` it is
/// `sum_{n,m} p_n p_m |<phi_m|phi_n(t)>|^2`, a sum of nonnegative squared
/// amplitudes that stays accurate near zero.
#[derive(Debug, Clone)]
pub struct SurvivalCurve {
    kind: CurveKind,
    frequency_range: f64,
}

#[derive(Debug, Clone)]
enum CurveKind {
    Pure {
        energies: Vec<f64>,
        weights: Vec<f64>,
    },
    Mixed {
        energies: Vec<f64>,
        pair_weights: Vec<f64>,
        /// `conj(phi_m_j) phi_n_j` for every pair `(n, m)`, over `energies`.
        couplings: Vec<Vec<Complex64>>,
    },
}

impl SurvivalCurve {
    pub fn new<S: QuantumState>(state: &S, h: &Hamiltonian) -> Result<Self> {
        state.layout().ensure_same(h.layout())?;
        let spectrum = h.spectrum();
        match state.view() {
            StateView::Pure(p) => Ok(Self::pure(spectrum, p.amplitudes())),
            StateView::Mixed(rho) => {
                let terms = spectral_decompose(rho)?;
                Ok(Self::mixed(
                    spectrum,
                    &terms.iter().map(|t| (t.weight, t.vector.clone())).collect::<Vec<_>>(),
                ))
            }
        }
    }

    fn pure(spectrum: &Spectrum, psi: &CVector) -> Self {
        let coeffs = spectrum.to_eigenbasis(psi);
        let c_max = coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max);
        let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
        let mut energies = Vec::new();
        let mut weights = Vec::new();
        for (c, &lambda) in coeffs.iter().zip(spectrum.values()) {
            let w = c.norm_sqr();
            if w == 0.0 {
                continue;
            }
            if c.norm() * c_max > COUPLING_CUTOFF {
                lo = lo.min(lambda);
                hi = hi.max(lambda);
            }
            energies.push(lambda);
            weights.push(w);
        }
        Self {
            kind: CurveKind::Pure { energies, weights },
            frequency_range: (hi - lo).max(0.0),
        }
    }

    fn mixed(spectrum: &Spectrum, components: &[(f64, CVector)]) -> Self {
        let rotated: Vec<CVector> = components.iter().map(|(_, v)| spectrum.to_eigenbasis(v)).collect();
        let dim = spectrum.dim();
        let populated: Vec<usize> = (0..dim)
            .filter(|&j| {
                components
                    .iter()
                    .zip(&rotated)
                    .any(|((p, _), v)| p * v[j].norm_sqr() > 0.0)
            })
            .collect();

        // Frequencies present are gaps with a nonzero coherence rho_jk.
        let coherence = |j: usize, k: usize| -> f64 {
            components
                .iter()
                .zip(&rotated)
                .map(|((p, _), v)| v[j] * v[k].conj() * *p)
                .sum::<Complex64>()
                .norm()
        };
        let values = spectrum.values();
        let mut range = 0.0f64;
        for (a, &j) in populated.iter().enumerate() {
            for &k in &populated[a + 1..] {
                let gap = (values[j] - values[k]).abs();
                if gap > range && coherence(j, k) > COUPLING_CUTOFF {
                    range = gap;
                }
            }
        }

        let energies = populated.iter().map(|&j| values[j]).collect();
        let mut pair_weights = Vec::new();
        let mut couplings = Vec::new();
        for ((pn, _), vn) in components.iter().zip(&rotated) {
            for ((pm, _), vm) in components.iter().zip(&rotated) {
                pair_weights.push(pn * pm);
                couplings.push(populated.iter().map(|&j| vm[j].conj() * vn[j]).collect());
            }
        }
        Self {
            kind: CurveKind::Mixed {
                energies,
                pair_weights,
                couplings,
            },
            frequency_range: range,
        }
    }

    /// Largest energy gap that actually appears in the signal.
    pub fn frequency_range(&self) -> f64 {
        self.frequency_range
    }

    /// True when no coherence between distinct energies is present.
    pub fn is_stationary(&self) -> bool {
        let scale = match &self.kind {
            CurveKind::Pure { energies, .. } | CurveKind::Mixed { energies, .. } => {
                energies.iter().fold(1.0f64, |a, e| a.max(e.abs()))
            }
        };
        self.frequency_range <= 1e-12 * scale
    }

    pub fn eval(&self, t: f64) -> f64 {
        match &self.kind {
            CurveKind::Pure { energies, weights } => {
                let amp: Complex64 = energies
                    .iter()
                    .zip(weights)
                    .map(|(&e, &w)| Complex64::from_polar(w, -e * t))
                    .sum();
                amp.norm_sqr()
            }
            CurveKind::Mixed {
                energies,
                pair_weights,
                couplings,
            } => {
                let phases: Vec<Complex64> =
                    energies.iter().map(|&e| Complex64::from_polar(1.0, -e * t)).collect();
                pair_weights
                    .iter()
                    .zip(couplings)
                    .map(|(w, row)| {
                        let amp: Complex64 = row.iter().zip(&phases).map(|(c, p)| c * p).sum();
                        w * amp.norm_sqr()
                    })
                    .sum()
            }
        }
    }
}

/// Smallest `t` in `(0, horizon]` at which the survival drops to
/// `opts.ortho_tol`, located at the bottom of its valley.
pub fn first_orthogonal_time<S: QuantumState>(
    state: &S,
    h: &Hamiltonian,
    opts: &SearchOptions,
) -> Result<OrthogonalityResult> {
    opts.validate()?;
    h.require_ground_shifted()?;
    let curve = SurvivalCurve::new(state, h)?;
    let horizon = match opts.horizon {
        Some(hz) => hz,
        None => default_horizon(state, h)?,
    };
    if curve.is_stationary() {
        return Ok(OrthogonalityResult {
            t_perp: None,
            min_overlap: curve.eval(0.0),
            t_at_min: 0.0,
            horizon,
        });
    }
    let out = search::first_zero(
        |t| curve.eval(t),
        curve.frequency_range(),
        horizon,
        opts.ortho_tol,
        opts.scan_fraction,
    )?;
    Ok(OrthogonalityResult {
        t_perp: out.first_zero,
        min_overlap: out.min_value,
        t_at_min: out.t_at_min,
        horizon,
    })
}

/// `DEFAULT_HORIZON_FACTOR` times the speed-limit time of the state; zero for
/// a stationary state.
pub fn default_horizon<S: QuantumState>(state: &S, h: &Hamiltonian) -> Result<f64> {
    match qsl_time(&energy_stats(state, h)?).time {
        BoundTime::Finite(t) => Ok(DEFAULT_HORIZON_FACTOR * t),
        BoundTime::Unbounded => Ok(0.0),
    }
}
