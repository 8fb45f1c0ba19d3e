//! Concrete states and Hamiltonians, each paired with a closed-form overlap.
//!
//! * [`make_psi_ent`]: `N`-level subsystems in the correlated state
//!   `N^{-1/2} sum_n |n>^{xM}` under identical free Hamiltonians.
//! * [`make_collective`]: `M` qubits under
//!   `w0 sum_k (1 - X_k) + w (1 - X_1 ... X_M)`, starting from a basis state.
//! * [`make_grouped`]: `G` independent copies of the collective model.
//! * [`make_mixture_demo`]: a two-party separable mixture that reaches the
//!   speed limit with only one party evolving in each branch.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::bounds::{qsl_time, BoundTime};
use crate::dynamics::{OrthogonalityResult, SearchOptions, DEFAULT_SCAN_FRACTION};
use crate::error::{QslError, Result};
use crate::qcore::linalg::{kron_all, re, CMatrix, CVector};
use crate::qcore::{
    diag, real_vector, DensityMatrix, EnergyStats, Hamiltonian, PureState, SeparableEnsemble,
    SubsystemLayout,
};
use crate::search;

/// Amplitude below which the collective overlap counts as zero.
pub const COLLECTIVE_AMPLITUDE_TOL: f64 = 1e-10;

fn check_frequency(name: &str, value: f64, strictly_positive: bool) -> Result<()> {
    let ok = value.is_finite() && if strictly_positive { value > 0.0 } else { value >= 0.0 };
    if !ok {
        let bound = if strictly_positive { "> 0" } else { ">= 0" };
        return Err(QslError::InvalidParameter(format!("{name} must be {bound}, got {value}")));
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EntangledChainSpec {
    /// Levels per subsystem, `N >= 2`.
    pub levels: usize,
    /// Number of subsystems, `M >= 1`.
    pub subsystems: usize,
    /// Level spacing.
    pub omega0: f64,
}

impl EntangledChainSpec {
    pub fn new(levels: usize, subsystems: usize, omega0: f64) -> Result<Self> {
        let spec = Self {
            levels,
            subsystems,
            omega0,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if self.levels < 2 {
            return Err(QslError::InvalidParameter(format!(
                "levels must be >= 2, got {}",
                self.levels
            )));
        }
        if self.subsystems < 1 {
            return Err(QslError::InvalidParameter("subsystems must be >= 1".into()));
        }
        check_frequency("omega0", self.omega0, true)
    }

    /// `2 pi / (N M w0)`.
    pub fn analytic_t_perp(&self) -> f64 {
        2.0 * PI / (self.levels as f64 * self.subsystems as f64 * self.omega0)
    }

    /// Each subsystem: `E = w0 (N-1)/2`, `dE = w0 sqrt(N^2-1) / (2 sqrt 3)`.
    pub fn local_stats(&self) -> EnergyStats {
        let n = self.levels as f64;
        EnergyStats::new(
            self.omega0 * (n - 1.0) / 2.0,
            self.omega0 * (n * n - 1.0).sqrt() / (2.0 * 3f64.sqrt()),
        )
        .expect("validated spec gives nonnegative stats")
    }

    /// Totals for the correlated state: both energy and spread scale with `M`.
    pub fn global_stats(&self) -> EnergyStats {
        let local = self.local_stats();
        let m = self.subsystems as f64;
        EnergyStats::new(m * local.energy(), m * local.spread())
            .expect("validated spec gives nonnegative stats")
    }
}

#[derive(Debug, Clone)]
pub struct EntangledChain {
    pub state: PureState,
    pub hamiltonian: Hamiltonian,
    pub analytic_t_perp: f64,
}

pub fn make_psi_ent(spec: &EntangledChainSpec) -> Result<EntangledChain> {
    spec.validate()?;
    let (n, m) = (spec.levels, spec.subsystems);
    let layout = SubsystemLayout::uniform(n, m)?;

    // |n n ... n> sits at index n * (1 + N + ... + N^{M-1}).
    let stride: usize = (0..m).map(|k| n.pow(k as u32)).sum();
    let mut amplitudes = CVector::zeros(layout.total_dim());
    let amp = re(1.0 / (n as f64).sqrt());
    for level in 0..n {
        amplitudes[level * stride] = amp;
    }
    let state = PureState::new(layout.clone(), amplitudes)?;

    let ladder: Vec<f64> = (0..n).map(|j| j as f64 * spec.omega0).collect();
    let local = diag(&ladder);
    let hamiltonian = Hamiltonian::non_interacting(layout, &vec![local; m])?;
    Ok(EntangledChain {
        state,
        hamiltonian,
        analytic_t_perp: spec.analytic_t_perp(),
    })
}

/// `<Psi|Psi(t)> = (1/N) sum_n exp(-i n M w0 t)`.
pub fn psi_ent_survival_amplitude(spec: &EntangledChainSpec, t: f64) -> Complex64 {
    let n = spec.levels;
    let phase = spec.subsystems as f64 * spec.omega0 * t;
    let sum: Complex64 = (0..n).map(|j| Complex64::from_polar(1.0, -(j as f64) * phase)).sum();
    sum / n as f64
}

#[derive(Debug, Clone, PartialEq)]
pub struct CollectiveSpec {
    pub qubits: usize,
    pub omega0: f64,
    pub omega: f64,
    /// Initial computational basis state, one bit per qubit.
    pub initial: Vec<bool>,
}

impl CollectiveSpec {
    /// All qubits start in `|0>`.
    pub fn new(qubits: usize, omega0: f64, omega: f64) -> Result<Self> {
        Self::with_initial(omega0, omega, vec![false; qubits])
    }

    pub fn with_initial(omega0: f64, omega: f64, initial: Vec<bool>) -> Result<Self> {
        let spec = Self {
            qubits: initial.len(),
            omega0,
            omega,
            initial,
        };
        spec.validate()?;
        Ok(spec)
    }

    /// Parameter checks only; the dense cap applies when building matrices.
    pub fn validate(&self) -> Result<()> {
        if self.qubits < 1 {
            return Err(QslError::InvalidParameter("qubits must be >= 1".into()));
        }
        if self.initial.len() != self.qubits {
            return Err(QslError::DimensionMismatch {
                expected: self.qubits,
                found: self.initial.len(),
            });
        }
        check_frequency("omega0", self.omega0, false)?;
        check_frequency("omega", self.omega, false)?;
        if self.omega0 == 0.0 && self.omega == 0.0 {
            return Err(QslError::InvalidParameter(
                "omega0 and omega cannot both be zero".into(),
            ));
        }
        Ok(())
    }

    /// `E = w + M w0`, `dE = sqrt(w^2 + M w0^2)` for `M >= 2`.
    pub fn stats(&self) -> EnergyStats {
        let (energy, variance) = collective_moments(self.qubits, self.omega0, self.omega);
        EnergyStats::new(energy, variance.sqrt()).expect("validated spec gives nonnegative stats")
    }

    /// Speed-limit time of the initial state.
    pub fn qsl_time(&self) -> f64 {
        match qsl_time(&self.stats()).time {
            BoundTime::Finite(t) => t,
            BoundTime::Unbounded => unreachable!("validated spec has positive spread"),
        }
    }

    /// Upper bound on the angular frequencies present in `|overlap|^2`.
    fn max_frequency(&self) -> f64 {
        2.0 * (self.omega + self.qubits as f64 * self.omega0)
    }
}

/// Mean and variance of the collective Hamiltonian in any basis state.
///
/// For one qubit `S = X_1`, so the two terms are the same operator and the
/// spreads add linearly instead of in quadrature.
fn collective_moments(m: usize, omega0: f64, omega: f64) -> (f64, f64) {
    let energy = omega + m as f64 * omega0;
    let variance = if m == 1 {
        (omega + omega0).powi(2)
    } else {
        omega.powi(2) + m as f64 * omega0.powi(2)
    };
    (energy, variance)
}

/// Dense `w0 sum_k (1 - X_k) + w (1 - X_1 ... X_M)` on `m` qubits.
fn collective_matrix(m: usize, omega0: f64, omega: f64) -> CMatrix {
    let dim = 1usize << m;
    let all = dim - 1;
    let mut h = CMatrix::zeros(dim, dim);
    for i in 0..dim {
        h[(i, i)] += re(m as f64 * omega0 + omega);
        for k in 0..m {
            h[(i ^ (1 << k), i)] -= re(omega0);
        }
        h[(i ^ all, i)] -= re(omega);
    }
    h
}

fn basis_index(bits: &[bool]) -> usize {
    bits.iter().fold(0, |acc, &b| (acc << 1) | usize::from(b))
}

pub fn make_collective(spec: &CollectiveSpec) -> Result<(PureState, Hamiltonian)> {
    spec.validate()?;
    let layout = SubsystemLayout::qubits(spec.qubits)?;
    let state = PureState::basis(layout.clone(), basis_index(&spec.initial))?;
    let h = Hamiltonian::new(layout, collective_matrix(spec.qubits, spec.omega0, spec.omega))?;
    Ok((state, h))
}

/// `i^k` for integer `k`, exact.
fn i_pow(k: usize) -> Complex64 {
    match k % 4 {
        0 => Complex64::new(1.0, 0.0),
        1 => Complex64::new(0.0, 1.0),
        2 => Complex64::new(-1.0, 0.0),
        _ => Complex64::new(0.0, -1.0),
    }
}

/// `cos(w t) cos^M(w0 t) + i^{M+1} sin(w t) sin^M(w0 t)`: the overlap with
/// the initial state, global phase `exp(-iEt)` removed. Independent of the
/// initial bit pattern.
pub fn collective_overlap_fn(spec: &CollectiveSpec, t: f64) -> Complex64 {
    let m = spec.qubits as i32;
    let (s0, c0) = (spec.omega0 * t).sin_cos();
    let (s, c) = (spec.omega * t).sin_cos();
    re(c * c0.powi(m)) + i_pow(spec.qubits + 1) * (s * s0.powi(m))
}

/// First zero of [`collective_overlap_fn`] with the default horizon
/// (20 speed-limit times) and amplitude tolerance
/// [`COLLECTIVE_AMPLITUDE_TOL`].
pub fn collective_t_perp(spec: &CollectiveSpec) -> Result<OrthogonalityResult> {
    collective_t_perp_with(spec, &amplitude_search_options())
}

/// As [`collective_t_perp`]; `opts.ortho_tol` applies to `|overlap|^2`.
pub fn collective_t_perp_with(
    spec: &CollectiveSpec,
    opts: &SearchOptions,
) -> Result<OrthogonalityResult> {
    spec.validate()?;
    scalar_first_zero(
        |t| collective_overlap_fn(spec, t).norm_sqr(),
        spec.max_frequency(),
        spec.qsl_time(),
        opts,
    )
}

fn amplitude_search_options() -> SearchOptions {
    SearchOptions {
        horizon: None,
        ortho_tol: COLLECTIVE_AMPLITUDE_TOL.powi(2),
        scan_fraction: DEFAULT_SCAN_FRACTION,
    }
}

fn scalar_first_zero(
    survival: impl Fn(f64) -> f64,
    max_frequency: f64,
    qsl: f64,
    opts: &SearchOptions,
) -> Result<OrthogonalityResult> {
    opts.validate()?;
    let horizon = opts
        .horizon
        .unwrap_or(crate::dynamics::DEFAULT_HORIZON_FACTOR * qsl);
    let out = search::first_zero(
        survival,
        max_frequency,
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

/// `G` non-interacting groups of `Q` qubits, each with the collective
/// Hamiltonian.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GroupedSpec {
    pub groups: usize,
    pub per_group: usize,
    pub omega0: f64,
    pub omega: f64,
}

impl GroupedSpec {
    pub fn new(groups: usize, per_group: usize, omega0: f64, omega: f64) -> Result<Self> {
        let spec = Self {
            groups,
            per_group,
            omega0,
            omega,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if self.groups < 1 || self.per_group < 1 {
            return Err(QslError::InvalidParameter(format!(
                "need G >= 1 and Q >= 1, got G={} Q={}",
                self.groups, self.per_group
            )));
        }
        self.group_spec().map(|_| ())
    }

    pub fn total_qubits(&self) -> usize {
        self.groups * self.per_group
    }

    /// The collective model of one group.
    pub fn group_spec(&self) -> Result<CollectiveSpec> {
        CollectiveSpec::new(self.per_group, self.omega0, self.omega)
    }

    /// `G` times the per-group mean and variance.
    pub fn stats(&self) -> EnergyStats {
        let g = self.groups as f64;
        let (energy, variance) = collective_moments(self.per_group, self.omega0, self.omega);
        EnergyStats::new(g * energy, (g * variance).sqrt())
            .expect("validated spec gives nonnegative stats")
    }

    pub fn qsl_time(&self) -> f64 {
        qsl_time(&self.stats()).time.as_f64()
    }

    /// `sqrt(M / Q)`.
    pub fn lower_bound_factor(&self) -> f64 {
        (self.total_qubits() as f64 / self.per_group as f64).sqrt()
    }
}

/// Product of the per-group overlaps.
pub fn grouped_overlap_fn(spec: &GroupedSpec, t: f64) -> Result<Complex64> {
    let group = spec.group_spec()?;
    Ok(collective_overlap_fn(&group, t).powu(spec.groups as u32))
}

/// First zero of [`grouped_overlap_fn`], with the same defaults as
/// [`collective_t_perp`].
pub fn grouped_t_perp(spec: &GroupedSpec) -> Result<OrthogonalityResult> {
    grouped_t_perp_with(spec, &amplitude_search_options())
}

pub fn grouped_t_perp_with(spec: &GroupedSpec, opts: &SearchOptions) -> Result<OrthogonalityResult> {
    let group = spec.group_spec()?;
    spec.validate()?;
    let g = spec.groups as u32;
    scalar_first_zero(
        |t| collective_overlap_fn(&group, t).norm_sqr().powi(g as i32),
        spec.groups as f64 * group.max_frequency(),
        spec.qsl_time(),
        opts,
    )
}

/// State `|0...0>` and `sum_g H_g`, each `H_g` acting on its own block of
/// `Q` consecutive qubits.
pub fn make_grouped(spec: &GroupedSpec) -> Result<(PureState, Hamiltonian)> {
    spec.validate()?;
    let layout = SubsystemLayout::qubits(spec.total_qubits())?;
    let block = collective_matrix(spec.per_group, spec.omega0, spec.omega);
    let block_dim = block.nrows();
    let dim = layout.total_dim();
    let mut h = CMatrix::zeros(dim, dim);
    for g in 0..spec.groups {
        let left = block_dim.pow(g as u32);
        let right = block_dim.pow((spec.groups - 1 - g) as u32);
        let id_left = CMatrix::identity(left, left);
        let id_right = CMatrix::identity(right, right);
        h += kron_all([&id_left, &block, &id_right]);
    }
    let state = PureState::basis(layout.clone(), 0)?;
    Ok((state, Hamiltonian::new(layout, h)?))
}

/// Two three-level parties with local Hamiltonian `diag(0, w, 2w)`, mixed as
/// `(rho_a x rho_b + rho_b x rho_a) / 2`.
#[derive(Debug, Clone)]
pub struct MixtureDemo {
    pub omega: f64,
    pub ensemble: SeparableEnsemble,
    pub locals: Vec<Hamiltonian>,
}

impl MixtureDemo {
    /// Speed-limit time of the mixture, `pi / w`.
    pub fn analytic_t_perp(&self) -> f64 {
        PI / self.omega
    }

    /// `Tr[rho_s(t) rho_s] = cos^2(w t / 2) / 2`.
    pub fn analytic_survival(&self, t: f64) -> f64 {
        0.5 * (0.5 * self.omega * t).cos().powi(2)
    }

    /// `H_1 x I + I x H_2` on the composite space.
    pub fn global_hamiltonian(&self) -> Result<Hamiltonian> {
        let terms: Vec<CMatrix> = self.locals.iter().map(|h| h.matrix().clone()).collect();
        Hamiltonian::non_interacting(self.ensemble.layout().clone(), &terms)
    }

    pub fn assembled(&self) -> DensityMatrix {
        self.ensemble.assemble()
    }
}

/// Local Hamiltonian `diag(0, w, 2w)` of one demo party.
pub fn demo_local_hamiltonian(omega: f64) -> Result<Hamiltonian> {
    Hamiltonian::new(SubsystemLayout::single(3)?, diag(&[0.0, omega, 2.0 * omega]))
}

/// Projector onto `(|1> + |2>)/sqrt(2)`: energy `1.5 w`, spread `0.5 w`,
/// orthogonal to itself after `pi / w`.
pub fn demo_rho_a() -> DensityMatrix {
    PureState::normalized(SubsystemLayout::single(3).expect("3 <= cap"), real_vector(&[0.0, 1.0, 1.0]))
        .expect("nonzero vector")
        .to_density()
}

/// Ground-state projector `|0><0|`.
pub fn demo_rho_b() -> DensityMatrix {
    PureState::basis(SubsystemLayout::single(3).expect("3 <= cap"), 0)
        .expect("index in range")
        .to_density()
}

pub fn make_mixture_demo(omega: f64) -> Result<MixtureDemo> {
    check_frequency("omega", omega, true)?;
    let (a, b) = (demo_rho_a(), demo_rho_b());
    let ensemble = SeparableEnsemble::new(
        vec![0.5, 0.5],
        vec![vec![a.clone(), b.clone()], vec![b, a]],
    )?;
    let local = demo_local_hamiltonian(omega)?;
    Ok(MixtureDemo {
        omega,
        ensemble,
        locals: vec![local.clone(), local],
    })
}
