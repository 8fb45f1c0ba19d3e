//! Speed-limit bounds: the single-system limit, the separable-product limit
//! and its homogeneous gap, mixture statistics, the mixed-state bound via
//! spectral decomposition, and the structure test for saturating separable
//! ensembles.

use std::f64::consts::FRAC_PI_2;

use num_complex::Complex64;

use crate::error::{QslError, Result};
use crate::qcore::linalg::{re, trace_of_product, CMatrix};
use crate::qcore::{
    energy_stats, spectral_decompose, DensityMatrix, EnergyStats, Hamiltonian, PureState,
    QuantumState, SeparableEnsemble,
};

/// Energies at or below this count as zero.
pub const ZERO_ENERGY_TOL: f64 = 1e-12;
/// Shared tolerance for the orthogonality and stationarity checks.
pub const DEFAULT_STRUCTURE_TOL: f64 = 1e-9;
/// Density-matrix eigenvalues closer than this are reported as degenerate.
pub const DEGENERACY_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BoundTime {
    Finite(f64),
    /// The governing energy or spread vanishes; the state never becomes orthogonal.
    Unbounded,
}

impl BoundTime {
    pub fn finite(self) -> Option<f64> {
        match self {
            BoundTime::Finite(t) => Some(t),
            BoundTime::Unbounded => None,
        }
    }

    /// `f64::INFINITY` for [`BoundTime::Unbounded`].
    pub fn as_f64(self) -> f64 {
        self.finite().unwrap_or(f64::INFINITY)
    }
}

/// Which term of `max(pi/2E, pi/2dE)` is the larger one.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Branch {
    /// `pi / 2E`
    MargolusLevitin,
    /// `pi / 2dE`
    TimeEnergyUncertainty,
    Equal,
}

impl std::fmt::Display for Branch {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Branch::MargolusLevitin => "MargolusLevitin",
            Branch::TimeEnergyUncertainty => "TimeEnergyUncertainty",
            Branch::Equal => "Equal",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundResult {
    pub time: BoundTime,
    pub branch: Branch,
}

fn bound_from(energy: f64, spread: f64) -> BoundResult {
    let scale = energy.max(spread);
    let branch = if (energy - spread).abs() <= ZERO_ENERGY_TOL * scale.max(1.0) {
        Branch::Equal
    } else if energy < spread {
        Branch::MargolusLevitin
    } else {
        Branch::TimeEnergyUncertainty
    };
    let governing = energy.min(spread);
    let time = if governing <= ZERO_ENERGY_TOL {
        BoundTime::Unbounded
    } else {
        BoundTime::Finite(FRAC_PI_2 / governing)
    };
    BoundResult { time, branch }
}

/// Quantum speed limit time `max(pi / 2E, pi / 2dE)`.
pub fn qsl_time(stats: &EnergyStats) -> BoundResult {
    bound_from(stats.energy(), stats.spread())
}

/// Totals for a product of independent subsystems: energies add, variances add.
pub fn aggregate_product_stats(per_subsystem: &[EnergyStats]) -> Result<EnergyStats> {
    if per_subsystem.is_empty() {
        return Err(QslError::EmptyFactors);
    }
    let energy = per_subsystem.iter().map(|s| s.energy()).sum();
    let variance: f64 = per_subsystem.iter().map(|s| s.spread().powi(2)).sum();
    EnergyStats::new(energy, variance.sqrt())
}

/// Lower bound on the orthogonality time of a product pure state, taken from
/// the largest per-subsystem energy and the largest per-subsystem spread.
pub fn separable_pure_bound(per_subsystem: &[EnergyStats]) -> Result<BoundResult> {
    if per_subsystem.is_empty() {
        return Err(QslError::EmptyFactors);
    }
    let e_max = per_subsystem.iter().map(|s| s.energy()).fold(0.0, f64::max);
    let de_max = per_subsystem.iter().map(|s| s.spread()).fold(0.0, f64::max);
    Ok(bound_from(e_max, de_max))
}

/// Multiplier `g` such that every energy-homogeneous product pure state of
/// `m` subsystems with totals `aggregate` needs at least `g * qsl_time`.
///
/// With `M* = (E/dE)^2`: `g = M` when `dE >= E`; otherwise `g = sqrt(M)` for
/// `M <= M*` and `M / sqrt(M*)` for `M >= M*`. These are the exact ratios of
/// the product bound at `E_k = E/M`, `dE_k = dE/sqrt(M)` to the speed limit,
/// so the value is attained, not just a lower bound.
pub fn homogeneous_gap_factor(m: usize, aggregate: &EnergyStats) -> Result<f64> {
    if m == 0 {
        return Err(QslError::InvalidParameter("subsystem count must be >= 1".into()));
    }
    let (e, de) = (aggregate.energy(), aggregate.spread());
    if e <= ZERO_ENERGY_TOL || de <= ZERO_ENERGY_TOL {
        return Err(QslError::InvalidStats {
            energy: e,
            spread: de,
        });
    }
    let m = m as f64;
    if de >= e {
        return Ok(m);
    }
    let m_star = (e / de).powi(2);
    Ok(if m <= m_star { m.sqrt() } else { m / m_star.sqrt() })
}

fn check_locals(ensemble: &SeparableEnsemble, locals: &[Hamiltonian]) -> Result<()> {
    let dims = ensemble.layout().dims();
    if locals.len() != dims.len() {
        return Err(QslError::DimensionMismatch {
            expected: dims.len(),
            found: locals.len(),
        });
    }
    for (h, &d) in locals.iter().zip(dims) {
        match h.layout().dims() {
            [local] if *local == d => {}
            [local] => {
                return Err(QslError::DimensionMismatch {
                    expected: d,
                    found: *local,
                })
            }
            other => {
                return Err(QslError::InteractingHamiltonian {
                    dims: other.to_vec(),
                })
            }
        }
        h.require_ground_shifted()?;
    }
    Ok(())
}

fn per_term_stats(
    ensemble: &SeparableEnsemble,
    locals: &[Hamiltonian],
) -> Result<Vec<Vec<EnergyStats>>> {
    ensemble
        .terms()
        .iter()
        .map(|term| {
            term.iter()
                .zip(locals)
                .map(|(rho, h)| energy_stats(rho, h))
                .collect()
        })
        .collect()
}

/// Energy and spread of a separable mixture under a non-interacting
/// Hamiltonian, from per-factor statistics:
/// `E = sum_n p_n sum_k E_k`,
/// `dE^2 = sum_n p_n [sum_k dE_k^2 + (sum_k E_k - E)^2]`.
pub fn mixture_stats(ensemble: &SeparableEnsemble, locals: &[Hamiltonian]) -> Result<EnergyStats> {
    check_locals(ensemble, locals)?;
    let stats = per_term_stats(ensemble, locals)?;
    let totals: Vec<f64> = stats
        .iter()
        .map(|term| term.iter().map(|s| s.energy()).sum())
        .collect();
    let energy: f64 = ensemble.weights().iter().zip(&totals).map(|(p, e)| p * e).sum();
    let variance: f64 = ensemble
        .weights()
        .iter()
        .zip(&stats)
        .zip(&totals)
        .map(|((p, term), total)| {
            let local: f64 = term.iter().map(|s| s.spread().powi(2)).sum();
            p * (local + (total - energy).powi(2))
        })
        .sum();
    EnergyStats::new(energy.max(0.0), variance.max(0.0).sqrt())
}

/// Bound from the spectral decomposition of a mixed state.
#[derive(Debug, Clone)]
pub struct MixedStateBound {
    pub bound: BoundResult,
    /// Minimum energy over the retained eigenvectors.
    pub energy_min: f64,
    /// Minimum spread over the retained eigenvectors.
    pub spread_min: f64,
    /// `(eigenvalue, stats)` for each retained eigenvector, eigenvalues descending.
    pub components: Vec<(f64, EnergyStats)>,
    /// Retained eigenvalues contain a repeat, so the eigenbasis (and with it
    /// the minima) is not unique.
    pub degenerate: bool,
}

/// `max(pi / 2 E_min, pi / 2 dE_min)` over the eigenvectors of `rho`.
pub fn mixed_state_bound(rho: &DensityMatrix, h: &Hamiltonian) -> Result<MixedStateBound> {
    rho.layout().ensure_same(h.layout())?;
    h.require_ground_shifted()?;
    let terms = spectral_decompose(rho)?;
    let mut components = Vec::with_capacity(terms.len());
    for term in &terms {
        let phi = PureState::from_parts_unchecked(rho.layout().clone(), term.vector.clone());
        components.push((term.weight, energy_stats(&phi, h)?));
    }
    let energy_min = components.iter().map(|(_, s)| s.energy()).fold(f64::INFINITY, f64::min);
    let spread_min = components.iter().map(|(_, s)| s.spread()).fold(f64::INFINITY, f64::min);
    let degenerate = terms
        .windows(2)
        .any(|w| (w[0].weight - w[1].weight).abs() <= DEGENERACY_TOL);
    Ok(MixedStateBound {
        bound: bound_from(energy_min, spread_min),
        energy_min,
        spread_min,
        components,
        degenerate,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub enum Verdict {
    /// Every term has exactly one evolving subsystem, orthogonal at the bound
    /// time and saturating its own limit; all others are eigenstates.
    SaturatingStructure,
    Violation(String),
}

impl Verdict {
    pub fn is_saturating(&self) -> bool {
        matches!(self, Verdict::SaturatingStructure)
    }
}

/// `chi_k^(n,m)(T) = Tr[rho_k^(n)(T) rho_k^(m)]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChiValue {
    pub n: usize,
    pub m: usize,
    pub k: usize,
    pub value: Complex64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TermRecord {
    /// Subsystem that reaches orthogonality in this term (0-based), if any.
    pub evolving_index: Option<usize>,
    /// Subsystems that are not Hamiltonian eigenstates.
    pub evolving: Vec<usize>,
    pub stationary: Vec<usize>,
    /// Speed limit of the factor at `evolving_index`.
    pub term_bound: Option<BoundResult>,
}

#[derive(Debug, Clone)]
pub struct EnsembleAnalysis {
    pub stats: EnergyStats,
    pub bound: BoundResult,
    /// `sum_{n,m} p_n p_m prod_k chi_k^(n,m)` at the bound time.
    pub global_survival: f64,
    pub chi: Vec<ChiValue>,
    pub terms: Vec<TermRecord>,
    pub verdict: Verdict,
}

/// `||(H - <H>) rho||_F`, zero exactly for states inside one eigenspace.
fn eigenstate_residual(rho: &DensityMatrix, h: &Hamiltonian) -> f64 {
    let mean = trace_of_product(rho.matrix(), h.matrix()).re;
    let n = rho.matrix().nrows();
    let centered = h.matrix() - CMatrix::identity(n, n) * re(mean);
    (centered * rho.matrix()).norm()
}

/// Evaluates every `chi_k^(n,m)` at the mixture's speed-limit time and checks
/// whether the ensemble has the structure forced on saturating separable
/// mixtures: in each term one subsystem evolves to an orthogonal state at its
/// own speed limit while every other subsystem is an energy eigenstate.
pub fn analyze_ensemble_at_qsl(
    ensemble: &SeparableEnsemble,
    locals: &[Hamiltonian],
    tol: f64,
) -> Result<EnsembleAnalysis> {
    if !(tol.is_finite() && tol > 0.0) {
        return Err(QslError::InvalidParameter(format!("tolerance must be > 0, got {tol}")));
    }
    let stats = mixture_stats(ensemble, locals)?;
    let bound = qsl_time(&stats);
    let factor_stats = per_term_stats(ensemble, locals)?;
    let terms = ensemble.terms();

    let mut records: Vec<TermRecord> = terms
        .iter()
        .map(|term| {
            let (stationary, evolving): (Vec<usize>, Vec<usize>) = (0..term.len())
                .partition(|&k| eigenstate_residual(&term[k], &locals[k]) <= tol);
            TermRecord {
                evolving_index: None,
                evolving,
                stationary,
                term_bound: None,
            }
        })
        .collect();

    let t = match bound.time {
        BoundTime::Finite(t) => t,
        BoundTime::Unbounded => {
            return Ok(EnsembleAnalysis {
                stats,
                bound,
                global_survival: 1.0,
                chi: Vec::new(),
                terms: records,
                verdict: Verdict::Violation("not saturating: speed-limit time is unbounded".into()),
            })
        }
    };

    let evolved: Vec<Vec<DensityMatrix>> = terms
        .iter()
        .map(|term| {
            term.iter()
                .zip(locals)
                .map(|(rho, h)| rho.propagated(h.spectrum(), t))
                .collect()
        })
        .collect();

    let weights = ensemble.weights();
    let mut chi = Vec::new();
    let mut global = Complex64::new(0.0, 0.0);
    let mut largest_summand = 0.0f64;
    for (n, pn) in weights.iter().enumerate() {
        for (m, pm) in weights.iter().enumerate() {
            let mut product = Complex64::new(1.0, 0.0);
            for k in 0..ensemble.num_subsystems() {
                let value = trace_of_product(evolved[n][k].matrix(), terms[m][k].matrix());
                chi.push(ChiValue { n, m, k, value });
                product *= value;
            }
            let summand = product * (pn * pm);
            largest_summand = largest_summand.max(summand.norm());
            global += summand;
        }
    }
    let global_survival = global.re;

    let chi_nn = |n: usize, k: usize| {
        chi.iter()
            .find(|c| c.n == n && c.m == n && c.k == k)
            .map(|c| c.value.re)
            .unwrap_or(f64::INFINITY)
    };
    for (n, record) in records.iter_mut().enumerate() {
        record.evolving_index = (0..ensemble.num_subsystems()).find(|&k| chi_nn(n, k) <= tol);
        record.term_bound = record.evolving_index.map(|k| qsl_time(&factor_stats[n][k]));
    }

    let verdict = if global_survival > tol {
        Verdict::Violation(format!(
            "not saturating: global survival {global_survival:.3e} at t = {t}"
        ))
    } else if largest_summand > tol {
        Verdict::Violation(format!(
            "not saturating: a summand of size {largest_summand:.3e} does not vanish"
        ))
    } else {
        structure_verdict(&records, t, tol)
    };

    Ok(EnsembleAnalysis {
        stats,
        bound,
        global_survival,
        chi,
        terms: records,
        verdict,
    })
}

fn structure_verdict(records: &[TermRecord], t: f64, tol: f64) -> Verdict {
    for (n, r) in records.iter().enumerate() {
        let Some(k) = r.evolving_index else {
            return Verdict::Violation(format!("term {n}: no subsystem becomes orthogonal"));
        };
        if r.evolving != [k] {
            return Verdict::Violation(format!(
                "term {n}: evolving subsystems {:?}, expected only {k}",
                r.evolving
            ));
        }
        match r.term_bound.map(|b| b.time) {
            Some(BoundTime::Finite(local)) if (local - t).abs() <= tol * t.max(1.0) => {}
            other => {
                return Verdict::Violation(format!(
                    "term {n}: subsystem {k} has speed limit {other:?}, global is {t}"
                ))
            }
        }
    }
    Verdict::SaturatingStructure
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qcore::{diag, real_vector, SubsystemLayout};
    use std::f64::consts::{FRAC_1_SQRT_2, PI, SQRT_2};

    fn stats(e: f64, de: f64) -> EnergyStats {
        EnergyStats::new(e, de).unwrap()
    }

    #[test]
    fn qsl_examples() {
        let b = qsl_time(&stats(1.0, 1.0));
        assert_eq!(b.time, BoundTime::Finite(FRAC_PI_2));
        assert_eq!(b.branch, Branch::Equal);
        let b = qsl_time(&stats(2.0, 0.5));
        assert_eq!(b.time, BoundTime::Finite(PI));
        assert_eq!(b.branch, Branch::TimeEnergyUncertainty);
        let b = qsl_time(&stats(0.5, 2.0));
        assert_eq!(b.branch, Branch::MargolusLevitin);
        assert_eq!(b.time, BoundTime::Finite(PI));
        assert_eq!(qsl_time(&stats(0.5, 0.0)).time, BoundTime::Unbounded);
        assert_eq!(qsl_time(&stats(0.0, 1.0)).time, BoundTime::Unbounded);
    }

    #[test]
    fn separable_examples() {
        let single = separable_pure_bound(&[stats(1.0, 1.0)]).unwrap();
        assert_eq!(single, qsl_time(&stats(1.0, 1.0)));

        let two = [stats(0.5, 0.5), stats(0.5, 0.5)];
        let sep = separable_pure_bound(&two).unwrap().time.as_f64();
        assert!((sep - PI).abs() < 1e-15);
        let agg = qsl_time(&aggregate_product_stats(&two).unwrap()).time.as_f64();
        assert!((agg - PI / SQRT_2).abs() < 1e-15);
        assert!((sep / agg - SQRT_2).abs() < 1e-15);

        let crossed = separable_pure_bound(&[stats(2.0, 0.1), stats(0.1, 2.0)]).unwrap();
        assert!((crossed.time.as_f64() - PI / 4.0).abs() < 1e-15);

        assert_eq!(separable_pure_bound(&[]), Err(QslError::EmptyFactors));
    }

    #[test]
    fn gap_factor_examples() {
        assert_eq!(homogeneous_gap_factor(4, &stats(1.0, 1.0)).unwrap(), 4.0);
        assert_eq!(homogeneous_gap_factor(1, &stats(3.0, 0.2)).unwrap(), 1.0);
        assert_eq!(homogeneous_gap_factor(1, &stats(0.2, 3.0)).unwrap(), 1.0);
        // dE = 2E: product bound with E_k = E/4, dE_k = dE/2 is 4x the limit
        let f = homogeneous_gap_factor(4, &stats(1.0, 2.0)).unwrap();
        let product = separable_pure_bound(&[stats(0.25, 1.0); 4]).unwrap().time.as_f64();
        let limit = qsl_time(&stats(1.0, 2.0)).time.as_f64();
        assert!((product / limit - 4.0).abs() < 1e-14);
        assert_eq!(f, 4.0);
        assert!(homogeneous_gap_factor(0, &stats(1.0, 1.0)).is_err());
        assert!(homogeneous_gap_factor(2, &stats(0.0, 1.0)).is_err());
    }

    fn qubit_h() -> Hamiltonian {
        Hamiltonian::new(SubsystemLayout::single(2).unwrap(), diag(&[0.0, 1.0])).unwrap()
    }

    fn qubit_rho(amps: &[f64]) -> DensityMatrix {
        PureState::normalized(SubsystemLayout::single(2).unwrap(), real_vector(amps))
            .unwrap()
            .to_density()
    }

    #[test]
    fn mixture_single_term_is_product() {
        let e = SeparableEnsemble::new(vec![1.0], vec![vec![qubit_rho(&[1.0, 1.0]), qubit_rho(&[0.0, 1.0])]])
            .unwrap();
        let s = mixture_stats(&e, &[qubit_h(), qubit_h()]).unwrap();
        assert!((s.energy() - 1.5).abs() < 1e-15);
        assert!((s.spread() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn mixture_classical_variance_only() {
        let ground = qubit_rho(&[1.0, 0.0]);
        let excited = qubit_rho(&[0.0, 1.0]);
        let e = SeparableEnsemble::new(
            vec![0.5, 0.5],
            vec![vec![ground.clone(), ground], vec![excited.clone(), excited]],
        )
        .unwrap();
        let s = mixture_stats(&e, &[qubit_h(), qubit_h()]).unwrap();
        assert!((s.energy() - 1.0).abs() < 1e-15 && (s.spread() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn mixture_rejects_interacting() {
        let e = SeparableEnsemble::new(vec![1.0], vec![vec![qubit_rho(&[1.0, 0.0])]]).unwrap();
        let two = Hamiltonian::new(SubsystemLayout::qubits(2).unwrap(), diag(&[0.0, 1.0, 1.0, 2.0])).unwrap();
        assert!(matches!(
            mixture_stats(&e, &[two]),
            Err(QslError::InteractingHamiltonian { .. })
        ));
        assert!(mixture_stats(&e, &[]).is_err());
    }

    #[test]
    fn mixed_bound_pure_projector() {
        let rho = qubit_rho(&[1.0, 1.0]);
        let b = mixed_state_bound(&rho, &qubit_h()).unwrap();
        let direct = qsl_time(&energy_stats(&rho, &qubit_h()).unwrap());
        assert_eq!(b.components.len(), 1);
        assert!((b.bound.time.as_f64() - direct.time.as_f64()).abs() < 1e-12);
    }

    #[test]
    fn mixed_bound_stationary_component() {
        let l = SubsystemLayout::single(3).unwrap();
        let h = Hamiltonian::new(l.clone(), diag(&[0.0, 1.0, 2.0])).unwrap();
        let a = PureState::new(l.clone(), real_vector(&[FRAC_1_SQRT_2, FRAC_1_SQRT_2, 0.0])).unwrap();
        let c = PureState::basis(l, 2).unwrap();
        let rho = DensityMatrix::mixture(&[(0.75, a), (0.25, c)]).unwrap();
        let b = mixed_state_bound(&rho, &h).unwrap();
        assert_eq!(b.bound.time, BoundTime::Unbounded);
        assert!(!b.degenerate);
    }

    #[test]
    fn mixed_bound_equal_mixture() {
        let plus = PureState::normalized(SubsystemLayout::single(2).unwrap(), real_vector(&[1.0, 1.0])).unwrap();
        let minus = PureState::normalized(SubsystemLayout::single(2).unwrap(), real_vector(&[1.0, -1.0])).unwrap();
        let rho = DensityMatrix::mixture(&[(0.5, plus), (0.5, minus)]).unwrap();
        let b = mixed_state_bound(&rho, &qubit_h()).unwrap();
        // rho = I/2 is degenerate: the eigenbasis is the solver's choice, and
        // for the computational basis the eigenvectors are stationary.
        assert!(b.degenerate);
        assert!(b.bound.time.as_f64() >= PI - 1e-12);
    }
}
