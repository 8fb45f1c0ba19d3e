//! States, operators, composite layouts, and the primitives built on them.
//!
//! Conventions: `hbar = 1`, energies and times are dimensionless, and basis
//! index ordering puts subsystem 0 in the most significant position.

mod ensemble;
mod hamiltonian;
mod layout;
pub mod linalg;
mod state;

use num_complex::Complex64;

pub use ensemble::{EnergyStats, SeparableEnsemble};
pub use hamiltonian::Hamiltonian;
pub use layout::{SubsystemLayout, DEFAULT_DIM_CAP};
pub use linalg::{CMatrix, CVector, Spectrum};
pub use state::{DensityMatrix, PureState, QuantumState, StateView};

use crate::error::{QslError, Result};
use linalg::{hermitian_deviation, max_abs, kron_all, re};

/// Tolerance for construction invariants (norm, trace, Hermiticity).
pub const CONSTRUCTION_TOL: f64 = 1e-12;
/// Slack allowed below zero for density-matrix eigenvalues.
pub const PSD_SLACK: f64 = 1e-10;
/// How close to zero the ground energy must be to count as shifted.
pub const GROUND_TOL: f64 = 1e-10;
/// Density-matrix eigenvalues below this are dropped by [`spectral_decompose`].
pub const EIGENVALUE_CUTOFF: f64 = 1e-12;

/// Kronecker product of local state vectors laid out according to `layout`.
pub fn tensor_product(layout: &SubsystemLayout, factors: &[CVector]) -> Result<PureState> {
    if factors.is_empty() {
        return Err(QslError::EmptyFactors);
    }
    if factors.len() != layout.num_subsystems() {
        return Err(QslError::DimensionMismatch {
            expected: layout.num_subsystems(),
            found: factors.len(),
        });
    }
    for (f, &d) in factors.iter().zip(layout.dims()) {
        if f.len() != d {
            return Err(QslError::DimensionMismatch {
                expected: d,
                found: f.len(),
            });
        }
        let norm = f.norm();
        if (norm - 1.0).abs() > CONSTRUCTION_TOL {
            return Err(QslError::NotNormalized { norm });
        }
    }
    let mut amplitudes = CVector::from_element(1, re(1.0));
    for f in factors {
        amplitudes = amplitudes.kronecker(f);
    }
    Ok(PureState::from_parts_unchecked(layout.clone(), amplitudes))
}

/// `I x ... x op x ... x I` with `op` acting on subsystem `site`.
pub fn embed_local(op: &CMatrix, site: usize, layout: &SubsystemLayout) -> Result<CMatrix> {
    layout.ensure_site(site)?;
    let d = layout.dims()[site];
    if op.nrows() != d || op.ncols() != d {
        return Err(QslError::DimensionMismatch {
            expected: d,
            found: op.nrows(),
        });
    }
    let deviation = hermitian_deviation(op);
    if !(deviation <= CONSTRUCTION_TOL * max_abs(op).max(1.0)) {
        return Err(QslError::NotHermitian { deviation });
    }
    let (left, right) = layout.split_at(site);
    let id_left = CMatrix::identity(left, left);
    let id_right = CMatrix::identity(right, right);
    Ok(kron_all([&id_left, op, &id_right]))
}

/// Mean energy and spread of a state under a ground-shifted Hamiltonian.
pub fn energy_stats<S: QuantumState>(state: &S, h: &Hamiltonian) -> Result<EnergyStats> {
    state.layout().ensure_same(h.layout())?;
    h.require_ground_shifted()?;
    let (mean, variance) = state.view().moments(h.matrix());
    EnergyStats::new(mean.max(0.0), variance.max(0.0).sqrt())
}

/// Returns `H - lambda_min I`.
pub fn ground_shift(h: &Hamiltonian) -> Hamiltonian {
    h.ground_shift()
}

/// `Tr[rho_a rho_b]`, which is `|<a|b>|^2` for pure states; clamped to [0, 1].
pub fn state_overlap<S: QuantumState>(a: &S, b: &S) -> Result<f64> {
    a.layout().ensure_same(b.layout())?;
    Ok(raw_overlap(a.view(), b.view()).clamp(0.0, 1.0))
}

pub(crate) fn raw_overlap(a: StateView<'_>, b: StateView<'_>) -> f64 {
    match (a, b) {
        (StateView::Pure(x), StateView::Pure(y)) => x.inner(y).norm_sqr(),
        (x, y) => linalg::trace_of_product(&x.density_matrix(), &y.density_matrix()).re,
    }
}

/// One `(lambda_n, |phi_n>)` pair of a density-matrix spectral decomposition.
#[derive(Debug, Clone)]
pub struct SpectralTerm {
    pub weight: f64,
    pub vector: CVector,
}

/// Eigen-pairs of `rho` with weight above [`EIGENVALUE_CUTOFF`], weights
/// descending.
///
/// Within a degenerate eigenspace the basis is whatever the eigensolver
/// returns.
pub fn spectral_decompose(rho: &DensityMatrix) -> Result<Vec<SpectralTerm>> {
    let spectrum = Spectrum::of_hermitian(&linalg::symmetrize(rho.matrix()))?;
    let vectors = spectrum.vectors();
    Ok(spectrum
        .values()
        .iter()
        .enumerate()
        .rev()
        .filter(|(_, &w)| w > EIGENVALUE_CUTOFF)
        .map(|(j, &w)| SpectralTerm {
            weight: w,
            vector: vectors.column(j).into_owned(),
        })
        .collect())
}

/// Shorthand for a real diagonal matrix.
pub fn diag(values: &[f64]) -> CMatrix {
    CMatrix::from_diagonal(&CVector::from_iterator(values.len(), values.iter().map(|&v| re(v))))
}

/// Pauli `sigma_x`.
pub fn sigma_x() -> CMatrix {
    CMatrix::from_row_slice(2, 2, &[re(0.0), re(1.0), re(1.0), re(0.0)])
}

/// Complex vector from real parts.
pub fn real_vector(values: &[f64]) -> CVector {
    CVector::from_iterator(values.len(), values.iter().map(|&v| Complex64::new(v, 0.0)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_1_SQRT_2;

    fn qubits(m: usize) -> SubsystemLayout {
        SubsystemLayout::qubits(m).unwrap()
    }

    fn amps(s: &PureState) -> Vec<f64> {
        s.amplitudes().iter().map(|z| z.re).collect()
    }

    #[test]
    fn tensor_of_basis_states() {
        let up = real_vector(&[1.0, 0.0]);
        let s = tensor_product(&qubits(2), &[up.clone(), up]).unwrap();
        assert_eq!(amps(&s), vec![1.0, 0.0, 0.0, 0.0]);
    }

    #[test]
    fn tensor_linear_in_one_factor() {
        let plus = real_vector(&[FRAC_1_SQRT_2, FRAC_1_SQRT_2]);
        let up = real_vector(&[1.0, 0.0]);
        let s = tensor_product(&qubits(2), &[plus, up]).unwrap();
        assert_eq!(amps(&s), vec![FRAC_1_SQRT_2, 0.0, FRAC_1_SQRT_2, 0.0]);
    }

    #[test]
    fn tensor_three_plus_states() {
        let plus = real_vector(&[FRAC_1_SQRT_2, FRAC_1_SQRT_2]);
        let s = tensor_product(&qubits(3), &[plus.clone(), plus.clone(), plus]).unwrap();
        // brute-force expansion: every amplitude is a product of three 1/sqrt(2)
        for i in 0..8 {
            let expected = (0..3).map(|_| FRAC_1_SQRT_2).product::<f64>();
            assert!((s.amplitudes()[i].re - expected).abs() < 1e-15);
            assert!((expected - 1.0 / (2.0 * 2f64.sqrt())).abs() < 1e-15);
        }
    }

    #[test]
    fn tensor_errors() {
        let up = real_vector(&[1.0, 0.0]);
        assert_eq!(tensor_product(&qubits(1), &[]).unwrap_err(), QslError::EmptyFactors);
        assert!(matches!(
            tensor_product(&qubits(2), std::slice::from_ref(&up)),
            Err(QslError::DimensionMismatch { .. })
        ));
        assert!(matches!(
            tensor_product(&qubits(1), &[real_vector(&[1.0, 0.0, 0.0])]),
            Err(QslError::DimensionMismatch { .. })
        ));
        assert!(matches!(
            tensor_product(&qubits(1), &[real_vector(&[1.0, 1.0])]),
            Err(QslError::NotNormalized { .. })
        ));
    }

    #[test]
    fn embed_identity_and_sigma_x() {
        let l = qubits(2);
        let id = embed_local(&CMatrix::identity(2, 2), 1, &l).unwrap();
        assert_eq!(id, CMatrix::identity(4, 4));
        let x0 = embed_local(&sigma_x(), 0, &l).unwrap();
        // |0j> <-> |1j>
        for j in 0..2 {
            assert_eq!(x0[(2 + j, j)], re(1.0));
            assert_eq!(x0[(j, 2 + j)], re(1.0));
        }
        assert_eq!(x0.iter().filter(|z| z.norm() > 0.0).count(), 4);
    }

    #[test]
    fn embed_sum_of_number_operators() {
        let l = qubits(2);
        let n = diag(&[0.0, 1.0]);
        let sum = embed_local(&n, 0, &l).unwrap() + embed_local(&n, 1, &l).unwrap();
        assert_eq!(sum, diag(&[0.0, 1.0, 1.0, 2.0]));
    }

    #[test]
    fn embed_errors() {
        let l = qubits(2);
        assert!(matches!(
            embed_local(&sigma_x(), 2, &l),
            Err(QslError::SiteOutOfRange { site: 2, count: 2 })
        ));
        let bad = CMatrix::from_row_slice(2, 2, &[re(0.0), re(1.0), re(2.0), re(0.0)]);
        assert!(matches!(embed_local(&bad, 0, &l), Err(QslError::NotHermitian { .. })));
        assert!(matches!(
            embed_local(&diag(&[0.0, 1.0, 2.0]), 0, &l),
            Err(QslError::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn energy_stats_examples() {
        let l = SubsystemLayout::single(2).unwrap();
        let h = Hamiltonian::new(l.clone(), diag(&[0.0, 1.0])).unwrap();
        let e1 = PureState::basis(l.clone(), 1).unwrap();
        let s = energy_stats(&e1, &h).unwrap();
        assert_eq!((s.energy(), s.spread()), (1.0, 0.0));

        let plus = PureState::new(l, real_vector(&[FRAC_1_SQRT_2, FRAC_1_SQRT_2])).unwrap();
        let s = energy_stats(&plus, &h).unwrap();
        assert!((s.energy() - 0.5).abs() < 1e-15 && (s.spread() - 0.5).abs() < 1e-15);
        let s = energy_stats(&plus.to_density(), &h).unwrap();
        assert!((s.energy() - 0.5).abs() < 1e-15 && (s.spread() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn energy_stats_rejects_unshifted_and_mismatch() {
        let l = SubsystemLayout::single(2).unwrap();
        let h = Hamiltonian::new(l.clone(), diag(&[1.0, 2.0])).unwrap();
        let psi = PureState::basis(l, 0).unwrap();
        assert!(matches!(
            energy_stats(&psi, &h),
            Err(QslError::UnshiftedHamiltonian { .. })
        ));
        let h2 = Hamiltonian::new(qubits(2), diag(&[0.0, 1.0, 1.0, 2.0])).unwrap();
        assert!(matches!(energy_stats(&psi, &h2), Err(QslError::LayoutMismatch { .. })));
    }

    #[test]
    fn overlap_examples() {
        let l = SubsystemLayout::single(2).unwrap();
        let a = PureState::basis(l.clone(), 0).unwrap();
        let b = PureState::basis(l.clone(), 1).unwrap();
        assert_eq!(state_overlap(&a, &a).unwrap(), 1.0);
        assert_eq!(state_overlap(&a, &b).unwrap(), 0.0);
        let mixed = DensityMatrix::new(l.clone(), CMatrix::identity(2, 2) * re(0.5)).unwrap();
        let psi = PureState::new(l, real_vector(&[0.6, 0.8])).unwrap();
        assert!((state_overlap(&mixed, &psi.to_density()).unwrap() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn spectral_examples() {
        let l = SubsystemLayout::single(2).unwrap();
        let psi = PureState::new(l.clone(), real_vector(&[0.6, 0.8])).unwrap();
        let terms = spectral_decompose(&psi.to_density()).unwrap();
        assert_eq!(terms.len(), 1);
        assert!((terms[0].weight - 1.0).abs() < 1e-12);
        assert!((terms[0].vector.dotc(psi.amplitudes()).norm() - 1.0).abs() < 1e-12);

        let rho = DensityMatrix::new(l, diag(&[0.25, 0.75])).unwrap();
        let terms = spectral_decompose(&rho).unwrap();
        assert_eq!(terms.len(), 2);
        assert!((terms[0].weight - 0.75).abs() < 1e-15);
        assert!((terms[0].vector[1].norm() - 1.0).abs() < 1e-15);
        assert!((terms[1].weight - 0.25).abs() < 1e-15);
    }
}
