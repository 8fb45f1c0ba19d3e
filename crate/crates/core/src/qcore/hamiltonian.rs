use super::layout::SubsystemLayout;
use super::linalg::{ensure_square, hermitian_deviation, max_abs, re, symmetrize, CMatrix, Spectrum};
use super::{CONSTRUCTION_TOL, GROUND_TOL};
use crate::error::{QslError, Result};

/// Hermitian operator on a composite layout, with its spectrum cached at
/// construction.
///
/// The mean energy of a state is only meaningful once the ground energy is
/// zero; bound computations call [`Hamiltonian::require_ground_shifted`] and
/// never shift on the caller's behalf.
#[derive(Debug, Clone)]
pub struct Hamiltonian {
    layout: SubsystemLayout,
    matrix: CMatrix,
    spectrum: Spectrum,
}

impl Hamiltonian {
    pub fn new(layout: SubsystemLayout, matrix: CMatrix) -> Result<Self> {
        let n = ensure_square(&matrix)?;
        if n != layout.total_dim() {
            return Err(QslError::DimensionMismatch {
                expected: layout.total_dim(),
                found: n,
            });
        }
        let deviation = hermitian_deviation(&matrix);
        if !(deviation <= CONSTRUCTION_TOL * max_abs(&matrix).max(1.0)) {
            return Err(QslError::NotHermitian { deviation });
        }
        let matrix = symmetrize(&matrix);
        let spectrum = Spectrum::of_hermitian(&matrix)?;
        Ok(Self {
            layout,
            matrix,
            spectrum,
        })
    }

    /// Sum of one local term per subsystem, `sum_k embed(h_k, k)`.
    pub fn non_interacting(layout: SubsystemLayout, local_terms: &[CMatrix]) -> Result<Self> {
        if local_terms.len() != layout.num_subsystems() {
            return Err(QslError::DimensionMismatch {
                expected: layout.num_subsystems(),
                found: local_terms.len(),
            });
        }
        let dim = layout.total_dim();
        let mut total = CMatrix::zeros(dim, dim);
        for (site, term) in local_terms.iter().enumerate() {
            total += super::embed_local(term, site, &layout)?;
        }
        Self::new(layout, total)
    }

    pub fn layout(&self) -> &SubsystemLayout {
        &self.layout
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn spectrum(&self) -> &Spectrum {
        &self.spectrum
    }

    /// Smallest eigenvalue.
    pub fn ground_energy(&self) -> f64 {
        self.spectrum.min()
    }

    pub fn is_ground_shifted(&self) -> bool {
        self.ground_energy().abs() <= GROUND_TOL
    }

    pub fn require_ground_shifted(&self) -> Result<()> {
        if !self.is_ground_shifted() {
            return Err(QslError::UnshiftedHamiltonian {
                ground_energy: self.ground_energy(),
            });
        }
        Ok(())
    }

    /// `H - lambda_min I`. Dynamics change only by a global phase.
    pub fn ground_shift(&self) -> Self {
        let offset = self.ground_energy();
        let n = self.layout.total_dim();
        Self {
            layout: self.layout.clone(),
            matrix: &self.matrix - CMatrix::identity(n, n) * re(offset),
            spectrum: self.spectrum.shifted(offset),
        }
    }

    /// Largest minus smallest eigenvalue.
    pub fn spectral_range(&self) -> f64 {
        self.spectrum.max() - self.spectrum.min()
    }
}
