use num_complex::Complex64;

use super::layout::SubsystemLayout;
use super::linalg::{
    ensure_square, hermitian_deviation, projector, re, trace_of_product, CMatrix, CVector,
    Spectrum,
};
use super::{CONSTRUCTION_TOL, PSD_SLACK};
use crate::error::{QslError, Result};

/// Normalized state vector over a composite basis.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    layout: SubsystemLayout,
    amplitudes: CVector,
}

impl PureState {
    pub fn new(layout: SubsystemLayout, amplitudes: CVector) -> Result<Self> {
        if amplitudes.len() != layout.total_dim() {
            return Err(QslError::DimensionMismatch {
                expected: layout.total_dim(),
                found: amplitudes.len(),
            });
        }
        let norm = amplitudes.norm();
        if !norm.is_finite() || (norm - 1.0).abs() > CONSTRUCTION_TOL {
            return Err(QslError::NotNormalized { norm });
        }
        Ok(Self { layout, amplitudes })
    }

    /// Scales `amplitudes` to unit norm first.
    pub fn normalized(layout: SubsystemLayout, amplitudes: CVector) -> Result<Self> {
        let norm = amplitudes.norm();
        if !(norm.is_finite() && norm > 0.0) {
            return Err(QslError::NotNormalized { norm });
        }
        Self::new(layout, amplitudes.unscale(norm))
    }

    /// Computational basis state `|index>`.
    pub fn basis(layout: SubsystemLayout, index: usize) -> Result<Self> {
        let dim = layout.total_dim();
        if index >= dim {
            return Err(QslError::DimensionMismatch {
                expected: dim,
                found: index + 1,
            });
        }
        let mut amplitudes = CVector::zeros(dim);
        amplitudes[index] = re(1.0);
        Ok(Self { layout, amplitudes })
    }

    pub(crate) fn from_parts_unchecked(layout: SubsystemLayout, amplitudes: CVector) -> Self {
        Self { layout, amplitudes }
    }

    pub fn layout(&self) -> &SubsystemLayout {
        &self.layout
    }

    pub fn amplitudes(&self) -> &CVector {
        &self.amplitudes
    }

    /// `<self|other>`.
    pub fn inner(&self, other: &Self) -> Complex64 {
        self.amplitudes.dotc(&other.amplitudes)
    }

    pub fn to_density(&self) -> DensityMatrix {
        DensityMatrix {
            layout: self.layout.clone(),
            matrix: projector(&self.amplitudes),
        }
    }
}

/// Hermitian, positive semidefinite, unit-trace operator.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    layout: SubsystemLayout,
    matrix: CMatrix,
}

impl DensityMatrix {
    pub fn new(layout: SubsystemLayout, matrix: CMatrix) -> Result<Self> {
        let n = ensure_square(&matrix)?;
        if n != layout.total_dim() {
            return Err(QslError::DimensionMismatch {
                expected: layout.total_dim(),
                found: n,
            });
        }
        let deviation = hermitian_deviation(&matrix);
        if !(deviation <= CONSTRUCTION_TOL) {
            return Err(QslError::NotHermitian { deviation });
        }
        let trace = matrix.trace();
        if !((trace.re - 1.0).abs() <= CONSTRUCTION_TOL && trace.im.abs() <= CONSTRUCTION_TOL) {
            return Err(QslError::InvalidTrace { trace: trace.re });
        }
        let spectrum = Spectrum::of_hermitian(&super::linalg::symmetrize(&matrix))?;
        if spectrum.min() < -PSD_SLACK {
            return Err(QslError::NotPositive {
                min_eigenvalue: spectrum.min(),
            });
        }
        Ok(Self { layout, matrix })
    }

    /// `sum_n w_n |psi_n><psi_n|`; weights must be nonnegative and sum to one.
    pub fn mixture(components: &[(f64, PureState)]) -> Result<Self> {
        let (_, first) = components.first().ok_or(QslError::EmptyFactors)?;
        let layout = first.layout().clone();
        let mut matrix = CMatrix::zeros(layout.total_dim(), layout.total_dim());
        for (w, psi) in components {
            if !(w.is_finite() && *w >= 0.0) {
                return Err(QslError::InvalidWeights(format!("weight {w} is not >= 0")));
            }
            layout.ensure_same(psi.layout())?;
            matrix += projector(psi.amplitudes()) * re(*w);
        }
        Self::new(layout, matrix)
    }

    pub(crate) fn from_parts_unchecked(layout: SubsystemLayout, matrix: CMatrix) -> Self {
        Self { layout, matrix }
    }

    pub fn layout(&self) -> &SubsystemLayout {
        &self.layout
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    /// `Tr[rho^2]`.
    pub fn purity(&self) -> f64 {
        trace_of_product(&self.matrix, &self.matrix).re
    }
}

impl From<&PureState> for DensityMatrix {
    fn from(psi: &PureState) -> Self {
        psi.to_density()
    }
}

/// Borrowed view used by operations accepting either state kind.
#[derive(Debug, Clone, Copy)]
pub enum StateView<'a> {
    Pure(&'a PureState),
    Mixed(&'a DensityMatrix),
}

mod sealed {
    pub trait Sealed {}
    impl Sealed for super::PureState {}
    impl Sealed for super::DensityMatrix {}
}

/// Common interface of [`PureState`] and [`DensityMatrix`].
pub trait QuantumState: Clone + sealed::Sealed {
    fn layout(&self) -> &SubsystemLayout;

    fn view(&self) -> StateView<'_>;

    /// Evolves by `exp(-iHt)` given the spectrum of `H`.
    fn propagated(&self, spectrum: &Spectrum, t: f64) -> Self;
}

impl QuantumState for PureState {
    fn layout(&self) -> &SubsystemLayout {
        &self.layout
    }

    fn view(&self) -> StateView<'_> {
        StateView::Pure(self)
    }

    fn propagated(&self, spectrum: &Spectrum, t: f64) -> Self {
        Self::from_parts_unchecked(
            self.layout.clone(),
            spectrum.propagate_vector(&self.amplitudes, t),
        )
    }
}

impl QuantumState for DensityMatrix {
    fn layout(&self) -> &SubsystemLayout {
        &self.layout
    }

    fn view(&self) -> StateView<'_> {
        StateView::Mixed(self)
    }

    fn propagated(&self, spectrum: &Spectrum, t: f64) -> Self {
        Self::from_parts_unchecked(
            self.layout.clone(),
            spectrum.propagate_operator(&self.matrix, t),
        )
    }
}

impl StateView<'_> {
    pub fn layout(&self) -> &SubsystemLayout {
        match self {
            StateView::Pure(p) => p.layout(),
            StateView::Mixed(d) => d.layout(),
        }
    }

    /// Mean and variance of the Hermitian operator `h`.
    pub(crate) fn moments(&self, h: &CMatrix) -> (f64, f64) {
        match self {
            StateView::Pure(p) => {
                let psi = p.amplitudes();
                let h_psi = h * psi;
                let mean = psi.dotc(&h_psi).re;
                let variance = (h_psi - psi * re(mean)).norm_squared();
                (mean, variance)
            }
            StateView::Mixed(d) => {
                let rho = d.matrix();
                let mean = trace_of_product(rho, h).re;
                let centered = h - CMatrix::identity(h.nrows(), h.ncols()) * re(mean);
                let variance = trace_of_product(&(rho * &centered), &centered).re;
                (mean, variance)
            }
        }
    }

    pub(crate) fn density_matrix(&self) -> std::borrow::Cow<'_, CMatrix> {
        match self {
            StateView::Pure(p) => std::borrow::Cow::Owned(projector(p.amplitudes())),
            StateView::Mixed(d) => std::borrow::Cow::Borrowed(d.matrix()),
        }
    }
}
