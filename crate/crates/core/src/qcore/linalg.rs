//! Dense complex linear-algebra helpers shared by the rest of the crate.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{QslError, Result};

pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;

pub(crate) const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub(crate) const ONE: Complex64 = Complex64::new(1.0, 0.0);

const EIGEN_MAX_ITER: usize = 100_000;

/// Real scalar as a complex number.
#[inline]
pub fn re(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

/// Largest elementwise modulus.
pub fn max_abs(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Largest elementwise deviation `|m_ij - conj(m_ji)|`.
pub fn hermitian_deviation(m: &CMatrix) -> f64 {
    let n = m.nrows();
    let mut dev = 0.0f64;
    for i in 0..n {
        for j in i..n {
            dev = dev.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    dev
}

pub(crate) fn ensure_square(m: &CMatrix) -> Result<usize> {
    if m.nrows() != m.ncols() {
        return Err(QslError::NotSquare {
            rows: m.nrows(),
            cols: m.ncols(),
        });
    }
    Ok(m.nrows())
}

/// `(m + m†) / 2`, which removes round-off asymmetry before an eigensolve.
pub(crate) fn symmetrize(m: &CMatrix) -> CMatrix {
    (m + m.adjoint()) * re(0.5)
}

/// Kronecker product of a list of square matrices, left factor most significant.
pub fn kron_all<'a>(factors: impl IntoIterator<Item = &'a CMatrix>) -> CMatrix {
    let mut acc = CMatrix::from_element(1, 1, ONE);
    for f in factors {
        acc = acc.kronecker(f);
    }
    acc
}

/// `Tr[a b]` without forming the product.
pub fn trace_of_product(a: &CMatrix, b: &CMatrix) -> Complex64 {
    let n = a.nrows();
    let mut acc = ZERO;
    for i in 0..n {
        for j in 0..n {
            acc += a[(i, j)] * b[(j, i)];
        }
    }
    acc
}

/// Outer product `|v><v|`.
pub fn projector(v: &CVector) -> CMatrix {
    v * v.adjoint()
}

/// Eigendecomposition of a Hermitian matrix with eigenvalues in ascending order.
#[derive(Debug, Clone)]
pub struct Spectrum {
    values: Vec<f64>,
    vectors: CMatrix,
}

impl Spectrum {
    /// Diagonalizes `m`, which must already be Hermitian.
    ///
    /// Matrices with no imaginary part go through the real symmetric solver.
    pub fn of_hermitian(m: &CMatrix) -> Result<Self> {
        let n = ensure_square(m)?;
        let is_diagonal = (0..n).all(|j| (0..n).all(|i| i == j || m[(i, j)] == ZERO));
        let (values, vectors) = if is_diagonal {
            (
                DVector::from_iterator(n, (0..n).map(|i| m[(i, i)].re)),
                CMatrix::identity(n, n),
            )
        } else if m.iter().all(|z| z.im == 0.0) {
            let real = DMatrix::<f64>::from_fn(n, n, |i, j| m[(i, j)].re);
            let eig = real.try_symmetric_eigen(f64::EPSILON, EIGEN_MAX_ITER).ok_or_else(|| {
                QslError::NumericalFailure("symmetric eigensolver did not converge".into())
            })?;
            (eig.eigenvalues, eig.eigenvectors.map(re))
        } else {
            let eig = m.clone().try_symmetric_eigen(f64::EPSILON, EIGEN_MAX_ITER).ok_or_else(|| {
                QslError::NumericalFailure("Hermitian eigensolver did not converge".into())
            })?;
            (eig.eigenvalues, eig.eigenvectors)
        };
        if values.iter().any(|v| !v.is_finite()) {
            return Err(QslError::NumericalFailure("non-finite eigenvalue".into()));
        }

        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
        let sorted_values = order.iter().map(|&k| values[k]).collect();
        let sorted_vectors = CMatrix::from_fn(n, n, |i, j| vectors[(i, order[j])]);
        Ok(Self {
            values: sorted_values,
            vectors: sorted_vectors,
        })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Column `j` is the eigenvector for `values()[j]`.
    pub fn vectors(&self) -> &CMatrix {
        &self.vectors
    }

    pub fn dim(&self) -> usize {
        self.values.len()
    }

    pub fn min(&self) -> f64 {
        self.values.first().copied().unwrap_or(0.0)
    }

    pub fn max(&self) -> f64 {
        self.values.last().copied().unwrap_or(0.0)
    }

    pub(crate) fn shifted(&self, offset: f64) -> Self {
        Self {
            values: self.values.iter().map(|v| v - offset).collect(),
            vectors: self.vectors.clone(),
        }
    }

    /// Coordinates of `v` in the eigenbasis.
    pub fn to_eigenbasis(&self, v: &CVector) -> CVector {
        self.vectors.ad_mul(v)
    }

    pub fn from_eigenbasis(&self, v: &CVector) -> CVector {
        &self.vectors * v
    }

    /// `exp(-i H t)` applied to eigenbasis coordinates, then mapped back.
    pub fn propagate_vector(&self, v: &CVector, t: f64) -> CVector {
        let mut coeffs = self.to_eigenbasis(v);
        for (c, &lambda) in coeffs.iter_mut().zip(&self.values) {
            *c *= Complex64::from_polar(1.0, -lambda * t);
        }
        self.from_eigenbasis(&coeffs)
    }

    /// `U m U†` with `U = exp(-i H t)`.
    pub fn propagate_operator(&self, m: &CMatrix, t: f64) -> CMatrix {
        let mut rotated = self.vectors.ad_mul(m) * &self.vectors;
        let phases: Vec<Complex64> = self
            .values
            .iter()
            .map(|&lambda| Complex64::from_polar(1.0, -lambda * t))
            .collect();
        let n = self.dim();
        for i in 0..n {
            for j in 0..n {
                rotated[(i, j)] *= phases[i] * phases[j].conj();
            }
        }
        &self.vectors * rotated * self.vectors.adjoint()
    }
}
