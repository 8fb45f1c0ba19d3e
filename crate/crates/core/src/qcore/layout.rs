use crate::error::{QslError, Result};

/// Largest total Hilbert-space dimension handled by the dense code paths.
pub const DEFAULT_DIM_CAP: usize = 4096;

/// Local dimensions of an ordered list of subsystems.
///
/// Basis index ordering is row-major over the local indices: subsystem 0 is
/// the most significant digit.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SubsystemLayout {
    dims: Vec<usize>,
    total_dim: usize,
}

impl SubsystemLayout {
    pub fn new(dims: Vec<usize>) -> Result<Self> {
        Self::with_cap(dims, DEFAULT_DIM_CAP)
    }

    pub fn with_cap(dims: Vec<usize>, cap: usize) -> Result<Self> {
        if dims.is_empty() {
            return Err(QslError::EmptyLayout);
        }
        if let Some(site) = dims.iter().position(|&d| d == 0) {
            return Err(QslError::ZeroDimension { site });
        }
        let mut total: usize = 1;
        for &d in &dims {
            total = total
                .checked_mul(d)
                .filter(|&t| t <= cap)
                .ok_or(QslError::DimensionCapExceeded {
                    total: dims.iter().fold(1usize, |a, &d| a.saturating_mul(d)),
                    cap,
                })?;
        }
        Ok(Self {
            dims,
            total_dim: total,
        })
    }

    /// `m` qubits.
    pub fn qubits(m: usize) -> Result<Self> {
        Self::new(vec![2; m])
    }

    /// `m` subsystems of dimension `d` each.
    pub fn uniform(d: usize, m: usize) -> Result<Self> {
        Self::new(vec![d; m])
    }

    /// A single subsystem of dimension `d`.
    pub fn single(d: usize) -> Result<Self> {
        Self::new(vec![d])
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn num_subsystems(&self) -> usize {
        self.dims.len()
    }

    pub fn total_dim(&self) -> usize {
        self.total_dim
    }

    pub fn ensure_same(&self, other: &Self) -> Result<()> {
        if self != other {
            return Err(QslError::LayoutMismatch {
                left: self.dims.clone(),
                right: other.dims.clone(),
            });
        }
        Ok(())
    }

    pub(crate) fn ensure_site(&self, site: usize) -> Result<()> {
        if site >= self.dims.len() {
            return Err(QslError::SiteOutOfRange {
                site,
                count: self.dims.len(),
            });
        }
        Ok(())
    }

    /// Product of dimensions strictly before / after `site`.
    pub(crate) fn split_at(&self, site: usize) -> (usize, usize) {
        let left = self.dims[..site].iter().product();
        let right = self.dims[site + 1..].iter().product();
        (left, right)
    }
}
