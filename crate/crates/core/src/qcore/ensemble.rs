use super::layout::SubsystemLayout;
use super::linalg::{kron_all, re, CMatrix};
use super::state::DensityMatrix;
use super::CONSTRUCTION_TOL;
use crate::error::{QslError, Result};

/// Mean energy and energy spread, both measured from a zero ground energy.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyStats {
    energy: f64,
    spread: f64,
}

impl EnergyStats {
    pub fn new(energy: f64, spread: f64) -> Result<Self> {
        if !(energy.is_finite() && spread.is_finite() && energy >= 0.0 && spread >= 0.0) {
            return Err(QslError::InvalidStats { energy, spread });
        }
        Ok(Self { energy, spread })
    }

    /// `E`
    pub fn energy(&self) -> f64 {
        self.energy
    }

    /// `dE`
    pub fn spread(&self) -> f64 {
        self.spread
    }
}

/// Convex mixture of product states, `sum_n p_n rho_1^(n) x ... x rho_M^(n)`.
#[derive(Debug, Clone)]
pub struct SeparableEnsemble {
    layout: SubsystemLayout,
    weights: Vec<f64>,
    terms: Vec<Vec<DensityMatrix>>,
}

impl SeparableEnsemble {
    /// Every factor must be a single-subsystem density matrix, and every term
    /// must list the same sequence of local dimensions.
    pub fn new(weights: Vec<f64>, terms: Vec<Vec<DensityMatrix>>) -> Result<Self> {
        if weights.is_empty() || terms.is_empty() {
            return Err(QslError::EmptyFactors);
        }
        if weights.len() != terms.len() {
            return Err(QslError::InvalidWeights(format!(
                "{} weights for {} terms",
                weights.len(),
                terms.len()
            )));
        }
        if let Some(w) = weights.iter().find(|w| !(w.is_finite() && **w > 0.0)) {
            return Err(QslError::InvalidWeights(format!("weight {w} is not positive")));
        }
        let sum: f64 = weights.iter().sum();
        if (sum - 1.0).abs() > CONSTRUCTION_TOL {
            return Err(QslError::InvalidWeights(format!("weights sum to {sum}")));
        }

        let local_dims = Self::local_dims(&terms[0])?;
        for term in &terms[1..] {
            let dims = Self::local_dims(term)?;
            if dims != local_dims {
                return Err(QslError::LayoutMismatch {
                    left: local_dims,
                    right: dims,
                });
            }
        }
        let layout = SubsystemLayout::new(local_dims)?;
        Ok(Self {
            layout,
            weights,
            terms,
        })
    }

    fn local_dims(term: &[DensityMatrix]) -> Result<Vec<usize>> {
        if term.is_empty() {
            return Err(QslError::EmptyFactors);
        }
        term.iter()
            .map(|f| match f.layout().dims() {
                [d] => Ok(*d),
                dims => Err(QslError::InteractingHamiltonian {
                    dims: dims.to_vec(),
                }),
            })
            .collect()
    }

    /// Composite layout, one subsystem per factor.
    pub fn layout(&self) -> &SubsystemLayout {
        &self.layout
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn terms(&self) -> &[Vec<DensityMatrix>] {
        &self.terms
    }

    pub fn num_subsystems(&self) -> usize {
        self.layout.num_subsystems()
    }

    /// Global density matrix on the composite space.
    pub fn assemble(&self) -> DensityMatrix {
        let dim = self.layout.total_dim();
        let mut rho = CMatrix::zeros(dim, dim);
        for (w, term) in self.weights.iter().zip(&self.terms) {
            rho += kron_all(term.iter().map(|f| f.matrix())) * re(*w);
        }
        DensityMatrix::from_parts_unchecked(self.layout.clone(), rho)
    }
}
