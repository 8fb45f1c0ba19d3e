use thiserror::Error;

pub type Result<T, E = QslError> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum QslError {
    #[error("layout has no subsystems")]
    EmptyLayout,

    #[error("subsystem {site} has dimension 0")]
    ZeroDimension { site: usize },

    #[error("total dimension {total} exceeds the dense cap {cap}")]
    DimensionCapExceeded { total: usize, cap: usize },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("layout mismatch: {left:?} vs {right:?}")]
    LayoutMismatch { left: Vec<usize>, right: Vec<usize> },

    #[error("state is not normalized (norm {norm})")]
    NotNormalized { norm: f64 },

    #[error("matrix is not Hermitian (max deviation {deviation:e})")]
    NotHermitian { deviation: f64 },

    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },

    #[error("density matrix trace is {trace}, expected 1")]
    InvalidTrace { trace: f64 },

    #[error("density matrix has negative eigenvalue {min_eigenvalue:e}")]
    NotPositive { min_eigenvalue: f64 },

    #[error("Hamiltonian ground energy is {ground_energy:e}; ground-shift it first")]
    UnshiftedHamiltonian { ground_energy: f64 },

    #[error("site {site} out of range for {count} subsystems")]
    SiteOutOfRange { site: usize, count: usize },

    #[error("factor list is empty")]
    EmptyFactors,

    #[error("invalid energy statistics (E={energy}, dE={spread})")]
    InvalidStats { energy: f64, spread: f64 },

    #[error("invalid ensemble weights: {0}")]
    InvalidWeights(String),

    #[error("expected a single-subsystem Hamiltonian, got layout {dims:?}")]
    InteractingHamiltonian { dims: Vec<usize> },

    #[error("invalid search options: {0}")]
    InvalidOptions(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("numerical failure: {0}")]
    NumericalFailure(String),
}
