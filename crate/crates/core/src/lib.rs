//! Multimode Gaussian quantum states and witnesses for genuine multipartite
//! continuous-variable entanglement.
//!
//! The crate builds covariance matrices for squeezed-light states
//! ([`states`]), checks physicality and partial transposition on them
//! ([`gaussian`]), evaluates variance-based separability bounds for linear
//! quadrature combinations against every bipartition of the modes
//! ([`criteria`]), classifies three-mode states through the npt criterion
//! ([`classify`]), and simulates the homodyne verification experiment with
//! finite measurement ensembles ([`homodyne`]).
//!
//! Conventions, fixed everywhere: ħ = 1/2 (vacuum quadrature variance 1/4),
//! interleaved quadrature ordering (x₁, p₁, …, x_N, p_N), and 1-based mode
//! indices in the public API and file formats.
//!
//! All state values are immutable after construction and every operation is
//! a pure function, so everything is `Send + Sync` for free. With the
//! default `parallel` feature, sampling and bipartition enumeration run on
//! rayon; results are bitwise identical to the sequential fallback.

use thiserror::Error as ThisError;

pub mod classify;
pub mod criteria;
pub mod gaussian;
pub mod homodyne;
pub mod linalg;
pub mod partition;
pub mod states;

pub use classify::{classify_tripartite, npt_single_mode, TripartiteClass, TripartiteClassLabel};
pub use criteria::{
    certify_genuine, commutator_coefficient, evaluate_condition, genuine_threshold,
    ghz_condition_set, ghz_condition_variance, optimal_gain, partition_bound, total_variance,
    CertificationReport, CriterionVerdict, QuadCombination,
};
pub use gaussian::{CovarianceMatrix, QuadratureAxis, SymplecticForm, SymplecticTransform};
pub use homodyne::{
    estimate_condition, run_verification, sample_quadratures, EnsembleConfig, EstimatedVerdict,
    SampleMatrix, StatVerdict, VerificationReport,
};
pub use partition::{bipartitions, ModePartition};
pub use states::{
    ghz_family_analytic, ghz_family_network, squeezed_vacuum, two_mode_squeezed, unbiased_r1,
    GhzFamilyParams,
};

/// Error type shared across the crate.
#[derive(Debug, ThisError)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("mode index {mode} out of range 1..={n_modes}")]
    ModeOutOfRange { mode: usize, n_modes: usize },

    #[error("matrix is not positive definite: eigenvalue #{index} is {eigenvalue}")]
    NotPositiveDefinite { index: usize, eigenvalue: f64 },

    #[error("Jacobi eigensolver did not converge after {sweeps} sweeps")]
    JacobiNoConvergence { sweeps: usize },

    #[error("transform is not symplectic (max deviation {max_deviation:e})")]
    NonSymplectic { max_deviation: f64 },

    #[error(
        "state is unphysical: minimum symplectic eigenvalue {min_symplectic_eigenvalue} < 1/4"
    )]
    Unphysical { min_symplectic_eigenvalue: f64 },

    #[error("Cholesky factorization failed at pivot {pivot}")]
    CholeskyFailure { pivot: usize },

    #[error("invalid quadrature combination: {0}")]
    InvalidCombination(String),

    #[error("invalid mode partition: {0}")]
    InvalidPartition(String),

    #[error("no conditions supplied")]
    EmptyConditions,

    #[error(
        "{n_modes} modes exceed the certification limit of {max} (bipartition count is 2^(N-1)-1)"
    )]
    TooManyModes { n_modes: usize, max: usize },

    #[error("classification requires exactly 3 modes, got {n_modes}")]
    NotThreeModes { n_modes: usize },

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("invalid file format: {0}")]
    InvalidFormat(String),

    #[error("JSON error: {0}")]
    Json(#[from] serde_json::Error),
}
