//! Crate-wide error type.

use thiserror::Error;

/// Errors produced by fitting, tuning, and evaluation routines.
#[derive(Debug, Clone, Error)]
pub enum Error {
    /// Input contained NaN or infinite coordinates, or had inconsistent shape.
    #[error("rejected input: {0}")]
    RejectedInput(String),

    /// A configuration value violated its documented range.
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    /// The pseudo-density vanished at some observation, so responsibilities
    /// and the pseudo-log-likelihood are undefined.
    #[error("degenerate density at observation {index}")]
    DegenerateDensity { index: usize },

    /// A covariance/scale matrix was not positive-definite.
    #[error("singular or non positive-definite matrix")]
    SingularMatrix,

    /// A matrix expected to be symmetric was not (beyond tolerance).
    #[error("matrix is not symmetric")]
    NotSymmetric,

    /// Every pooled eigenvalue was non-positive; no truncation level exists.
    #[error("degenerate scatter: no positive eigenvalue")]
    DegenerateScatter,

    /// A mixture component lost essentially all responsibility mass.
    #[error("cluster {cluster} collapsed (responsibility mass {mass:.3e})")]
    ClusterCollapse { cluster: usize, mass: f64 },

    /// No valid initial partition could be constructed.
    #[error("initialization failed: {0}")]
    InitializationFailure(String),

    /// The requested partition cannot exist for this dataset.
    #[error("infeasible partition: {0}")]
    InfeasiblePartition(String),

    /// The data had zero range in some coordinate, so the covering
    /// hyperrectangle has zero volume.
    #[error("degenerate volume: coordinate {dim} has zero range")]
    DegenerateVolume { dim: usize },

    /// Every candidate noise level was infeasible or at the parameter-space
    /// boundary.
    #[error("tuning failed: {0}")]
    TuningFailure(String),

    /// A cluster had zero total weight, so its distance distribution is
    /// undefined.
    #[error("cluster {cluster} has zero total weight")]
    UndefinedCluster { cluster: usize },

    /// Robust location/scatter is only defined for elliptical component
    /// families.
    #[error("unsupported distribution for robust functional: {0}")]
    UnsupportedDistribution(String),

    /// The covariance matrix of the component does not exist (e.g. Student-t
    /// with degrees of freedom <= 2).
    #[error("undefined covariance: {0}")]
    UndefinedCovariance(String),
}

pub type Result<T> = std::result::Result<T, Error>;
