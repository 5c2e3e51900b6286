//! Robust model-based clustering around an improper-density Gaussian
//! mixture.
//!
//! The central estimator maximizes a pseudo-likelihood in which an improper
//! constant density `delta` absorbs noise and outliers, subject to an
//! eigenratio constraint on the cluster covariances and a cap on the average
//! noise responsibility. `delta` can be fixed (with `delta = 0` recovering
//! constrained Gaussian-mixture ML and `delta = 1/V_n` the uniform-noise
//! variant) or tuned by minimizing a weighted Kolmogorov discrepancy between
//! clusterwise squared Mahalanobis distances and the chi-squared law, plus an
//! optional penalty on the estimated noise proportion.
//!
//! The crate also ships the machinery used to benchmark such estimators:
//! trimmed classification EM and Student-t mixture comparators under the same
//! constraint, a robust model-based reference-truth labeler, misclassification
//! rates under optimal label permutation, and a configurable generator for
//! the standard families of noisy clustering test beds.

pub mod constraints;
pub mod error;
pub mod init;
pub mod kernels;
pub mod model;

pub use constraints::{enforce_eigenratio, enforce_noise_cap, noise_cap_active, ConstraintConfig};
pub use error::{Error, Result};
pub use init::{initial_partition, mbhc_agglomerate, nn_noise_detect, InitConfig};
pub use kernels::{
    chi2_cdf, chi2_quantile, gauss_logpdf, gauss_pdf, mahalanobis_sq, sym_eigen, t_logpdf, t_pdf,
    EigenDecomp,
};
pub use model::{
    assign, improper_density, posteriors, pseudo_loglik, Dataset, Labeling, MixtureParams,
    PseudoPosteriors,
};
