//! The restricted parameter space: the eigenratio constraint on the pooled
//! covariance eigenvalues and the cap on the average noise responsibility.
//!
//! The eigenratio constraint bounds `lambda_max / lambda_min` over *all*
//! cluster covariances jointly. Enforcement truncates the pooled eigenvalues
//! into an interval `[m, gamma * m]`, with the level `m` chosen to minimize
//! the weighted Gaussian log-likelihood loss
//! `sum_j w_j sum_l [ log lambda + d_l / lambda ]` of the truncation. The
//! minimizer is found exactly: on each interval between consecutive
//! breakpoints `{d, d / gamma}` the loss is `A log m + B / m + const`, so the
//! candidate set of breakpoints plus per-interval closed-form optima `B / A`
//! contains the global minimizer. Eigenvectors are never changed.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{Dataset, MixtureEval, MixtureParams, PseudoPosteriors};

/// Bounds defining the restricted parameter space.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConstraintConfig {
    /// Eigenratio bound `gamma >= 1`; `gamma = 1` forces spherical equal
    /// scatter.
    pub gamma: f64,
    /// Cap on the average noise responsibility, in (0, 1).
    pub pi_max: f64,
}

impl Default for ConstraintConfig {
    fn default() -> Self {
        Self { gamma: 20.0, pi_max: 0.5 }
    }
}

impl ConstraintConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.gamma >= 1.0) {
            return Err(Error::InvalidConfig(format!("gamma {} must be >= 1", self.gamma)));
        }
        if !(self.pi_max > 0.0 && self.pi_max < 1.0) {
            return Err(Error::InvalidConfig(format!("pi_max {} must lie in (0, 1)", self.pi_max)));
        }
        Ok(())
    }
}

/// Relative slack admitted on the eigenratio bound.
pub const EIGENRATIO_TOL: f64 = 1e-9;

struct Spectral {
    vectors: DMatrix<f64>,
    values: Vec<f64>,
}

/// Truncation loss of clamping eigenvalues `d` (with weights) to
/// `[m, gamma m]`.
fn truncation_loss(pooled: &[(f64, f64)], gamma: f64, m: f64) -> f64 {
    pooled
        .iter()
        .map(|&(d, w)| {
            let lambda = d.clamp(m, gamma * m);
            w * (lambda.ln() + d / lambda)
        })
        .sum()
}

/// Optimal truncation level for pooled weighted eigenvalues.
fn optimal_truncation_level(pooled: &[(f64, f64)], gamma: f64) -> Result<f64> {
    let mut breakpoints: Vec<f64> = Vec::with_capacity(2 * pooled.len());
    for &(d, _) in pooled {
        if d > 0.0 {
            breakpoints.push(d);
            breakpoints.push(d / gamma);
        }
    }
    if breakpoints.is_empty() {
        return Err(Error::DegenerateScatter);
    }
    breakpoints.sort_by(|a, b| a.partial_cmp(b).unwrap());
    breakpoints.dedup();

    let mut candidates = breakpoints.clone();
    // Closed-form optimum B/A inside each interval, clamped to it.
    let mut bounds = vec![0.0];
    bounds.extend_from_slice(&breakpoints);
    bounds.push(f64::INFINITY);
    for win in bounds.windows(2) {
        let (lo, hi) = (win[0], win[1]);
        let mid = if hi.is_finite() { 0.5 * (lo + hi) } else { lo * 2.0 };
        let mut a = 0.0;
        let mut b = 0.0;
        for &(d, w) in pooled {
            if d < mid {
                a += w;
                b += w * d;
            } else if d > gamma * mid {
                a += w;
                b += w * d / gamma;
            }
        }
        if a > 0.0 && b > 0.0 {
            let lo_c = lo.max(f64::MIN_POSITIVE);
            let hi_c = if hi.is_finite() { hi } else { f64::MAX };
            candidates.push((b / a).clamp(lo_c, hi_c));
        }
    }

    let mut best = (f64::INFINITY, breakpoints[0]);
    for &m in &candidates {
        if m <= 0.0 || !m.is_finite() {
            continue;
        }
        let loss = truncation_loss(pooled, gamma, m);
        if loss < best.0 {
            best = (loss, m);
        }
    }
    Ok(best.1)
}

fn decompose(sigmas: &[DMatrix<f64>]) -> Vec<Spectral> {
    sigmas
        .iter()
        .map(|s| {
            let eig = s.clone().symmetric_eigen();
            Spectral {
                vectors: eig.eigenvectors,
                values: eig.eigenvalues.iter().cloned().collect(),
            }
        })
        .collect()
}

/// Enforce the pooled eigenratio constraint with per-cluster weights.
/// Returns the projected matrices and whether any truncation was applied.
pub(crate) fn enforce_eigenratio_weighted(
    sigmas: &[DMatrix<f64>],
    weights: &[f64],
    gamma: f64,
) -> Result<(Vec<DMatrix<f64>>, bool)> {
    assert_eq!(sigmas.len(), weights.len());
    let specs = decompose(sigmas);

    let mut lambda_min = f64::INFINITY;
    let mut lambda_max = f64::NEG_INFINITY;
    for spec in &specs {
        for &v in &spec.values {
            lambda_min = lambda_min.min(v);
            lambda_max = lambda_max.max(v);
        }
    }
    if lambda_max <= 0.0 {
        return Err(Error::DegenerateScatter);
    }
    if lambda_min > 0.0 && lambda_max / lambda_min <= gamma * (1.0 + EIGENRATIO_TOL) {
        return Ok((sigmas.to_vec(), false));
    }

    let total_weight: f64 = weights.iter().sum();
    let pooled: Vec<(f64, f64)> = specs
        .iter()
        .zip(weights)
        .flat_map(|(spec, &w)| {
            let w = if total_weight > 0.0 { w } else { 1.0 };
            spec.values.iter().map(move |&d| (d, w))
        })
        .collect();
    let m = optimal_truncation_level(&pooled, gamma)?;

    let projected = specs
        .iter()
        .map(|spec| {
            let clamped =
                nalgebra::DVector::from_iterator(spec.values.len(), spec.values.iter().map(|&d| d.clamp(m, gamma * m)));
            &spec.vectors * DMatrix::from_diagonal(&clamped) * spec.vectors.transpose()
        })
        .collect();
    Ok((projected, true))
}

/// Enforce the pooled eigenratio constraint `lambda_max / lambda_min <=
/// gamma` across all cluster covariances, truncating eigenvalues to the
/// likelihood-optimal interval `[m, gamma m]`. Matrices already satisfying
/// the bound are returned unchanged.
pub fn enforce_eigenratio(sigmas: &[DMatrix<f64>], gamma: f64) -> Result<Vec<DMatrix<f64>>> {
    let weights = vec![1.0; sigmas.len()];
    enforce_eigenratio_weighted(sigmas, &weights, gamma).map(|(s, _)| s)
}

/// Reports the mean noise responsibility and whether it exceeds the cap.
pub fn noise_cap_active(tau: &PseudoPosteriors, pi_max: f64) -> (bool, f64) {
    let mean = tau.mean_noise();
    (mean > pi_max, mean)
}

/// Reduce `pi0` (rescaling cluster proportions to keep total mass one) until
/// the mean noise responsibility equals `pi_max` within 1e-6. Gaussian
/// parameters are unchanged. Returns the adjusted parameters and whether the
/// cap had to be enforced.
pub fn enforce_noise_cap(
    theta: &MixtureParams,
    data: &Dataset,
    pi_max: f64,
) -> Result<(MixtureParams, bool)> {
    let eval = MixtureEval::new(theta)?;
    let n = data.n();
    // Cache the Gaussian mixture part of psi once; only proportions move.
    let mut log_mix = Vec::with_capacity(n);
    let mut buf = vec![0.0; theta.g + 1];
    for i in 0..n {
        eval.log_terms(&data.point(i), &mut buf);
        log_mix.push(crate::model::log_sum_exp(&buf[1..]));
    }
    let log_delta = theta.delta.ln();
    let pi0_old = theta.pi0;
    let mix_old = 1.0 - pi0_old;

    let mean_tau0 = |pi0: f64| -> f64 {
        if pi0 <= 0.0 {
            return 0.0;
        }
        let log_noise = pi0.ln() + log_delta;
        // Cluster mass rescales by (1 - pi0) / (1 - pi0_old).
        let log_scale = if mix_old > 0.0 { ((1.0 - pi0) / mix_old).ln() } else { f64::NEG_INFINITY };
        let mut total = 0.0;
        for &lm in &log_mix {
            let terms = [log_noise, log_scale + lm];
            let lse = crate::model::log_sum_exp(&terms);
            total += (log_noise - lse).exp();
        }
        total / n as f64
    };

    if mean_tau0(pi0_old) <= pi_max {
        return Ok((theta.clone(), false));
    }
    if mix_old <= 0.0 {
        // No cluster mass to rescale: the boundary solution is flagged, not
        // repaired.
        return Ok((theta.clone(), true));
    }

    let mut lo = 0.0;
    let mut hi = pi0_old;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mean_tau0(mid) > pi_max {
            hi = mid;
        } else {
            lo = mid;
        }
        if hi - lo < 1e-14 {
            break;
        }
    }
    let pi0_new = lo;
    let scale = (1.0 - pi0_new) / mix_old;
    let mut adjusted = theta.clone();
    adjusted.pi0 = pi0_new;
    for p in &mut adjusted.pi {
        *p *= scale;
    }
    Ok((adjusted, true))
}
