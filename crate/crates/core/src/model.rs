//! The shared model layer: datasets, the mixture parameter vector with its
//! improper constant density level, pseudo-posteriors, and the point
//! assignment rule.
//!
//! All densities are accumulated in log space. The improper level `delta`
//! enters as `ln(pi0) + ln(delta)` with `delta = 0` mapping to negative
//! infinity, so the same code path covers plain Gaussian mixtures, the
//! uniform-noise variant, and improper noise levels down to the smallest
//! positive f64.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernels::{self, CovFactor};

/// An observed sample: `n` points in `R^p`, one row per observation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Dataset {
    points: DMatrix<f64>,
}

impl Dataset {
    pub fn new(points: DMatrix<f64>) -> Result<Self> {
        if points.nrows() == 0 || points.ncols() == 0 {
            return Err(Error::RejectedInput("dataset must have n >= 1 and p >= 1".into()));
        }
        if points.iter().any(|v| !v.is_finite()) {
            return Err(Error::RejectedInput("dataset contains non-finite coordinates".into()));
        }
        Ok(Self { points })
    }

    pub fn n(&self) -> usize {
        self.points.nrows()
    }

    pub fn p(&self) -> usize {
        self.points.ncols()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.points
    }

    pub fn point(&self, i: usize) -> DVector<f64> {
        self.points.row(i).transpose()
    }

    /// All observations as owned column vectors.
    pub fn points(&self) -> Vec<DVector<f64>> {
        (0..self.n()).map(|i| self.point(i)).collect()
    }

    /// Number of distinct rows.
    pub fn distinct_points(&self) -> usize {
        let mut rows: Vec<Vec<u64>> = (0..self.n())
            .map(|i| self.points.row(i).iter().map(|v| v.to_bits()).collect())
            .collect();
        rows.sort_unstable();
        rows.dedup();
        rows.len()
    }

    /// Per-coordinate ranges `max_d - min_d`.
    pub fn ranges(&self) -> Vec<f64> {
        (0..self.p())
            .map(|d| {
                let col = self.points.column(d);
                let mut lo = f64::INFINITY;
                let mut hi = f64::NEG_INFINITY;
                for &v in col.iter() {
                    lo = lo.min(v);
                    hi = hi.max(v);
                }
                hi - lo
            })
            .collect()
    }
}

/// The full parameter vector: noise proportion `pi0`, cluster proportions,
/// Gaussian means and covariances, plus the improper constant density level
/// `delta` (`delta = 0` encodes plain Gaussian mixture mode).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MixtureParams {
    pub g: usize,
    pub pi0: f64,
    pub pi: Vec<f64>,
    pub mu: Vec<DVector<f64>>,
    pub sigma: Vec<DMatrix<f64>>,
    pub delta: f64,
}

impl MixtureParams {
    pub fn new(
        pi0: f64,
        pi: Vec<f64>,
        mu: Vec<DVector<f64>>,
        sigma: Vec<DMatrix<f64>>,
        delta: f64,
    ) -> Result<Self> {
        let params = Self { g: pi.len(), pi0, pi, mu, sigma, delta };
        params.validate()?;
        Ok(params)
    }

    pub fn validate(&self) -> Result<()> {
        if self.g == 0 {
            return Err(Error::InvalidConfig("G must be >= 1".into()));
        }
        if self.pi.len() != self.g || self.mu.len() != self.g || self.sigma.len() != self.g {
            return Err(Error::InvalidConfig("parameter lists must all have length G".into()));
        }
        if !(self.delta >= 0.0) || !self.delta.is_finite() {
            return Err(Error::InvalidConfig(format!("delta {} must be finite and >= 0", self.delta)));
        }
        let total: f64 = self.pi0 + self.pi.iter().sum::<f64>();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidConfig(format!("proportions sum to {total}, expected 1")));
        }
        if !(0.0..=1.0).contains(&self.pi0) || self.pi.iter().any(|p| !(0.0..=1.0).contains(p)) {
            return Err(Error::InvalidConfig("proportions must lie in [0, 1]".into()));
        }
        let p = self.p();
        for (j, (mu, sigma)) in self.mu.iter().zip(self.sigma.iter()).enumerate() {
            if mu.len() != p || sigma.nrows() != p || sigma.ncols() != p {
                return Err(Error::InvalidConfig(format!("component {j} has inconsistent dimension")));
            }
            if mu.iter().any(|v| !v.is_finite()) || sigma.iter().any(|v| !v.is_finite()) {
                return Err(Error::InvalidConfig(format!("component {j} has non-finite parameters")));
            }
            let scale = sigma.iter().fold(1.0_f64, |m, v| m.max(v.abs()));
            for r in 0..p {
                for c in (r + 1)..p {
                    if (sigma[(r, c)] - sigma[(c, r)]).abs() > 1e-12 * scale {
                        return Err(Error::NotSymmetric);
                    }
                }
            }
            let eig = sigma.clone().symmetric_eigen();
            if eig.eigenvalues.iter().any(|&l| l <= 0.0) {
                return Err(Error::SingularMatrix);
            }
        }
        Ok(())
    }

    pub fn p(&self) -> usize {
        self.mu.first().map(|m| m.len()).unwrap_or(0)
    }

    /// Cluster proportions renormalized over clusters only (noise excluded).
    pub fn cluster_proportions(&self) -> Vec<f64> {
        let total: f64 = self.pi.iter().sum();
        if total <= 0.0 {
            return vec![0.0; self.g];
        }
        self.pi.iter().map(|p| p / total).collect()
    }
}

/// Pseudo posterior probabilities: an `n x (G + 1)` matrix with column 0
/// holding the noise responsibilities.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PseudoPosteriors {
    pub tau: DMatrix<f64>,
}

impl PseudoPosteriors {
    pub fn new(tau: DMatrix<f64>) -> Result<Self> {
        for i in 0..tau.nrows() {
            let s: f64 = tau.row(i).iter().sum();
            if (s - 1.0).abs() > 1e-10 {
                return Err(Error::InvalidConfig(format!("posterior row {i} sums to {s}")));
            }
            if tau.row(i).iter().any(|v| !(0.0..=1.0 + 1e-12).contains(v)) {
                return Err(Error::InvalidConfig(format!("posterior row {i} outside [0, 1]")));
            }
        }
        Ok(Self { tau })
    }

    pub fn n(&self) -> usize {
        self.tau.nrows()
    }

    /// Number of clusters G (columns minus the noise column).
    pub fn g(&self) -> usize {
        self.tau.ncols() - 1
    }

    /// Mean of the noise column: the estimated noise proportion.
    pub fn mean_noise(&self) -> f64 {
        self.tau.column(0).sum() / self.n() as f64
    }
}

/// Hard point assignments; label 0 means noise.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Labeling {
    pub labels: Vec<usize>,
    pub g: usize,
}

impl Labeling {
    pub fn new(labels: Vec<usize>, g: usize) -> Result<Self> {
        if let Some(&bad) = labels.iter().find(|&&l| l > g) {
            return Err(Error::InvalidConfig(format!("label {bad} exceeds G = {g}")));
        }
        Ok(Self { labels, g })
    }

    pub fn n(&self) -> usize {
        self.labels.len()
    }

    /// Occurrence counts indexed by label `0..=g`.
    pub fn counts(&self) -> Vec<usize> {
        let mut counts = vec![0usize; self.g + 1];
        for &l in &self.labels {
            counts[l] += 1;
        }
        counts
    }

    /// Indices of points carrying `label`.
    pub fn members(&self, label: usize) -> Vec<usize> {
        self.labels
            .iter()
            .enumerate()
            .filter_map(|(i, &l)| (l == label).then_some(i))
            .collect()
    }
}

pub(crate) fn log_sum_exp(terms: &[f64]) -> f64 {
    let m = terms.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if m == f64::NEG_INFINITY {
        return f64::NEG_INFINITY;
    }
    m + terms.iter().map(|t| (t - m).exp()).sum::<f64>().ln()
}

/// Precomputed per-component factorizations for repeated density evaluation.
pub(crate) struct MixtureEval<'a> {
    theta: &'a MixtureParams,
    factors: Vec<CovFactor>,
    log_pi0_delta: f64,
    log_pi: Vec<f64>,
}

impl<'a> MixtureEval<'a> {
    pub fn new(theta: &'a MixtureParams) -> Result<Self> {
        let factors = theta
            .sigma
            .iter()
            .map(CovFactor::new)
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            theta,
            factors,
            log_pi0_delta: theta.pi0.ln() + theta.delta.ln(),
            log_pi: theta.pi.iter().map(|p| p.ln()).collect(),
        })
    }

    /// Fills `out[0..=G]` with the log mixture terms at `x` and returns
    /// `log psi_delta(x)`.
    pub fn log_terms(&self, x: &DVector<f64>, out: &mut [f64]) -> f64 {
        out[0] = self.log_pi0_delta;
        for j in 0..self.theta.g {
            out[j + 1] = self.log_pi[j]
                + kernels::gauss_logpdf_factored(x, &self.theta.mu[j], &self.factors[j]);
        }
        log_sum_exp(out)
    }

    pub fn log_psi(&self, x: &DVector<f64>) -> f64 {
        let mut buf = vec![0.0; self.theta.g + 1];
        self.log_terms(x, &mut buf)
    }
}

/// The improper pseudo-density `psi_delta(x, theta) = pi0 delta +
/// sum_j pi_j phi(x; mu_j, sigma_j)`.
pub fn improper_density(x: &DVector<f64>, theta: &MixtureParams) -> Result<f64> {
    if x.iter().any(|v| !v.is_finite()) {
        return Err(Error::RejectedInput("non-finite coordinate".into()));
    }
    if x.len() != theta.p() {
        return Err(Error::RejectedInput(format!(
            "point has dimension {}, parameters have {}",
            x.len(),
            theta.p()
        )));
    }
    let eval = MixtureEval::new(theta)?;
    Ok(eval.log_psi(x).exp())
}

/// Sample improper pseudo-log-likelihood `(1/n) sum_i log psi_delta(x_i)`.
pub fn pseudo_loglik(data: &Dataset, theta: &MixtureParams) -> Result<f64> {
    let eval = MixtureEval::new(theta)?;
    let mut total = 0.0;
    for i in 0..data.n() {
        let lp = eval.log_psi(&data.point(i));
        if lp == f64::NEG_INFINITY {
            return Err(Error::DegenerateDensity { index: i });
        }
        total += lp;
    }
    Ok(total / data.n() as f64)
}

/// Pseudo posterior probabilities of each point under each mixture term.
pub fn posteriors(data: &Dataset, theta: &MixtureParams) -> Result<PseudoPosteriors> {
    let eval = MixtureEval::new(theta)?;
    let g = theta.g;
    let mut tau = DMatrix::zeros(data.n(), g + 1);
    let mut buf = vec![0.0; g + 1];
    for i in 0..data.n() {
        let lse = eval.log_terms(&data.point(i), &mut buf);
        if lse == f64::NEG_INFINITY {
            return Err(Error::DegenerateDensity { index: i });
        }
        for j in 0..=g {
            tau[(i, j)] = (buf[j] - lse).exp();
        }
        // Normalize away the last ulp so rows sum to one exactly enough for
        // downstream averaging.
        let s: f64 = tau.row(i).iter().sum();
        for j in 0..=g {
            tau[(i, j)] /= s;
        }
    }
    Ok(PseudoPosteriors { tau })
}

/// Hard assignment by the argmax rule; ties go to the lowest label index.
pub fn assign(tau: &PseudoPosteriors) -> Labeling {
    let g = tau.g();
    let labels = (0..tau.n())
        .map(|i| {
            let row = tau.tau.row(i);
            let mut best = 0usize;
            for j in 1..=g {
                if row[j] > row[best] {
                    best = j;
                }
            }
            best
        })
        .collect();
    Labeling { labels, g }
}
