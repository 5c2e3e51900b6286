//! Shared initialization: a nearest-neighbor clutter scan flags an initial
//! noise guess, model-based agglomerative hierarchical clustering partitions
//! the rest, and a validity pass guarantees a minimum cluster size. Every
//! fitter in this crate starts from the same initial partition, so method
//! comparisons are not confounded by initialization.
//!
//! The whole pipeline is deterministic: no randomness enters at any step.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{Dataset, Labeling};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InitConfig {
    /// Target number of clusters.
    pub g: usize,
    /// Minimum cluster proportion for a valid partition.
    pub min_pr: f64,
    /// Neighbor count for the clutter scan.
    pub knn_k: usize,
}

impl InitConfig {
    pub fn new(g: usize) -> Self {
        Self { g, min_pr: 0.005, knn_k: 5 }
    }

    pub fn validate(&self) -> Result<()> {
        if self.g == 0 {
            return Err(Error::InvalidConfig("G must be >= 1".into()));
        }
        if self.knn_k == 0 {
            return Err(Error::InvalidConfig("knn_k must be >= 1".into()));
        }
        if !(self.min_pr > 0.0 && self.min_pr < 1.0 / self.g as f64) {
            return Err(Error::InvalidConfig(format!(
                "min_pr {} must lie in (0, 1/G)",
                self.min_pr
            )));
        }
        Ok(())
    }
}

// ---------------------------------------------------------------------------
// Nearest-neighbor clutter detection
// ---------------------------------------------------------------------------

/// Flags points whose k-th nearest-neighbor distance falls in the
/// high-distance component of a two-component fit to the k-NN distances.
pub fn nn_noise_detect(data: &Dataset, knn_k: usize) -> Result<Vec<bool>> {
    let n = data.n();
    if knn_k == 0 {
        return Err(Error::InvalidConfig("knn_k must be >= 1".into()));
    }
    if n <= knn_k {
        return Err(Error::RejectedInput(format!(
            "need n > knn_k, got n = {n}, knn_k = {knn_k}"
        )));
    }
    let points = data.points();
    let mut knn_dist = Vec::with_capacity(n);
    let mut buf = Vec::with_capacity(n - 1);
    for i in 0..n {
        buf.clear();
        for j in 0..n {
            if j != i {
                buf.push((&points[i] - &points[j]).norm_squared());
            }
        }
        buf.select_nth_unstable_by(knn_k - 1, |a, b| a.partial_cmp(b).unwrap());
        knn_dist.push(buf[knn_k - 1].sqrt());
    }

    // Work on the log scale: k-NN distances are strongly right-skewed and a
    // Gaussian component pair on the raw scale drifts into a broad
    // background component instead of isolating the clutter.
    let positive_floor = knn_dist
        .iter()
        .filter(|&&d| d > 0.0)
        .fold(f64::INFINITY, |m, &d| m.min(d));
    if !positive_floor.is_finite() {
        // All-identical data: nothing to flag.
        return Ok(vec![false; n]);
    }
    let knn_dist: Vec<f64> = knn_dist.iter().map(|&d| d.max(0.5 * positive_floor).ln()).collect();

    let mean = knn_dist.iter().sum::<f64>() / n as f64;
    let var = knn_dist.iter().map(|d| (d - mean).powi(2)).sum::<f64>() / n as f64;
    if var < 1e-300 {
        return Ok(vec![false; n]);
    }

    // Two-component univariate EM on the log distances, deterministically
    // started from the widest gap in the sorted values.
    let mut sorted = knn_dist.clone();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let mut split = n / 2;
    let mut widest = f64::NEG_INFINITY;
    for i in 0..n - 1 {
        let gap = sorted[i + 1] - sorted[i];
        if gap > widest {
            widest = gap;
            split = i + 1;
        }
    }
    let var_floor = 1e-8 * var;
    let part_stats = |part: &[f64]| -> (f64, f64) {
        let mean = part.iter().sum::<f64>() / part.len() as f64;
        let var = part.iter().map(|d| (d - mean).powi(2)).sum::<f64>() / part.len() as f64;
        (mean, var.max(var_floor))
    };
    let (m0, v0) = part_stats(&sorted[..split]);
    let (m1, v1) = part_stats(&sorted[split..]);
    let mut w = [split as f64 / n as f64, (n - split) as f64 / n as f64];
    let mut m = [m0, m1];
    let mut v = [v0, v1];

    let mut resp_hi = vec![0.0; n];
    for _ in 0..50 {
        // E-step.
        for (i, &d) in knn_dist.iter().enumerate() {
            let lp0 = w[0].ln() - 0.5 * v[0].ln() - 0.5 * (d - m[0]).powi(2) / v[0];
            let lp1 = w[1].ln() - 0.5 * v[1].ln() - 0.5 * (d - m[1]).powi(2) / v[1];
            let mx = lp0.max(lp1);
            let z = (lp0 - mx).exp() + (lp1 - mx).exp();
            resp_hi[i] = (lp1 - mx).exp() / z;
        }
        // M-step.
        let n1: f64 = resp_hi.iter().sum();
        let n0 = n as f64 - n1;
        if n1 < 1e-9 || n0 < 1e-9 {
            break;
        }
        w = [n0 / n as f64, n1 / n as f64];
        let m1 = knn_dist.iter().zip(&resp_hi).map(|(d, r)| d * r).sum::<f64>() / n1;
        let m0 = knn_dist.iter().zip(&resp_hi).map(|(d, r)| d * (1.0 - r)).sum::<f64>() / n0;
        m = [m0, m1];
        let v1 = knn_dist.iter().zip(&resp_hi).map(|(d, r)| r * (d - m1).powi(2)).sum::<f64>() / n1;
        let v0 = knn_dist
            .iter()
            .zip(&resp_hi)
            .map(|(d, r)| (1.0 - r) * (d - m0).powi(2))
            .sum::<f64>()
            / n0;
        v = [v0.max(var_floor), v1.max(var_floor)];
    }

    // Order so index 1 is the high-distance component.
    if m[0] > m[1] {
        m.swap(0, 1);
        v.swap(0, 1);
        w.swap(0, 1);
        for r in resp_hi.iter_mut() {
            *r = 1.0 - *r;
        }
    }
    // A shoulder carved off a unimodal distance distribution is not clutter:
    // require an actual density valley between the two component means.
    let mix_density = |x: f64| -> f64 {
        let d0 = w[0] / v[0].sqrt() * (-0.5 * (x - m[0]).powi(2) / v[0]).exp();
        let d1 = w[1] / v[1].sqrt() * (-0.5 * (x - m[1]).powi(2) / v[1]).exp();
        d0 + d1
    };
    let peak = mix_density(m[0]).min(mix_density(m[1]));
    let valley = (0..=100)
        .map(|k| mix_density(m[0] + (m[1] - m[0]) * k as f64 / 100.0))
        .fold(f64::INFINITY, f64::min);
    if valley > 0.5 * peak {
        return Ok(vec![false; n]);
    }
    let flags: Vec<bool> = resp_hi.iter().map(|&r| r > 0.5).collect();
    // Clutter is a minority phenomenon; an inverted split carries no signal.
    if flags.iter().filter(|&&f| f).count() * 2 > n {
        return Ok(vec![false; n]);
    }
    Ok(flags)
}

// ---------------------------------------------------------------------------
// Model-based hierarchical agglomeration
// ---------------------------------------------------------------------------

#[derive(Clone)]
struct ClusterStat {
    n: f64,
    sum: DVector<f64>,
    outer: DMatrix<f64>,
    members: Vec<usize>,
}

impl ClusterStat {
    fn singleton(x: &DVector<f64>, idx: usize) -> Self {
        Self { n: 1.0, sum: x.clone(), outer: x * x.transpose(), members: vec![idx] }
    }

    fn merged(&self, other: &Self) -> Self {
        let mut members = self.members.clone();
        members.extend_from_slice(&other.members);
        Self {
            n: self.n + other.n,
            sum: &self.sum + &other.sum,
            outer: &self.outer + &other.outer,
            members,
        }
    }

    /// `n * logdet(Cov + reg I)`: the partition's classification
    /// log-likelihood contribution up to constants.
    fn criterion(&self, reg: f64) -> f64 {
        let p = self.sum.len();
        let mean = &self.sum / self.n;
        let mut cov = &self.outer / self.n - &mean * mean.transpose();
        for d in 0..p {
            cov[(d, d)] += reg;
        }
        let log_det = match nalgebra::Cholesky::new(cov.clone()) {
            Some(chol) => 2.0 * chol.l_dirty().diagonal().iter().map(|d| d.ln()).sum::<f64>(),
            None => cov
                .symmetric_eigen()
                .eigenvalues
                .iter()
                .map(|&l| l.max(reg).ln())
                .sum(),
        };
        self.n * log_det
    }
}

/// Greedy agglomerative hierarchical clustering under the Gaussian
/// classification-likelihood criterion, cut at `g` groups. Labels are
/// `1..=g`, ordered by each cluster's smallest member index.
pub fn mbhc_agglomerate(data: &Dataset, g: usize) -> Result<Labeling> {
    if g == 0 {
        return Err(Error::InvalidConfig("G must be >= 1".into()));
    }
    let n = data.n();
    if data.distinct_points() < g {
        return Err(Error::InfeasiblePartition(format!(
            "need at least {g} distinct points, found {}",
            data.distinct_points()
        )));
    }
    let points = data.points();
    let p = data.p();

    // Regularizer from the global scatter so singleton merges stay finite.
    let grand_mean: DVector<f64> = points.iter().sum::<DVector<f64>>() / n as f64;
    let total_var: f64 = points.iter().map(|x| (x - &grand_mean).norm_squared()).sum::<f64>() / n as f64;
    let reg = (1e-8 * total_var / p as f64).max(1e-12);

    let mut stats: Vec<Option<ClusterStat>> = points
        .iter()
        .enumerate()
        .map(|(i, x)| Some(ClusterStat::singleton(x, i)))
        .collect();
    let mut crit: Vec<f64> = stats.iter().map(|s| s.as_ref().unwrap().criterion(reg)).collect();

    let merge_cost = |stats: &[Option<ClusterStat>], crit: &[f64], i: usize, j: usize| -> f64 {
        let merged = stats[i].as_ref().unwrap().merged(stats[j].as_ref().unwrap());
        merged.criterion(reg) - crit[i] - crit[j]
    };

    let mut active: Vec<usize> = (0..n).collect();
    let mut cost = vec![f64::INFINITY; n * n];
    for ai in 0..active.len() {
        for aj in (ai + 1)..active.len() {
            let (i, j) = (active[ai], active[aj]);
            let c = merge_cost(&stats, &crit, i, j);
            cost[i * n + j] = c;
            cost[j * n + i] = c;
        }
    }
    let scan_best = |cost: &[f64], active: &[usize], i: usize| -> (f64, usize) {
        let mut best = (f64::INFINITY, usize::MAX);
        for &j in active {
            if j != i {
                let c = cost[i * n + j];
                if c < best.0 {
                    best = (c, j);
                }
            }
        }
        best
    };
    let mut best: Vec<(f64, usize)> = (0..n).map(|i| scan_best(&cost, &active, i)).collect();

    while active.len() > g {
        // Global best pair; ties resolve to the smallest indices by scan
        // order, keeping the hierarchy deterministic.
        let mut pick = (f64::INFINITY, usize::MAX);
        for &i in &active {
            if best[i].0 < pick.0 {
                pick = (best[i].0, i);
            }
        }
        let i = pick.1;
        let j = best[i].1;
        let (i, j) = (i.min(j), i.max(j));

        let merged = stats[i].as_ref().unwrap().merged(stats[j].as_ref().unwrap());
        crit[i] = merged.criterion(reg);
        stats[i] = Some(merged);
        stats[j] = None;
        active.retain(|&k| k != j);

        for &k in &active {
            if k == i {
                continue;
            }
            let c = merge_cost(&stats, &crit, i, k);
            cost[i * n + k] = c;
            cost[k * n + i] = c;
            if c < best[k].0 {
                best[k] = (c, i);
            } else if best[k].1 == i || best[k].1 == j {
                best[k] = scan_best(&cost, &active, k);
            }
        }
        best[i] = scan_best(&cost, &active, i);
    }

    let mut order: Vec<usize> = active.clone();
    order.sort_by_key(|&i| stats[i].as_ref().unwrap().members.iter().min().copied().unwrap());
    let mut labels = vec![0usize; n];
    for (cluster, &idx) in order.iter().enumerate() {
        for &member in &stats[idx].as_ref().unwrap().members {
            labels[member] = cluster + 1;
        }
    }
    Labeling::new(labels, g)
}

// ---------------------------------------------------------------------------
// Composition with validity repair
// ---------------------------------------------------------------------------

fn cluster_moments(points: &[DVector<f64>], members: &[usize], reg: f64) -> (DVector<f64>, DMatrix<f64>) {
    let p = points[0].len();
    let nw = members.len() as f64;
    let mean = members.iter().map(|&i| &points[i]).sum::<DVector<f64>>() / nw;
    let mut cov = DMatrix::zeros(p, p);
    for &i in members {
        let d = &points[i] - &mean;
        cov += &d * d.transpose();
    }
    cov /= nw;
    for d in 0..p {
        cov[(d, d)] += reg;
    }
    (mean, cov)
}

/// Composes clutter detection and agglomeration into the initial partition
/// shared by all fitters; label 0 marks the initial noise guess. Undersized
/// clusters are repaired by reassigning their points to the nearest remaining
/// cluster (Mahalanobis) and re-splitting the largest cluster.
pub fn initial_partition(data: &Dataset, cfg: &InitConfig) -> Result<Labeling> {
    cfg.validate().map_err(|e| Error::InitializationFailure(e.to_string()))?;
    let n = data.n();
    let g = cfg.g;
    let min_size = ((cfg.min_pr * n as f64) - 1e-9).ceil().max(1.0) as usize;
    if n <= g + (n as f64 * cfg.min_pr).ceil() as usize {
        return Err(Error::InitializationFailure(format!(
            "n = {n} too small for G = {g} clusters of at least {min_size} points"
        )));
    }

    let noise = if n > cfg.knn_k {
        nn_noise_detect(data, cfg.knn_k)?
    } else {
        vec![false; n]
    };
    let mut non_noise: Vec<usize> = (0..n).filter(|&i| !noise[i]).collect();
    if non_noise.len() < g.max(min_size * g) {
        // The clutter scan ate too much; fall back to clustering everything.
        non_noise = (0..n).collect();
    }

    let sub_matrix = DMatrix::from_fn(non_noise.len(), data.p(), |r, c| data.matrix()[(non_noise[r], c)]);
    let sub = Dataset::new(sub_matrix)?;
    let sub_labels = mbhc_agglomerate(&sub, g)?;

    let points = data.points();
    let grand_mean: DVector<f64> = points.iter().sum::<DVector<f64>>() / n as f64;
    let total_var: f64 =
        points.iter().map(|x| (x - &grand_mean).norm_squared()).sum::<f64>() / n as f64;
    let reg = (1e-8 * total_var / data.p() as f64).max(1e-12);

    // members[c] holds dataset indices of cluster c + 1.
    let mut members: Vec<Vec<usize>> = vec![Vec::new(); g];
    for (sub_i, &orig_i) in non_noise.iter().enumerate() {
        members[sub_labels.labels[sub_i] - 1].push(orig_i);
    }

    let max_attempts = 2 * g + 10;
    for _ in 0..max_attempts {
        let too_small: Vec<usize> =
            (0..members.len()).filter(|&c| members[c].len() < min_size).collect();
        if too_small.is_empty() {
            let mut labels = vec![0usize; n];
            for (c, m) in members.iter().enumerate() {
                for &i in m {
                    labels[i] = c + 1;
                }
            }
            return Labeling::new(labels, g);
        }
        if members.len() <= 1 {
            break;
        }

        // Dissolve the smallest cluster into its Mahalanobis-nearest peers.
        let smallest = *too_small
            .iter()
            .min_by_key(|&&c| (members[c].len(), c))
            .unwrap();
        let orphans = members.remove(smallest);
        let moments: Vec<(DVector<f64>, DMatrix<f64>)> = members
            .iter()
            .map(|m| cluster_moments(&points, m, reg))
            .collect();
        for i in orphans {
            let mut best = (f64::INFINITY, 0usize);
            for (c, (mean, cov)) in moments.iter().enumerate() {
                let d2 = crate::kernels::mahalanobis_sq(&points[i], mean, cov)
                    .unwrap_or(f64::INFINITY);
                if d2 < best.0 {
                    best = (d2, c);
                }
            }
            members[best.1].push(i);
        }

        // Re-split the largest cluster to restore g groups.
        let largest = (0..members.len()).max_by_key(|&c| (members[c].len(), usize::MAX - c)).unwrap();
        let big = members.remove(largest);
        let big_matrix = DMatrix::from_fn(big.len(), data.p(), |r, c| data.matrix()[(big[r], c)]);
        let big_data = Dataset::new(big_matrix)?;
        match mbhc_agglomerate(&big_data, 2) {
            Ok(split) => {
                let mut a = Vec::new();
                let mut b = Vec::new();
                for (k, &orig) in big.iter().enumerate() {
                    if split.labels[k] == 1 {
                        a.push(orig);
                    } else {
                        b.push(orig);
                    }
                }
                members.push(a);
                members.push(b);
            }
            Err(_) => {
                members.push(big);
                break;
            }
        }
    }
    Err(Error::InitializationFailure(format!(
        "no valid partition with {g} clusters of at least {min_size} points after repair attempts"
    )))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn gaussian_blob(rng: &mut ChaCha8Rng, n: usize, center: (f64, f64), sd: f64) -> Vec<[f64; 2]> {
        use rand_distr::{Distribution, StandardNormal};
        (0..n)
            .map(|_| {
                let z0: f64 = StandardNormal.sample(rng);
                let z1: f64 = StandardNormal.sample(rng);
                [center.0 + sd * z0, center.1 + sd * z1]
            })
            .collect()
    }

    fn dataset_from(rows: &[[f64; 2]]) -> Dataset {
        let m = DMatrix::from_fn(rows.len(), 2, |r, c| rows[r][c]);
        Dataset::new(m).unwrap()
    }

    #[test]
    fn tight_blob_flags_almost_nothing() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let rows = gaussian_blob(&mut rng, 300, (0.0, 0.0), 1.0);
        let data = dataset_from(&rows);
        let flags = nn_noise_detect(&data, 5).unwrap();
        let flagged = flags.iter().filter(|&&f| f).count();
        assert!(flagged as f64 <= 0.02 * 300.0, "flagged {flagged} of 300");
    }

    #[test]
    fn remote_points_all_flagged() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let mut rows = gaussian_blob(&mut rng, 300, (0.0, 0.0), 1.0);
        for k in 0..10 {
            rows.push([100.0 + 4.0 * k as f64, 100.0 - 3.0 * k as f64]);
        }
        let data = dataset_from(&rows);
        let flags = nn_noise_detect(&data, 5).unwrap();
        for i in 300..310 {
            assert!(flags[i], "remote point {i} not flagged");
        }
    }

    #[test]
    fn boundary_sample_size() {
        let rows = [[0.0, 0.0], [1.0, 0.0], [0.0, 1.0], [1.0, 1.0], [0.5, 0.5], [2.0, 2.0]];
        let data = dataset_from(&rows);
        let flags = nn_noise_detect(&data, 5).unwrap();
        assert_eq!(flags.len(), 6);
    }

    #[test]
    fn identical_data_flags_nothing() {
        let rows = [[1.0, 1.0]; 10];
        let data = dataset_from(&rows);
        let flags = nn_noise_detect(&data, 3).unwrap();
        assert!(flags.iter().all(|&f| !f));
    }

    #[test]
    fn agglomeration_recovers_separated_blobs() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut rows = gaussian_blob(&mut rng, 60, (0.0, 0.0), 1.0);
        rows.extend(gaussian_blob(&mut rng, 60, (30.0, 0.0), 1.0));
        let data = dataset_from(&rows);
        let labels = mbhc_agglomerate(&data, 2).unwrap();
        let first = labels.labels[0];
        assert!(labels.labels[..60].iter().all(|&l| l == first));
        assert!(labels.labels[60..].iter().all(|&l| l != first));
    }

    #[test]
    fn agglomeration_single_group() {
        let rows = [[0.0, 0.0], [1.0, 0.5], [0.2, 0.8], [5.0, 5.0]];
        let data = dataset_from(&rows);
        let labels = mbhc_agglomerate(&data, 1).unwrap();
        assert!(labels.labels.iter().all(|&l| l == 1));
    }

    #[test]
    fn agglomeration_singletons() {
        let rows = [[0.0, 0.0], [1.0, 0.0], [2.0, 0.0], [3.0, 0.0]];
        let data = dataset_from(&rows);
        let labels = mbhc_agglomerate(&data, 4).unwrap();
        let mut seen = labels.labels.clone();
        seen.sort_unstable();
        assert_eq!(seen, vec![1, 2, 3, 4]);
    }

    #[test]
    fn agglomeration_needs_distinct_points() {
        let rows = [[0.0, 0.0], [0.0, 0.0], [0.0, 0.0]];
        let data = dataset_from(&rows);
        assert!(matches!(mbhc_agglomerate(&data, 2), Err(Error::InfeasiblePartition(_))));
    }

    #[test]
    fn initial_partition_recovers_blobs_and_noise() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let mut rows = gaussian_blob(&mut rng, 100, (0.0, 0.0), 1.0);
        rows.extend(gaussian_blob(&mut rng, 100, (25.0, 0.0), 1.0));
        rows.extend(gaussian_blob(&mut rng, 100, (0.0, 25.0), 1.0));
        for k in 0..5 {
            rows.push([200.0 + 10.0 * k as f64, -150.0]);
        }
        let data = dataset_from(&rows);
        let labels = initial_partition(&data, &InitConfig::new(3)).unwrap();
        for i in 300..305 {
            assert_eq!(labels.labels[i], 0, "outlier {i} should be initial noise");
        }
        // Each blob lands in a single cluster, all distinct.
        let blob_label = |range: std::ops::Range<usize>| {
            let mut counts = [0usize; 4];
            for i in range {
                counts[labels.labels[i]] += 1;
            }
            counts.iter().enumerate().max_by_key(|(_, &c)| c).unwrap().0
        };
        let (a, b, c) = (blob_label(0..100), blob_label(100..200), blob_label(200..300));
        assert!(a != 0 && b != 0 && c != 0);
        assert!(a != b && b != c && a != c);
        // Majority of every blob correctly grouped.
        for (start, lbl) in [(0, a), (100, b), (200, c)] {
            let hit = (start..start + 100).filter(|&i| labels.labels[i] == lbl).count();
            assert!(hit >= 95, "blob at {start} only {hit}/100 together");
        }
    }

    #[test]
    fn noiseless_blobs_keep_almost_everything() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let mut rows = gaussian_blob(&mut rng, 150, (0.0, 0.0), 1.0);
        rows.extend(gaussian_blob(&mut rng, 150, (12.0, 0.0), 1.0));
        let data = dataset_from(&rows);
        let labels = initial_partition(&data, &InitConfig::new(2)).unwrap();
        let noise = labels.labels.iter().filter(|&&l| l == 0).count();
        assert!(noise as f64 <= 0.02 * 300.0, "flagged {noise} of 300 as noise");
    }

    #[test]
    fn pigeonhole_infeasible_min_pr() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let rows = gaussian_blob(&mut rng, 50, (0.0, 0.0), 1.0);
        let data = dataset_from(&rows);
        let cfg = InitConfig { g: 3, min_pr: 0.5, knn_k: 5 };
        assert!(matches!(
            initial_partition(&data, &cfg),
            Err(Error::InitializationFailure(_))
        ));
    }

    #[test]
    fn valid_partitions_respect_min_size() {
        for seed in 0..4 {
            let mut rng = ChaCha8Rng::seed_from_u64(100 + seed);
            let mut rows = gaussian_blob(&mut rng, 80, (0.0, 0.0), 1.0);
            rows.extend(gaussian_blob(&mut rng, 80, (9.0, 3.0), 1.2));
            rows.extend(gaussian_blob(&mut rng, 40, (-6.0, 8.0), 0.8));
            let data = dataset_from(&rows);
            let cfg = InitConfig { g: 3, min_pr: 0.02, knn_k: 5 };
            let labels = initial_partition(&data, &cfg).unwrap();
            let counts = labels.counts();
            let min_size = (0.02 * 200.0_f64).ceil() as usize;
            for c in 1..=3 {
                assert!(counts[c] >= min_size, "cluster {c} has {} < {min_size}", counts[c]);
            }
        }
    }

    #[test]
    fn deterministic_given_data() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let mut rows = gaussian_blob(&mut rng, 70, (0.0, 0.0), 1.0);
        rows.extend(gaussian_blob(&mut rng, 70, (10.0, 0.0), 1.0));
        let data = dataset_from(&rows);
        let a = initial_partition(&data, &InitConfig::new(2)).unwrap();
        let b = initial_partition(&data, &InitConfig::new(2)).unwrap();
        assert_eq!(a, b);
    }
}
