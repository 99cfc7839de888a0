//! From a Gram lift to `k` dimensions: Gaussian projection and PCA.

use nalgebra::{DMatrix, SymmetricEigen};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;

use crate::embedding::EmbeddingKD;
use crate::error::{Error, Result};
use crate::mve::lift::GramLift;

/// `k + 2 sqrt(3 k ln n) + 6 ln n`.
pub fn tau_k(k: usize, n: usize) -> f64 {
    let ln = (n.max(1) as f64).ln();
    k as f64 + 2.0 * (3.0 * k as f64 * ln).sqrt() + 6.0 * ln
}

/// One rounding trial.
#[derive(Debug, Clone, PartialEq)]
pub struct RoundingReport {
    pub k: usize,
    pub tau: f64,
    /// `Var(y) / Var(x)`.
    pub var_ratio: f64,
    /// Edges longer than one in the scaled output.
    pub violations: usize,
    pub worst_stretch: f64,
    /// No edge constraint is violated.
    pub lipschitz: bool,
    /// `Var(y) >= k / (2 tau) Var(x)`.
    pub retained: bool,
}

fn weighted_variance(rows: &[Vec<f64>], pi: &[f64]) -> f64 {
    let dim = rows.first().map_or(0, |r| r.len());
    let mut mean = vec![0.0; dim];
    for (r, &p) in rows.iter().zip(pi) {
        for (m, c) in mean.iter_mut().zip(r) {
            *m += p * c;
        }
    }
    rows.iter()
        .zip(pi)
        .map(|(r, &p)| p * r.iter().zip(&mean).map(|(c, m)| (c - m) * (c - m)).sum::<f64>())
        .sum()
}

fn worst_stretch(e: &EmbeddingKD, edges: &[(usize, usize)]) -> (f64, usize) {
    let mut worst = 0.0f64;
    let mut bad = 0;
    for &(u, v) in edges {
        let s = e.dist2(u, v).sqrt();
        worst = worst.max(s);
        if s > 1.0 + 1e-12 {
            bad += 1;
        }
    }
    (worst, bad)
}

/// Factor rows plus the variance of the lift.
pub struct Prepared {
    rows: Vec<Vec<f64>>,
    var_x: f64,
}

pub fn prepare(lift: &GramLift) -> Prepared {
    Prepared { rows: lift.factor(), var_x: lift.objective() }
}

/// `y_u = G x_u / sqrt(tau)` with `G` a `k x r` standard Gaussian matrix
/// drawn from `ChaCha8Rng::seed_from_u64(seed)` in row-major order.
pub fn gaussian_round(lift: &GramLift, k: usize, seed: u64) -> Result<(EmbeddingKD, RoundingReport)> {
    if k == 0 {
        return Err(Error::InvalidArgument("k must be at least 1".into()));
    }
    let prep = prepare(lift);
    Ok(round_prepared(&prep, lift, k, seed, tau_k(k, lift.n())))
}

/// Same as [`gaussian_round`] with an explicit scale `tau`.
pub fn round_prepared(prep: &Prepared, lift: &GramLift, k: usize, seed: u64, tau: f64) -> (EmbeddingKD, RoundingReport) {
    let r = prep.rows.first().map_or(0, |row| row.len());
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let gmat: Vec<f64> = (0..k * r).map(|_| StandardNormal.sample(&mut rng)).collect();
    let s = tau.sqrt();
    let y: Vec<Vec<f64>> = prep
        .rows
        .iter()
        .map(|x| (0..k).map(|i| gmat[i * r..(i + 1) * r].iter().zip(x).map(|(a, b)| a * b).sum::<f64>() / s).collect())
        .collect();
    let emb = EmbeddingKD { k, y };
    let var_y = weighted_variance(&emb.y, &lift.pi);
    let (worst, violations) = worst_stretch(&emb, &lift.edges);
    let var_ratio = if prep.var_x > 0.0 { var_y / prep.var_x } else { 0.0 };
    let report = RoundingReport {
        k,
        tau,
        var_ratio,
        violations,
        worst_stretch: worst,
        lipschitz: violations == 0,
        retained: var_y >= k as f64 / (2.0 * tau) * prep.var_x,
    };
    (emb, report)
}

/// Aggregate over seeds `seed, seed + 1, ...`.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialSummary {
    pub k: usize,
    pub tau: f64,
    pub trials: usize,
    pub mean_var_ratio: f64,
    pub var_ratio_std_err: f64,
    pub lipschitz_failure_rate: f64,
    pub retention_rate: f64,
}

/// Runs `trials` independent roundings in parallel. `tau` overrides the
/// default scale.
pub fn gaussian_trials(lift: &GramLift, k: usize, seed: u64, trials: usize, tau: Option<f64>) -> Result<TrialSummary> {
    if k == 0 || trials == 0 {
        return Err(Error::InvalidArgument("k and trials must be at least 1".into()));
    }
    let tau = tau.unwrap_or_else(|| tau_k(k, lift.n()));
    let prep = prepare(lift);
    let reports: Vec<RoundingReport> =
        (0..trials as u64).into_par_iter().map(|t| round_prepared(&prep, lift, k, seed.wrapping_add(t), tau).1).collect();
    let m = trials as f64;
    let mean = reports.iter().map(|r| r.var_ratio).sum::<f64>() / m;
    let var = if trials > 1 { reports.iter().map(|r| (r.var_ratio - mean).powi(2)).sum::<f64>() / (m - 1.0) } else { 0.0 };
    Ok(TrialSummary {
        k,
        tau,
        trials,
        mean_var_ratio: mean,
        var_ratio_std_err: (var / m).sqrt(),
        lipschitz_failure_rate: reports.iter().filter(|r| !r.lipschitz).count() as f64 / m,
        retention_rate: reports.iter().filter(|r| r.retained).count() as f64 / m,
    })
}

/// Projection onto the top `k` principal axes of the `pi`-weighted
/// covariance, shrunk by the worst edge stretch when above one.
pub fn pca_round(lift: &GramLift, k: usize) -> Result<(EmbeddingKD, f64)> {
    if k == 0 {
        return Err(Error::InvalidArgument("k must be at least 1".into()));
    }
    let rows = lift.factor();
    let n = rows.len();
    let r = rows.first().map_or(0, |row| row.len());
    let pi = &lift.pi;
    let mut mean = vec![0.0; r];
    for (row, &p) in rows.iter().zip(pi) {
        for (m, c) in mean.iter_mut().zip(row) {
            *m += p * c;
        }
    }
    let centered = DMatrix::from_fn(n, r, |u, j| rows[u][j] - mean[j]);
    let weighted = DMatrix::from_fn(n, r, |u, j| centered[(u, j)] * pi[u]);
    let cov = centered.transpose() * weighted;
    let eig = SymmetricEigen::new(cov);
    let mut order: Vec<usize> = (0..r).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]).then(a.cmp(&b)));
    let axes: Vec<usize> = order.into_iter().take(k).collect();
    let y: Vec<Vec<f64>> = (0..n)
        .map(|u| {
            let mut out: Vec<f64> =
                axes.iter().map(|&a| (0..r).map(|j| centered[(u, j)] * eig.eigenvectors[(j, a)]).sum()).collect();
            out.resize(k, 0.0);
            out
        })
        .collect();
    let mut emb = EmbeddingKD { k, y };
    let (worst, _) = worst_stretch(&emb, &lift.edges);
    if worst > 1.0 {
        emb = emb.scaled(1.0 / worst);
    }
    let var = weighted_variance(&emb.y, pi);
    Ok((emb, var))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cube() -> GramLift {
        let mut vectors = Vec::new();
        let mut edges = Vec::new();
        for v in 0..8usize {
            vectors.push((0..3).map(|b| if v >> b & 1 == 1 { 0.5 } else { -0.5 }).collect());
            for b in 0..3 {
                let w = v ^ (1 << b);
                if v < w {
                    edges.push((v, w));
                }
            }
        }
        GramLift::from_vectors(&vectors, vec![0.125; 8], edges).unwrap()
    }

    #[test]
    fn tau_example() {
        let t = tau_k(4, 16);
        let expect = 4.0 + 2.0 * (12.0 * 16f64.ln()).sqrt() + 6.0 * 16f64.ln();
        assert_eq!(t, expect);
        assert!((t - 32.17).abs() < 0.01);
    }

    #[test]
    fn collapsed_lift_rounds_to_a_point() {
        let lift = GramLift::from_vectors(&vec![vec![0.3, -0.1]; 4], vec![0.25; 4], vec![(0, 1), (1, 2), (2, 3)]).unwrap();
        let (e, rep) = gaussian_round(&lift, 3, 9).unwrap();
        for u in 1..4 {
            assert!(e.dist2(0, u) < 1e-20);
        }
        assert_eq!(rep.var_ratio, 0.0);
    }

    #[test]
    fn deterministic_in_seed() {
        let lift = cube();
        assert_eq!(gaussian_round(&lift, 2, 7).unwrap(), gaussian_round(&lift, 2, 7).unwrap());
        assert_ne!(gaussian_round(&lift, 2, 7).unwrap().0, gaussian_round(&lift, 2, 8).unwrap().0);
    }

    #[test]
    fn pca_on_cube() {
        let lift = cube();
        let (e, var) = pca_round(&lift, 1).unwrap();
        assert!((var / lift.objective() - 1.0 / 3.0).abs() < 1e-9);
        let (_, var3) = pca_round(&lift, 3).unwrap();
        assert!((var3 - lift.objective()).abs() < 1e-12);
        assert_eq!(e.k, 1);
    }
}
