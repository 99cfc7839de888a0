//! The `n`-dimensional relaxation: a PSD Gram matrix `X` maximizing
//! `<diag(pi) - pi pi^T, X>` subject to `X_uu + X_vv - 2 X_uv <= 1` on edges.
//!
//! Solved by ADMM, alternating a projection onto the PSD cone with a
//! projection onto the edge polytope.

use nalgebra::{DMatrix, SymmetricEigen};

use crate::embedding::EmbeddingJson;
use crate::error::{Error, Result};
use crate::graph::WeightedGraph;

/// Smallest allowed eigenvalue and largest allowed edge excess.
pub const LIFT_FEAS_TOL: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq)]
pub struct GramLift {
    pub x: DMatrix<f64>,
    pub pi: Vec<f64>,
    pub edges: Vec<(usize, usize)>,
}

#[derive(Debug, Clone)]
pub struct LiftResult {
    pub lift: GramLift,
    pub objective: f64,
    pub iterations: usize,
    pub converged: bool,
}

impl GramLift {
    pub fn from_vectors(vectors: &[Vec<f64>], pi: Vec<f64>, edges: Vec<(usize, usize)>) -> Result<Self> {
        let n = vectors.len();
        if pi.len() != n {
            return Err(Error::DimensionMismatch { expected: n, got: pi.len() });
        }
        let r = vectors.first().map_or(0, |v| v.len());
        let mut f = DMatrix::zeros(n, r);
        for (u, row) in vectors.iter().enumerate() {
            if row.len() != r {
                return Err(Error::DimensionMismatch { expected: r, got: row.len() });
            }
            for (j, &c) in row.iter().enumerate() {
                f[(u, j)] = c;
            }
        }
        if let Some(&(u, v)) = edges.iter().find(|&&(u, v)| u >= n || v >= n) {
            return Err(Error::InvalidArgument(format!("edge ({u}, {v}) out of range")));
        }
        Ok(GramLift { x: &f * f.transpose(), pi, edges })
    }

    pub fn from_graph_vectors(vectors: &[Vec<f64>], g: &WeightedGraph) -> Result<Self> {
        Self::from_vectors(vectors, g.pi().to_vec(), g.edges().to_vec())
    }

    pub fn n(&self) -> usize {
        self.x.nrows()
    }

    /// `sum pi_u X_uu - pi^T X pi`, the variance of the factor vectors.
    pub fn objective(&self) -> f64 {
        objective(&self.x, &self.pi)
    }

    pub fn edge_len2(&self, u: usize, v: usize) -> f64 {
        self.x[(u, u)] + self.x[(v, v)] - 2.0 * self.x[(u, v)]
    }

    pub fn max_edge_len2(&self) -> f64 {
        self.edges.iter().map(|&(u, v)| self.edge_len2(u, v)).fold(0.0, f64::max)
    }

    pub fn min_eigenvalue(&self) -> f64 {
        SymmetricEigen::new(self.x.clone()).eigenvalues.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn is_feasible(&self) -> bool {
        self.min_eigenvalue() >= -LIFT_FEAS_TOL && self.max_edge_len2() <= 1.0 + LIFT_FEAS_TOL
    }

    /// Rows `x_u` with `X = F F^T`; one column per nonnegligible eigenvalue.
    pub fn factor(&self) -> Vec<Vec<f64>> {
        let eig = SymmetricEigen::new(self.x.clone());
        let n = self.n();
        let scale = eig.eigenvalues.iter().fold(0.0f64, |m, &l| m.max(l.abs())).max(1.0);
        let cols: Vec<usize> = (0..n).filter(|&j| eig.eigenvalues[j] > 1e-12 * scale).collect();
        (0..n)
            .map(|u| {
                if cols.is_empty() {
                    return vec![0.0];
                }
                cols.iter().map(|&j| eig.eigenvectors[(u, j)] * eig.eigenvalues[j].sqrt()).collect()
            })
            .collect()
    }

    pub fn rank(&self, tol: f64) -> usize {
        SymmetricEigen::new(self.x.clone()).eigenvalues.iter().filter(|&&l| l > tol).count()
    }

    pub fn to_json(&self) -> EmbeddingJson {
        let vectors = self.factor();
        EmbeddingJson {
            n: self.n(),
            k: vectors.first().map_or(0, |r| r.len()),
            vectors,
            pi: Some(self.pi.clone()),
            edges: Some(self.edges.clone()),
        }
    }

    /// Rebuilds a lift from its JSON, using `g` when the file carries no
    /// masses or edges.
    pub fn from_json(j: EmbeddingJson, g: Option<&WeightedGraph>) -> Result<Self> {
        let pi = match (j.pi, g) {
            (Some(p), _) => p,
            (None, Some(g)) => g.pi().to_vec(),
            (None, None) => return Err(Error::InvalidArgument("lift file has no masses and no graph was given".into())),
        };
        let edges = match (j.edges, g) {
            (Some(e), _) => e,
            (None, Some(g)) => g.edges().to_vec(),
            (None, None) => return Err(Error::InvalidArgument("lift file has no edges and no graph was given".into())),
        };
        Self::from_vectors(&j.vectors, pi, edges)
    }
}

fn objective(x: &DMatrix<f64>, pi: &[f64]) -> f64 {
    let n = pi.len();
    let mut diag = 0.0;
    let mut quad = 0.0;
    for u in 0..n {
        diag += pi[u] * x[(u, u)];
        for v in 0..n {
            quad += pi[u] * pi[v] * x[(u, v)];
        }
    }
    diag - quad
}

fn project_psd(m: &DMatrix<f64>) -> DMatrix<f64> {
    let sym = (m + m.transpose()) * 0.5;
    let mut eig = SymmetricEigen::new(sym);
    for l in eig.eigenvalues.iter_mut() {
        *l = l.max(0.0);
    }
    eig.recompose()
}

/// Frobenius projection onto `{Z : <A_e, Z> <= 1 for all edges}` by
/// Hildreth's dual coordinate ascent. `<A_e, A_e> = 4`.
fn project_edges(w: &DMatrix<f64>, edges: &[(usize, usize)], mu: &mut [f64], sweeps: usize) -> DMatrix<f64> {
    let mut z = w.clone();
    // Warm start from the previous multipliers.
    for (e, &(u, v)) in edges.iter().enumerate() {
        apply(&mut z, u, v, -mu[e]);
    }
    for _ in 0..sweeps {
        let mut moved = 0.0f64;
        for (e, &(u, v)) in edges.iter().enumerate() {
            let r = z[(u, u)] + z[(v, v)] - 2.0 * z[(u, v)] - 1.0;
            let new = (mu[e] + r / 4.0).max(0.0);
            let step = new - mu[e];
            if step != 0.0 {
                apply(&mut z, u, v, -step);
                mu[e] = new;
                moved = moved.max(step.abs());
            }
        }
        if moved < 1e-15 {
            break;
        }
    }
    z
}

/// `z += t A_e`.
fn apply(z: &mut DMatrix<f64>, u: usize, v: usize, t: f64) {
    z[(u, u)] += t;
    z[(v, v)] += t;
    z[(u, v)] -= t;
    z[(v, u)] -= t;
}

/// Conjugation by `I - 1 pi^T`: moves the weighted mean of the factor
/// vectors to the origin without changing distances.
fn center(x: &DMatrix<f64>, pi: &[f64]) -> DMatrix<f64> {
    let n = pi.len();
    let p = nalgebra::DVector::from_column_slice(pi);
    let xp = x * &p;
    let pxp = p.dot(&xp);
    DMatrix::from_fn(n, n, |u, v| x[(u, v)] - xp[u] - xp[v] + pxp)
}

/// Makes an iterate feasible: clips negative eigenvalues, then scales so
/// that no edge is longer than one.
fn repair(x: &DMatrix<f64>, pi: &[f64], edges: &[(usize, usize)]) -> GramLift {
    let psd = project_psd(&center(x, pi));
    let mut lift = GramLift { x: psd, pi: pi.to_vec(), edges: edges.to_vec() };
    let worst = lift.max_edge_len2();
    if worst > 1.0 {
        lift.x /= worst;
    }
    lift
}

pub fn lift_solve(g: &WeightedGraph, tol: f64, max_iters: usize) -> Result<LiftResult> {
    if !(tol > 0.0) {
        return Err(Error::InvalidArgument(format!("tol must be positive, got {tol}")));
    }
    let n = g.n();
    let pi = g.pi();
    let edges = g.edges();
    let p = nalgebra::DVector::from_column_slice(pi);
    let c = DMatrix::from_diagonal(&p) - &p * p.transpose();
    if n == 1 {
        let lift = GramLift { x: DMatrix::zeros(1, 1), pi: pi.to_vec(), edges: Vec::new() };
        return Ok(LiftResult { lift, objective: 0.0, iterations: 0, converged: true });
    }

    // Rank-one start from BFS depth.
    let d = g.distances_from(0);
    let mut z = DMatrix::from_fn(n, n, |u, v| (d[u] * d[v]) as f64 / (n * n) as f64);
    let mut x;
    let mut ud = DMatrix::zeros(n, n);
    let mut mu = vec![0.0; edges.len()];
    let rho = 1.0;

    let mut best = repair(&z, pi, edges);
    let mut best_obj = best.objective();
    let mut last_obj = f64::NEG_INFINITY;
    let mut converged = false;
    let mut iterations = 0;
    for it in 1..=max_iters {
        iterations = it;
        x = project_psd(&(&z - &ud + &c / rho));
        let z_prev = z.clone();
        z = project_edges(&(&x + &ud), edges, &mut mu, 200);
        ud += &x - &z;

        if it % 10 == 0 || it == max_iters {
            let cand = repair(&x, pi, edges);
            let obj = cand.objective();
            if obj > best_obj {
                best_obj = obj;
                best = cand;
            }
            let primal = (&x - &z).norm();
            let dual = rho * (&z - &z_prev).norm();
            let scale = x.norm().max(1.0);
            let rel = (obj - last_obj).abs() / obj.abs().max(1e-12);
            last_obj = obj;
            if primal <= tol * scale && dual <= tol * scale && rel <= tol {
                converged = true;
                break;
            }
        }
    }
    Ok(LiftResult { lift: best, objective: best_obj, iterations, converged })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{cycle_edges, path_edges, star_edges, GraphOptions};
    use crate::scalar::rational;

    fn claw() -> WeightedGraph {
        WeightedGraph::from_rational(
            4,
            &star_edges(4),
            vec![rational(0, 1), rational(1, 3), rational(1, 3), rational(1, 3)],
            GraphOptions::allow_zero_mass(),
        )
        .unwrap()
    }

    #[test]
    fn k2() {
        let g = WeightedGraph::uniform(2, &path_edges(2)).unwrap();
        let r = lift_solve(&g, 1e-9, 5000).unwrap();
        assert!(r.lift.is_feasible());
        assert!((r.objective - 0.25).abs() < 1e-6, "{}", r.objective);
        assert!((r.lift.edge_len2(0, 1) - 1.0).abs() < 1e-5);
    }

    #[test]
    fn claw_reaches_one() {
        let r = lift_solve(&claw(), 1e-9, 5000).unwrap();
        assert!(r.lift.is_feasible());
        assert!(r.objective >= 1.0 - 1e-3, "{}", r.objective);
    }

    #[test]
    fn four_cycle_beats_square() {
        let g = WeightedGraph::uniform(4, &cycle_edges(4)).unwrap();
        let r = lift_solve(&g, 1e-9, 5000).unwrap();
        assert!(r.lift.is_feasible());
        assert!(r.objective >= 0.5 - 1e-4, "{}", r.objective);
    }

    #[test]
    fn json_round_trip_keeps_gram() {
        let r = lift_solve(&claw(), 1e-6, 2000).unwrap();
        let j = r.lift.to_json();
        let back = GramLift::from_json(j, None).unwrap();
        assert!((&back.x - &r.lift.x).norm() < 1e-9);
    }
}
