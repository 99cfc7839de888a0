//! Objective evaluators shared by every solver.

use crate::embedding::{Embedding1D, EmbeddingKD};
use crate::error::{Error, Result};
use crate::graph::WeightedGraph;
use crate::scalar::{Rational, Scalar};

/// Read access to vertex coordinates of either embedding type.
pub trait Points {
    fn len(&self) -> usize;
    fn dim(&self) -> usize;
    fn coord(&self, v: usize, j: usize) -> f64;

    fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn dist2(&self, u: usize, v: usize) -> f64 {
        (0..self.dim()).map(|j| (self.coord(u, j) - self.coord(v, j)).powi(2)).sum()
    }
}

impl Points for Embedding1D {
    fn len(&self) -> usize {
        self.x.len()
    }
    fn dim(&self) -> usize {
        1
    }
    fn coord(&self, v: usize, _j: usize) -> f64 {
        self.x[v]
    }
}

impl Points for EmbeddingKD {
    fn len(&self) -> usize {
        self.y.len()
    }
    fn dim(&self) -> usize {
        self.k
    }
    fn coord(&self, v: usize, j: usize) -> f64 {
        self.y[v][j]
    }
}

fn check_len<P: Points + ?Sized>(p: &P, g: &WeightedGraph) -> Result<()> {
    if p.len() != g.n() {
        return Err(Error::DimensionMismatch { expected: g.n(), got: p.len() });
    }
    Ok(())
}

/// `Var_pi = sum_{v<w} pi_v pi_w |y_v - y_w|^2`.
pub fn variance<P: Points + ?Sized>(p: &P, g: &WeightedGraph) -> Result<f64> {
    check_len(p, g)?;
    let pi = g.pi();
    let mut total = 0.0;
    for v in 0..p.len() {
        if pi[v] == 0.0 {
            continue;
        }
        let mut row = 0.0;
        for w in v + 1..p.len() {
            row += pi[w] * p.dist2(v, w);
        }
        total += pi[v] * row;
    }
    Ok(total)
}

/// `E |y_v - mu|^2` with `mu` the pi-barycenter.
pub fn variance_barycentric<P: Points + ?Sized>(p: &P, g: &WeightedGraph) -> Result<f64> {
    check_len(p, g)?;
    let mu = barycenter(p, g.pi());
    let mut total = 0.0;
    for (v, &m) in g.pi().iter().enumerate() {
        let d: f64 = (0..p.dim()).map(|j| (p.coord(v, j) - mu[j]).powi(2)).sum();
        total += m * d;
    }
    Ok(total)
}

pub fn barycenter<P: Points + ?Sized>(p: &P, pi: &[f64]) -> Vec<f64> {
    let mut mu = vec![0.0; p.dim()];
    for (v, &m) in pi.iter().enumerate() {
        for (j, c) in mu.iter_mut().enumerate() {
            *c += m * p.coord(v, j);
        }
    }
    mu
}

/// Variance of a scalar valuation in any numeric mode.
pub fn variance_exact<S: Scalar>(x: &[S], pi: &[S]) -> S {
    let mut mean = S::zero();
    let mut second = S::zero();
    for (xv, pv) in x.iter().zip(pi) {
        mean = mean + pv.clone() * xv.clone();
        second = second + pv.clone() * xv.clone() * xv.clone();
    }
    second - mean.clone() * mean
}

#[derive(Debug, Clone, PartialEq)]
pub struct LipschitzReport {
    pub ok: bool,
    /// Most stretched edge, `None` for edgeless graphs.
    pub worst_edge: Option<(usize, usize)>,
    pub worst_stretch: f64,
}

/// Checks `|y_u - y_v| <= 1 + tol` on every edge.
pub fn lipschitz_check<P: Points + ?Sized>(p: &P, g: &WeightedGraph, tol: f64) -> Result<LipschitzReport> {
    check_len(p, g)?;
    if !(tol >= 0.0) {
        return Err(Error::InvalidArgument(format!("tolerance must be non-negative, got {tol}")));
    }
    let mut worst_edge = None;
    let mut worst = 0.0f64;
    for &(u, v) in g.edges() {
        let s = p.dist2(u, v).sqrt();
        if worst_edge.is_none() || s > worst {
            worst = s;
            worst_edge = Some((u, v));
        }
    }
    Ok(LipschitzReport { ok: worst <= 1.0 + tol, worst_edge, worst_stretch: worst })
}

/// `E_v max_{u ~ v} (x_u - x_v)^2`.
pub fn lambda_numerator(x: &[f64], g: &WeightedGraph) -> f64 {
    let pi = g.pi();
    (0..g.n())
        .map(|v| {
            let m = g.neighbors(v).iter().map(|&u| (x[u] - x[v]).powi(2)).fold(0.0, f64::max);
            pi[v] * m
        })
        .sum()
}

/// The quotient `E_v max_{u ~ v} (x_u - x_v)^2 / Var_pi(x)`.
pub fn lambda_objective(x: &Embedding1D, g: &WeightedGraph) -> Result<f64> {
    check_len(x, g)?;
    let var = variance(x, g)?;
    if var <= 0.0 {
        return Err(Error::DegenerateValuation);
    }
    Ok(lambda_numerator(&x.x, g) / var)
}

/// Same quotient over an arbitrary numeric mode.
pub fn lambda_objective_exact<S: Scalar>(x: &[S], pi: &[S], g: &WeightedGraph) -> Result<S> {
    if x.len() != g.n() || pi.len() != g.n() {
        return Err(Error::DimensionMismatch { expected: g.n(), got: x.len() });
    }
    let var = variance_exact(x, pi);
    if var <= S::zero() {
        return Err(Error::DegenerateValuation);
    }
    let mut num = S::zero();
    for v in 0..g.n() {
        let mut best = S::zero();
        for &u in g.neighbors(v) {
            let d = x[u].clone() - x[v].clone();
            let d2 = d.clone() * d;
            if d2 > best {
                best = d2;
            }
        }
        num = num + pi[v].clone() * best;
    }
    Ok(num / var)
}

/// Variance difference of two valuations that agree up to isometry on each
/// block, expressed through block barycenters.
pub fn variance_delta<P: Points + ?Sized>(y: &P, y2: &P, blocks: &[Vec<usize>], g: &WeightedGraph) -> Result<f64> {
    check_len(y, g)?;
    check_len(y2, g)?;
    if y.dim() != y2.dim() {
        return Err(Error::DimensionMismatch { expected: y.dim(), got: y2.dim() });
    }
    let mut seen = vec![false; g.n()];
    for block in blocks {
        for &v in block {
            if v >= g.n() || seen[v] {
                return Err(Error::InvalidArgument("blocks must partition the vertex set".into()));
            }
            seen[v] = true;
        }
    }
    if seen.iter().any(|s| !s) {
        return Err(Error::InvalidArgument("blocks must partition the vertex set".into()));
    }
    for (b, block) in blocks.iter().enumerate() {
        for (i, &u) in block.iter().enumerate() {
            for &v in &block[i + 1..] {
                let d1 = y.dist2(u, v).sqrt();
                let d2 = y2.dist2(u, v).sqrt();
                if (d1 - d2).abs() > 1e-9 * (1.0 + d1.max(d2)) {
                    return Err(Error::IsometryViolated { block: b, u, v });
                }
            }
        }
    }
    let pi = g.pi();
    let summary = |p: &P| -> Vec<(f64, Vec<f64>)> {
        blocks
            .iter()
            .map(|block| {
                let mass: f64 = block.iter().map(|&v| pi[v]).sum();
                let mut mu = vec![0.0; p.dim()];
                if mass > 0.0 {
                    for &v in block {
                        for (j, c) in mu.iter_mut().enumerate() {
                            *c += pi[v] * p.coord(v, j) / mass;
                        }
                    }
                }
                (mass, mu)
            })
            .collect()
    };
    let a = summary(y);
    let b = summary(y2);
    let dist2 = |p: &[f64], q: &[f64]| -> f64 { p.iter().zip(q).map(|(s, t)| (s - t).powi(2)).sum() };
    let mut total = 0.0;
    for i in 0..blocks.len() {
        for j in i + 1..blocks.len() {
            let w = a[i].0 * a[j].0;
            if w == 0.0 {
                continue;
            }
            total += w * (dist2(&a[i].1, &a[j].1) - dist2(&b[i].1, &b[j].1));
        }
    }
    Ok(total)
}

fn membership(s: &[usize], g: &WeightedGraph) -> Result<Vec<bool>> {
    let mut inside = vec![false; g.n()];
    for &v in s {
        if v >= g.n() {
            return Err(Error::InvalidArgument(format!("vertex {v} out of range")));
        }
        inside[v] = true;
    }
    let count = inside.iter().filter(|&&b| b).count();
    if count == 0 || count == g.n() {
        return Err(Error::ImproperSubset);
    }
    Ok(inside)
}

/// `N(S) ∪ N(V \ S)`: every vertex with a neighbor on the other side.
pub fn vertex_boundary(s: &[usize], g: &WeightedGraph) -> Result<Vec<usize>> {
    let inside = membership(s, g)?;
    Ok((0..g.n()).filter(|&v| g.neighbors(v).iter().any(|&u| inside[u] != inside[v])).collect())
}

/// `pi(boundary) / min(pi(S), pi(V \ S))` in any numeric mode.
pub fn expansion_of_set_in<S: Scalar>(s: &[usize], g: &WeightedGraph) -> Result<S> {
    let masses = S::masses(g).ok_or(Error::RequiresExactMasses)?;
    let inside = membership(s, g)?;
    let boundary = vertex_boundary(s, g)?;
    let mut bd = S::zero();
    for v in boundary {
        bd = bd + masses[v].clone();
    }
    let mut ins = S::zero();
    let mut out = S::zero();
    for (v, m) in masses.iter().enumerate() {
        if inside[v] {
            ins = ins + m.clone();
        } else {
            out = out + m.clone();
        }
    }
    let denom = if ins < out { ins } else { out };
    if denom.is_zero() {
        return Err(Error::InvalidArgument("one side of the cut has zero mass".into()));
    }
    Ok(bd / denom)
}

pub fn expansion_of_set(s: &[usize], g: &WeightedGraph) -> Result<f64> {
    expansion_of_set_in::<f64>(s, g)
}

pub fn expansion_of_set_exact(s: &[usize], g: &WeightedGraph) -> Result<Rational> {
    expansion_of_set_in::<Rational>(s, g)
}
