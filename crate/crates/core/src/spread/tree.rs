//! `(1 + eps)`-approximation of the spread constant of a tree.
//!
//! An optimal valuation is `y_u = s_b d(v, u)` for some root `v` and one
//! sign per branch `b` at `v`. For a fixed root `E y^2` is fixed and
//! `E y = sum_b s_b m_b` with branch moments `m_b`, so each root is a sign
//! knapsack.

use num::Zero;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::graph::TreeGraph;
use crate::objective::variance_exact;
use crate::report::{SolveReport, Status, Witness};
use crate::scalar::Rational;
use crate::spread::knapsack::{knapsack_min_abs_auto, knapsack_exhaustive};

/// Distances and branch labels seen from one root.
struct RootView {
    dist: Vec<usize>,
    /// Index of the branch containing each vertex (`usize::MAX` at the root).
    branch: Vec<usize>,
    moments: Vec<f64>,
    second: f64,
}

fn view(t: &TreeGraph, v: usize) -> RootView {
    let n = t.n();
    let dist = t.distances_from(v);
    let mut branch = vec![usize::MAX; n];
    for (b, &u) in t.neighbors(v).iter().enumerate() {
        let mut stack = vec![(u, v)];
        while let Some((w, from)) = stack.pop() {
            branch[w] = b;
            for &x in t.neighbors(w) {
                if x != from {
                    stack.push((x, w));
                }
            }
        }
    }
    let pi = t.pi();
    let mut moments = vec![0.0; t.degree(v)];
    let mut second = 0.0;
    for w in 0..n {
        if w != v {
            moments[branch[w]] += pi[w] * dist[w] as f64;
            second += pi[w] * (dist[w] * dist[w]) as f64;
        }
    }
    RootView { dist, branch, moments, second }
}

fn valuation(view: &RootView, signs: &[i8]) -> Vec<i64> {
    (0..view.dist.len())
        .map(|w| if view.branch[w] == usize::MAX { 0 } else { signs[view.branch[w]] as i64 * view.dist[w] as i64 })
        .collect()
}

/// Greedy sign assignment: largest moment first, into the lighter side.
fn greedy_imbalance(m: &[f64]) -> f64 {
    let mut sorted = m.to_vec();
    sorted.sort_by(|a, b| b.total_cmp(a));
    let (mut plus, mut minus) = (0.0, 0.0);
    for x in sorted {
        if plus <= minus {
            plus += x;
        } else {
            minus += x;
        }
    }
    (plus - minus).abs()
}

pub fn tree_spread_fptas(t: &TreeGraph, eps: f64) -> Result<SolveReport> {
    if !(eps > 0.0) || !eps.is_finite() {
        return Err(Error::InvalidArgument(format!("eps must be positive, got {eps}")));
    }
    let n = t.n();
    if n == 1 {
        let exact = t.pi_exact().map(|_| Rational::zero());
        return Ok(SolveReport::new(0.0, Witness::Valuation(vec![0.0]), Status::Approx { eps }).with_exact(exact));
    }
    let views: Vec<RootView> = (0..n).map(|v| view(t, v)).collect();
    let lower = views
        .iter()
        .map(|rv| {
            let g = greedy_imbalance(&rv.moments);
            rv.second - g * g
        })
        .fold(0.0, f64::max);
    // The loss from an additive knapsack error e is at most 3 e sum(m), and
    // with e = eps L / (4 sum m) that is within a 1/(1+eps) factor once eps <= 1/3.
    let eps_eff = eps.min(1.0 / 3.0);

    let per_root: Vec<Result<(f64, Vec<i64>)>> = views
        .par_iter()
        .map(|rv| {
            let total: f64 = rv.moments.iter().sum();
            let choice = if total > 0.0 && lower > 0.0 {
                knapsack_min_abs_auto(&rv.moments, eps_eff * lower / (4.0 * total))?
            } else {
                knapsack_exhaustive(&rv.moments[..rv.moments.len().min(20)])
            };
            let mut signs = choice.signs;
            signs.resize(rv.moments.len(), 1);
            let y = valuation(rv, &signs);
            let yf: Vec<f64> = y.iter().map(|&c| c as f64).collect();
            Ok((variance_exact(&yf, t.pi()), y))
        })
        .collect();

    let mut best: Option<(f64, usize, Vec<i64>)> = None;
    for (v, r) in per_root.into_iter().enumerate() {
        let (val, y) = r?;
        if best.as_ref().is_none_or(|b| val > b.0 + 1e-15 * b.0.abs()) {
            best = Some((val, v, y));
        }
    }
    let (value, root, y) = best.expect("n >= 2");
    let exact = t.pi_exact().map(|p| {
        let yq: Vec<Rational> = y.iter().map(|&c| Rational::from_integer(c.into())).collect();
        variance_exact(&yq, p)
    });
    let yf: Vec<f64> = y.iter().map(|&c| c as f64).collect();
    Ok(SolveReport::new(value, Witness::Valuation(yf), Status::Approx { eps })
        .with_exact(exact)
        .diag("root", root)
        .diag("lower_bound", lower))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{path_edges, GraphOptions, StarGraph, WeightedGraph};
    use crate::scalar::rational;
    use crate::spread::abs::abs_oracle;

    fn tree(n: usize, edges: &[(usize, usize)]) -> TreeGraph {
        TreeGraph::new(WeightedGraph::uniform(n, edges).unwrap()).unwrap()
    }

    #[test]
    fn examples() {
        let p3 = tree(3, &path_edges(3));
        let r = tree_spread_fptas(&p3, 1e-3).unwrap();
        assert!(r.value >= (2.0 / 3.0) / 1.001);

        let s = StarGraph::from_rational(
            vec![rational(1, 2), rational(1, 8), rational(1, 8), rational(1, 4)],
            GraphOptions::default(),
        )
        .unwrap();
        let t = TreeGraph::new(s.into_graph()).unwrap();
        let r = tree_spread_fptas(&t, 1e-3).unwrap();
        assert!(r.value >= 0.5 / 1.001);

        let p5 = tree(5, &path_edges(5));
        let oracle = abs_oracle(&p5, 14).unwrap();
        let r = tree_spread_fptas(&p5, 1e-3).unwrap();
        assert!(r.value >= oracle.value / 1.001 && r.value <= oracle.value + 1e-12);
        assert_eq!(r.exact, oracle.exact);
    }

    #[test]
    fn single_vertex() {
        let t = tree(1, &[]);
        assert_eq!(tree_spread_fptas(&t, 0.1).unwrap().value, 0.0);
    }
}
