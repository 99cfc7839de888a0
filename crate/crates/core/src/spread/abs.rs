//! Exhaustive search over distance-to-set profiles.
//!
//! Some optimal 1-Lipschitz valuation has the form `y_v = s(C) d(U, v)`:
//! zero on a set `U`, growing at unit rate away from it, with one sign per
//! component `C` of `V \ U`. For fixed `U`, `E y^2` is sign-independent and
//! `E y = sum_C s(C) m_C`, so the search is over `U` plus a sign knapsack.

use num::Zero;

use crate::error::{Error, Result};
use crate::graph::WeightedGraph;
use crate::objective::variance_exact;
use crate::report::{SolveReport, Status, Witness};
use crate::scalar::Rational;

/// One zero set with its best signs.
#[derive(Debug, Clone, PartialEq)]
pub struct AbsProfile {
    pub zero_set: Vec<usize>,
    /// Component label per vertex, `None` on the zero set.
    pub component: Vec<Option<usize>>,
    pub signs: Vec<i8>,
    pub distance: Vec<usize>,
}

impl AbsProfile {
    pub fn valuation(&self) -> Vec<i64> {
        (0..self.distance.len())
            .map(|v| match self.component[v] {
                Some(c) => self.signs[c] as i64 * self.distance[v] as i64,
                None => 0,
            })
            .collect()
    }
}

struct Layout {
    distance: Vec<usize>,
    component: Vec<Option<usize>>,
    count: usize,
}

fn layout(g: &WeightedGraph, zero: &[usize]) -> Layout {
    let n = g.n();
    let distance: Vec<usize> = g.bfs_distances(zero).into_iter().map(|d| d.unwrap_or(usize::MAX)).collect();
    let mut keep = vec![true; n];
    for &u in zero {
        keep[u] = false;
    }
    let (labels, count) = g.components_of(&keep);
    let component = labels.into_iter().map(|l| if l == usize::MAX { None } else { Some(l) }).collect();
    Layout { distance, component, count }
}

/// Best signs for the component moments: minimizes `|sum s_C m_C|`, first
/// sign fixed to `+1`, ties to the first pattern in Gray-code order.
fn best_signs(m: &[f64]) -> (Vec<i8>, f64) {
    let c = m.len();
    if c == 0 {
        return (Vec::new(), 0.0);
    }
    let mut signs = vec![1i8; c];
    let mut sum: f64 = m.iter().sum();
    let mut best = (sum.abs(), signs.clone());
    for i in 1u64..(1u64 << (c - 1)) {
        let j = i.trailing_zeros() as usize + 1;
        signs[j] = -signs[j];
        sum += 2.0 * signs[j] as f64 * m[j];
        if sum.abs() < best.0 {
            best = (sum.abs(), signs.clone());
        }
    }
    (best.1, best.0)
}

/// Zero sets ordered by size, then lexicographically by sorted vertex list.
fn ordered_masks(n: usize) -> Vec<u64> {
    let mut masks: Vec<u64> = (1u64..(1u64 << n)).collect();
    masks.sort_by_key(|&m| {
        let verts: Vec<usize> = (0..n).filter(|&v| m >> v & 1 == 1).collect();
        (verts.len(), verts)
    });
    masks
}

fn search(g: &WeightedGraph, max_n: usize, singletons_only: bool) -> Result<(SolveReport, AbsProfile)> {
    let n = g.n();
    if n > max_n || n > 24 {
        return Err(Error::BudgetExceeded { what: "zero-set enumeration", needed: n as u128, budget: max_n.min(24) as u128 });
    }
    let pi = g.pi();
    let masks: Vec<u64> =
        if singletons_only { (0..n).map(|v| 1u64 << v).collect() } else { ordered_masks(n) };

    // Near-best candidates in tie-break order.
    let mut best = f64::NEG_INFINITY;
    let mut cands: Vec<(f64, AbsProfile)> = Vec::new();
    for mask in masks {
        let zero: Vec<usize> = (0..n).filter(|&v| mask >> v & 1 == 1).collect();
        let lay = layout(g, &zero);
        let mut m = vec![0.0; lay.count];
        let mut second = 0.0;
        for v in 0..n {
            if let Some(c) = lay.component[v] {
                let d = lay.distance[v] as f64;
                m[c] += pi[v] * d;
                second += pi[v] * d * d;
            }
        }
        let (signs, imbalance) = best_signs(&m);
        let value = second - imbalance * imbalance;
        let tol = 1e-9 * best.abs().max(1e-12);
        if value > best + tol {
            best = value;
            cands.retain(|(v, _)| *v >= best - 1e-9 * best.abs().max(1e-12));
        }
        if value >= best - tol && cands.len() < 4096 {
            cands.push((
                value,
                AbsProfile { zero_set: zero, component: lay.component, signs, distance: lay.distance },
            ));
        }
    }
    let tol = 1e-9 * best.abs().max(1e-12);
    cands.retain(|(v, _)| *v >= best - tol);

    let exact_pi = g.pi_exact();
    let (value, exact, profile) = match exact_pi {
        Some(p) => {
            let mut chosen: Option<(Rational, AbsProfile)> = None;
            for (_, prof) in cands {
                let y: Vec<Rational> = prof.valuation().into_iter().map(|c| Rational::from_integer(c.into())).collect();
                let var = variance_exact(&y, p);
                if chosen.as_ref().is_none_or(|(b, _)| var > *b) {
                    chosen = Some((var, prof));
                }
            }
            let (var, prof) = chosen.expect("at least one zero set");
            (crate::scalar::rational_to_f64(&var), Some(var), prof)
        }
        None => {
            let (v, prof) = cands.into_iter().next().expect("at least one zero set");
            (v, None, prof)
        }
    };
    let y: Vec<f64> = profile.valuation().into_iter().map(|c| c as f64).collect();
    let report = SolveReport::new(value, Witness::Valuation(y), Status::Exact)
        .with_exact(exact)
        .diag("zero_set", profile.zero_set.clone());
    Ok((report, profile))
}

/// Exact spread constant by enumerating every nonempty zero set.
pub fn abs_oracle(g: &WeightedGraph, max_n: usize) -> Result<SolveReport> {
    if g.n() == 1 {
        return Ok(trivial(g));
    }
    Ok(search(g, max_n, false)?.0)
}

/// Like [`abs_oracle`] but also returns the optimal profile.
pub fn abs_oracle_profile(g: &WeightedGraph, max_n: usize) -> Result<(SolveReport, AbsProfile)> {
    search(g, max_n, false)
}

/// Best profile whose zero set is a single vertex.
pub fn abs_singleton_best(g: &WeightedGraph) -> Result<SolveReport> {
    if g.n() == 1 {
        return Ok(trivial(g));
    }
    Ok(search(g, usize::MAX, true)?.0)
}

fn trivial(g: &WeightedGraph) -> SolveReport {
    let exact = g.pi_exact().map(|_| Rational::zero());
    SolveReport::new(0.0, Witness::Valuation(vec![0.0]), Status::Exact).with_exact(exact)
}

/// Every edge has `|y_u - y_v| = 1` exactly.
pub fn is_fully_stretched(y: &[i64], g: &WeightedGraph) -> bool {
    g.edges().iter().all(|&(u, v)| (y[u] - y[v]).abs() == 1)
}

/// Exact variance of an integer valuation.
pub fn integer_variance(y: &[i64], g: &WeightedGraph) -> Option<Rational> {
    let p = g.pi_exact()?;
    let y: Vec<Rational> = y.iter().map(|&c| Rational::from_integer(c.into())).collect();
    Some(variance_exact(&y, p))
}

/// Valuation of a report witness as integers, if it is integral.
pub fn integral_witness(r: &SolveReport) -> Option<Vec<i64>> {
    r.valuation()?.iter().map(|&c| if c.fract() == 0.0 { Some(c as i64) } else { None }).collect()
}
