//! `(1 + eps)`-approximation of lambda-infinity on stars.
//!
//! Leaf masses are rounded down to multiples of `delta = eps^2 / (grid n)`,
//! the reachable signed balances of the rounded masses are tabulated per
//! special leaf, and the special leaf's value is searched on a grid of step
//! `eps^2 / grid`. Each balance keeps the first sign pattern that reached it;
//! candidates are scored with that pattern's true balance, so every reported
//! value is attained by an actual valuation.

use std::collections::BTreeMap;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::graph::StarGraph;
use crate::lambda::star::{better, star_critical_points, star_quotient};
use crate::report::{SolveReport, Status, Witness};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FptasOptions {
    /// Grid constant; the balance step is `eps^2 / (grid n)`.
    pub grid: f64,
    /// Cap on stored balance entries across all layers.
    pub max_entries: usize,
}

impl Default for FptasOptions {
    fn default() -> Self {
        FptasOptions { grid: 100.0, max_entries: 20_000_000 }
    }
}

/// Reachable rounded balances with one sign pattern each.
#[derive(Debug, Clone)]
pub struct StarBalanceTable {
    pub delta: f64,
    /// Rounded leaf masses in units of `delta`.
    pub units: Vec<i64>,
    /// `layers[j]` maps each reachable sum to the sign that first reached it.
    layers: Vec<BTreeMap<i64, i8>>,
    order: Vec<usize>,
}

impl StarBalanceTable {
    fn build(units: &[i64], order: Vec<usize>, delta: f64, max_entries: usize) -> Result<Self> {
        let mut layers = vec![BTreeMap::from([(0i64, 0i8)])];
        let mut stored = 1usize;
        for &k in &order {
            let prev = layers.last().expect("non-empty");
            let mut next = BTreeMap::new();
            for &sum in prev.keys() {
                next.entry(sum + units[k]).or_insert(1i8);
                next.entry(sum - units[k]).or_insert(-1i8);
            }
            stored += next.len();
            if stored > max_entries {
                return Err(Error::BudgetExceeded {
                    what: "star balance table",
                    needed: stored as u128,
                    budget: max_entries as u128,
                });
            }
            layers.push(next);
        }
        Ok(StarBalanceTable { delta, units: units.to_vec(), layers, order })
    }

    pub fn reachable(&self) -> impl Iterator<Item = i64> + '_ {
        self.layers.last().expect("non-empty").keys().copied()
    }

    /// Sign of every leaf in `order` for the stored pattern reaching `sum`.
    pub fn signs(&self, mut sum: i64) -> Vec<(usize, i8)> {
        let mut out = Vec::with_capacity(self.order.len());
        for j in (1..self.layers.len()).rev() {
            let s = self.layers[j][&sum];
            let k = self.order[j - 1];
            out.push((k, s));
            sum -= s as i64 * self.units[k];
        }
        debug_assert_eq!(sum, 0);
        out.reverse();
        out
    }
}

pub fn star_fptas(s: &StarGraph, eps: f64) -> Result<SolveReport> {
    star_fptas_with(s, eps, FptasOptions::default())
}

pub fn star_fptas_with(s: &StarGraph, eps: f64, opts: FptasOptions) -> Result<SolveReport> {
    let pi = s.pi();
    let min_pi = pi.iter().cloned().fold(f64::INFINITY, f64::min);
    if !(eps > 0.0 && eps < 0.1f64.min(min_pi)) {
        return Err(Error::InvalidArgument(format!("eps must lie in (0, min(0.1, min pi) = {}), got {eps}", 0.1f64.min(min_pi))));
    }
    let n = s.n();
    let leaves = s.leaf_count();
    let pi0 = s.center_mass();
    if leaves == 1 {
        let value = 1.0 / (pi0 * pi[1]);
        return Ok(SolveReport::new(value, Witness::Valuation(vec![0.0, 1.0]), Status::Approx { eps }));
    }
    let delta = eps * eps / (opts.grid * n as f64);
    let steps = (opts.grid / (eps * eps)).ceil();
    if steps > 1e15 {
        return Err(Error::InvalidArgument("grid too fine".into()));
    }
    let steps = steps as i64;
    let lm = s.leaf_masses();
    let units: Vec<i64> = lm.iter().map(|&p| (p / delta).floor() as i64).collect();

    let per_leaf: Vec<Result<Option<(f64, f64, usize, Vec<i8>, usize)>>> = (0..leaves)
        .into_par_iter()
        .map(|i| {
            let order: Vec<usize> = (0..leaves).filter(|&k| k != i).collect();
            let table = StarBalanceTable::build(&units, order, delta, opts.max_entries)?;
            let a = lm[i];
            let mut best: Option<(f64, f64, Vec<i8>)> = None;
            let mut count = 0usize;
            for sum in table.reachable() {
                count += 1;
                let pattern = table.signs(sum);
                let d: f64 = pattern.iter().map(|&(k, sg)| sg as f64 * lm[k]).sum();
                let mut cands = vec![-steps, 0, steps];
                for r in star_critical_points(pi0, a, d) {
                    let t = r * steps as f64;
                    cands.push(t.floor() as i64);
                    cands.push(t.ceil() as i64);
                }
                for j in cands {
                    let j = j.clamp(-steps, steps);
                    let y = j as f64 / steps as f64;
                    if let Some(v) = star_quotient(pi0, a, d, y) {
                        if better(v, y, best.as_ref().map(|b| (b.0, b.1))) {
                            let mut signs = vec![0i8; leaves];
                            for &(k, sg) in &pattern {
                                signs[k] = sg;
                            }
                            best = Some((v, y, signs));
                        }
                    }
                }
            }
            Ok(best.map(|(v, y, signs)| (v, y, i, signs, count)))
        })
        .collect();

    let mut best: Option<(f64, f64, usize, Vec<i8>)> = None;
    let mut balances = 0usize;
    for r in per_leaf {
        if let Some((v, y, i, signs, count)) = r? {
            balances += count;
            if better(v, y, best.as_ref().map(|b| (b.0, b.1))) {
                best = Some((v, y, i, signs));
            }
        }
    }
    let (value, y, i, signs) = best.ok_or(Error::DegenerateValuation)?;
    let mut x = vec![0.0; n];
    for k in 0..leaves {
        x[k + 1] = if k == i { y } else { signs[k] as f64 };
    }
    Ok(SolveReport::new(value, Witness::Valuation(x), Status::Approx { eps })
        .diag("delta", delta)
        .diag("y_step", 1.0 / steps as f64)
        .diag("special_leaf", i + 1)
        .diag("balances", balances))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::embedding::Embedding1D;
    use crate::graph::GraphOptions;
    use crate::lambda::star::star_exact;
    use crate::objective::lambda_objective;
    use crate::scalar::rational;

    fn star(p: &[(i64, i64)]) -> StarGraph {
        StarGraph::from_rational(p.iter().map(|&(a, b)| rational(a, b)).collect(), GraphOptions::default()).unwrap()
    }

    #[test]
    fn examples() {
        let r = star_fptas(&star(&[(1, 2), (1, 4), (1, 4)]), 0.01).unwrap();
        assert!(r.value >= 2.0 - 1e-12 && r.value <= 2.02, "{}", r.value);

        let s = star(&[(1, 2), (1, 6), (1, 6), (1, 6)]);
        let r = star_fptas(&s, 0.01).unwrap();
        assert!(r.value >= 2.0 + 1.0 / 54.0 - 1e-12, "{}", r.value);

        let r = star_fptas(&star(&[(1, 3), (1, 3), (1, 3)]), 0.05).unwrap();
        assert!(r.value >= 1.5 - 1e-12 && r.value <= 1.575);
    }

    #[test]
    fn witness_attains_value() {
        let s = star(&[(1, 5), (1, 10), (3, 10), (1, 5), (1, 5)]);
        let r = star_fptas(&s, 0.02).unwrap();
        let x = Embedding1D::new(r.valuation().unwrap().to_vec()).unwrap();
        assert!((lambda_objective(&x, &s).unwrap() - r.value).abs() <= 1e-12 * r.value);
        let exact = star_exact(&s).unwrap().value;
        assert!(r.value >= exact - 1e-12 && r.value <= 1.02 * exact);
    }

    #[test]
    fn rejects_bad_eps() {
        let s = star(&[(1, 2), (1, 4), (1, 4)]);
        assert!(star_fptas(&s, 0.0).is_err());
        assert!(star_fptas(&s, 0.1).is_err());
        let skinny = star(&[(1, 2), (1, 100), (49, 100)]);
        assert!(star_fptas(&skinny, 0.05).is_err());
    }

    #[test]
    fn table_signs_reconstruct_sums() {
        let units = vec![3, 5, 8, 1];
        let t = StarBalanceTable::build(&units, vec![0, 1, 2, 3], 1.0, 1000).unwrap();
        for sum in t.reachable().collect::<Vec<_>>() {
            let got: i64 = t.signs(sum).iter().map(|&(k, s)| s as i64 * units[k]).sum();
            assert_eq!(got, sum);
        }
    }
}
