//! Spread constant of stars.
//!
//! All leaves of an optimal valuation sit at unit distance from the center,
//! so the value is `4 pi_- pi_+ + (1 - pi_0) pi_0` maximized over leaf
//! splits, i.e. the split closest to balanced.

use crate::error::{Error, Result};
use crate::graph::StarGraph;
use crate::report::{SolveReport, Status, Witness};
use crate::scalar::{common_denominator, to_integer_weights, Rational, Scalar};
use crate::subset::SubsetSums;

/// `4 pm pp + (1 - p0) p0`.
pub fn star_spread_value<S: Scalar>(pm: S, pp: S, p0: S) -> S {
    let four = S::from_usize(4);
    four * pm * pp + (S::one() - p0.clone()) * p0
}

fn witness(leaf_plus: &[bool]) -> Vec<f64> {
    let mut x = vec![0.0];
    x.extend(leaf_plus.iter().map(|&p| if p { 1.0 } else { -1.0 }));
    x
}

pub fn star_spread_exact(s: &StarGraph) -> Result<SolveReport> {
    let leaves = s.leaf_count();
    if let Some(pi) = s.pi_exact() {
        if let Some(den) = common_denominator(pi) {
            if let Some(w) = to_integer_weights(pi, den) {
                let table = SubsetSums::new(&w[1..])?;
                let total = table.total();
                let p = table.best_at_most(total / 2).expect("0 is reachable");
                let used = table.witness(p).expect("reachable");
                let d = Rational::from_integer((den as i64).into());
                let pm = Rational::from_integer((p as i64).into()) / &d;
                let pp = Rational::from_integer(((total - p) as i64).into()) / &d;
                let value = star_spread_value(pm, pp, pi[0].clone());
                return Ok(SolveReport::exact(value, Witness::Valuation(witness(&used)))
                    .diag("balanced", 2 * p == total));
            }
        }
    }
    if leaves > 24 {
        return Err(Error::BudgetExceeded { what: "leaf split enumeration", needed: 1u128 << leaves.min(120), budget: 1 << 24 });
    }
    let lm = s.leaf_masses();
    let total: f64 = lm.iter().sum();
    let mut best = (f64::NEG_INFINITY, 0u64);
    for mask in 0u64..(1u64 << leaves) {
        let minus: f64 = (0..leaves).filter(|&k| mask >> k & 1 == 1).map(|k| lm[k]).sum();
        let v = star_spread_value(minus, total - minus, s.center_mass());
        if v > best.0 {
            best = (v, mask);
        }
    }
    let used: Vec<bool> = (0..leaves).map(|k| best.1 >> k & 1 == 1).collect();
    Ok(SolveReport::new(best.0, Witness::Valuation(witness(&used)), Status::Exact))
}
