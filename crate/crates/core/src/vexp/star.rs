//! Vertex expansion of a weighted star.
//!
//! Up to swapping sides, a cut is a nonempty leaf set `T` against the rest.
//! Every vertex of `T` and the center lie on the boundary, so the value is
//! `(s + pi_0) / min(s, 1 - s)` with `s = pi(T)`. It decreases in `s` below
//! one half and increases above, so only the reachable leaf sums nearest to
//! one half can win; a subset-sum table finds them exactly.

use num::Zero;

use crate::error::{Error, Result};
use crate::graph::StarGraph;
use crate::report::{SolveReport, Witness};
use crate::scalar::{common_denominator, to_integer_weights, Rational};
use crate::subset::SubsetSums;

/// Lexicographically smallest set of leaf indices (0-based) with the given
/// sum. `suffix.reachable` at layer `t` covers the last `t` items.
fn lex_smallest(weights: &[u64], suffix: &SubsetSums, mut target: u64) -> Vec<usize> {
    let m = weights.len();
    let mut out = Vec::new();
    let mut j = 0;
    while target > 0 {
        // Smallest j whose removal leaves a sum reachable from items after j.
        while !(weights[j] <= target && suffix.reachable_with(m - 1 - j, target - weights[j])) {
            j += 1;
        }
        out.push(j);
        target -= weights[j];
        j += 1;
    }
    out
}

pub fn vexp_star_weighted(s: &StarGraph) -> Result<SolveReport> {
    let pi = s.pi_exact().ok_or(Error::RequiresExactMasses)?;
    let den = common_denominator(pi).ok_or(Error::RequiresExactMasses)?;
    let w = to_integer_weights(pi, den).ok_or(Error::RequiresExactMasses)?;
    let leaves = &w[1..];
    let total = den;
    let center = w[0];
    let forward = SubsetSums::new(leaves)?;
    let reversed: Vec<u64> = leaves.iter().rev().copied().collect();
    let suffix = SubsetSums::new(&reversed)?;

    // Value of leaf mass s as (numerator, denominator) in units of 1/den.
    let value = |s: u64| -> Option<(u128, u128)> {
        let side = s.min(total - s);
        (side > 0).then(|| ((s + center) as u128, side as u128))
    };
    let mut best: Option<(u128, u128)> = None;
    let mut winners: Vec<u64> = Vec::new();
    let half_lo = total / 2;
    let mut cands: Vec<u64> = Vec::new();
    if center.is_zero() {
        // Flat below one half: every reachable sum there ties.
        cands.extend(forward.sums().into_iter().filter(|&x| 2 * x <= total));
    } else if let Some(x) = forward.best_at_most(half_lo) {
        cands.push(x);
    }
    if let Some(x) = forward.best_at_least(total.div_ceil(2)) {
        cands.push(x);
    }
    for x in cands {
        let Some((num, d)) = value(x) else { continue };
        match best {
            Some((bn, bd)) if num * bd > bn * d => {}
            Some((bn, bd)) if num * bd == bn * d => winners.push(x),
            _ => {
                best = Some((num, d));
                winners = vec![x];
            }
        }
    }
    let (num, d) = best.ok_or_else(|| Error::InvalidArgument("every cut has a side of zero mass".into()))?;
    let leaf_total: u64 = leaves.iter().sum();
    // Normalized witness: the side holding the center, i.e. {0} plus the
    // leaves outside T.
    let witness = winners
        .into_iter()
        .map(|x| {
            let outside = lex_smallest(leaves, &suffix, leaf_total - x);
            std::iter::once(0).chain(outside.into_iter().map(|j| j + 1)).collect::<Vec<usize>>()
        })
        .min()
        .expect("at least one winner");
    let q = Rational::new(num.into(), d.into());
    Ok(SolveReport::exact(q, Witness::VertexSet(witness)))
}
