//! Exact subset-sum tables over integer weights, with witness recovery.

use crate::error::{Error, Result};

/// Default cap on table size, in bits.
pub const DEFAULT_BIT_BUDGET: u128 = 1 << 28;

/// Layer `j` marks the sums reachable with the first `j` items.
#[derive(Debug, Clone)]
pub struct SubsetSums {
    weights: Vec<u64>,
    total: u64,
    words: usize,
    layers: Vec<Vec<u64>>,
}

impl SubsetSums {
    pub fn new(weights: &[u64]) -> Result<Self> {
        Self::with_budget(weights, DEFAULT_BIT_BUDGET)
    }

    pub fn with_budget(weights: &[u64], budget_bits: u128) -> Result<Self> {
        let total: u64 = weights.iter().try_fold(0u64, |acc, &w| acc.checked_add(w)).ok_or(Error::BudgetExceeded {
            what: "subset-sum table",
            needed: u128::MAX,
            budget: budget_bits,
        })?;
        let needed = (weights.len() as u128 + 1) * (total as u128 + 1);
        if needed > budget_bits {
            return Err(Error::BudgetExceeded { what: "subset-sum table", needed, budget: budget_bits });
        }
        let words = (total as usize + 1).div_ceil(64);
        let mut layers = Vec::with_capacity(weights.len() + 1);
        let mut cur = vec![0u64; words];
        cur[0] = 1;
        layers.push(cur.clone());
        for &w in weights {
            let mut next = cur.clone();
            shl_or(&mut next, &cur, w as usize);
            layers.push(next.clone());
            cur = next;
        }
        Ok(SubsetSums { weights: weights.to_vec(), total, words, layers })
    }

    pub fn total(&self) -> u64 {
        self.total
    }

    pub fn reachable(&self, sum: u64) -> bool {
        sum <= self.total && bit(self.layers.last().expect("at least one layer"), sum as usize)
    }

    /// Whether `sum` is reachable with the first `items` weights only.
    pub fn reachable_with(&self, items: usize, sum: u64) -> bool {
        sum <= self.total && bit(&self.layers[items], sum as usize)
    }

    /// All reachable sums in increasing order.
    pub fn sums(&self) -> Vec<u64> {
        (0..=self.total).filter(|&s| self.reachable(s)).collect()
    }

    /// Largest reachable sum `<= target`.
    pub fn best_at_most(&self, target: u64) -> Option<u64> {
        (0..=target.min(self.total)).rev().find(|&s| self.reachable(s))
    }

    /// Smallest reachable sum `>= target`.
    pub fn best_at_least(&self, target: u64) -> Option<u64> {
        (target..=self.total).find(|&s| self.reachable(s))
    }

    /// Membership flags of a subset with the given sum; prefers earlier items.
    pub fn witness(&self, sum: u64) -> Option<Vec<bool>> {
        if !self.reachable(sum) {
            return None;
        }
        let mut used = vec![false; self.weights.len()];
        let mut s = sum as usize;
        for j in (0..self.weights.len()).rev() {
            if !bit(&self.layers[j], s) {
                used[j] = true;
                s -= self.weights[j] as usize;
            }
        }
        debug_assert_eq!(s, 0);
        Some(used)
    }

    pub fn words(&self) -> usize {
        self.words
    }
}

fn bit(words: &[u64], i: usize) -> bool {
    words[i / 64] >> (i % 64) & 1 == 1
}

/// `dst |= src << shift` over little-endian word arrays of equal length.
fn shl_or(dst: &mut [u64], src: &[u64], shift: usize) {
    let n = dst.len();
    let (ws, bs) = (shift / 64, shift % 64);
    if ws >= n {
        return;
    }
    for i in (ws..n).rev() {
        let mut v = src[i - ws] << bs;
        if bs > 0 && i > ws {
            v |= src[i - ws - 1] >> (64 - bs);
        }
        dst[i] |= v;
    }
}

/// Enumerates all `2^m` subsets in Gray-code order, calling `f(mask, sum)`.
pub fn for_each_subset_sum(weights: &[u64], mut f: impl FnMut(u64, u64)) {
    let m = weights.len();
    assert!(m < 64);
    let mut mask = 0u64;
    let mut sum = 0u64;
    f(0, 0);
    for i in 1u64..(1u64 << m) {
        let bit = i.trailing_zeros() as usize;
        mask ^= 1 << bit;
        if mask >> bit & 1 == 1 {
            sum += weights[bit];
        } else {
            sum -= weights[bit];
        }
        f(mask, sum);
    }
}
