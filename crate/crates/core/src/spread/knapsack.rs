//! Sign knapsack: choose `s_b = ±1` to make `|sum_b s_b m_b|` small.

use crate::error::{Error, Result};
use crate::subset::{SubsetSums, DEFAULT_BIT_BUDGET};

/// Signs and the true `|sum_b s_b m_b|` they achieve.
#[derive(Debug, Clone, PartialEq)]
pub struct SignChoice {
    pub signs: Vec<i8>,
    pub value: f64,
    /// Scale `Q` used for rounding, `None` when solved by enumeration.
    pub scale: Option<f64>,
}

fn validate(moments: &[f64], eps_abs: f64) -> Result<()> {
    if !(eps_abs > 0.0) || !eps_abs.is_finite() {
        return Err(Error::InvalidArgument(format!("eps_abs must be positive, got {eps_abs}")));
    }
    if moments.iter().any(|m| !(m.is_finite() && *m >= 0.0)) {
        return Err(Error::InvalidArgument("moments must be finite and non-negative".into()));
    }
    Ok(())
}

fn signed_value(moments: &[f64], signs: &[i8]) -> f64 {
    moments.iter().zip(signs).map(|(m, &s)| s as f64 * m).sum::<f64>().abs()
}

/// Rounded dynamic program: moments are scaled by `Q = 2 m / eps_abs`
/// (`m` = count), floored, and the signed sum closest to zero is found over
/// the integer subset sums. Each floor loses less than `1/Q`, so the result
/// is within `eps_abs` of the optimum. Falls back to enumeration when the
/// table would exceed its budget.
pub fn knapsack_min_abs(moments: &[f64], eps_abs: f64) -> Result<SignChoice> {
    validate(moments, eps_abs)?;
    match knapsack_dp(moments, eps_abs) {
        Err(Error::BudgetExceeded { .. }) if moments.len() <= 24 => Ok(knapsack_exhaustive(moments)),
        other => other,
    }
}

/// Uses enumeration when `2^m` is cheaper than the rounded table.
pub fn knapsack_min_abs_auto(moments: &[f64], eps_abs: f64) -> Result<SignChoice> {
    validate(moments, eps_abs)?;
    let m = moments.len();
    let total: f64 = moments.iter().sum();
    let table_bits = (m as f64 + 1.0) * (2.0 * m as f64 / eps_abs * total + 1.0);
    if m <= 24 && ((1u64 << m) as f64) * (m as f64) <= table_bits / 64.0 {
        return Ok(knapsack_exhaustive(moments));
    }
    knapsack_min_abs(moments, eps_abs)
}

pub fn knapsack_dp(moments: &[f64], eps_abs: f64) -> Result<SignChoice> {
    validate(moments, eps_abs)?;
    let m = moments.len();
    if m == 0 {
        return Ok(SignChoice { signs: Vec::new(), value: 0.0, scale: None });
    }
    let q = 2.0 * m as f64 / eps_abs;
    let total_f: f64 = moments.iter().map(|x| (x * q).floor()).sum();
    if total_f > (DEFAULT_BIT_BUDGET as f64) {
        return Err(Error::BudgetExceeded { what: "sign knapsack table", needed: total_f as u128, budget: DEFAULT_BIT_BUDGET });
    }
    let r: Vec<u64> = moments.iter().map(|x| (x * q).floor() as u64).collect();
    let table = SubsetSums::new(&r)?;
    let total = table.total();
    let lo = table.best_at_most(total / 2).expect("0 is reachable");
    let hi = table.best_at_least(total.div_ceil(2));
    let p = match hi {
        Some(h) if (2 * h - total) < (total - 2 * lo) => h,
        _ => lo,
    };
    let used = table.witness(p).expect("reachable");
    let signs: Vec<i8> = used.iter().map(|&u| if u { 1 } else { -1 }).collect();
    Ok(SignChoice { value: signed_value(moments, &signs), signs, scale: Some(q) })
}

/// Exact minimum over all `2^m` sign patterns (first sign fixed to `+1`).
pub fn knapsack_exhaustive(moments: &[f64]) -> SignChoice {
    let m = moments.len();
    if m == 0 {
        return SignChoice { signs: Vec::new(), value: 0.0, scale: None };
    }
    assert!(m <= 30, "too many moments for enumeration");
    let mut signs = vec![1i8; m];
    let mut sum: f64 = moments.iter().sum();
    let mut best = (sum.abs(), 0u64);
    let mut mask = 0u64;
    for i in 1u64..(1u64 << (m - 1)) {
        let bit = i.trailing_zeros() as usize;
        mask ^= 1 << bit;
        let j = bit + 1;
        signs[j] = -signs[j];
        sum += 2.0 * signs[j] as f64 * moments[j];
        if sum.abs() < best.0 {
            best = (sum.abs(), mask);
        }
    }
    let signs: Vec<i8> = (0..m).map(|j| if j > 0 && best.1 >> (j - 1) & 1 == 1 { -1 } else { 1 }).collect();
    SignChoice { value: signed_value(moments, &signs), signs, scale: None }
}
