//! Closed forms and exact solvers for lambda-infinity on stars.
//!
//! With the center at 0 and the largest leaf displacement scaled to 1, an
//! optimal valuation puts every leaf but one (the special leaf `i`, value
//! `y`) at `±1`. Writing `a = pi_i`, `d` for the signed mass of the other
//! leaves and `B = 1 - pi_0 - a`, the quotient becomes
//!
//! ```text
//! f(y) = (1 - a + a y^2) / (B + a y^2 - (d + a y)^2),   y in [-1, 1].
//! ```

use std::cmp::Ordering;

use num::bigint::BigInt;
use num::{Num, One, Signed, ToPrimitive};

use crate::embedding::Embedding1D;
use crate::error::{Error, Result};
use crate::graph::StarGraph;
use crate::report::{SolveReport, Witness};
use crate::scalar::{common_denominator, to_integer_weights, Rational, Scalar};
use crate::subset::{for_each_subset_sum, SubsetSums};

/// `1 / (1 - pi_0)`, the value attained by balanced binary valuations.
pub fn star_lower_bound<S: Scalar>(s: &StarGraph) -> Result<S> {
    let pi = S::masses(s.graph()).ok_or(Error::RequiresExactMasses)?;
    let rest = S::one() - pi[0].clone();
    if rest <= S::zero() {
        return Err(Error::InvalidArgument("center carries all the mass".into()));
    }
    Ok(S::one() / rest)
}

/// Integer leaf weights over the common denominator of all masses.
fn integer_masses(s: &StarGraph) -> Result<(Vec<u64>, u64)> {
    let pi = s.pi_exact().ok_or(Error::RequiresExactMasses)?;
    let den = common_denominator(pi)
        .ok_or(Error::BudgetExceeded { what: "common denominator", needed: u128::MAX, budget: 1 << 62 })?;
    let w = to_integer_weights(pi, den)
        .ok_or(Error::BudgetExceeded { what: "integer masses", needed: u128::MAX, budget: 1 << 62 })?;
    Ok((w, den))
}

/// Leaf signs (`+1` / `-1`) of a split with equal mass on both sides.
pub fn balanced_split(s: &StarGraph) -> Result<Option<Vec<i8>>> {
    let (w, _) = integer_masses(s)?;
    let leaves = &w[1..];
    let total: u64 = leaves.iter().sum();
    if total % 2 == 1 {
        return Ok(None);
    }
    let table = SubsetSums::new(leaves)?;
    Ok(table.witness(total / 2).map(|used| used.into_iter().map(|u| if u { 1 } else { -1 }).collect()))
}

/// Whether the leaves split into two halves of equal mass (exact).
pub fn star_is_tight(s: &StarGraph) -> Result<bool> {
    Ok(balanced_split(s)?.is_some())
}

/// Quotient for a fixed special leaf at `y` with other-leaf balance `d`.
pub fn star_quotient(pi0: f64, a: f64, d: f64, y: f64) -> Option<f64> {
    let num = 1.0 - a + a * y * y;
    let den = (1.0 - pi0 - a) + a * y * y - (d + a * y).powi(2);
    if den > 0.0 {
        Some(num / den)
    } else {
        None
    }
}

/// Stationary points of `star_quotient` in `y`, restricted to `[-1, 1]`.
pub fn star_critical_points(pi0: f64, a: f64, d: f64) -> Vec<f64> {
    let big_a = 1.0 - a;
    let big_b = 1.0 - pi0 - a;
    let (qa, qb, qc) = (-a * d, big_b - d * d - big_a * (1.0 - a), big_a * d);
    let mut out = Vec::new();
    if qa.abs() < 1e-300 {
        if qb.abs() > 1e-300 {
            out.push(-qc / qb);
        }
    } else {
        let disc = qb * qb - 4.0 * qa * qc;
        if disc >= 0.0 {
            let sq = disc.sqrt();
            // Numerically stable pair of roots.
            let q = -0.5 * (qb + qb.signum() * sq);
            if q != 0.0 {
                out.push(q / qa);
                out.push(qc / q);
            } else {
                out.push(0.0);
            }
        }
    }
    out.retain(|y| y.is_finite() && y.abs() <= 1.0);
    out
}

/// Best `y` in `[-1, 1]` for fixed `(a, d)`; ties go to smaller `|y|`.
fn best_y(pi0: f64, a: f64, d: f64) -> Option<(f64, f64)> {
    let mut cands = vec![-1.0, 1.0, 0.0];
    cands.extend(star_critical_points(pi0, a, d));
    let mut best: Option<(f64, f64)> = None;
    for y in cands {
        if let Some(v) = star_quotient(pi0, a, d, y) {
            if better(v, y, best) {
                best = Some((v, y));
            }
        }
    }
    best
}

pub(crate) fn better(v: f64, y: f64, best: Option<(f64, f64)>) -> bool {
    match best {
        None => true,
        Some((bv, by)) => {
            let tol = 1e-14 * bv.abs().max(1.0);
            v < bv - tol || ((v - bv).abs() <= tol && y.abs() < by.abs())
        }
    }
}

/// Signed balances `sum_k s_k pi_k` over the leaves other than `skip`, each
/// with one sign pattern realizing it.
fn balances(s: &StarGraph, skip: usize) -> Result<Vec<(f64, Vec<i8>)>> {
    let leaves = s.leaf_count();
    let others: Vec<usize> = (0..leaves).filter(|&k| k != skip).collect();
    let pi = s.leaf_masses();
    if let Ok((w, den)) = integer_masses(s) {
        let ow: Vec<u64> = others.iter().map(|&k| w[k + 1]).collect();
        if let Ok(table) = SubsetSums::new(&ow) {
            let total: u64 = ow.iter().sum();
            let mut out = Vec::new();
            for p in table.sums() {
                let used = table.witness(p).expect("reachable sum");
                let mut signs = vec![0i8; leaves];
                for (idx, &k) in others.iter().enumerate() {
                    signs[k] = if used[idx] { 1 } else { -1 };
                }
                let d = (2.0 * p as f64 - total as f64) / den as f64;
                out.push((d, signs));
            }
            return Ok(out);
        }
    }
    if others.len() > 24 {
        return Err(Error::BudgetExceeded { what: "star sign patterns", needed: 1u128 << others.len(), budget: 1 << 24 });
    }
    let mut out = Vec::with_capacity(1 << others.len());
    let unit = vec![0u64; others.len()];
    for_each_subset_sum(&unit, |mask, _| {
        let mut signs = vec![0i8; leaves];
        let mut d = 0.0;
        for (idx, &k) in others.iter().enumerate() {
            let sgn = if mask >> idx & 1 == 1 { 1 } else { -1 };
            signs[k] = sgn;
            d += sgn as f64 * pi[k];
        }
        out.push((d, signs));
    });
    Ok(out)
}

/// Exact lambda-infinity of a star by enumerating the special leaf and the
/// distinct balances of the others, minimizing over `y` in closed form.
pub fn star_exact(s: &StarGraph) -> Result<SolveReport> {
    let pi0 = s.center_mass();
    let leaves = s.leaf_count();
    if leaves == 1 {
        let value = 1.0 / (pi0 * s.leaf_masses()[0]);
        let exact = s.pi_exact().map(|p| Rational::one() / (&p[0] * &p[1]));
        return Ok(SolveReport::new(value, Witness::Valuation(vec![0.0, 1.0]), crate::report::Status::Exact)
            .with_exact(exact));
    }
    let mut best: Option<(f64, f64, usize, Vec<i8>)> = None;
    let mut structures = 0usize;
    for i in 0..leaves {
        let a = s.leaf_masses()[i];
        for (d, signs) in balances(s, i)? {
            structures += 1;
            if let Some((v, y)) = best_y(pi0, a, d) {
                if better(v, y, best.as_ref().map(|b| (b.0, b.1))) {
                    best = Some((v, y, i, signs));
                }
            }
        }
    }
    let (value, y, i, signs) = best.ok_or(Error::DegenerateValuation)?;
    let mut x = vec![0.0; leaves + 1];
    for k in 0..leaves {
        x[k + 1] = if k == i { y } else { signs[k] as f64 };
    }
    Ok(SolveReport::new(value, Witness::Valuation(x), crate::report::Status::Exact)
        .diag("special_leaf", i + 1)
        .diag("structures", structures))
}

/// Sign of `min_{y in [-1,1]} c0 + c1 y + c2 y^2`.
fn quadratic_min_sign<T: Clone + Num + Signed + PartialOrd>(c0: T, c1: T, c2: T) -> Ordering {
    let zero = T::zero();
    let cmp = |v: &T| v.partial_cmp(&zero).unwrap_or(Ordering::Equal);
    let at_minus = c0.clone() - c1.clone() + c2.clone();
    let at_plus = c0.clone() + c1.clone() + c2.clone();
    let mut sign = cmp(&at_minus).min(cmp(&at_plus));
    let two = T::one() + T::one();
    if c2 > zero && c1.abs() < two.clone() * c2.clone() {
        let four = two.clone() * two;
        let disc = four * c0 * c2 - c1.clone() * c1;
        sign = sign.min(cmp(&disc));
    }
    sign
}

fn compare_with<T>(w: &[u64], cn: T, cd: T, others: &[Vec<i64>]) -> Ordering
where
    T: Clone + Num + Signed + PartialOrd + From<i64>,
{
    let big_w: u64 = w.iter().sum();
    let wt = T::from(big_w as i64);
    let mut sign = Ordering::Greater;
    for (i, deltas) in others.iter().enumerate() {
        let wi = T::from(w[i + 1] as i64);
        let bw = T::from((big_w - w[0] - w[i + 1]) as i64);
        let two = T::from(2);
        let c2 = cd.clone() * wi.clone() * wt.clone() - cn.clone() * (wi.clone() * wt.clone() - wi.clone() * wi.clone());
        for &delta in deltas {
            let dt = T::from(delta);
            let c0 = cd.clone() * (wt.clone() - wi.clone()) * wt.clone()
                - cn.clone() * (bw.clone() * wt.clone() - dt.clone() * dt.clone());
            let c1 = two.clone() * cn.clone() * wi.clone() * dt;
            sign = sign.min(quadratic_min_sign(c0, c1, c2.clone()));
            if sign == Ordering::Less {
                return sign;
            }
        }
    }
    sign
}

/// Exact comparison of lambda-infinity of a star against a rational `c`:
/// `Less` means `lambda < c`.
///
/// `lambda <= c` iff some structure has `N - c D <= 0` somewhere on
/// `[-1, 1]`, and `N - c D` is a quadratic in `y` with rational
/// coefficients, so the test reduces to integer sign checks.
pub fn star_lambda_cmp(s: &StarGraph, c: &Rational) -> Result<Ordering> {
    let (w, _) = integer_masses(s)?;
    if !c.is_positive() {
        return Ok(Ordering::Greater);
    }
    let leaves = s.leaf_count();
    if leaves == 1 {
        let p = s.pi_exact().expect("checked by integer_masses");
        let lambda = Rational::one() / (&p[0] * &p[1]);
        return Ok(lambda.cmp(c));
    }
    let mut others = Vec::with_capacity(leaves);
    for i in 0..leaves {
        let ow: Vec<u64> = (0..leaves).filter(|&k| k != i).map(|k| w[k + 1]).collect();
        let total: u64 = ow.iter().sum();
        let table = SubsetSums::new(&ow)?;
        others.push(table.sums().into_iter().map(|p| 2 * p as i64 - total as i64).collect::<Vec<i64>>());
    }
    let big_w: u64 = w.iter().sum();
    let bits = |x: &BigInt| x.bits();
    let (cn, cd) = (c.numer().clone(), c.denom().clone());
    let widest = bits(&cn).max(bits(&cd)).max(64 - big_w.leading_zeros() as u64);
    if widest <= 20 {
        let cn = cn.to_i64().expect("fits") as i128;
        let cd = cd.to_i64().expect("fits") as i128;
        Ok(compare_with::<i128>(&w, cn, cd, &others))
    } else {
        Ok(compare_with::<BigInt>(&w, cn, cd, &others))
    }
}

/// Leaves whose displacement from the center is not maximal (within 1e-9
/// after scaling the largest displacement to 1).
pub fn almost_binary_violation(x: &Embedding1D, s: &StarGraph) -> Result<usize> {
    if x.n() != s.n() {
        return Err(Error::DimensionMismatch { expected: s.n(), got: x.n() });
    }
    let disp: Vec<f64> = x.x[1..].iter().map(|v| (v - x.x[0]).abs()).collect();
    let max = disp.iter().cloned().fold(0.0, f64::max);
    if max == 0.0 {
        return Err(Error::DegenerateValuation);
    }
    Ok(disp.iter().filter(|&&d| (d / max - 1.0).abs() > 1e-9).count())
}

/// `lam / 2 <= phi <= 4 lam + 4 sqrt(lam)`, each side with 1e-9 slack.
pub fn cheeger_sandwich(lam: f64, phi: f64) -> bool {
    lam / 2.0 <= phi + 1e-9 && phi <= 4.0 * lam + 4.0 * lam.max(0.0).sqrt() + 1e-9
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::GraphOptions;
    use crate::objective::lambda_objective;
    use crate::scalar::rational;

    fn star(p: &[(i64, i64)]) -> StarGraph {
        StarGraph::from_rational(p.iter().map(|&(a, b)| rational(a, b)).collect(), GraphOptions::default()).unwrap()
    }

    #[test]
    fn lower_bound_examples() {
        assert_eq!(star_lower_bound::<Rational>(&star(&[(1, 2), (1, 4), (1, 4)])).unwrap(), rational(2, 1));
        assert_eq!(star_lower_bound::<Rational>(&star(&[(1, 3), (1, 3), (1, 3)])).unwrap(), rational(3, 2));
        let tiny = star(&[(1, 1_000_000), (999_999, 2_000_000), (999_999, 2_000_000)]);
        assert!((star_lower_bound::<f64>(&tiny).unwrap() - 1.0).abs() < 1e-5);
    }

    #[test]
    fn tightness_examples() {
        assert!(star_is_tight(&star(&[(1, 2), (1, 4), (1, 4)])).unwrap());
        assert!(star_is_tight(&star(&[(1, 2), (1, 8), (1, 8), (1, 4)])).unwrap());
        assert!(!star_is_tight(&star(&[(1, 2), (1, 6), (1, 6), (1, 6)])).unwrap());
    }

    #[test]
    fn exact_values_match_closed_forms() {
        let r = star_exact(&star(&[(1, 3), (1, 3), (1, 3)])).unwrap();
        assert!((r.value - 1.5).abs() < 1e-12);
        let s = star(&[(1, 2), (1, 6), (1, 6), (1, 6)]);
        let r = star_exact(&s).unwrap();
        assert!(r.value - 2.0 >= 1.0 / 54.0);
        let x = Embedding1D::new(r.valuation().unwrap().to_vec()).unwrap();
        assert!((lambda_objective(&x, &s).unwrap() - r.value).abs() < 1e-12);
        assert!(almost_binary_violation(&x, &s).unwrap() <= 1);
        let k2 = star(&[(1, 2), (1, 2)]);
        assert_eq!(star_exact(&k2).unwrap().exact, Some(rational(4, 1)));
    }

    #[test]
    fn exact_comparison() {
        let yes = star(&[(1, 2), (1, 8), (1, 8), (1, 4)]);
        assert_eq!(star_lambda_cmp(&yes, &rational(2, 1)).unwrap(), Ordering::Equal);
        assert_eq!(star_lambda_cmp(&yes, &rational(201, 100)).unwrap(), Ordering::Less);
        let no = star(&[(1, 2), (1, 6), (1, 6), (1, 6)]);
        assert_eq!(star_lambda_cmp(&no, &(rational(2, 1) + rational(1, 54))).unwrap(), Ordering::Greater);
        let v = star_exact(&no).unwrap().value;
        let above = crate::scalar::f64_to_rational(v + 1e-9).unwrap();
        let below = crate::scalar::f64_to_rational(v - 1e-9).unwrap();
        assert_eq!(star_lambda_cmp(&no, &above).unwrap(), Ordering::Less);
        assert_eq!(star_lambda_cmp(&no, &below).unwrap(), Ordering::Greater);
    }

    #[test]
    fn almost_binary_examples() {
        let s = star(&[(1, 4), (1, 4), (1, 4), (1, 4)]);
        let e = |v: &[f64]| Embedding1D::new(v.to_vec()).unwrap();
        assert_eq!(almost_binary_violation(&e(&[0.0, 1.0, -1.0, 1.0]), &s).unwrap(), 0);
        assert_eq!(almost_binary_violation(&e(&[0.0, 1.0, 0.5, -1.0]), &s).unwrap(), 1);
        assert_eq!(almost_binary_violation(&e(&[0.0, 0.3, 0.7, 1.0]), &s).unwrap(), 2);
    }

    #[test]
    fn sandwich_examples() {
        assert!(cheeger_sandwich(1.5, 1.5));
        assert!(cheeger_sandwich(4.0, 2.0));
        assert!(!cheeger_sandwich(10.0, 1.0));
    }
}
