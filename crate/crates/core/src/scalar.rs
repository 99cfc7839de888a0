//! Numeric modes.
//!
//! Closed forms, oracles and gap checks run over [`Rational`] (arbitrary
//! precision); iterative solvers run over `f64`. Code that has to work in
//! both modes is written against [`Scalar`].

use std::fmt::Debug;

use num::bigint::BigInt;
use num::{BigRational, Num, One, Signed, ToPrimitive, Zero};

use crate::graph::WeightedGraph;

/// Arbitrary-precision rational number.
pub type Rational = BigRational;

/// A field we can run the shared formulas over.
pub trait Scalar: Clone + Debug + PartialOrd + Num + Signed {
    fn from_usize(n: usize) -> Self;
    fn from_i64(n: i64) -> Self;
    fn to_f64(&self) -> f64;
    /// Comparison slack: zero for exact arithmetic.
    fn slack() -> Self;
    /// Vertex masses of `g` in this representation, if available.
    fn masses(g: &WeightedGraph) -> Option<Vec<Self>>;

    fn le_slack(&self, other: &Self) -> bool {
        *self <= other.clone() + Self::slack()
    }
}

impl Scalar for f64 {
    fn from_usize(n: usize) -> Self {
        n as f64
    }
    fn from_i64(n: i64) -> Self {
        n as f64
    }
    fn to_f64(&self) -> f64 {
        *self
    }
    fn slack() -> Self {
        1e-12
    }
    fn masses(g: &WeightedGraph) -> Option<Vec<Self>> {
        Some(g.pi().to_vec())
    }
}

impl Scalar for Rational {
    fn from_usize(n: usize) -> Self {
        Rational::from_integer(BigInt::from(n))
    }
    fn from_i64(n: i64) -> Self {
        Rational::from_integer(BigInt::from(n))
    }
    fn to_f64(&self) -> f64 {
        rational_to_f64(self)
    }
    fn slack() -> Self {
        Rational::zero()
    }
    fn masses(g: &WeightedGraph) -> Option<Vec<Self>> {
        g.pi_exact().map(|p| p.to_vec())
    }
}

pub fn rational(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

pub fn rational_to_f64(q: &Rational) -> f64 {
    if let Some(v) = ToPrimitive::to_f64(q) {
        if v.is_finite() {
            return v;
        }
    }
    // Fall back to a scaled division for huge numerators/denominators.
    let shift = q.numer().bits().max(q.denom().bits()).saturating_sub(1000) as usize;
    let n = (q.numer() >> shift).to_f64().unwrap_or(f64::NAN);
    let d = (q.denom() >> shift).to_f64().unwrap_or(f64::NAN);
    n / d
}

/// Exact rational value of a finite `f64`.
pub fn f64_to_rational(x: f64) -> Option<Rational> {
    Rational::from_float(x)
}

/// Parses `p/q`, an integer, or a decimal such as `0.125` or `2.5e-1`.
/// Decimals are converted exactly.
pub fn parse_rational(text: &str) -> Option<Rational> {
    let text = text.trim();
    if text.is_empty() {
        return None;
    }
    if text.contains('/') {
        let q = Rational::from_str_radix(text, 10).ok()?;
        return Some(q);
    }
    let (mantissa, exponent) = match text.find(['e', 'E']) {
        Some(pos) => (&text[..pos], text[pos + 1..].parse::<i32>().ok()?),
        None => (text, 0),
    };
    let (negative, mantissa) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = match mantissa.split_once('.') {
        Some((i, f)) => (i, f),
        None => (mantissa, ""),
    };
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
        return None;
    }
    let digits = format!("{int_part}{frac_part}");
    let mut value = Rational::from_integer(digits.parse::<BigInt>().ok()?);
    let ten = Rational::from_integer(BigInt::from(10));
    let scale = exponent - frac_part.len() as i32;
    if scale >= 0 {
        value *= num::pow(ten, scale as usize);
    } else {
        value /= num::pow(ten, (-scale) as usize);
    }
    if negative {
        value = -value;
    }
    Some(value)
}

/// `p/q` for non-integers, `p` otherwise.
pub fn format_rational(q: &Rational) -> String {
    if q.denom().is_one() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

/// Least common multiple of the denominators, if it fits in `u64`.
pub fn common_denominator(values: &[Rational]) -> Option<u64> {
    let mut lcm = BigInt::one();
    for q in values {
        lcm = num::integer::lcm(lcm, q.denom().clone());
        if lcm.bits() > 62 {
            return None;
        }
    }
    lcm.to_u64()
}

/// Scales `values` to integers over a common denominator `den`.
pub fn to_integer_weights(values: &[Rational], den: u64) -> Option<Vec<u64>> {
    let scale = Rational::from_integer(BigInt::from(den));
    values
        .iter()
        .map(|q| {
            let s = q * &scale;
            debug_assert!(s.is_integer());
            s.to_integer().to_u64()
        })
        .collect()
}

pub fn sqrt_f64(x: f64) -> f64 {
    x.max(0.0).sqrt()
}
