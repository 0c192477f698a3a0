//! Exact rational scalars: parsing, formatting, and directed f64 conversion.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use thiserror::Error;

/// Exact rational scalar used throughout the coefficient algebra.
pub type Rat = BigRational;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum RatParseError {
    #[error("empty rational literal")]
    Empty,
    #[error("invalid integer part in rational literal `{0}`")]
    BadInteger(String),
    #[error("zero denominator in rational literal `{0}`")]
    ZeroDenominator(String),
}

/// Shorthand constructor from an integer pair.
pub fn rat(numer: i64, denom: i64) -> Rat {
    Rat::new(BigInt::from(numer), BigInt::from(denom))
}

/// Shorthand constructor from an integer.
pub fn rat_int(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

/// Parses `p/q` or plain `p` into a reduced rational.
pub fn parse_rat(s: &str) -> Result<Rat, RatParseError> {
    let s = s.trim();
    if s.is_empty() {
        return Err(RatParseError::Empty);
    }
    let (num_str, den_str) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), Some(d.trim())),
        None => (s, None),
    };
    let numer: BigInt = num_str
        .parse()
        .map_err(|_| RatParseError::BadInteger(s.to_owned()))?;
    let denom: BigInt = match den_str {
        Some(d) => d
            .parse()
            .map_err(|_| RatParseError::BadInteger(s.to_owned()))?,
        None => BigInt::from(1),
    };
    if denom.is_zero() {
        return Err(RatParseError::ZeroDenominator(s.to_owned()));
    }
    Ok(Rat::new(numer, denom))
}

/// Formats in the same `p/q` (or plain integer) form accepted by [`parse_rat`].
pub fn format_rat(q: &Rat) -> String {
    q.to_string()
}

/// Nearest-f64 conversion that stays finite for big numerators/denominators.
pub fn rat_to_f64(q: &Rat) -> f64 {
    if let Some(v) = q.to_f64() {
        if v.is_finite() {
            return v;
        }
    }
    // Fall back to a scaled division when numerator/denominator individually
    // overflow f64.
    let numer_bits = q.numer().bits() as i64;
    let denom_bits = q.denom().bits() as i64;
    let shift = (numer_bits.max(denom_bits) - 900).max(0) as u64;
    let n = (q.numer() >> shift).to_f64().unwrap_or(f64::NAN);
    let d = (q.denom() >> shift).to_f64().unwrap_or(f64::NAN);
    n / d
}

/// Directed conversion: returns `(lo, hi)` with `lo <= q <= hi` exactly.
pub fn rat_to_f64_bounds(q: &Rat) -> (f64, f64) {
    let approx = rat_to_f64(q);
    let mut lo = approx;
    let mut hi = approx;
    // The approximation is within a few ulp, so these loops take 0..2 steps.
    while Rat::from_float(lo).map_or(true, |v| v > *q) {
        lo = lo.next_down();
    }
    while Rat::from_float(hi).map_or(true, |v| v < *q) {
        hi = hi.next_up();
    }
    (lo, hi)
}

/// Best rational approximation of `x` with `|x - p/q| <= tol`, by the
/// continued-fraction convergent loop.
pub fn rationalize(x: f64, tol: f64) -> Rat {
    assert!(x.is_finite() && tol > 0.0);
    let exact = Rat::from_float(x).expect("finite float");
    let mut a = x.floor();
    let mut frac = x - a;
    // Convergents p/q of the continued-fraction expansion.
    let (mut p_prev, mut q_prev) = (BigInt::from(1), BigInt::from(0));
    let (mut p, mut q) = (BigInt::from(a as i64), BigInt::from(1));
    for _ in 0..64 {
        let cand = Rat::new(p.clone(), q.clone());
        if (&cand - &exact).abs() <= Rat::from_float(tol).unwrap() {
            return cand;
        }
        if frac == 0.0 {
            break;
        }
        let inv = 1.0 / frac;
        a = inv.floor();
        frac = inv - a;
        let ai = BigInt::from(a as i128);
        let p_next = &ai * &p + &p_prev;
        let q_next = &ai * &q + &q_prev;
        p_prev = p;
        q_prev = q;
        p = p_next;
        q = q_next;
    }
    exact
}
