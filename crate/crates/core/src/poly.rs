//! Dense univariate polynomials with exact rational coefficients.
//!
//! These back the symbolic derivative algebra of the generating basis and the
//! rigorous series/tail bounds of the sign certifier, so all structural
//! operations (arithmetic, differentiation, exact division) stay in `Rat`.

use crate::interval::Interval;
use crate::rat::{rat_int, rat_to_f64, rat_to_f64_bounds, Rat};
use num_traits::{Signed, Zero};

/// Polynomial in one variable, coefficients in ascending-power order.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct RatPoly {
    coeffs: Vec<Rat>,
}

impl RatPoly {
    pub fn zero() -> Self {
        Self { coeffs: Vec::new() }
    }

    pub fn from_coeffs(mut coeffs: Vec<Rat>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        Self { coeffs }
    }

    /// Builds from a sparse `(power, integer coefficient)` list.
    pub fn from_terms(terms: &[(usize, i64)]) -> Self {
        let deg = terms.iter().map(|&(p, _)| p).max().unwrap_or(0);
        let mut coeffs = vec![rat_int(0); deg + 1];
        for &(p, c) in terms {
            coeffs[p] += rat_int(c);
        }
        Self::from_coeffs(coeffs)
    }

    pub fn constant(c: Rat) -> Self {
        Self::from_coeffs(vec![c])
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree of the polynomial; zero polynomial reports 0.
    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn coeff(&self, power: usize) -> Rat {
        self.coeffs.get(power).cloned().unwrap_or_else(|| rat_int(0))
    }

    pub fn coeffs(&self) -> &[Rat] {
        &self.coeffs
    }

    pub fn add(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        let mut out = vec![rat_int(0); n];
        for (i, c) in self.coeffs.iter().enumerate() {
            out[i] += c;
        }
        for (i, c) in other.coeffs.iter().enumerate() {
            out[i] += c;
        }
        Self::from_coeffs(out)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        Self::from_coeffs(self.coeffs.iter().map(|c| -c).collect())
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        let mut out = vec![rat_int(0); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Self::from_coeffs(out)
    }

    pub fn scale(&self, k: &Rat) -> Self {
        Self::from_coeffs(self.coeffs.iter().map(|c| c * k).collect())
    }

    /// Multiplies by `x^n`.
    pub fn mul_xpow(&self, n: usize) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        let mut coeffs = vec![rat_int(0); n];
        coeffs.extend(self.coeffs.iter().cloned());
        Self::from_coeffs(coeffs)
    }

    /// Divides by `x^n`, requiring the low-order coefficients to vanish.
    pub fn div_xpow_exact(&self, n: usize) -> Option<Self> {
        if self.is_zero() {
            return Some(Self::zero());
        }
        if self.coeffs.len() <= n || self.coeffs[..n].iter().any(|c| !c.is_zero()) {
            return None;
        }
        Some(Self::from_coeffs(self.coeffs[n..].to_vec()))
    }

    pub fn derivative(&self) -> Self {
        if self.coeffs.len() <= 1 {
            return Self::zero();
        }
        Self::from_coeffs(
            self.coeffs[1..]
                .iter()
                .enumerate()
                .map(|(i, c)| c * rat_int(i as i64 + 1))
                .collect(),
        )
    }

    /// Exact polynomial division; `None` if the remainder is nonzero.
    pub fn div_exact(&self, divisor: &Self) -> Option<Self> {
        assert!(!divisor.is_zero(), "division by zero polynomial");
        if self.is_zero() {
            return Some(Self::zero());
        }
        if self.degree() < divisor.degree() {
            return None;
        }
        let mut rem = self.coeffs.clone();
        let dn = divisor.coeffs.len();
        let lead = &divisor.coeffs[dn - 1];
        let mut quot = vec![rat_int(0); rem.len() - dn + 1];
        for k in (0..quot.len()).rev() {
            let q = &rem[k + dn - 1] / lead;
            if !q.is_zero() {
                for (i, d) in divisor.coeffs.iter().enumerate() {
                    rem[k + i] -= &q * d;
                }
            }
            quot[k] = q;
        }
        if rem.iter().any(|c| !c.is_zero()) {
            return None;
        }
        Some(Self::from_coeffs(quot))
    }

    pub fn eval_rat(&self, x: &Rat) -> Rat {
        let mut acc = rat_int(0);
        for c in self.coeffs.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    /// Sum of coefficient magnitudes weighted by powers of `x`, i.e. an upper
    /// bound for `|p(r)|` on `0 < r <= x`.
    pub fn abs_eval_rat(&self, x: &Rat) -> Rat {
        let mut acc = rat_int(0);
        for c in self.coeffs.iter().rev() {
            acc = acc * x + c.abs();
        }
        acc
    }

    /// Rounds coefficients to nearest f64 once, for fast evaluation paths.
    pub fn to_f64_coeffs(&self) -> Vec<f64> {
        self.coeffs.iter().map(rat_to_f64).collect()
    }

    /// Outward-rounded interval coefficients for rigorous evaluation paths.
    pub fn to_interval_coeffs(&self) -> Vec<Interval> {
        self.coeffs
            .iter()
            .map(|c| {
                let (lo, hi) = rat_to_f64_bounds(c);
                Interval::new(lo, hi)
            })
            .collect()
    }

    /// Lowest power with a nonzero coefficient, if any.
    pub fn valuation(&self) -> Option<usize> {
        self.coeffs.iter().position(|c| !c.is_zero())
    }
}

/// Horner evaluation of f64 coefficients.
pub fn horner(coeffs: &[f64], x: f64) -> f64 {
    let mut acc = 0.0f64;
    for c in coeffs.iter().rev() {
        acc = acc.mul_add(x, *c);
    }
    acc
}

/// Horner evaluation over an interval with outward rounding.
pub fn horner_interval(coeffs: &[Interval], x: Interval) -> Interval {
    let mut acc = Interval::point(0.0);
    for c in coeffs.iter().rev() {
        acc = acc.mul(x).add(*c);
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::rat;

    #[test]
    fn arithmetic_and_derivative() {
        // (1 + 2x)(3 + x^2) = 3 + 6x + x^2 + 2x^3
        let p = RatPoly::from_terms(&[(0, 1), (1, 2)]);
        let q = RatPoly::from_terms(&[(0, 3), (2, 1)]);
        let prod = p.mul(&q);
        assert_eq!(prod, RatPoly::from_terms(&[(0, 3), (1, 6), (2, 1), (3, 2)]));
        assert_eq!(
            prod.derivative(),
            RatPoly::from_terms(&[(0, 6), (1, 2), (2, 6)])
        );
        assert_eq!(prod.div_exact(&q), Some(p.clone()));
        assert_eq!(prod.div_exact(&RatPoly::from_terms(&[(0, 1), (1, 1)])), None);
        assert_eq!(prod.eval_rat(&rat(1, 2)), rat(3, 1) + rat(3, 1) + rat(1, 4) + rat(1, 4));
    }

    #[test]
    fn xpow_helpers() {
        let p = RatPoly::from_terms(&[(2, 5), (4, -1)]);
        assert_eq!(p.valuation(), Some(2));
        let q = p.div_xpow_exact(2).unwrap();
        assert_eq!(q, RatPoly::from_terms(&[(0, 5), (2, -1)]));
        assert_eq!(q.mul_xpow(2), p);
        assert!(p.div_xpow_exact(3).is_none());
    }

    #[test]
    fn abs_eval_bounds_magnitude() {
        let p = RatPoly::from_terms(&[(1, -3), (3, 2)]);
        let bound = p.abs_eval_rat(&rat(1, 2));
        // |p(r)| <= 3*(1/2) + 2*(1/8) on (0, 1/2]
        assert_eq!(bound, rat(3, 2) + rat(1, 4));
    }
}
