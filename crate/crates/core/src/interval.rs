//! Outward-rounded f64 interval arithmetic.
//!
//! Each primitive nudges the computed endpoints one ulp outward, which is
//! sound because IEEE 754 arithmetic is correctly rounded. `atan` is the one
//! libm call without a correct-rounding guarantee; its enclosure is padded by
//! two ulps, covering the documented <= 1 ulp error of the platform libm.

use std::f64::consts::FRAC_PI_2;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    /// Enclosure of pi.
    pub const PI: Interval = Interval {
        lo: 3.141592653589793,
        hi: 3.1415926535897936,
    };

    pub fn new(lo: f64, hi: f64) -> Self {
        debug_assert!(lo <= hi, "inverted interval [{lo}, {hi}]");
        Self { lo, hi }
    }

    pub fn point(x: f64) -> Self {
        Self { lo: x, hi: x }
    }

    pub fn contains_zero(&self) -> bool {
        self.lo <= 0.0 && self.hi >= 0.0
    }

    pub fn is_positive(&self) -> bool {
        self.lo > 0.0
    }

    pub fn is_negative(&self) -> bool {
        self.hi < 0.0
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    /// Largest absolute value contained in the interval.
    pub fn mag(&self) -> f64 {
        self.lo.abs().max(self.hi.abs())
    }

    pub fn neg(self) -> Self {
        Self::new(-self.hi, -self.lo)
    }

    pub fn add(self, other: Self) -> Self {
        Self::new((self.lo + other.lo).next_down(), (self.hi + other.hi).next_up())
    }

    pub fn sub(self, other: Self) -> Self {
        self.add(other.neg())
    }

    pub fn mul(self, other: Self) -> Self {
        let p = [
            self.lo * other.lo,
            self.lo * other.hi,
            self.hi * other.lo,
            self.hi * other.hi,
        ];
        let lo = p.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = p.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        Self::new(lo.next_down(), hi.next_up())
    }

    /// Division; the divisor must not contain zero.
    pub fn div(self, other: Self) -> Self {
        assert!(!other.contains_zero(), "interval division by zero");
        let p = [
            self.lo / other.lo,
            self.lo / other.hi,
            self.hi / other.lo,
            self.hi / other.hi,
        ];
        let lo = p.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = p.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        Self::new(lo.next_down(), hi.next_up())
    }

    /// Integer power by binary decomposition of repeated multiplication.
    pub fn powi(self, n: u32) -> Self {
        if n == 0 {
            return Self::point(1.0);
        }
        // Even powers of sign-mixed intervals tighten to [0, max^n].
        if n % 2 == 0 && self.contains_zero() {
            let m = self.mag();
            let mut hi = 1.0f64;
            for _ in 0..n {
                hi = (hi * m).next_up();
            }
            return Self::new(0.0, hi);
        }
        let mut acc = self;
        for _ in 1..n {
            acc = acc.mul(self);
        }
        acc
    }

    /// Square root; requires a nonnegative interval.
    pub fn sqrt(self) -> Self {
        assert!(self.lo >= 0.0, "sqrt of partially negative interval");
        Self::new(self.lo.sqrt().next_down().max(0.0), self.hi.sqrt().next_up())
    }

    /// Monotone arctangent with a two-ulp outward pad.
    pub fn atan(self) -> Self {
        let lo = self.lo.atan().next_down().next_down().max(-FRAC_PI_2);
        let hi = self.hi.atan().next_up().next_up().min(FRAC_PI_2.next_up());
        Self::new(lo, hi)
    }

    /// Enclosure of sqrt(1 + x^2).
    pub fn sqrt1p_sq(self) -> Self {
        self.mul(self).add(Self::point(1.0)).sqrt()
    }

    pub fn hull(self, other: Self) -> Self {
        Self::new(self.lo.min(other.lo), self.hi.max(other.hi))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn basic_ops_bracket_true_values() {
        let x = Interval::new(1.0, 2.0);
        let y = Interval::new(-0.5, 0.25);
        let s = x.add(y);
        assert!(s.lo <= 0.5 && s.hi >= 2.25);
        let p = x.mul(y);
        assert!(p.lo <= -1.0 && p.hi >= 0.5);
        assert!(p.contains_zero());
        let q = x.div(Interval::new(2.0, 4.0));
        assert!(q.lo <= 0.25 && q.hi >= 1.0);
    }

    #[test]
    fn monotone_functions_enclose() {
        let x = Interval::point(1.0);
        let a = x.atan();
        assert!(a.lo < std::f64::consts::FRAC_PI_4 && a.hi > std::f64::consts::FRAC_PI_4);
        assert!(a.width() < 1e-15);
        let s = x.sqrt1p_sq();
        assert!(s.lo < std::f64::consts::SQRT_2 && s.hi > std::f64::consts::SQRT_2);
    }

    #[test]
    fn pi_constant_brackets_pi() {
        assert!(Interval::PI.lo <= PI && PI <= Interval::PI.hi);
        assert!(Interval::PI.width() < 1e-15);
    }

    #[test]
    fn even_powers_of_mixed_intervals_stay_nonnegative() {
        let x = Interval::new(-2.0, 1.0);
        let p = x.powi(2);
        assert!(p.lo >= 0.0 && p.hi >= 4.0);
        let c = x.powi(3);
        assert!(c.lo <= -8.0 && c.hi >= 1.0);
    }
}
