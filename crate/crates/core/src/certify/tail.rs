//! Tail rules: sign certification on (r_hi, +inf) by leading-term domination.
//!
//! For r >= 1 the enclosures
//!
//!   pi/2 - 1/r < arctan(r) < pi/2,       r < sqrt(1+r^2) < r + 1/(2r)
//!
//! turn each expression core into a one-sided bound that is a Laurent
//! polynomial with coefficients q1 + q2 pi (q1, q2 exact rationals). If its
//! top coefficient has the claimed sign and dominates the magnitude sum of
//! the rest at r = r_hi, the bound keeps that sign on the whole tail.

use std::collections::BTreeMap;

use num_traits::{Signed, Zero};

use crate::interval::Interval;
use crate::poly::RatPoly;
use crate::rat::{rat, rat_to_f64_bounds, Rat};

use super::expr::AuxExpr;

/// Coefficient of the bounding Laurent polynomial: `q1 + q2 * pi`.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
struct PiLinear {
    q1: Rat,
    q2: Rat,
}

impl PiLinear {
    fn is_zero(&self) -> bool {
        self.q1.is_zero() && self.q2.is_zero()
    }

    fn add_rat(&mut self, q: &Rat) {
        self.q1 += q;
    }

    fn add_pi(&mut self, q: &Rat) {
        self.q2 += q;
    }

    fn to_interval(&self) -> Interval {
        let (a_lo, a_hi) = rat_to_f64_bounds(&self.q1);
        let (b_lo, b_hi) = rat_to_f64_bounds(&self.q2);
        Interval::new(a_lo, a_hi).add(Interval::new(b_lo, b_hi).mul(Interval::PI))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundSide {
    /// Pointwise lower bound of the core (for certifying positivity).
    Lower,
    /// Pointwise upper bound (for certifying negativity).
    Upper,
}

type Laurent = BTreeMap<i64, PiLinear>;

fn add_term(map: &mut Laurent, power: i64, value: PiLinear) {
    if value.is_zero() {
        return;
    }
    let entry = map.entry(power).or_default();
    entry.q1 += value.q1;
    entry.q2 += value.q2;
}

/// Per-monomial substitution of the tail enclosures, accumulated exactly.
fn tail_bound(expr: &AuxExpr, side: BoundSide) -> Laurent {
    let mut out = Laurent::new();
    let half = rat(1, 2);

    let mut poly_part = |p: &RatPoly| {
        for (k, c) in p.coeffs().iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let mut t = PiLinear::default();
            t.add_rat(c);
            add_term(&mut out, k as i64, t);
        }
    };
    poly_part(&expr.poly);

    // c r^k atan: bounded between c(pi/2 - 1/r) and c pi/2 (orientation by
    // the sign of c).
    for (k, c) in expr.atan.coeffs().iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        let k = k as i64;
        let sharp = (side == BoundSide::Lower) == c.is_positive();
        let mut top = PiLinear::default();
        top.add_pi(&(c * &half));
        add_term(&mut out, k, top);
        if sharp {
            let mut low = PiLinear::default();
            low.add_rat(&-c);
            add_term(&mut out, k - 1, low);
        }
    }

    // c r^k sqrt(1+r^2): bounded between c r and c (r + 1/(2r)).
    for (k, c) in expr.sqrt.coeffs().iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        let k = k as i64;
        let mut main = PiLinear::default();
        main.add_rat(c);
        add_term(&mut out, k + 1, main);
        let pad = (side == BoundSide::Lower) == c.is_negative();
        if pad {
            let mut low = PiLinear::default();
            low.add_rat(&(c * &half));
            add_term(&mut out, k - 1, low);
        }
    }

    // c r^k atan sqrt: between c (pi/2 - 1/r) r and c (pi/2)(r + 1/(2r)),
    // using positivity of both factors on r >= 1.
    for (k, c) in expr.atan_sqrt.coeffs().iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        let k = k as i64;
        let sharp = (side == BoundSide::Lower) == c.is_positive();
        let mut top = PiLinear::default();
        top.add_pi(&(c * &half));
        add_term(&mut out, k + 1, top);
        if sharp {
            let mut mid = PiLinear::default();
            mid.add_rat(&-c);
            add_term(&mut out, k, mid);
        } else {
            let mut low = PiLinear::default();
            low.add_pi(&(c * rat(1, 4)));
            add_term(&mut out, k - 1, low);
        }
    }

    out.retain(|_, v| !v.is_zero());
    out
}

/// A successfully certified tail, serializable for replay.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct TailRule {
    pub from: f64,
    pub leading_power: i64,
    /// Directed value of the dominating coefficient (toward zero).
    pub leading_coeff: f64,
    /// Upper bound of the magnitude sum of all other terms at `from`.
    pub residual_bound: f64,
    pub sign: i8,
}

/// Attempts the domination argument for either sign. `from` must be >= 1
/// (the tail enclosures assume it).
pub fn tail_rule(expr: &AuxExpr, from: f64) -> Option<TailRule> {
    if !(from >= 1.0) {
        return None;
    }
    for (side, sign) in [(BoundSide::Lower, 1i8), (BoundSide::Upper, -1i8)] {
        let bound = tail_bound(expr, side);
        let Some((&lead_pow, lead)) = bound.last_key_value() else {
            continue;
        };
        let lead_iv = lead.to_interval();
        let lead_mag = match sign {
            1 if lead_iv.is_positive() => lead_iv.lo,
            -1 if lead_iv.is_negative() => -lead_iv.hi,
            _ => continue,
        };
        // Magnitude sum of the remaining terms, scaled to the leading power
        // at r = from; upward rounding throughout.
        let mut rest = 0.0f64;
        for (&p, c) in bound.iter() {
            if p == lead_pow {
                continue;
            }
            let scale = from.powi((p - lead_pow) as i32);
            rest = (rest + c.to_interval().mag() * scale).next_up();
        }
        if lead_mag > rest {
            return Some(TailRule {
                from,
                leading_power: lead_pow,
                leading_coeff: sign as f64 * lead_mag,
                residual_bound: rest,
                sign,
            });
        }
    }
    None
}
