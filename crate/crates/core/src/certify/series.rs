//! Series-form polynomial brackets of the auxiliary expressions near r = 0.
//!
//! On (0, 1] the alternating Maclaurin partial sums of arctan(r) and
//! sqrt(1+r^2) bracket the functions, so per-monomial substitution turns each
//! expression core into an exact rational polynomial pair L <= core <= U.
//! The low-order cancellation that defeats direct f64 enclosures (the cores
//! vanish to high order at 0 while their terms stay O(1)) happens exactly in
//! the bracket polynomials, leaving the true leading coefficient exposed.

use num_traits::{Signed, Zero};

use crate::interval::Interval;
use crate::poly::{horner_interval, RatPoly};
use crate::rat::{rat_int, rat_to_f64, Rat};

/// Series brackets are used only on (0, SERIES_VALID_TO]; the alternating
/// bounds hold up to r = 1, the smaller cap keeps truncation slack generous.
pub const SERIES_VALID_TO: f64 = 0.5;

// Truncation indices: partial sums through an upper-biased respectively
// lower-biased final term.
const ATAN_K_HI: usize = 10; // last term +r^21/21
const ATAN_K_LO: usize = 11; // last term -r^23/23
const SQRT_N_HI: usize = 11; // last binomial term positive (degree 22)
const SQRT_N_LO: usize = 12; // last binomial term negative (degree 24)

/// Partial sum of arctan through term index `k_max`.
fn atan_partial(k_max: usize) -> RatPoly {
    let mut coeffs = vec![rat_int(0); 2 * k_max + 2];
    for k in 0..=k_max {
        let sign = if k % 2 == 0 { 1 } else { -1 };
        coeffs[2 * k + 1] = Rat::new(sign.into(), (2 * k as i64 + 1).into());
    }
    RatPoly::from_coeffs(coeffs)
}

/// Partial sum of sqrt(1+r^2) through binomial term index `n_max`.
fn sqrt_partial(n_max: usize) -> RatPoly {
    let mut coeffs = vec![rat_int(0); 2 * n_max + 1];
    let mut c = rat_int(1);
    coeffs[0] = c.clone();
    for n in 0..n_max {
        // binom(1/2, n+1) = binom(1/2, n) * (1/2 - n) / (n + 1)
        c = c * (Rat::new(1.into(), 2.into()) - rat_int(n as i64))
            / rat_int(n as i64 + 1);
        coeffs[2 * (n + 1)] = c.clone();
    }
    RatPoly::from_coeffs(coeffs)
}

fn split_signs(p: &RatPoly) -> (RatPoly, RatPoly) {
    let pos = RatPoly::from_coeffs(
        p.coeffs()
            .iter()
            .map(|c| if c.is_positive() { c.clone() } else { rat_int(0) })
            .collect(),
    );
    let neg = RatPoly::from_coeffs(
        p.coeffs()
            .iter()
            .map(|c| if c.is_negative() { c.clone() } else { rat_int(0) })
            .collect(),
    );
    (pos, neg)
}

/// Exact polynomial bracket `L <= core <= U` on (0, SERIES_VALID_TO], stored
/// factored by the shared leading power.
pub struct SeriesBracket {
    pub leading_power: usize,
    pub leading_coeff: Rat,
    /// L / r^leading_power and U / r^leading_power, exact.
    pub lo_factored: RatPoly,
    pub hi_factored: RatPoly,
    lo_iv: Vec<Interval>,
    hi_iv: Vec<Interval>,
}

/// Builds the bracket for core = ats atan sqrt + at atan + sq sqrt + p.
pub fn series_bracket(ats: &RatPoly, at: &RatPoly, sq: &RatPoly, p: &RatPoly) -> SeriesBracket {
    let t_lo = atan_partial(ATAN_K_LO);
    let t_hi = atan_partial(ATAN_K_HI);
    let s_lo = sqrt_partial(SQRT_N_LO);
    let s_hi = sqrt_partial(SQRT_N_HI);
    // Product brackets are valid because all four factors are positive on (0, 1].
    let ts_lo = t_lo.mul(&s_lo);
    let ts_hi = t_hi.mul(&s_hi);

    let (at_pos, at_neg) = split_signs(at);
    let (sq_pos, sq_neg) = split_signs(sq);
    let (ats_pos, ats_neg) = split_signs(ats);

    let lo = p
        .add(&at_pos.mul(&t_lo))
        .add(&at_neg.mul(&t_hi))
        .add(&sq_pos.mul(&s_lo))
        .add(&sq_neg.mul(&s_hi))
        .add(&ats_pos.mul(&ts_lo))
        .add(&ats_neg.mul(&ts_hi));
    let hi = p
        .add(&at_pos.mul(&t_hi))
        .add(&at_neg.mul(&t_lo))
        .add(&sq_pos.mul(&s_hi))
        .add(&sq_neg.mul(&s_lo))
        .add(&ats_pos.mul(&ts_hi))
        .add(&ats_neg.mul(&ts_lo));

    let v_lo = lo.valuation().expect("bracket polynomial must be nonzero");
    let v_hi = hi.valuation().expect("bracket polynomial must be nonzero");
    let leading_power = v_lo.min(v_hi);
    assert_eq!(v_lo, v_hi, "bracket valuations must agree");
    assert_eq!(
        lo.coeff(leading_power),
        hi.coeff(leading_power),
        "leading series coefficient must be exact in both brackets"
    );
    let leading_coeff = lo.coeff(leading_power);
    assert!(!leading_coeff.is_zero());

    let lo_factored = lo.div_xpow_exact(leading_power).expect("valuation checked");
    let hi_factored = hi.div_xpow_exact(leading_power).expect("valuation checked");
    let lo_iv = lo_factored.to_interval_coeffs();
    let hi_iv = hi_factored.to_interval_coeffs();
    SeriesBracket {
        leading_power,
        leading_coeff,
        lo_factored,
        hi_factored,
        lo_iv,
        hi_iv,
    }
}

/// Enclosure of the core over `iv`, which must satisfy
/// `0 < iv.lo <= iv.hi <= SERIES_VALID_TO`.
pub fn enclose_series(bracket: &SeriesBracket, iv: Interval) -> Interval {
    debug_assert!(iv.lo > 0.0 && iv.hi <= SERIES_VALID_TO);
    let pow = iv.powi(bracket.leading_power as u32);
    let lo = pow.mul(horner_interval(&bracket.lo_iv, iv)).lo;
    let hi = pow.mul(horner_interval(&bracket.hi_iv, iv)).hi;
    Interval::new(lo.min(hi), hi.max(lo))
}

/// One-step head rule on (0, r_lo]: the factored brackets read
/// `c + h(r)` with `h(0) = 0`; if `|h| < |c|` throughout (checked by the
/// exact coefficient-magnitude sum at r_lo), the core has the sign of `c`
/// on the whole interval. Returns `(margin, sign)` on success.
pub fn head_margin(bracket: &SeriesBracket, r_lo: f64) -> Option<(f64, i8)> {
    if !(r_lo > 0.0 && r_lo <= SERIES_VALID_TO) {
        return None;
    }
    let x = Rat::from_float(r_lo).expect("finite radius");
    let c = &bracket.leading_coeff;
    let mut tail = rat_int(0);
    for factored in [&bracket.lo_factored, &bracket.hi_factored] {
        let mut sum = rat_int(0);
        for (i, coef) in factored.coeffs().iter().enumerate().skip(1) {
            sum += coef.abs() * pow_rat(&x, i);
        }
        if sum > tail {
            tail = sum;
        }
    }
    let margin = c.abs() - tail;
    if margin.is_positive() {
        let sign = if c.is_positive() { 1 } else { -1 };
        // Round the reported margin toward zero (conservative).
        Some((rat_to_f64(&margin).next_down().max(0.0), sign))
    } else {
        None
    }
}

fn pow_rat(x: &Rat, n: usize) -> Rat {
    let mut acc = rat_int(1);
    for _ in 0..n {
        acc *= x;
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn atan_partials_bracket_atan() {
        let lo = atan_partial(ATAN_K_LO);
        let hi = atan_partial(ATAN_K_HI);
        for r in [0.05f64, 0.2, 0.5, 0.9] {
            let x = Rat::from_float(r).unwrap();
            let l = rat_to_f64(&lo.eval_rat(&x));
            let h = rat_to_f64(&hi.eval_rat(&x));
            assert!(l <= r.atan() && r.atan() <= h, "r={r}");
        }
    }

    #[test]
    fn sqrt_partials_bracket_sqrt1p() {
        let lo = sqrt_partial(SQRT_N_LO);
        let hi = sqrt_partial(SQRT_N_HI);
        for r in [0.05f64, 0.2, 0.5, 0.9] {
            let x = Rat::from_float(r).unwrap();
            let s = (1.0 + r * r).sqrt();
            let l = rat_to_f64(&lo.eval_rat(&x));
            let h = rat_to_f64(&hi.eval_rat(&x));
            assert!(l <= s && s <= h, "r={r}: [{l}, {h}] vs {s}");
        }
    }

    #[test]
    fn leading_terms_match_the_known_series() {
        use crate::certify::expr::lookup;
        // g1 = 5r^3 + ..., g1' = 15r^2 + ..., g2 = 16r^5 + ...,
        // g3 = (35/4)r^8 + ..., g3' core = 70r^6 + ..., g31 = -420r^5 - ...
        for (id, power, coeff) in [
            ("g1", 3usize, crate::rat::rat_int(5)),
            ("g1_prime", 2, crate::rat::rat_int(15)),
            ("g2", 5, crate::rat::rat_int(16)),
            ("g3", 8, crate::rat::rat(35, 4)),
            ("g3_prime", 6, crate::rat::rat_int(70)),
            ("g31", 5, crate::rat::rat_int(-420)),
            ("v4", 8, crate::rat::rat(3, 4)),
        ] {
            let b = lookup(id).unwrap().series_bracket();
            assert_eq!(b.leading_power, power, "{id} power");
            assert_eq!(b.leading_coeff, coeff, "{id} coeff");
        }
    }

    #[test]
    fn series_enclosure_contains_core_values() {
        use crate::certify::expr::lookup;
        for id in ["g1", "g2", "g3", "g31", "g3_prime", "v4"] {
            let e = lookup(id).unwrap();
            let b = e.series_bracket();
            for (a, bb) in [(1e-3, 2e-3), (0.01, 0.012), (0.1, 0.11), (0.4, 0.5)] {
                let enc = enclose_series(b, Interval::new(a, bb));
                for t in 0..=8 {
                    let r = a + (bb - a) * t as f64 / 8.0;
                    let v = e.eval_core(r);
                    // The point evaluation itself carries f64 cancellation
                    // error of order eps times the term-magnitude sum.
                    let slack = 1e-14 * e.eval_core_abs(r);
                    assert!(
                        enc.lo - slack <= v && v <= enc.hi + slack,
                        "{id} on [{a},{bb}]: {v} not in [{}, {}]",
                        enc.lo,
                        enc.hi
                    );
                }
            }
        }
    }

    #[test]
    fn head_rule_succeeds_at_the_default_window_edge() {
        use crate::certify::expr::lookup;
        for (id, sign) in [
            ("g1", 1i8),
            ("g1_prime", 1),
            ("g2", 1),
            ("g3", 1),
            ("g3_prime", 1),
            ("g31", -1),
            ("v4", 1),
        ] {
            let b = lookup(id).unwrap().series_bracket();
            let (margin, got) = head_margin(b, 1e-3).expect(id);
            assert_eq!(got, sign, "{id}");
            assert!(margin > 0.0);
        }
    }
}
