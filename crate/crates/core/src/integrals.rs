//! Closed-form half-circle monomial integrals
//!
//!   I[i,j](r) = integral of cos^i(t) sin^j(t) / (r^2 cos^2(t) + 1) over (0, pi),
//!   J[i,j](r) = the same integral over (pi, 2pi) = (-1)^(i+j) I[i,j](r),
//!
//! together with an independent adaptive-quadrature oracle.

use std::f64::consts::PI;

use thiserror::Error;

use crate::quad::{integrate, QuadratureError};
use crate::Half;

/// Switch to Maclaurin series below this radius: the literal closed forms for
/// I01, I20, I21, I40 subtract nearly equal terms and lose every digit.
const SERIES_THRESHOLD: f64 = 1e-4;

/// I21 = (2/r^3)(r - arctan r) cancels catastrophically well above 1e-4
/// (absolute error ~ 2 eps / r^2), so its series window is wider.
const I21_SERIES_THRESHOLD: f64 = 5e-2;

#[derive(Debug, Error, PartialEq)]
pub enum IntegralError {
    #[error("monomial exponents ({0},{1}) outside 0 <= i+j <= 4")]
    IdOutOfRange(u8, u8),
    #[error("radius must be positive, got {0}")]
    NonPositiveRadius(f64),
    #[error(transparent)]
    Quadrature(#[from] QuadratureError),
}

/// Exponent pair of one tabulated monomial integral.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MonomialIntegralId {
    i: u8,
    j: u8,
}

impl MonomialIntegralId {
    pub fn new(i: u8, j: u8) -> Result<Self, IntegralError> {
        if i + j > 4 {
            return Err(IntegralError::IdOutOfRange(i, j));
        }
        Ok(Self { i, j })
    }

    pub fn i(&self) -> u8 {
        self.i
    }

    pub fn j(&self) -> u8 {
        self.j
    }

    /// All exponent pairs with `i + j <= 4`.
    pub fn all() -> Vec<Self> {
        let mut out = Vec::new();
        for i in 0..=4u8 {
            for j in 0..=4 - i {
                out.push(Self { i, j });
            }
        }
        out
    }
}

fn check_radius(r: f64) -> Result<(), IntegralError> {
    if !(r > 0.0) || !r.is_finite() {
        return Err(IntegralError::NonPositiveRadius(r));
    }
    Ok(())
}

// Maclaurin series in t = r^2. Eight alternating terms: at the widest switch
// radius (t = 2.5e-3) the truncation error is below 1e-19.

fn alternating_series(t: f64, coeffs: &[f64]) -> f64 {
    let mut acc = 0.0f64;
    for &c in coeffs.iter().rev() {
        acc = acc.mul_add(-t, c);
    }
    acc
}

fn i01_series(t: f64) -> f64 {
    // 2 sum (-t)^k / (2k+1)
    let c: Vec<f64> = (0..8).map(|k| 2.0 / (2 * k + 1) as f64).collect();
    alternating_series(t, &c)
}

fn i21_series(t: f64) -> f64 {
    // 2 sum (-t)^k / (2k+3)
    let c: Vec<f64> = (0..8).map(|k| 2.0 / (2 * k + 3) as f64).collect();
    alternating_series(t, &c)
}

fn i20_series(t: f64) -> f64 {
    PI * (0.5 - 3.0 * t / 8.0 + 5.0 * t * t / 16.0 - 35.0 * t * t * t / 128.0
        + 63.0 * t * t * t * t / 256.0)
}

fn i40_series(t: f64) -> f64 {
    PI * (3.0 / 8.0 - 5.0 * t / 16.0 + 35.0 * t * t / 128.0 - 63.0 * t * t * t / 256.0
        + 231.0 * t * t * t * t / 1024.0)
}

fn i00(r: f64) -> f64 {
    PI / (1.0 + r * r).sqrt()
}

fn i01(r: f64) -> f64 {
    if r < SERIES_THRESHOLD {
        i01_series(r * r)
    } else {
        2.0 * r.atan() / r
    }
}

// (pi/r^2)(1 - 1/sqrt(1+r^2)) rearranged with 1 - 1/s = r^2/(s(1+s)),
// s = sqrt(1+r^2): cancellation-free at every radius.
fn i20(r: f64) -> f64 {
    if r < SERIES_THRESHOLD {
        i20_series(r * r)
    } else {
        let s = (1.0 + r * r).sqrt();
        PI / (s * (1.0 + s))
    }
}

fn i21(r: f64) -> f64 {
    if r < I21_SERIES_THRESHOLD {
        i21_series(r * r)
    } else {
        2.0 / (r * r * r) * (r - r.atan())
    }
}

// pi/(2r^2) - I20/r^2 rearranged via s - 1 = r^2/(s+1) into
// pi (s+2) / (2 s (s+1)^2): cancellation-free at every radius.
fn i40(r: f64) -> f64 {
    if r < SERIES_THRESHOLD {
        i40_series(r * r)
    } else {
        let s = (1.0 + r * r).sqrt();
        PI * (s + 2.0) / (2.0 * s * (s + 1.0) * (s + 1.0))
    }
}

/// Closed-form value of `I[i,j](r)`; exactly zero for odd `i`.
pub fn eval_i(id: MonomialIntegralId, r: f64) -> Result<f64, IntegralError> {
    check_radius(r)?;
    let v = match (id.i, id.j) {
        (1, _) | (3, _) => 0.0,
        (0, 0) => i00(r),
        (0, 1) => i01(r),
        (2, 0) => i20(r),
        (2, 1) => i21(r),
        (0, 2) => i00(r) - i20(r),
        (0, 3) => i01(r) - i21(r),
        (4, 0) => i40(r),
        (2, 2) => i20(r) - i40(r),
        (0, 4) => i40(r) - 2.0 * i20(r) + i00(r),
        (i, j) => return Err(IntegralError::IdOutOfRange(i, j)),
    };
    Ok(v)
}

/// Lower-half value via the parity relation `J = (-1)^(i+j) I`.
pub fn eval_j(id: MonomialIntegralId, r: f64) -> Result<f64, IntegralError> {
    let sign = if (id.i + id.j) % 2 == 0 { 1.0 } else { -1.0 };
    Ok(sign * eval_i(id, r)?)
}

/// Independent oracle: adaptive quadrature of the defining integral over the
/// requested half-circle, to absolute tolerance 1e-12.
pub fn quadrature_oracle(
    id: MonomialIntegralId,
    r: f64,
    half: Half,
) -> Result<f64, IntegralError> {
    check_radius(r)?;
    let (lo, hi) = match half {
        Half::Upper => (0.0, PI),
        Half::Lower => (PI, 2.0 * PI),
    };
    let (i, j) = (id.i as i32, id.j as i32);
    let f = move |theta: f64| {
        let c = theta.cos();
        let s = theta.sin();
        c.powi(i) * s.powi(j) / (r * r * c * c + 1.0)
    };
    Ok(integrate(&f, lo, hi, 1e-12)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn id(i: u8, j: u8) -> MonomialIntegralId {
        MonomialIntegralId::new(i, j).unwrap()
    }

    #[test]
    fn closed_form_spot_values() {
        assert!((eval_i(id(0, 0), 1.0).unwrap() - PI / 2.0f64.sqrt()).abs() < 1e-14);
        assert!((eval_i(id(0, 1), 1.0).unwrap() - PI / 2.0).abs() < 1e-14);
        assert!((eval_i(id(2, 1), 1.0).unwrap() - 2.0 * (1.0 - PI / 4.0)).abs() < 1e-14);
        assert!((eval_i(id(2, 0), 1.0).unwrap() - PI * (1.0 - 1.0 / 2.0f64.sqrt())).abs() < 1e-14);
        for r in [0.3, 1.0, 7.5] {
            assert_eq!(eval_i(id(1, 0), r).unwrap(), 0.0);
            assert_eq!(eval_i(id(3, 1), r).unwrap(), 0.0);
            assert_eq!(eval_i(id(1, 3), r).unwrap(), 0.0);
        }
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(MonomialIntegralId::new(3, 2).is_err());
        assert!(eval_i(id(0, 0), 0.0).is_err());
        assert!(eval_i(id(0, 0), -1.0).is_err());
    }

    #[test]
    fn parity_relation() {
        for (i, j) in [(2, 1), (0, 0), (0, 3), (2, 2)] {
            let r = 2.0;
            let sign = if (i + j) % 2 == 0 { 1.0 } else { -1.0 };
            assert_eq!(
                eval_j(id(i, j), r).unwrap(),
                sign * eval_i(id(i, j), r).unwrap()
            );
        }
        assert_eq!(eval_j(id(1, 0), 3.0).unwrap(), 0.0);
    }

    #[test]
    fn oracle_matches_closed_forms_on_log_grid() {
        for entry in MonomialIntegralId::all() {
            for k in 0..=12 {
                let r = 10f64.powf(-3.0 + 0.5 * k as f64);
                let closed = eval_i(entry, r).unwrap();
                let quad = quadrature_oracle(entry, r, Half::Upper).unwrap();
                assert!(
                    (closed - quad).abs() <= 1e-10 * (1.0 + closed.abs()),
                    "I[{},{}]({r}) closed={closed} quad={quad}",
                    entry.i(),
                    entry.j()
                );
            }
        }
    }

    #[test]
    fn oracle_parity_between_halves() {
        for (i, j) in [(0, 1), (2, 0), (2, 1), (0, 4)] {
            let upper = quadrature_oracle(id(i, j), 1.7, Half::Upper).unwrap();
            let lower = quadrature_oracle(id(i, j), 1.7, Half::Lower).unwrap();
            let sign = if (i + j) % 2 == 0 { 1.0 } else { -1.0 };
            assert!((lower - sign * upper).abs() < 1e-10);
        }
        let odd = quadrature_oracle(id(3, 1), 5.0, Half::Upper).unwrap();
        assert!(odd.abs() < 1e-10);
    }

    #[test]
    fn small_radius_limits_via_oracle() {
        // The series limits 2, pi/2, 2/3, 3pi/8 are derived first from the
        // quadrature oracle at r = 1e-6, then pinned against the closed forms.
        let r = 1e-6;
        for (i, j, limit) in [
            (0, 1, 2.0),
            (2, 0, PI / 2.0),
            (2, 1, 2.0 / 3.0),
            (4, 0, 3.0 * PI / 8.0),
        ] {
            let oracle = quadrature_oracle(id(i, j), r, Half::Upper).unwrap();
            assert!((oracle - limit).abs() < 1e-10, "oracle I[{i},{j}] -> {oracle}");
            let closed = eval_i(id(i, j), r).unwrap();
            assert!((closed - limit).abs() < 1e-10, "closed I[{i},{j}] -> {closed}");
        }
    }

    #[test]
    fn both_representations_agree_with_the_oracle_at_the_switch() {
        for ((i, j), cut) in [
            ((0, 1), SERIES_THRESHOLD),
            ((2, 0), SERIES_THRESHOLD),
            ((4, 0), SERIES_THRESHOLD),
            ((2, 1), I21_SERIES_THRESHOLD),
        ] {
            for r in [cut * 0.999_999, cut * 1.000_001] {
                let v = eval_i(id(i, j), r).unwrap();
                let oracle = quadrature_oracle(id(i, j), r, Half::Upper).unwrap();
                assert!(
                    (v - oracle).abs() < 1e-11,
                    "I[{i},{j}]({r}) = {v}, oracle {oracle}"
                );
            }
        }
    }
}
