//! The seven generating functions of the averaged function,
//!
//!   f1 = r, f2 = r^2, f3 = r^2/sqrt(1+r^2), f4 = r^4/sqrt(1+r^2),
//!   f5 = arctan r, f6 = r^2 arctan r, f7 = 1 - 1/sqrt(1+r^2),
//!
//! with analytic derivatives up to order 6. Every function lives in the
//! algebra (A(r) + B(r) sqrt(1+r^2)) / (1+r^2)^m + C(r) arctan(r), which is
//! closed under differentiation, so derivative forms are derived exactly once
//! and cached as f64 Horner coefficients.

use once_cell::sync::Lazy;
use thiserror::Error;

use crate::poly::{horner, RatPoly};
use crate::rat::rat_int;
use std::f64::consts::PI;

/// Highest derivative order needed by the order-7 Wronskian.
pub const MAX_DERIVATIVE_ORDER: usize = 6;

/// Fixed multipliers attached to nu1..nu7 in the averaged function.
pub const BASIS_WEIGHTS: [f64; 7] = [2.0, PI, PI, PI, 2.0, 2.0, PI];

#[derive(Debug, Error, PartialEq, Eq)]
pub enum BasisError {
    #[error("basis index {0} outside 1..=7")]
    IndexOutOfRange(usize),
    #[error("derivative order {0} exceeds {MAX_DERIVATIVE_ORDER}")]
    OrderOutOfRange(usize),
    #[error("basis functions are defined for r >= 0")]
    NegativeRadius,
}

/// Identifier of one generating function, `F1` through `F7`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BasisFunctionId {
    F1,
    F2,
    F3,
    F4,
    F5,
    F6,
    F7,
}

impl BasisFunctionId {
    pub const ALL: [Self; 7] = [
        Self::F1,
        Self::F2,
        Self::F3,
        Self::F4,
        Self::F5,
        Self::F6,
        Self::F7,
    ];

    pub fn from_index(k: usize) -> Result<Self, BasisError> {
        Self::ALL
            .get(k.wrapping_sub(1))
            .copied()
            .ok_or(BasisError::IndexOutOfRange(k))
    }

    /// 1-based index.
    pub fn index(self) -> usize {
        self as usize + 1
    }
}

/// (A + B sqrt(1+r^2)) / (1+r^2)^m + C arctan(r), exact coefficients.
#[derive(Debug, Clone)]
struct AlgebraForm {
    a: RatPoly,
    b: RatPoly,
    c: RatPoly,
    m: u32,
}

impl AlgebraForm {
    fn derivative(&self) -> Self {
        let one_plus_r2 = RatPoly::from_terms(&[(0, 1), (2, 1)]);
        let r = RatPoly::from_terms(&[(1, 1)]);
        let two_m = rat_int(2 * self.m as i64);
        let mut denom_pow = RatPoly::from_terms(&[(0, 1)]);
        for _ in 0..self.m {
            denom_pow = denom_pow.mul(&one_plus_r2);
        }
        // d/dr[(A + B s)/(1+r^2)^m + C atan] over the denominator (1+r^2)^(m+1):
        //   A' (1+r^2) - 2m r A + C (1+r^2)^m, and s [B'(1+r^2) + (1-2m) r B].
        let a_new = self
            .a
            .derivative()
            .mul(&one_plus_r2)
            .sub(&r.mul(&self.a).scale(&two_m))
            .add(&self.c.mul(&denom_pow));
        let b_new = self
            .b
            .derivative()
            .mul(&one_plus_r2)
            .add(&r.mul(&self.b).scale(&(rat_int(1) - &two_m)));
        Self {
            a: a_new,
            b: b_new,
            c: self.c.derivative(),
            m: self.m + 1,
        }
    }
}

/// f64 form of one (function, order) pair, ready for evaluation.
struct EvalForm {
    a: Vec<f64>,
    b: Vec<f64>,
    c: Vec<f64>,
    m: i32,
}

impl EvalForm {
    fn eval(&self, r: f64) -> f64 {
        let s = (1.0 + r * r).sqrt();
        let denom = (1.0 + r * r).powi(self.m);
        let rational = (horner(&self.a, r) + horner(&self.b, r) * s) / denom;
        if self.c.is_empty() {
            rational
        } else {
            rational + horner(&self.c, r) * r.atan()
        }
    }
}

fn base_forms() -> [AlgebraForm; 7] {
    let zero = RatPoly::zero();
    let form = |a: RatPoly, b: RatPoly, c: RatPoly, m: u32| AlgebraForm { a, b, c, m };
    [
        form(RatPoly::from_terms(&[(1, 1)]), zero.clone(), zero.clone(), 0),
        form(RatPoly::from_terms(&[(2, 1)]), zero.clone(), zero.clone(), 0),
        form(zero.clone(), RatPoly::from_terms(&[(2, 1)]), zero.clone(), 1),
        form(zero.clone(), RatPoly::from_terms(&[(4, 1)]), zero.clone(), 1),
        form(zero.clone(), zero.clone(), RatPoly::from_terms(&[(0, 1)]), 0),
        form(zero.clone(), zero.clone(), RatPoly::from_terms(&[(2, 1)]), 0),
        // f7 = 1 - 1/sqrt(1+r^2) = ((1+r^2) - sqrt(1+r^2)) / (1+r^2)
        form(
            RatPoly::from_terms(&[(0, 1), (2, 1)]),
            RatPoly::from_terms(&[(0, -1)]),
            zero,
            1,
        ),
    ]
}

static DERIVATIVE_TABLE: Lazy<Vec<Vec<EvalForm>>> = Lazy::new(|| {
    base_forms()
        .into_iter()
        .map(|base| {
            let mut forms = Vec::with_capacity(MAX_DERIVATIVE_ORDER + 1);
            let mut current = base;
            for order in 0..=MAX_DERIVATIVE_ORDER {
                forms.push(EvalForm {
                    a: current.a.to_f64_coeffs(),
                    b: current.b.to_f64_coeffs(),
                    c: current.c.to_f64_coeffs(),
                    m: current.m as i32,
                });
                if order < MAX_DERIVATIVE_ORDER {
                    current = current.derivative();
                }
            }
            forms
        })
        .collect()
});

/// Value of the `k`-th basis function or one of its analytic derivatives.
pub fn eval_basis(k: BasisFunctionId, r: f64, order: usize) -> Result<f64, BasisError> {
    if order > MAX_DERIVATIVE_ORDER {
        return Err(BasisError::OrderOutOfRange(order));
    }
    if !(r >= 0.0) {
        return Err(BasisError::NegativeRadius);
    }
    Ok(DERIVATIVE_TABLE[k.index() - 1][order].eval(r))
}

/// Order-0 fast path with the closed-form definitions.
pub fn basis_value(k: BasisFunctionId, r: f64) -> f64 {
    let s = (1.0 + r * r).sqrt();
    match k {
        BasisFunctionId::F1 => r,
        BasisFunctionId::F2 => r * r,
        BasisFunctionId::F3 => r * r / s,
        BasisFunctionId::F4 => r * r * r * r / s,
        BasisFunctionId::F5 => r.atan(),
        BasisFunctionId::F6 => r * r * r.atan(),
        BasisFunctionId::F7 => 1.0 - 1.0 / s,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn closed_form_spot_values() {
        assert_eq!(eval_basis(BasisFunctionId::F7, 0.0, 0).unwrap(), 0.0);
        assert!(
            (eval_basis(BasisFunctionId::F3, 1.0, 0).unwrap() - 1.0 / 2.0f64.sqrt()).abs()
                < 1e-15
        );
        assert!((eval_basis(BasisFunctionId::F5, 1.0, 1).unwrap() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn order_zero_matches_fast_path() {
        for k in BasisFunctionId::ALL {
            for r in [0.0, 0.3, 1.0, 4.7, 50.0] {
                let a = eval_basis(k, r, 0).unwrap();
                let b = basis_value(k, r);
                assert!((a - b).abs() <= 1e-13 * (1.0 + b.abs()), "f{} at {r}", k.index());
            }
        }
    }

    #[test]
    fn derivatives_match_central_differences() {
        // Finite-difference oracle for orders 1..3 over a radius grid.
        let h = 1e-5;
        for k in BasisFunctionId::ALL {
            for order in 1..=3usize {
                for step in 0..20 {
                    let r = 0.1 * 10f64.powf(step as f64 / 9.5);
                    let up = eval_basis(k, r + h, order - 1).unwrap();
                    let down = eval_basis(k, r - h, order - 1).unwrap();
                    let fd = (up - down) / (2.0 * h);
                    let exact = eval_basis(k, r, order).unwrap();
                    assert!(
                        (fd - exact).abs() <= 1e-6 * (1.0 + exact.abs()),
                        "f{}^({order}) at {r}: fd={fd} exact={exact}",
                        k.index()
                    );
                }
            }
        }
    }

    #[test]
    fn first_derivative_at_typical_point() {
        // Spot check against a tighter finite difference at r = 0.7.
        for k in BasisFunctionId::ALL {
            let r = 0.7;
            let h = 1e-6;
            let fd = (eval_basis(k, r + h, 0).unwrap() - eval_basis(k, r - h, 0).unwrap())
                / (2.0 * h);
            let exact = eval_basis(k, r, 1).unwrap();
            assert!((fd - exact).abs() < 1e-7, "f{}'", k.index());
        }
    }

    #[test]
    fn rejects_out_of_range_requests() {
        assert!(BasisFunctionId::from_index(0).is_err());
        assert!(BasisFunctionId::from_index(8).is_err());
        assert!(eval_basis(BasisFunctionId::F1, 1.0, 7).is_err());
        assert!(eval_basis(BasisFunctionId::F1, -1.0, 0).is_err());
    }

    #[test]
    fn high_order_derivatives_are_finite_on_the_window() {
        for k in BasisFunctionId::ALL {
            for r in [1e-3, 0.5, 1.0, 10.0, 1e3] {
                let v = eval_basis(k, r, MAX_DERIVATIVE_ORDER).unwrap();
                assert!(v.is_finite());
            }
        }
    }
}
