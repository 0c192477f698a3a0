//! Wronskians of the generating basis: numeric determinants of the analytic
//! derivative matrix, and the closed forms they are checked against.

use nalgebra::DMatrix;

use crate::basis::{eval_basis, BasisFunctionId};

use super::expr::lookup;
use super::CertifyError;

fn wronskian_of(ids: &[BasisFunctionId], r: f64) -> f64 {
    let k = ids.len();
    let m = DMatrix::from_fn(k, k, |row, col| {
        eval_basis(ids[col], r, row).expect("order within basis table")
    });
    m.determinant()
}

/// Determinant of the k x k derivative matrix of (f1..fk).
pub fn wronskian_numeric(k: usize, r: f64) -> Result<f64, CertifyError> {
    if !(1..=7).contains(&k) {
        return Err(CertifyError::OrderOutOfRange(k));
    }
    if !(r > 0.0) {
        return Err(CertifyError::NonPositiveRadius(r));
    }
    Ok(wronskian_of(&BasisFunctionId::ALL[..k], r))
}

/// Closed-form Wronskian of (f1..fk).
pub fn wronskian_closed(k: usize, r: f64) -> Result<f64, CertifyError> {
    if !(1..=7).contains(&k) {
        return Err(CertifyError::OrderOutOfRange(k));
    }
    if !(r > 0.0) {
        return Err(CertifyError::NonPositiveRadius(r));
    }
    let u = 1.0 + r * r;
    let s = u.sqrt();
    let v = match k {
        1 => r,
        2 => r * r,
        3 => -3.0 * r.powi(4) / (u.powi(2) * s),
        4 => -6.0 * r.powi(7) * (4.0 * r * r + 5.0) / u.powi(5),
        5 => 12.0 * r.powi(3) / u.powi(9) * lookup("g1").unwrap().eval_core(r),
        6 => -24.0 * r / u.powi(13) * lookup("g2").unwrap().eval_core(r),
        7 => 1728.0 / (u.powi(17) * s) * lookup("g3").unwrap().eval_core(r),
        _ => unreachable!(),
    };
    Ok(v)
}

const SMOOTH_BASIS: [BasisFunctionId; 4] = [
    BasisFunctionId::F2,
    BasisFunctionId::F3,
    BasisFunctionId::F4,
    BasisFunctionId::F7,
];

/// Determinant of the k x k derivative matrix of the smooth basis
/// (f2, f3, f4, f7).
pub fn smooth_wronskian_numeric(k: usize, r: f64) -> Result<f64, CertifyError> {
    if !(1..=4).contains(&k) {
        return Err(CertifyError::OrderOutOfRange(k));
    }
    if !(r > 0.0) {
        return Err(CertifyError::NonPositiveRadius(r));
    }
    Ok(wronskian_of(&SMOOTH_BASIS[..k], r))
}

/// Closed-form smooth-basis Wronskian; the order-4 core factors as
/// 12 r^6 (sqrt(1+r^2) - 1)^4 / (1+r^2)^5.
pub fn smooth_wronskian_closed(k: usize, r: f64) -> Result<f64, CertifyError> {
    if !(1..=4).contains(&k) {
        return Err(CertifyError::OrderOutOfRange(k));
    }
    if !(r > 0.0) {
        return Err(CertifyError::NonPositiveRadius(r));
    }
    let u = 1.0 + r * r;
    let s = u.sqrt();
    let v = match k {
        1 => r * r,
        2 => -r.powi(5) / (u * s),
        3 => -2.0 * r.powi(9) / u.powi(3),
        4 => 12.0 * r.powi(6) * (s - 1.0).powi(4) / u.powi(5),
        _ => unreachable!(),
    };
    Ok(v)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn low_order_spot_values() {
        assert!((wronskian_numeric(2, 2.0).unwrap() - 4.0).abs() < 1e-12);
        let w3 = wronskian_numeric(3, 1.0).unwrap();
        assert!((w3 - (-3.0 / 2.0f64.powf(2.5))).abs() < 1e-10, "{w3}");
        let w4 = wronskian_numeric(4, 1.0).unwrap();
        assert!((w4 - (-27.0 / 16.0)).abs() < 1e-9, "{w4}");
    }

    #[test]
    fn closed_matches_numeric_on_sample_radii() {
        for k in 2..=7 {
            for r in [0.5, 1.0, 2.0, 5.0] {
                let numeric = wronskian_numeric(k, r).unwrap();
                let closed = wronskian_closed(k, r).unwrap();
                assert!(
                    (numeric - closed).abs() <= 1e-7 * (1.0 + closed.abs()),
                    "W{k}({r}): numeric={numeric} closed={closed}"
                );
            }
        }
    }

    #[test]
    fn prefactor_identity_at_one() {
        let w5 = wronskian_closed(5, 1.0).unwrap();
        let g1 = super::super::expr::eval_aux("g1", 1.0).unwrap();
        assert!((w5 - 12.0 / 512.0 * g1).abs() < 1e-12);
        let w6 = wronskian_closed(6, 1.0).unwrap();
        let g2 = super::super::expr::eval_aux("g2", 1.0).unwrap();
        assert!((w6 - (-24.0 / 8192.0) * g2).abs() < 1e-11);
    }

    #[test]
    fn smooth_closed_matches_numeric() {
        for k in 1..=4 {
            for r in [0.3, 1.0, 2.0, 8.0] {
                let numeric = smooth_wronskian_numeric(k, r).unwrap();
                let closed = smooth_wronskian_closed(k, r).unwrap();
                assert!(
                    (numeric - closed).abs() <= 1e-7 * (1.0 + closed.abs()),
                    "V{k}({r}): numeric={numeric} closed={closed}"
                );
            }
        }
    }

    #[test]
    fn rejects_bad_arguments() {
        assert!(wronskian_numeric(0, 1.0).is_err());
        assert!(wronskian_numeric(8, 1.0).is_err());
        assert!(wronskian_numeric(3, 0.0).is_err());
        assert!(smooth_wronskian_numeric(5, 1.0).is_err());
    }
}
