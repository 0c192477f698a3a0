//! Adaptive quadrature: bisection with a fixed 15-point Gauss-Kronrod rule
//! per panel, absolute-tolerance driven.

use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum QuadratureError {
    #[error("adaptive quadrature failed to converge on [{lo}, {hi}] (estimated error {err:.3e})")]
    NonConvergence { lo: f64, hi: f64, err: f64 },
    #[error("invalid integration bounds [{lo}, {hi}]")]
    BadBounds { lo: f64, hi: f64 },
}

// 15-point Kronrod abscissae (positive half) and weights, with the embedded
// 7-point Gauss weights on the odd-indexed abscissae.
const XGK: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144838258730,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
];
const WGK: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];
const WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

/// One Gauss-Kronrod panel: returns (integral, error estimate).
fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let f_center = f(center);
    let mut res_gauss = WG[3] * f_center;
    let mut res_kronrod = WGK[7] * f_center;
    for j in 0..7 {
        let x = half * XGK[j];
        let fsum = f(center - x) + f(center + x);
        res_kronrod += WGK[j] * fsum;
        if j % 2 == 1 {
            res_gauss += WG[j / 2] * fsum;
        }
    }
    let err = ((res_kronrod - res_gauss) * half).abs();
    (res_kronrod * half, err)
}

/// Integrates `f` over `[a, b]` to absolute tolerance `abs_tol`.
pub fn integrate<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    abs_tol: f64,
) -> Result<f64, QuadratureError> {
    if !(a.is_finite() && b.is_finite() && a < b && abs_tol > 0.0) {
        return Err(QuadratureError::BadBounds { lo: a, hi: b });
    }
    integrate_panel(f, a, b, abs_tol, 0)
}

fn integrate_panel<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    tol: f64,
    depth: u32,
) -> Result<f64, QuadratureError> {
    let (value, err) = gk15(f, a, b);
    if err <= 0.5 * tol {
        return Ok(value);
    }
    if depth >= 48 {
        return Err(QuadratureError::NonConvergence { lo: a, hi: b, err });
    }
    let mid = 0.5 * (a + b);
    let left = integrate_panel(f, a, mid, 0.5 * tol, depth + 1)?;
    let right = integrate_panel(f, mid, b, 0.5 * tol, depth + 1)?;
    Ok(left + right)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn polynomial_is_exact() {
        let v = integrate(&|x: f64| 3.0 * x * x, 0.0, 2.0, 1e-13).unwrap();
        assert!((v - 8.0).abs() < 1e-12);
    }

    #[test]
    fn oscillatory_integrand_converges() {
        let v = integrate(&|x: f64| (10.0 * x).sin(), 0.0, PI, 1e-12).unwrap();
        let exact = (1.0 - (10.0 * PI).cos()) / 10.0;
        assert!((v - exact).abs() < 1e-11);
    }

    #[test]
    fn rejects_bad_bounds() {
        assert!(integrate(&|x: f64| x, 1.0, 0.0, 1e-10).is_err());
        assert!(integrate(&|x: f64| x, 0.0, 1.0, -1.0).is_err());
    }
}
