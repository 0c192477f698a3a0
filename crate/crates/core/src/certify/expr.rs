//! The auxiliary expressions whose signs on (0, +inf) drive the ECT verdicts.
//!
//! Every expression is a combination
//!
//!   prefactor(r) * [ ats(r) atan(r) sqrt(1+r^2) + at(r) atan(r)
//!                    + sq(r) sqrt(1+r^2) + p(r) ]
//!
//! with exact integer coefficient polynomials and a prefactor
//! r^a / (1+r^2)^(b/2) that is strictly positive on (0, +inf), so the sign of
//! the expression equals the sign of the bracketed core. The g-expressions
//! are the Wronskian numerators of the full 7-function basis; the v-series
//! are the Wronskian cores of the smooth 4-function basis (f2, f3, f4, f7).

use once_cell::sync::Lazy;

use crate::interval::Interval;
use crate::poly::{horner, horner_interval, RatPoly};

use super::series::{series_bracket, SeriesBracket};

/// Positive-on-(0,inf) prefactor `r^r_pow / (1+r^2)^(inv_sqrt_pow/2)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Prefactor {
    pub r_pow: i32,
    pub inv_sqrt_pow: i32,
}

impl Prefactor {
    pub const ONE: Prefactor = Prefactor { r_pow: 0, inv_sqrt_pow: 0 };

    pub fn eval(&self, r: f64) -> f64 {
        let s = (1.0 + r * r).sqrt();
        r.powi(self.r_pow) / s.powi(self.inv_sqrt_pow)
    }
}

/// One named auxiliary expression with cached evaluation data.
pub struct AuxExpr {
    pub id: &'static str,
    pub atan_sqrt: RatPoly,
    pub atan: RatPoly,
    pub sqrt: RatPoly,
    pub poly: RatPoly,
    pub prefactor: Prefactor,
    f64_ats: Vec<f64>,
    f64_at: Vec<f64>,
    f64_sq: Vec<f64>,
    f64_p: Vec<f64>,
    iv_ats: Vec<Interval>,
    iv_at: Vec<Interval>,
    iv_sq: Vec<Interval>,
    iv_p: Vec<Interval>,
    bracket: Lazy<SeriesBracket, Box<dyn FnOnce() -> SeriesBracket + Send>>,
}

impl AuxExpr {
    fn new(
        id: &'static str,
        atan_sqrt: RatPoly,
        atan: RatPoly,
        sqrt: RatPoly,
        poly: RatPoly,
        prefactor: Prefactor,
    ) -> Self {
        let f64_ats = atan_sqrt.to_f64_coeffs();
        let f64_at = atan.to_f64_coeffs();
        let f64_sq = sqrt.to_f64_coeffs();
        let f64_p = poly.to_f64_coeffs();
        let iv_ats = atan_sqrt.to_interval_coeffs();
        let iv_at = atan.to_interval_coeffs();
        let iv_sq = sqrt.to_interval_coeffs();
        let iv_p = poly.to_interval_coeffs();
        let (b_ats, b_at, b_sq, b_p) =
            (atan_sqrt.clone(), atan.clone(), sqrt.clone(), poly.clone());
        Self {
            id,
            atan_sqrt,
            atan,
            sqrt,
            poly,
            prefactor,
            f64_ats,
            f64_at,
            f64_sq,
            f64_p,
            iv_ats,
            iv_at,
            iv_sq,
            iv_p,
            bracket: Lazy::new(Box::new(move || {
                series_bracket(&b_ats, &b_at, &b_sq, &b_p)
            })),
        }
    }

    /// Core value (prefactor stripped).
    pub fn eval_core(&self, r: f64) -> f64 {
        let s = (1.0 + r * r).sqrt();
        let at = r.atan();
        horner(&self.f64_ats, r) * at * s
            + horner(&self.f64_at, r) * at
            + horner(&self.f64_sq, r) * s
            + horner(&self.f64_p, r)
    }

    /// Full expression value.
    pub fn eval(&self, r: f64) -> f64 {
        self.prefactor.eval(r) * self.eval_core(r)
    }

    /// Sum of absolute core term magnitudes at `r`: the scale against which
    /// f64 evaluation error of the core is measured.
    pub fn eval_core_abs(&self, r: f64) -> f64 {
        let s = (1.0 + r * r).sqrt();
        let at = r.atan();
        let abs_horner = |c: &[f64]| -> f64 {
            let mut acc = 0.0f64;
            for v in c.iter().rev() {
                acc = acc.mul_add(r, v.abs());
            }
            acc
        };
        abs_horner(&self.f64_ats) * at * s
            + abs_horner(&self.f64_at) * at
            + abs_horner(&self.f64_sq) * s
            + abs_horner(&self.f64_p)
    }

    /// Outward-rounded enclosure of the core over `iv`, by direct interval
    /// evaluation (Horner polynomials, monotone atan and sqrt extensions).
    pub fn enclose_core_direct(&self, iv: Interval) -> Interval {
        let s = iv.sqrt1p_sq();
        let at = iv.atan();
        horner_interval(&self.iv_ats, iv)
            .mul(at)
            .mul(s)
            .add(horner_interval(&self.iv_at, iv).mul(at))
            .add(horner_interval(&self.iv_sq, iv).mul(s))
            .add(horner_interval(&self.iv_p, iv))
    }

    /// Lower/upper polynomial bracket of the core near 0 (series form).
    pub fn series_bracket(&self) -> &SeriesBracket {
        &self.bracket
    }

    pub fn has_transcendental_part(&self) -> bool {
        !(self.atan_sqrt.is_zero() && self.atan.is_zero() && self.sqrt.is_zero())
    }
}

fn terms(list: &[(usize, i64)]) -> RatPoly {
    RatPoly::from_terms(list)
}

fn zero() -> RatPoly {
    RatPoly::zero()
}

/// Registry of every certifiable expression, keyed by id.
pub static EXPRESSIONS: Lazy<Vec<AuxExpr>> = Lazy::new(|| {
    vec![
        // Wronskian numerator of (f1..f5): g1 = A atan + B.
        AuxExpr::new(
            "g1",
            zero(),
            terms(&[(10, 12), (8, -27), (6, -258), (4, -507), (2, -408), (0, -120)]),
            zero(),
            terms(&[(9, 12), (7, 169), (5, 411), (3, 373), (1, 120)]),
            Prefactor::ONE,
        ),
        // Its derivative.
        AuxExpr::new(
            "g1_prime",
            zero(),
            terms(&[(9, 120), (7, -216), (5, -1548), (3, -2028), (1, -816)]),
            zero(),
            terms(&[(8, 120), (6, 1144), (4, 1836), (2, 831)]),
            Prefactor::ONE,
        ),
        // Wronskian numerator of (f1..f6).
        AuxExpr::new(
            "g2",
            zero(),
            terms(&[
                (12, 216),
                (10, 168),
                (8, 843),
                (6, 4986),
                (4, 8175),
                (2, 5160),
                (0, 1080),
            ]),
            zero(),
            terms(&[
                (11, 216),
                (9, 96),
                (7, -3061),
                (5, -6655),
                (3, -4800),
                (1, -1080),
            ]),
            Prefactor::ONE,
        ),
        // Wronskian numerator of (f1..f7): g3 = A atan + B sqrt + C.
        AuxExpr::new(
            "g3",
            zero(),
            terms(&[(11, 3120), (9, 10500), (7, 13155), (5, 7350), (3, 1575)]),
            terms(&[
                (10, -4864),
                (8, -14048),
                (6, -14224),
                (4, -6020),
                (2, -1120),
                (0, -160),
            ]),
            terms(&[
                (10, 3120),
                (8, 9460),
                (6, 10279),
                (4, 4985),
                (2, 1200),
                (0, 160),
            ]),
            Prefactor::ONE,
        ),
        // g3' = (r / sqrt(1+r^2)) * [P atan sqrt + Q sqrt + S].
        AuxExpr::new(
            "g3_prime",
            terms(&[(9, 34320), (7, 94500), (5, 92085), (3, 36750), (1, 4725)]),
            zero(),
            terms(&[(8, 34320), (6, 83060), (4, 67449), (2, 21515), (0, 2400)]),
            terms(&[
                (10, -53504),
                (8, -175072),
                (6, -211952),
                (4, -115444),
                (2, -27440),
                (0, -2400),
            ]),
            Prefactor { r_pow: 1, inv_sqrt_pow: 1 },
        ),
        // -sqrt(1+r^2) * d/dr (g3' sqrt(1+r^2) / r).
        AuxExpr::new(
            "g31",
            zero(),
            terms(&[
                (10, -343200),
                (8, -1064880),
                (6, -1214010),
                (4, -607425),
                (2, -119700),
                (0, -4725),
            ]),
            terms(&[
                (9, 535040),
                (7, 1400576),
                (5, 1271712),
                (3, 461776),
                (1, 54880),
            ]),
            terms(&[
                (9, -343200),
                (7, -950480),
                (5, -927690),
                (3, -371091),
                (1, -50155),
            ]),
            Prefactor::ONE,
        ),
        // Low-order Wronskians of the full basis (pure monomial cores).
        AuxExpr::new("w1", zero(), zero(), zero(), terms(&[(1, 1)]), Prefactor::ONE),
        AuxExpr::new("w2", zero(), zero(), zero(), terms(&[(2, 1)]), Prefactor::ONE),
        AuxExpr::new(
            "w3",
            zero(),
            zero(),
            zero(),
            terms(&[(4, -3)]),
            Prefactor { r_pow: 0, inv_sqrt_pow: 5 },
        ),
        AuxExpr::new(
            "w4",
            zero(),
            zero(),
            zero(),
            terms(&[(9, -24), (7, -30)]),
            Prefactor { r_pow: 0, inv_sqrt_pow: 10 },
        ),
        // Wronskians of the smooth basis (f2, f3, f4, f7).
        AuxExpr::new("v1", zero(), zero(), zero(), terms(&[(2, 1)]), Prefactor::ONE),
        AuxExpr::new(
            "v2",
            zero(),
            zero(),
            zero(),
            terms(&[(5, -1)]),
            Prefactor { r_pow: 0, inv_sqrt_pow: 3 },
        ),
        AuxExpr::new(
            "v3",
            zero(),
            zero(),
            zero(),
            terms(&[(9, -2)]),
            Prefactor { r_pow: 0, inv_sqrt_pow: 6 },
        ),
        // 12 r^6 (sqrt(1+r^2) - 1)^4 / (1+r^2)^5, expanded core.
        AuxExpr::new(
            "v4",
            zero(),
            zero(),
            terms(&[(2, -48), (0, -96)]),
            terms(&[(4, 12), (2, 96), (0, 96)]),
            Prefactor { r_pow: 6, inv_sqrt_pow: 10 },
        ),
    ]
});

/// Looks up an expression by id (aliases `g1p`/`g3p` accepted).
pub fn lookup(id: &str) -> Option<&'static AuxExpr> {
    let id = match id {
        "g1p" => "g1_prime",
        "g3p" => "g3_prime",
        other => other,
    };
    EXPRESSIONS.iter().find(|e| e.id == id)
}

/// Ids of every registered expression.
pub fn all_ids() -> Vec<&'static str> {
    EXPRESSIONS.iter().map(|e| e.id).collect()
}

/// Value of the named auxiliary expression at `r`.
pub fn eval_aux(id: &str, r: f64) -> Option<f64> {
    lookup(id).map(|e| e.eval(r))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn g1_spot_value_at_one() {
        // Term-by-term: coefficient sums give 1085 - 327 pi.
        let expected = 1085.0 - 327.0 * PI;
        let got = eval_aux("g1", 1.0).unwrap();
        assert!((got - expected).abs() < 1e-11, "{got} vs {expected}");
    }

    #[test]
    fn g2_spot_value_at_one() {
        let expected = 5157.0 * PI - 15284.0;
        let got = eval_aux("g2", 1.0).unwrap();
        assert!((got - expected).abs() < 1e-10, "{got} vs {expected}");
    }

    #[test]
    fn g_expressions_vanish_at_zero() {
        for id in ["g1", "g3"] {
            let v = eval_aux(id, 1e-9).unwrap();
            assert!(v.abs() < 1e-9, "{id}(0+) = {v}");
        }
    }

    #[test]
    fn g3_prime_is_the_derivative_of_g3() {
        let h = 1e-6;
        for r in [0.3f64, 1.0, 2.5, 8.0] {
            let fd =
                (eval_aux("g3", r + h).unwrap() - eval_aux("g3", r - h).unwrap()) / (2.0 * h);
            let exact = eval_aux("g3_prime", r).unwrap();
            assert!(
                (fd - exact).abs() <= 1e-4 * (1.0 + exact.abs()),
                "r={r}: fd={fd} exact={exact}"
            );
        }
    }

    #[test]
    fn g1_prime_is_the_derivative_of_g1() {
        let h = 1e-6;
        for r in [0.5, 1.0, 3.0] {
            let fd =
                (eval_aux("g1", r + h).unwrap() - eval_aux("g1", r - h).unwrap()) / (2.0 * h);
            let exact = eval_aux("g1_prime", r).unwrap();
            assert!((fd - exact).abs() <= 1e-4 * (1.0 + exact.abs()));
        }
    }

    #[test]
    fn g31_matches_the_displayed_chain_quantity() {
        // -sqrt(1+r^2) d/dr (g3' sqrt(1+r^2)/r) == g31, checked numerically.
        let h = 1e-6;
        for r in [0.5f64, 1.0, 2.0] {
            let phi = |r: f64| eval_aux("g3_prime", r).unwrap() * (1.0 + r * r).sqrt() / r;
            let lhs = -(1.0 + r * r).sqrt() * (phi(r + h) - phi(r - h)) / (2.0 * h);
            let rhs = eval_aux("g31", r).unwrap();
            assert!(
                (lhs - rhs).abs() <= 1e-3 * (1.0 + rhs.abs()),
                "r={r}: {lhs} vs {rhs}"
            );
        }
    }

    #[test]
    fn v4_core_is_a_fourth_power() {
        // The v4 core equals 12 (sqrt(1+r^2) - 1)^4.
        for r in [0.2f64, 1.0, 3.0, 10.0] {
            let e = lookup("v4").unwrap();
            let s = (1.0 + r * r).sqrt();
            let expected = 12.0 * (s - 1.0).powi(4);
            let got = e.eval_core(r);
            assert!((got - expected).abs() <= 1e-9 * (1.0 + expected.abs()));
        }
    }

    #[test]
    fn direct_enclosures_contain_point_values() {
        for id in ["g1", "g1_prime", "g2", "g3", "g3_prime", "g31", "v4"] {
            let e = lookup(id).unwrap();
            for (a, b) in [(0.4, 0.45), (1.0, 1.1), (10.0, 10.5)] {
                let enc = e.enclose_core_direct(Interval::new(a, b));
                for t in 0..=10 {
                    let r = a + (b - a) * t as f64 / 10.0;
                    let v = e.eval_core(r);
                    assert!(
                        enc.lo <= v && v <= enc.hi,
                        "{id} on [{a},{b}]: {v} outside [{}, {}]",
                        enc.lo,
                        enc.hi
                    );
                }
            }
        }
    }
}
