//! Verified-numerics toolkit for the first-order averaging analysis of a
//! planar cubic center perturbed by piecewise-smooth cubic polynomials with
//! switching line y = 0.
//!
//! The crate is organized around the analysis pipeline:
//!
//! * [`coeffs`] — exact rational model of the 40 perturbation coefficients
//!   and the linear chain down to the seven basis coordinates nu1..nu7;
//! * [`integrals`] — closed forms of the half-circle monomial integrals with
//!   an adaptive-quadrature oracle;
//! * [`averaged`] — evaluation of the averaged function, a direct-quadrature
//!   oracle, and zero isolation;
//! * [`certify`] — Wronskians of the generating basis and rigorous
//!   interval-arithmetic sign certificates establishing the sharp zero
//!   bounds (6 piecewise, 3 smooth);
//! * [`realize`] — parameter vectors attaining the maximal zero counts;
//! * [`simulate`] — direct integration of the discontinuous system and
//!   Poincare return-map validation of the averaging prediction.

pub mod averaged;
pub mod basis;
pub mod certify;
pub mod coeffs;
pub mod integrals;
pub mod interval;
pub mod ode;
pub mod poly;
pub mod quad;
pub mod rat;
pub mod realize;
pub mod simulate;

/// Half-plane selector: the vector field's polynomials switch across y = 0.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum Half {
    /// y > 0, swept by theta in (0, pi).
    Upper,
    /// y < 0, swept by theta in (pi, 2pi).
    Lower,
}

impl Half {
    pub fn index(self) -> usize {
        match self {
            Half::Upper => 0,
            Half::Lower => 1,
        }
    }
}

pub use averaged::{direct_average, isolate_zeros, RadialFunction};
pub use coeffs::{
    ab_from_nu, jacobian_determinant, mu_from_omega, nu_from_ab, nu_from_mu, omega_from_ab,
    MuTable, NuVector, OmegaTable, PerturbationCoefficients,
};
pub use integrals::{eval_i, eval_j, quadrature_oracle, MonomialIntegralId};
