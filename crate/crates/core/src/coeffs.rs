//! Exact coefficient algebra: perturbation coefficients and the linear chain
//! a/b -> omega -> mu -> nu, its canonical inverse section, and the exact
//! Jacobian determinant of the nu/mu map.

use std::collections::BTreeMap;

use num_traits::Zero;
use serde::de::Error as DeError;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::rat::{format_rat, parse_rat, rat, rat_int, Rat};
use crate::Half;

/// Monomial exponent pairs `(i, j)` with `i + j <= 3`, in key order.
pub const CUBIC_INDICES: [(u8, u8); 10] = [
    (0, 0),
    (0, 1),
    (0, 2),
    (0, 3),
    (1, 0),
    (1, 1),
    (1, 2),
    (2, 0),
    (2, 1),
    (3, 0),
];

/// Exponent pairs `(i, j)` with `1 <= i + j <= 4` (omega/mu index set).
pub fn degree_indices() -> impl Iterator<Item = (u8, u8)> {
    (0..=4u8).flat_map(|i| (0..=4u8 - i).map(move |j| (i, j))).filter(|&(i, j)| i + j >= 1)
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CoeffError {
    #[error("coefficient index ({0},{1}) outside 0 <= i+j <= 3")]
    IndexOutOfRange(u8, u8),
    #[error("coefficient table must have exactly the 10 cubic keys, got {0}")]
    WrongKeySet(usize),
}

/// Coefficient table of one bivariate cubic polynomial, exactly the 10
/// monomials with `i + j <= 3`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CubicTable {
    entries: BTreeMap<(u8, u8), Rat>,
}

impl Default for CubicTable {
    fn default() -> Self {
        Self::zero()
    }
}

impl CubicTable {
    pub fn zero() -> Self {
        let entries = CUBIC_INDICES.iter().map(|&ij| (ij, rat_int(0))).collect();
        Self { entries }
    }

    pub fn set(&mut self, i: u8, j: u8, value: Rat) -> Result<(), CoeffError> {
        if i + j > 3 {
            return Err(CoeffError::IndexOutOfRange(i, j));
        }
        self.entries.insert((i, j), value);
        Ok(())
    }

    pub fn get(&self, i: u8, j: u8) -> Rat {
        self.entries.get(&(i, j)).cloned().unwrap_or_else(|| rat_int(0))
    }

    /// Reads with the out-of-range convention `a[-1][j] = a[i][-1] = 0`.
    pub fn get_or_zero(&self, i: i32, j: i32) -> Rat {
        if i < 0 || j < 0 || i + j > 3 {
            rat_int(0)
        } else {
            self.get(i as u8, j as u8)
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = (&(u8, u8), &Rat)> {
        self.entries.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.values().all(Zero::is_zero)
    }

    /// Dense f64 copy for the evaluation-side consumers.
    pub fn to_f64(&self) -> CubicF64 {
        let mut c = [[0.0; 4]; 4];
        for (&(i, j), v) in self.entries.iter() {
            c[i as usize][j as usize] = crate::rat::rat_to_f64(v);
        }
        CubicF64 { c }
    }
}

/// Dense f64 view of a cubic coefficient table, for evaluation hot paths.
#[derive(Debug, Clone, Copy, Default)]
pub struct CubicF64 {
    c: [[f64; 4]; 4],
}

impl CubicF64 {
    pub fn eval(&self, x: f64, y: f64) -> f64 {
        let xs = [1.0, x, x * x, x * x * x];
        let ys = [1.0, y, y * y, y * y * y];
        let mut acc = 0.0;
        for i in 0..4 {
            for j in 0..4 - i {
                let cij = self.c[i][j];
                if cij != 0.0 {
                    acc += cij * xs[i] * ys[j];
                }
            }
        }
        acc
    }
}

/// The 40 free constants of the piecewise-cubic perturbation: per half-plane
/// one cubic for each vector-field component.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct PerturbationCoefficients {
    pub a: [CubicTable; 2],
    pub b: [CubicTable; 2],
}

impl PerturbationCoefficients {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn a(&self, half: Half) -> &CubicTable {
        &self.a[half.index()]
    }

    pub fn b(&self, half: Half) -> &CubicTable {
        &self.b[half.index()]
    }

    pub fn is_zero(&self) -> bool {
        self.a.iter().all(CubicTable::is_zero) && self.b.iter().all(CubicTable::is_zero)
    }

    /// Copies the upper-half coefficients onto the lower half, the restriction
    /// under which the perturbation is a single smooth cubic. The resulting
    /// mu table vanishes in every odd total degree, so nu1 = nu5 = nu6 = 0.
    pub fn smooth_restriction(&self) -> Self {
        Self {
            a: [self.a[0].clone(), self.a[0].clone()],
            b: [self.b[0].clone(), self.b[0].clone()],
        }
    }
}

fn table_to_json(t: &CubicTable) -> BTreeMap<String, String> {
    t.iter().map(|(&(i, j), c)| (format!("{i},{j}"), format_rat(c))).collect()
}

fn table_from_json(m: &BTreeMap<String, String>) -> Result<CubicTable, String> {
    if m.len() != CUBIC_INDICES.len() {
        return Err(CoeffError::WrongKeySet(m.len()).to_string());
    }
    let mut t = CubicTable::zero();
    for (key, value) in m {
        let (i, j) = key
            .split_once(',')
            .ok_or_else(|| format!("bad index key `{key}`"))?;
        let i: u8 = i.trim().parse().map_err(|_| format!("bad index key `{key}`"))?;
        let j: u8 = j.trim().parse().map_err(|_| format!("bad index key `{key}`"))?;
        let v = parse_rat(value).map_err(|e| e.to_string())?;
        t.set(i, j, v).map_err(|e| e.to_string())?;
    }
    Ok(t)
}

#[derive(Serialize, Deserialize)]
struct CoeffsWire {
    a1: BTreeMap<String, String>,
    b1: BTreeMap<String, String>,
    a2: BTreeMap<String, String>,
    b2: BTreeMap<String, String>,
}

impl Serialize for PerturbationCoefficients {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        CoeffsWire {
            a1: table_to_json(&self.a[0]),
            b1: table_to_json(&self.b[0]),
            a2: table_to_json(&self.a[1]),
            b2: table_to_json(&self.b[1]),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for PerturbationCoefficients {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let wire = CoeffsWire::deserialize(deserializer)?;
        Ok(Self {
            a: [
                table_from_json(&wire.a1).map_err(D::Error::custom)?,
                table_from_json(&wire.a2).map_err(D::Error::custom)?,
            ],
            b: [
                table_from_json(&wire.b1).map_err(D::Error::custom)?,
                table_from_json(&wire.b2).map_err(D::Error::custom)?,
            ],
        })
    }
}

/// Per-half table omega[i][j] = a[i-1][j] + b[i][j-1] on `1 <= i+j <= 4`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OmegaTable {
    entries: [BTreeMap<(u8, u8), Rat>; 2],
}

impl OmegaTable {
    pub fn zero() -> Self {
        let side: BTreeMap<(u8, u8), Rat> =
            degree_indices().map(|ij| (ij, rat_int(0))).collect();
        Self { entries: [side.clone(), side] }
    }

    pub fn get(&self, half: Half, i: u8, j: u8) -> Rat {
        self.entries[half.index()]
            .get(&(i, j))
            .cloned()
            .unwrap_or_else(|| rat_int(0))
    }

    pub fn set(&mut self, half: Half, i: u8, j: u8, value: Rat) {
        assert!((1..=4).contains(&(i + j)), "omega index ({i},{j}) out of range");
        self.entries[half.index()].insert((i, j), value);
    }
}

/// Combined table mu[i][j] = omega1[i][j] + (-1)^(i+j) omega2[i][j].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MuTable {
    entries: BTreeMap<(u8, u8), Rat>,
}

impl MuTable {
    pub fn zero() -> Self {
        Self { entries: degree_indices().map(|ij| (ij, rat_int(0))).collect() }
    }

    pub fn get(&self, i: u8, j: u8) -> Rat {
        self.entries.get(&(i, j)).cloned().unwrap_or_else(|| rat_int(0))
    }

    pub fn set(&mut self, i: u8, j: u8, value: Rat) {
        assert!((1..=4).contains(&(i + j)), "mu index ({i},{j}) out of range");
        self.entries.insert((i, j), value);
    }

    /// Entries with odd first index multiply half-circle integrals that vanish
    /// identically, so they never reach the averaged function.
    pub fn is_inert(i: u8, _j: u8) -> bool {
        i % 2 == 1
    }

    /// The eight entries that actually feed the averaged function.
    pub fn live_entries(&self) -> impl Iterator<Item = ((u8, u8), &Rat)> {
        self.entries
            .iter()
            .filter(|((i, j), _)| !Self::is_inert(*i, *j))
            .map(|(&ij, c)| (ij, c))
    }

    pub fn iter(&self) -> impl Iterator<Item = (&(u8, u8), &Rat)> {
        self.entries.iter()
    }
}

/// The seven independent parameters of the averaged function in its
/// generating basis.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct NuVector(pub [Rat; 7]);

impl NuVector {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn from_rats(v: [Rat; 7]) -> Self {
        Self(v)
    }

    /// 1-based accessor matching the usual nu1..nu7 naming.
    pub fn nu(&self, k: usize) -> &Rat {
        assert!((1..=7).contains(&k));
        &self.0[k - 1]
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(Zero::is_zero)
    }

    pub fn to_f64(&self) -> [f64; 7] {
        std::array::from_fn(|k| crate::rat::rat_to_f64(&self.0[k]))
    }
}

impl Serialize for NuVector {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let strings: Vec<String> = self.0.iter().map(format_rat).collect();
        strings.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for NuVector {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let strings: Vec<String> = Vec::deserialize(deserializer)?;
        if strings.len() != 7 {
            return Err(D::Error::custom(format!(
                "nu vector needs exactly 7 entries, got {}",
                strings.len()
            )));
        }
        let mut v: [Rat; 7] = Default::default();
        for (slot, s) in v.iter_mut().zip(&strings) {
            *slot = parse_rat(s).map_err(D::Error::custom)?;
        }
        Ok(Self(v))
    }
}

/// omega[k][i][j] = a[k][i-1][j] + b[k][i][j-1], out-of-range reads as zero.
pub fn omega_from_ab(coeffs: &PerturbationCoefficients) -> OmegaTable {
    let mut out = OmegaTable::zero();
    for half in [Half::Upper, Half::Lower] {
        for (i, j) in degree_indices() {
            let v = coeffs.a(half).get_or_zero(i as i32 - 1, j as i32)
                + coeffs.b(half).get_or_zero(i as i32, j as i32 - 1);
            out.set(half, i, j, v);
        }
    }
    out
}

/// mu = omega1 + omega2 in even total degree, omega1 - omega2 in odd.
pub fn mu_from_omega(omega: &OmegaTable) -> MuTable {
    let mut out = MuTable::zero();
    for (i, j) in degree_indices() {
        let upper = omega.get(Half::Upper, i, j);
        let lower = omega.get(Half::Lower, i, j);
        let v = if (i + j) % 2 == 0 { upper + lower } else { upper - lower };
        out.set(i, j, v);
    }
    out
}

/// The linear map from the live mu entries to the basis coordinates nu1..nu7.
pub fn nu_from_mu(mu: &MuTable) -> NuVector {
    let m = |i: u8, j: u8| mu.get(i, j);
    let half = rat(1, 2);
    NuVector([
        m(2, 1) - m(0, 3),
        &half * m(4, 0) + &half * m(2, 2) - rat(3, 2) * m(0, 4),
        m(0, 2) - m(2, 2) + rat_int(2) * m(0, 4),
        m(0, 4),
        m(0, 1) - m(2, 1) + m(0, 3),
        m(0, 3),
        m(2, 0) - m(0, 2) - m(4, 0) + m(2, 2) - m(0, 4),
    ])
}

/// Convenience for the full forward chain.
pub fn nu_from_ab(coeffs: &PerturbationCoefficients) -> NuVector {
    nu_from_mu(&mu_from_omega(&omega_from_ab(coeffs)))
}

/// Pivot ordering of the mu entries for the Jacobian of the nu map.
pub const NU_PIVOTS: [(u8, u8); 7] =
    [(2, 1), (4, 0), (0, 2), (0, 4), (0, 1), (0, 3), (2, 0)];

/// Partial derivative of nu_row w.r.t. the mu entry `(i, j)`.
fn nu_mu_partial(row: usize, (i, j): (u8, u8)) -> Rat {
    let mut mu = MuTable::zero();
    mu.set(i, j, rat_int(1));
    nu_from_mu(&mu).0[row].clone()
}

/// Determinant by exact Gaussian elimination with first-nonzero pivoting.
fn det_rat(mut m: Vec<Vec<Rat>>) -> Rat {
    let n = m.len();
    let mut det = rat_int(1);
    for col in 0..n {
        let pivot_row = match (col..n).find(|&row| !m[row][col].is_zero()) {
            Some(r) => r,
            None => return rat_int(0),
        };
        if pivot_row != col {
            m.swap(pivot_row, col);
            det = -det;
        }
        let pivot = m[col][col].clone();
        det *= &pivot;
        for row in col + 1..n {
            if m[row][col].is_zero() {
                continue;
            }
            let factor = &m[row][col] / &pivot;
            for k in col..n {
                let delta = &factor * &m[col][k];
                m[row][k] -= delta;
            }
        }
    }
    det
}

/// Exact determinant of the 7x7 Jacobian of nu1..nu7 with respect to the
/// given ordering of pivot mu entries.
pub fn jacobian_determinant_for(pivots: &[(u8, u8); 7]) -> Rat {
    let m: Vec<Vec<Rat>> = (0..7)
        .map(|row| pivots.iter().map(|&ij| nu_mu_partial(row, ij)).collect())
        .collect();
    det_rat(m)
}

/// Exact determinant of the nu/mu Jacobian over the canonical pivot set.
pub fn jacobian_determinant() -> Rat {
    jacobian_determinant_for(&NU_PIVOTS)
}

/// Inverts the nu system over the pivot entries, all non-pivot mu set to 0.
pub fn mu_from_nu_canonical(nu: &NuVector) -> MuTable {
    let n = |k: usize| nu.nu(k).clone();
    let mut mu = MuTable::zero();
    // Solved in dependency order; mu22 is not a pivot and stays zero.
    let mu04 = n(4);
    let mu03 = n(6);
    let mu21 = n(1) + &mu03;
    let mu01 = n(5) + &mu21 - &mu03;
    let mu40 = rat_int(2) * n(2) + rat_int(3) * &mu04;
    let mu02 = n(3) - rat_int(2) * &mu04;
    let mu20 = n(7) + &mu02 + &mu40 + &mu04;
    mu.set(0, 4, mu04);
    mu.set(0, 3, mu03);
    mu.set(2, 1, mu21);
    mu.set(0, 1, mu01);
    mu.set(4, 0, mu40);
    mu.set(0, 2, mu02);
    mu.set(2, 0, mu20);
    mu
}

/// Canonical section of the underdetermined inverse: lower-half coefficients
/// all zero, non-pivot mu all zero, each omega entry realized by a single
/// a- or b-coefficient.
pub fn ab_from_nu(nu: &NuVector) -> PerturbationCoefficients {
    let mu = mu_from_nu_canonical(nu);
    let mut coeffs = PerturbationCoefficients::zero();
    for (&(i, j), value) in mu.iter() {
        if value.is_zero() {
            continue;
        }
        // With the lower half zero, mu == omega1 in every degree; realize
        // omega1[i][j] via a[i-1][j] when i >= 1, else via b[0][j-1].
        if i >= 1 {
            coeffs.a[0].set(i - 1, j, value.clone()).expect("index in range");
        } else {
            coeffs.b[0].set(0, j - 1, value.clone()).expect("index in range");
        }
    }
    coeffs
}
