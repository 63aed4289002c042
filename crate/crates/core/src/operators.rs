//! Spin operators, spherical tensor operators and their couplings for a pair
//! of spin-1/2 systems.
//!
//! Every two-qubit matrix in this crate is written in the product basis
//! ordered `{|↑↓⟩, |↓↑⟩, |↑↑⟩, |↓↓⟩}`. Single-qubit matrices use `{|↑⟩, |↓⟩}`,
//! so `σz = diag(1, -1)`. The ordering is part of the wire format of
//! [`TwoQubitOperator::to_dump_string`].
//!
//! Single-qubit tensors follow `T10 = Jz`, `T1±1 = ∓(Jx ± iJy)/√2`. The rank-0
//! tensor `T00` is `1/2` times the identity so that `Tr(T†T) = 1/2` for every
//! single-qubit tensor. `T00 ⊗ T00` therefore equals `1/4`, which is why the
//! product basis uses [`SphericalTensorLabel::Identity`] in its place.

use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use nalgebra::{Matrix2, Matrix4, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;
pub type Mat2 = Matrix2<C64>;
pub type Mat4 = Matrix4<C64>;

pub(crate) const ZERO: C64 = C64::new(0.0, 0.0);
pub(crate) const ONE: C64 = C64::new(1.0, 0.0);
pub(crate) const I: C64 = C64::new(0.0, 1.0);

/// Single-qubit basis indices `(qubit 1, qubit 2)` for each two-qubit basis
/// index, with `0 = ↑` and `1 = ↓`.
const PRODUCT_INDEX: [(usize, usize); 4] = [(0, 1), (1, 0), (0, 0), (1, 1)];

fn c(re: f64) -> C64 {
    C64::new(re, 0.0)
}

/// Dense 4×4 complex matrix on the two-qubit Hilbert space.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TwoQubitOperator(Mat4);

impl TwoQubitOperator {
    pub fn from_matrix(m: Mat4) -> Self {
        Self(m)
    }

    /// Builds an operator from a row-major slice of 16 entries.
    pub fn from_row_slice(entries: &[C64]) -> Result<Self> {
        if entries.len() != 16 {
            return Err(Error::InvalidArgument(format!(
                "expected 16 matrix entries, got {}",
                entries.len()
            )));
        }
        Ok(Self(Mat4::from_row_slice(entries)))
    }

    pub fn zero() -> Self {
        Self(Mat4::zeros())
    }

    pub fn identity() -> Self {
        Self(Mat4::identity())
    }

    /// `a ⊗ b` with `a` acting on qubit 1 and `b` on qubit 2.
    pub fn kron(a: &Mat2, b: &Mat2) -> Self {
        Self(Mat4::from_fn(|i, j| {
            let (i1, i2) = PRODUCT_INDEX[i];
            let (j1, j2) = PRODUCT_INDEX[j];
            a[(i1, j1)] * b[(i2, j2)]
        }))
    }

    /// Projector `|ψ⟩⟨ψ|` for an amplitude vector in the documented ordering.
    pub fn projector(amplitudes: [C64; 4]) -> Self {
        Self(Mat4::from_fn(|i, j| amplitudes[i] * amplitudes[j].conj()))
    }

    pub fn matrix(&self) -> &Mat4 {
        &self.0
    }

    pub fn into_matrix(self) -> Mat4 {
        self.0
    }

    pub fn get(&self, row: usize, col: usize) -> C64 {
        self.0[(row, col)]
    }

    pub fn dagger(&self) -> Self {
        Self(self.0.adjoint())
    }

    pub fn conj(&self) -> Self {
        Self(self.0.map(|z| z.conj()))
    }

    pub fn trace(&self) -> C64 {
        self.0.trace()
    }

    /// Hilbert-Schmidt product `Tr(A† B)`.
    pub fn hs_inner(&self, other: &Self) -> C64 {
        self.0
            .zip_fold(&other.0, ZERO, |acc, a, b| acc + a.conj() * b)
    }

    pub fn commutator(&self, other: &Self) -> Self {
        Self(self.0 * other.0 - other.0 * self.0)
    }

    pub fn scale(&self, factor: C64) -> Self {
        Self(self.0 * factor)
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.0
            .zip_fold(&other.0, 0.0_f64, |acc, a, b| acc.max((a - b).norm()))
    }

    pub fn max_abs(&self) -> f64 {
        self.0.fold(0.0_f64, |acc, a| acc.max(a.norm()))
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.max_abs_diff(&self.dagger()) <= tol
    }

    /// Eigenvalues of the Hermitian part, ascending.
    pub fn hermitian_eigenvalues(&self) -> [f64; 4] {
        let h = (self.0 + self.0.adjoint()) * c(0.5);
        let eig = SymmetricEigen::new(h);
        let mut vals = [0.0; 4];
        vals.copy_from_slice(eig.eigenvalues.as_slice());
        vals.sort_by(f64::total_cmp);
        vals
    }

    /// Hermitian, unit trace and positive semidefinite within `tol`.
    pub fn is_density_matrix(&self, tol: f64) -> bool {
        self.is_hermitian(tol)
            && (self.trace() - ONE).norm() <= tol
            && self.hermitian_eigenvalues()[0] >= -tol
    }

    pub fn purity(&self) -> f64 {
        (self.0 * self.0).trace().re
    }

    /// Reduced state of qubit 1 (trace over qubit 2).
    pub fn partial_trace_second(&self) -> Mat2 {
        let mut out = Mat2::zeros();
        for (i, &(i1, i2)) in PRODUCT_INDEX.iter().enumerate() {
            for (j, &(j1, j2)) in PRODUCT_INDEX.iter().enumerate() {
                if i2 == j2 {
                    out[(i1, j1)] += self.0[(i, j)];
                }
            }
        }
        out
    }

    /// Reduced state of qubit 2 (trace over qubit 1).
    pub fn partial_trace_first(&self) -> Mat2 {
        let mut out = Mat2::zeros();
        for (i, &(i1, i2)) in PRODUCT_INDEX.iter().enumerate() {
            for (j, &(j1, j2)) in PRODUCT_INDEX.iter().enumerate() {
                if i1 == j1 {
                    out[(i2, j2)] += self.0[(i, j)];
                }
            }
        }
        out
    }

    /// Row-major text dump: one row per line, entries as `re+imj` with 17
    /// significant digits, separated by single spaces.
    pub fn to_dump_string(&self) -> String {
        let mut out = String::new();
        for i in 0..4 {
            let row: Vec<String> = (0..4)
                .map(|j| {
                    let z = self.0[(i, j)];
                    format!("{:.16e}{:+.16e}j", z.re, z.im)
                })
                .collect();
            out.push_str(&row.join(" "));
            out.push('\n');
        }
        out
    }

    /// Inverse of [`to_dump_string`](Self::to_dump_string).
    pub fn from_dump_str(text: &str) -> Result<Self> {
        let entries = text
            .split_whitespace()
            .map(parse_complex)
            .collect::<Result<Vec<_>>>()?;
        Self::from_row_slice(&entries)
    }
}

fn parse_complex(token: &str) -> Result<C64> {
    let bad = || Error::InvalidArgument(format!("malformed complex entry `{token}`"));
    let body = token.strip_suffix('j').ok_or_else(bad)?;
    // split at the sign that starts the imaginary part (not an exponent sign)
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&k| (bytes[k] == b'+' || bytes[k] == b'-') && !matches!(bytes[k - 1], b'e' | b'E'))
        .ok_or_else(bad)?;
    let re: f64 = body[..split].parse().map_err(|_| bad())?;
    let im: f64 = body[split..].parse().map_err(|_| bad())?;
    Ok(C64::new(re, im))
}

impl fmt::Display for TwoQubitOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_dump_string())
    }
}

impl Add for TwoQubitOperator {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        Self(self.0 + rhs.0)
    }
}

impl AddAssign for TwoQubitOperator {
    fn add_assign(&mut self, rhs: Self) {
        self.0 += rhs.0;
    }
}

impl Sub for TwoQubitOperator {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        Self(self.0 - rhs.0)
    }
}

impl Neg for TwoQubitOperator {
    type Output = Self;
    fn neg(self) -> Self {
        Self(-self.0)
    }
}

impl Mul for TwoQubitOperator {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        Self(self.0 * rhs.0)
    }
}

impl Mul<C64> for TwoQubitOperator {
    type Output = Self;
    fn mul(self, rhs: C64) -> Self {
        Self(self.0 * rhs)
    }
}

impl Mul<f64> for TwoQubitOperator {
    type Output = Self;
    fn mul(self, rhs: f64) -> Self {
        Self(self.0 * c(rhs))
    }
}

/// Pauli matrices `σx, σy, σz`.
pub fn pauli() -> [Mat2; 3] {
    [
        Mat2::new(ZERO, ONE, ONE, ZERO),
        Mat2::new(ZERO, -I, I, ZERO),
        Mat2::new(ONE, ZERO, ZERO, -ONE),
    ]
}

/// Single-qubit spin operators `J = σ/2`.
pub fn spin_half() -> [Mat2; 3] {
    pauli().map(|s| s * c(0.5))
}

/// `Jx, Jy, Jz` of qubit `qubit` (1 or 2) embedded in the two-qubit space.
pub fn spin_operators(qubit: u8) -> Result<[TwoQubitOperator; 3]> {
    let id = Mat2::identity();
    let j = spin_half();
    match qubit {
        1 => Ok(j.map(|m| TwoQubitOperator::kron(&m, &id))),
        2 => Ok(j.map(|m| TwoQubitOperator::kron(&id, &m))),
        _ => Err(Error::InvalidArgument(format!(
            "qubit index must be 1 or 2, got {qubit}"
        ))),
    }
}

/// Single-qubit spherical tensor `T_lm` for `l ∈ {0, 1}`.
pub fn spherical_tensor(l: u8, m: i8) -> Result<Mat2> {
    let [jx, jy, jz] = spin_half();
    let s = std::f64::consts::FRAC_1_SQRT_2;
    match (l, m) {
        (0, 0) => Ok(Mat2::identity() * c(0.5)),
        (1, 0) => Ok(jz),
        (1, 1) => Ok((jx + jy * I) * c(-s)),
        (1, -1) => Ok((jx - jy * I) * c(s)),
        _ => Err(Error::InvalidArgument(format!(
            "no spin-1/2 spherical tensor with l = {l}, m = {m}"
        ))),
    }
}

/// Clebsch-Gordan coefficient `⟨1 m1; 1 m2 | L M⟩`.
pub fn clebsch_gordan_11(l: u8, m: i8, m1: i8, m2: i8) -> f64 {
    if m1 + m2 != m || m1.abs() > 1 || m2.abs() > 1 || m.unsigned_abs() > l {
        return 0.0;
    }
    let s2 = std::f64::consts::FRAC_1_SQRT_2;
    let s3 = 1.0 / 3.0_f64.sqrt();
    let s6 = 1.0 / 6.0_f64.sqrt();
    match (l, m, m1) {
        (2, 2, _) | (2, -2, _) => 1.0,
        (2, 1, _) | (2, -1, _) => s2,
        (2, 0, 0) => 2.0 * s6,
        (2, 0, _) => s6,
        (1, 1, 1) => s2,
        (1, 1, 0) => -s2,
        (1, 0, 1) => s2,
        (1, 0, 0) => 0.0,
        (1, 0, -1) => -s2,
        (1, -1, 0) => s2,
        (1, -1, -1) => -s2,
        (0, 0, 0) => -s3,
        (0, 0, _) => s3,
        _ => 0.0,
    }
}

/// Coupled tensor `T_{LM(11)} = Σ ⟨1 m1; 1 m2|L M⟩ T_{1m1} ⊗ T_{1m2}`.
pub fn coupled_tensor(l: u8, m: i8) -> Result<TwoQubitOperator> {
    if l > 2 || m.unsigned_abs() > l {
        return Err(Error::InvalidArgument(format!(
            "coupled tensor needs L ≤ 2 and |M| ≤ L, got L = {l}, M = {m}"
        )));
    }
    let mut out = TwoQubitOperator::zero();
    for m1 in -1..=1_i8 {
        let m2 = m - m1;
        let cg = clebsch_gordan_11(l, m, m1, m2);
        if cg != 0.0 {
            out += product_tensor(1, m1, 1, m2)? * cg;
        }
    }
    Ok(out)
}

/// `T_{l1 m1} ⊗ T_{l2 m2}`.
pub fn product_tensor(l1: u8, m1: i8, l2: u8, m2: i8) -> Result<TwoQubitOperator> {
    Ok(TwoQubitOperator::kron(
        &spherical_tensor(l1, m1)?,
        &spherical_tensor(l2, m2)?,
    ))
}

/// Names one element of a two-qubit tensor basis.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SphericalTensorLabel {
    /// The 4×4 identity.
    Identity,
    /// `T_{l1 m1} ⊗ T_{l2 m2}`.
    Product { l1: u8, m1: i8, l2: u8, m2: i8 },
    /// `T_{LM(11)}`.
    Coupled { l: u8, m: i8 },
}

impl SphericalTensorLabel {
    pub const fn product(l1: u8, m1: i8, l2: u8, m2: i8) -> Self {
        Self::Product { l1, m1, l2, m2 }
    }

    pub const fn coupled(l: u8, m: i8) -> Self {
        Self::Coupled { l, m }
    }

    pub fn operator(&self) -> Result<TwoQubitOperator> {
        match *self {
            Self::Identity => Ok(TwoQubitOperator::identity()),
            Self::Product { l1, m1, l2, m2 } => product_tensor(l1, m1, l2, m2),
            Self::Coupled { l, m } => coupled_tensor(l, m),
        }
    }

    /// Total magnetic number carried by the element.
    pub fn total_m(&self) -> i8 {
        match *self {
            Self::Identity => 0,
            Self::Product { m1, m2, .. } => m1 + m2,
            Self::Coupled { m, .. } => m,
        }
    }
}

impl fmt::Display for SphericalTensorLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Identity => write!(f, "1"),
            Self::Product { l1, m1, l2, m2 } => write!(f, "T{l1}{m1}⊗T{l2}{m2}"),
            Self::Coupled { l, m } => write!(f, "T{l}{m}(11)"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Basis {
    /// Identity plus the 15 products `T_{l1m1} ⊗ T_{l2m2}` other than `T00 ⊗ T00`.
    Product,
    /// Identity, the nine `T_{LM(11)}` and the six single-qubit products
    /// `T_{1m} ⊗ T00`, `T00 ⊗ T_{1m}`.
    Coupled,
}

impl Basis {
    pub fn labels(self) -> Vec<SphericalTensorLabel> {
        let mut out = vec![SphericalTensorLabel::Identity];
        let ms = |l: u8| -(l as i8)..=(l as i8);
        match self {
            Basis::Product => {
                for l1 in 0..=1 {
                    for m1 in ms(l1) {
                        for l2 in 0..=1 {
                            for m2 in ms(l2) {
                                if l1 + l2 > 0 {
                                    out.push(SphericalTensorLabel::product(l1, m1, l2, m2));
                                }
                            }
                        }
                    }
                }
            }
            Basis::Coupled => {
                for l in 0..=2 {
                    for m in ms(l) {
                        out.push(SphericalTensorLabel::coupled(l, m));
                    }
                }
                for m in ms(1) {
                    out.push(SphericalTensorLabel::product(1, m, 0, 0));
                }
                for m in ms(1) {
                    out.push(SphericalTensorLabel::product(0, 0, 1, m));
                }
            }
        }
        out
    }
}

/// Expansion coefficients of an operator in one of the tensor bases.
#[derive(Clone, Debug, PartialEq)]
pub struct DecompositionCoefficients {
    pub basis: Basis,
    pub coefficients: Vec<(SphericalTensorLabel, C64)>,
}

impl DecompositionCoefficients {
    pub fn get(&self, label: SphericalTensorLabel) -> Option<C64> {
        self.coefficients
            .iter()
            .find(|(l, _)| *l == label)
            .map(|(_, v)| *v)
    }

    pub fn recompose(&self) -> TwoQubitOperator {
        self.coefficients
            .iter()
            .fold(TwoQubitOperator::zero(), |acc, (label, coef)| {
                acc + label.operator().expect("basis labels are valid") * *coef
            })
    }
}

/// Hilbert-Schmidt projection `c = Tr(T†A) / Tr(T†T)` onto every element of
/// `basis`.
pub fn decompose(op: &TwoQubitOperator, basis: Basis) -> DecompositionCoefficients {
    let coefficients = basis
        .labels()
        .into_iter()
        .map(|label| {
            let t = label.operator().expect("basis labels are valid");
            (label, t.hs_inner(op) / t.hs_inner(&t))
        })
        .collect();
    DecompositionCoefficients {
        basis,
        coefficients,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BellState {
    PsiMinus,
    PsiPlus,
    PhiPlus,
    PhiMinus,
}

impl BellState {
    pub const ALL: [BellState; 4] = [
        BellState::PsiMinus,
        BellState::PsiPlus,
        BellState::PhiPlus,
        BellState::PhiMinus,
    ];

    pub fn name(self) -> &'static str {
        match self {
            BellState::PsiMinus => "psi_minus",
            BellState::PsiPlus => "psi_plus",
            BellState::PhiPlus => "phi_plus",
            BellState::PhiMinus => "phi_minus",
        }
    }

    pub fn amplitudes(self) -> [C64; 4] {
        let s = c(std::f64::consts::FRAC_1_SQRT_2);
        match self {
            BellState::PsiMinus => [s, -s, ZERO, ZERO],
            BellState::PsiPlus => [s, s, ZERO, ZERO],
            BellState::PhiPlus => [ZERO, ZERO, s, s],
            BellState::PhiMinus => [ZERO, ZERO, s, -s],
        }
    }

    pub fn density_matrix(self) -> TwoQubitOperator {
        TwoQubitOperator::projector(self.amplitudes())
    }
}

impl fmt::Display for BellState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for BellState {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        BellState::ALL
            .into_iter()
            .find(|b| b.name() == s)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown Bell state `{s}`")))
    }
}

pub fn bell_state(state: BellState) -> TwoQubitOperator {
    state.density_matrix()
}

/// Default tolerance of [`is_xcorr`].
pub const XCORR_TOL: f64 = 1e-9;

/// Tolerance used to accept a matrix as a density matrix.
pub const DENSITY_TOL: f64 = 1e-9;

/// Membership in the class of fully correlated X states: only the identity
/// and `T_{1m1} ⊗ T_{1m2}` with `m1 + m2 ∈ {0, ±2}` may appear.
pub fn is_xcorr(op: &TwoQubitOperator, tol: f64) -> Result<bool> {
    if !op.is_density_matrix(DENSITY_TOL) {
        return Err(Error::NotDensityMatrix);
    }
    let coeffs = decompose(op, Basis::Product);
    Ok(coeffs.coefficients.iter().all(|(label, value)| {
        let allowed = match *label {
            SphericalTensorLabel::Identity => true,
            SphericalTensorLabel::Product {
                l1: 1,
                m1,
                l2: 1,
                m2,
            } => (m1 + m2).abs() != 1,
            _ => false,
        };
        allowed || value.norm() <= tol
    }))
}

#[cfg(test)]
mod tests {
    use super::*;

    const EPS: f64 = 1e-12;

    fn j_plus() -> Mat2 {
        let [jx, jy, _] = spin_half();
        jx + jy * I
    }

    #[test]
    fn su2_commutators() {
        let [x1, y1, z1] = spin_operators(1).unwrap();
        let [_, y2, z2] = spin_operators(2).unwrap();
        assert!(x1.commutator(&y1).max_abs_diff(&(z1 * I)) < EPS);
        assert!(x1.commutator(&y2).max_abs() < EPS);
        let up_up = TwoQubitOperator::projector([ZERO, ZERO, ONE, ZERO]);
        let sz = z1 + z2;
        assert!((sz * up_up).max_abs_diff(&up_up) < EPS);
        assert!(spin_operators(3).is_err());
    }

    #[test]
    fn single_qubit_tensor_commutators() {
        let jz = spin_half()[2];
        let jp = j_plus();
        let t11 = spherical_tensor(1, 1).unwrap();
        let t10 = spherical_tensor(1, 0).unwrap();
        let t1m = spherical_tensor(1, -1).unwrap();
        assert!(((jz * t11 - t11 * jz) - t11).norm() < EPS);
        let lhs = jp * t1m - t1m * jp;
        assert!((lhs - t10 * c(2.0_f64.sqrt())).norm() < EPS);
        assert!((t11.adjoint() * t10).trace().norm() < EPS);
        assert!(spherical_tensor(1, 2).is_err());
        assert!(spherical_tensor(0, 1).is_err());
    }

    #[test]
    fn all_tensors_satisfy_defining_commutators() {
        let jz = spin_half()[2];
        let jp = j_plus();
        let jm = jp.adjoint();
        for l in 0..=1u8 {
            for m in -(l as i8)..=(l as i8) {
                let t = spherical_tensor(l, m).unwrap();
                assert!(((jz * t - t * jz) - t * c(m as f64)).norm() < EPS);
                let (lf, mf) = (l as f64, m as f64);
                let up = jp * t - t * jp;
                let up_expected = if m < l as i8 {
                    spherical_tensor(l, m + 1).unwrap() * c(((lf - mf) * (lf + mf + 1.0)).sqrt())
                } else {
                    Mat2::zeros()
                };
                assert!((up - up_expected).norm() < EPS);
                let down = jm * t - t * jm;
                let down_expected = if m > -(l as i8) {
                    spherical_tensor(l, m - 1).unwrap() * c(((lf + mf) * (lf - mf + 1.0)).sqrt())
                } else {
                    Mat2::zeros()
                };
                assert!((down - down_expected).norm() < EPS);
                assert!(((t.adjoint() * t).trace() - c(0.5)).norm() < EPS);
            }
        }
    }

    #[test]
    fn coupled_tensors_are_orthogonal() {
        let labels = Basis::Coupled.labels();
        for a in &labels {
            for b in &labels {
                let ip = a.operator().unwrap().hs_inner(&b.operator().unwrap());
                if a != b {
                    assert!(ip.norm() < EPS, "{a} vs {b}");
                }
            }
        }
        let t00 = coupled_tensor(0, 0).unwrap();
        let t20 = coupled_tensor(2, 0).unwrap();
        assert!(t00.hs_inner(&t20).norm() < EPS);
        assert!(coupled_tensor(3, 0).is_err());
        assert!(coupled_tensor(1, 2).is_err());
    }

    #[test]
    fn product_basis_is_orthogonal_and_complete() {
        let labels = Basis::Product.labels();
        assert_eq!(labels.len(), 16);
        assert_eq!(Basis::Coupled.labels().len(), 16);
        for (i, a) in labels.iter().enumerate() {
            for b in &labels[i + 1..] {
                let ip = a.operator().unwrap().hs_inner(&b.operator().unwrap());
                assert!(ip.norm() < EPS);
            }
        }
    }

    #[test]
    fn inverse_clebsch_gordan_recovers_products() {
        for m1 in -1..=1_i8 {
            for m2 in -1..=1_i8 {
                let m = m1 + m2;
                let mut rebuilt = TwoQubitOperator::zero();
                for l in 0..=2u8 {
                    if m.unsigned_abs() <= l {
                        rebuilt += coupled_tensor(l, m).unwrap() * clebsch_gordan_11(l, m, m1, m2);
                    }
                }
                let direct = product_tensor(1, m1, 1, m2).unwrap();
                assert!(rebuilt.max_abs_diff(&direct) < EPS);
            }
        }
    }

    #[test]
    fn bell_decompositions() {
        let s3 = 3.0_f64.sqrt();
        let psi_m = decompose(&bell_state(BellState::PsiMinus), Basis::Coupled);
        for (label, value) in &psi_m.coefficients {
            let expected = match label {
                SphericalTensorLabel::Identity => 0.25,
                SphericalTensorLabel::Coupled { l: 0, m: 0 } => s3,
                _ => 0.0,
            };
            assert!((value - c(expected)).norm() < EPS, "{label}");
        }
        let psi_p = decompose(&bell_state(BellState::PsiPlus), Basis::Coupled);
        let t20 = SphericalTensorLabel::coupled(2, 0);
        let t00 = SphericalTensorLabel::coupled(0, 0);
        assert!((psi_p.get(t20).unwrap() - c(-2.0 * (2.0_f64 / 3.0).sqrt())).norm() < EPS);
        assert!((psi_p.get(t00).unwrap() - c(-1.0 / s3)).norm() < EPS);
        for (state, sign) in [(BellState::PhiPlus, 1.0), (BellState::PhiMinus, -1.0)] {
            let d = decompose(&bell_state(state), Basis::Coupled);
            assert!((d.get(SphericalTensorLabel::coupled(2, 2)).unwrap() - c(sign)).norm() < EPS);
            assert!((d.get(SphericalTensorLabel::coupled(2, -2)).unwrap() - c(sign)).norm() < EPS);
            assert!((d.get(t20).unwrap() - c((2.0_f64 / 3.0).sqrt())).norm() < EPS);
            assert!((d.get(t00).unwrap() - c(-1.0 / s3)).norm() < EPS);
        }
    }

    #[test]
    fn bell_product_decompositions() {
        let p = |m1, m2| SphericalTensorLabel::product(1, m1, 1, m2);
        // coefficients are Tr(T†ρ)/Tr(T†T) with Tr(T†T) = 1/4
        let cases = [
            (
                BellState::PsiMinus,
                [(p(0, 0), -1.0), (p(1, -1), 1.0), (p(-1, 1), 1.0)],
            ),
            (
                BellState::PsiPlus,
                [(p(0, 0), -1.0), (p(1, -1), -1.0), (p(-1, 1), -1.0)],
            ),
            (
                BellState::PhiPlus,
                [(p(0, 0), 1.0), (p(1, 1), 1.0), (p(-1, -1), 1.0)],
            ),
            (
                BellState::PhiMinus,
                [(p(0, 0), 1.0), (p(1, 1), -1.0), (p(-1, -1), -1.0)],
            ),
        ];
        for (state, expected) in cases {
            let d = decompose(&bell_state(state), Basis::Product);
            for (label, value) in &d.coefficients {
                let want = if *label == SphericalTensorLabel::Identity {
                    0.25
                } else {
                    expected
                        .iter()
                        .find(|(l, _)| l == label)
                        .map_or(0.0, |(_, v)| *v)
                };
                assert!((value - c(want)).norm() < EPS, "{state} {label}");
            }
        }
    }

    #[test]
    fn bell_states_are_pure_with_mixed_marginals() {
        for b in BellState::ALL {
            let rho = bell_state(b);
            assert!(rho.is_density_matrix(EPS));
            assert!((rho.purity() - 1.0).abs() < EPS);
            let half = Mat2::identity() * c(0.5);
            assert!((rho.partial_trace_first() - half).norm() < EPS);
            assert!((rho.partial_trace_second() - half).norm() < EPS);
        }
    }

    #[test]
    fn maximally_mixed_decomposes_to_identity_only() {
        let mixed = TwoQubitOperator::identity() * 0.25;
        for basis in [Basis::Product, Basis::Coupled] {
            let d = decompose(&mixed, basis);
            for (label, value) in &d.coefficients {
                let want = if *label == SphericalTensorLabel::Identity {
                    0.25
                } else {
                    0.0
                };
                assert!((value - c(want)).norm() < EPS);
            }
        }
    }

    #[test]
    fn xcorr_membership() {
        for b in BellState::ALL {
            assert!(is_xcorr(&bell_state(b), XCORR_TOL).unwrap());
        }
        let up_up = TwoQubitOperator::projector([ZERO, ZERO, ONE, ZERO]);
        assert!(!is_xcorr(&up_up, XCORR_TOL).unwrap());
        for k in 0..=10 {
            let p = k as f64 / 10.0;
            let werner = bell_state(BellState::PsiMinus) * p
                + TwoQubitOperator::identity() * ((1.0 - p) / 4.0);
            assert!(is_xcorr(&werner, XCORR_TOL).unwrap());
        }
        let not_rho = TwoQubitOperator::identity();
        assert!(matches!(
            is_xcorr(&not_rho, XCORR_TOL),
            Err(Error::NotDensityMatrix)
        ));
    }

    #[test]
    fn dump_round_trip() {
        let rho = bell_state(BellState::PhiMinus) * C64::new(0.3, -0.7);
        let text = rho.to_dump_string();
        assert_eq!(text.lines().count(), 4);
        let back = TwoQubitOperator::from_dump_str(&text).unwrap();
        assert_eq!(back, rho);
        assert!(TwoQubitOperator::from_dump_str("1+2j").is_err());
    }

    #[test]
    fn basis_ordering_is_documented_order() {
        // Jz ⊗ 1 is diag(+1/2, -1/2, +1/2, -1/2) for {↑↓, ↓↑, ↑↑, ↓↓}
        let z1 = spin_operators(1).unwrap()[2];
        let diag: Vec<f64> = (0..4).map(|i| z1.get(i, i).re).collect();
        assert_eq!(diag, vec![0.5, -0.5, 0.5, -0.5]);
        let z2 = spin_operators(2).unwrap()[2];
        let diag: Vec<f64> = (0..4).map(|i| z2.get(i, i).re).collect();
        assert_eq!(diag, vec![-0.5, 0.5, 0.5, -0.5]);
    }
}
