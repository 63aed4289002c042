//! Linear maps on two-qubit operators.
//!
//! Operators are vectorized row-major: `vec(A)[4i + j] = A[i][j]`. With this
//! convention left multiplication `X A` is `X ⊗ 1`, right multiplication
//! `A X` is `1 ⊗ Xᵀ` and the commutator map `ad_H = H ⊗ 1 - 1 ⊗ Hᵀ`.
//!
//! Superoperators built here act in the Heisenberg picture, on observables.
//! [`SuperOperator::schrodinger_dual`] gives the matching map on states.

use std::ops::{Add, Mul, Neg, Sub};

use nalgebra::{SMatrix, SVector};

use crate::operators::{spin_operators, Mat4, TwoQubitOperator, C64};

pub type Mat16 = SMatrix<C64, 16, 16>;
pub type Vec16 = SVector<C64, 16>;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SuperOperator(Mat16);

pub fn vectorize(op: &TwoQubitOperator) -> Vec16 {
    let m = op.matrix();
    Vec16::from_fn(|k, _| m[(k / 4, k % 4)])
}

pub fn unvectorize(v: &Vec16) -> TwoQubitOperator {
    TwoQubitOperator::from_matrix(Mat4::from_fn(|i, j| v[4 * i + j]))
}

fn kron4(a: &Mat4, b: &Mat4) -> Mat16 {
    Mat16::from_fn(|r, c| a[(r / 4, c / 4)] * b[(r % 4, c % 4)])
}

impl SuperOperator {
    pub fn from_matrix(m: Mat16) -> Self {
        Self(m)
    }

    pub fn matrix(&self) -> &Mat16 {
        &self.0
    }

    pub fn identity() -> Self {
        Self(Mat16::identity())
    }

    pub fn zero() -> Self {
        Self(Mat16::zeros())
    }

    /// `A ↦ X A`.
    pub fn left(x: &TwoQubitOperator) -> Self {
        Self(kron4(x.matrix(), &Mat4::identity()))
    }

    /// `A ↦ A X`.
    pub fn right(x: &TwoQubitOperator) -> Self {
        Self(kron4(&Mat4::identity(), &x.matrix().transpose()))
    }

    /// `A ↦ [H, A]`.
    pub fn ad(h: &TwoQubitOperator) -> Self {
        Self::left(h) - Self::right(h)
    }

    /// `A ↦ X A X†`.
    pub fn conjugation(x: &TwoQubitOperator) -> Self {
        Self::left(x) * Self::right(&x.dagger())
    }

    pub fn apply(&self, op: &TwoQubitOperator) -> TwoQubitOperator {
        unvectorize(&(self.0 * vectorize(op)))
    }

    pub fn scale(&self, factor: C64) -> Self {
        Self(self.0 * factor)
    }

    /// Matrix exponential by scaling and squaring with a Padé approximant.
    pub fn exp(&self) -> Self {
        Self(self.0.exp())
    }

    /// The map `𝒰*` on states defined by `Tr(ρ 𝒰A) = Tr((𝒰*ρ) A)`.
    ///
    /// In the row-major vectorization this is `P 𝒰ᵀ P` with `P` the
    /// permutation implementing the transpose.
    pub fn schrodinger_dual(&self) -> Self {
        let t = self.0.transpose();
        let p = |k: usize| 4 * (k % 4) + k / 4;
        Self(Mat16::from_fn(|r, c| t[(p(r), p(c))]))
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        (self.0 - other.0)
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    }

    /// Commutator of two superoperators.
    pub fn commutator(&self, other: &Self) -> Self {
        *self * *other - *other * *self
    }
}

impl Add for SuperOperator {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        Self(self.0 + rhs.0)
    }
}

impl Sub for SuperOperator {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        Self(self.0 - rhs.0)
    }
}

impl Neg for SuperOperator {
    type Output = Self;
    fn neg(self) -> Self {
        Self(-self.0)
    }
}

impl Mul for SuperOperator {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        Self(self.0 * rhs.0)
    }
}

impl Mul<f64> for SuperOperator {
    type Output = Self;
    fn mul(self, rhs: f64) -> Self {
        Self(self.0 * C64::new(rhs, 0.0))
    }
}

/// Commutator maps `𝒥_i⁽ⁿ⁾ = ad(J_i⁽ⁿ⁾)` indexed `[qubit][axis]`, qubits
/// 0-based.
pub fn spin_superoperators() -> [[SuperOperator; 3]; 2] {
    let ops = |q: u8| spin_operators(q).expect("qubit index is 1 or 2");
    [
        ops(1).map(|j| SuperOperator::ad(&j)),
        ops(2).map(|j| SuperOperator::ad(&j)),
    ]
}

/// Total-spin commutator maps `𝒥_i = 𝒥_i⁽¹⁾ + 𝒥_i⁽²⁾`.
pub fn total_spin_superoperators() -> [SuperOperator; 3] {
    let [a, b] = spin_superoperators();
    [a[0] + b[0], a[1] + b[1], a[2] + b[2]]
}

/// `𝒥² = Σ_i 𝒥_i²`.
pub fn total_spin_squared() -> SuperOperator {
    total_spin_superoperators()
        .into_iter()
        .fold(SuperOperator::zero(), |acc, j| acc + j * j)
}

/// `𝒥_n² = Σ_i (𝒥_i⁽ⁿ⁾)²` for qubit `n` (0-based).
pub fn qubit_spin_squared(n: usize) -> SuperOperator {
    spin_superoperators()[n]
        .into_iter()
        .fold(SuperOperator::zero(), |acc, j| acc + j * j)
}
