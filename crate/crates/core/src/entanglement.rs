//! Concurrence of two-qubit states.

use nalgebra::SymmetricEigen;

use crate::error::{Error, Result};
use crate::operators::{
    is_xcorr, pauli, Mat4, SphericalTensorLabel, TwoQubitOperator, C64, XCORR_TOL,
};

/// Most negative eigenvalue accepted before a matrix is rejected as not
/// positive semidefinite. Ensemble averages carry statistical noise at this
/// scale.
pub const PSD_TOL: f64 = 1e-8;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ConcurrenceMethod {
    Wootters,
    XcorrClosedForm,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Concurrence {
    pub value: f64,
    pub method: ConcurrenceMethod,
}

/// Spin-flipped state `(σy ⊗ σy) ρ* (σy ⊗ σy)`.
pub fn time_reverse(rho: &TwoQubitOperator) -> TwoQubitOperator {
    let sy = pauli()[1];
    let yy = TwoQubitOperator::kron(&sy, &sy);
    yy * rho.conj() * yy
}

fn hermitian_sqrt(m: &Mat4) -> Mat4 {
    let eig = SymmetricEigen::new(*m);
    let roots = eig.eigenvalues.map(|v| C64::new(v.max(0.0).sqrt(), 0.0));
    let v = eig.eigenvectors;
    v * Mat4::from_diagonal(&roots) * v.adjoint()
}

/// Wootters concurrence `max{0, r1 - r2 - r3 - r4}`, where `r_i` are the
/// square roots of the eigenvalues of `ρ τ(ρ)` in descending order.
///
/// `√ρ τ(ρ) √ρ` is similar to `ρ τ(ρ)` and factors as `M M†` with
/// `M = √ρ (σy⊗σy) √ρ*`, so the `r_i` are the singular values of `M`. This
/// avoids square roots of near-zero eigenvalues, which would turn rounding
/// at 1e-16 into errors of order 1e-8 for nearly pure states.
pub fn concurrence_wootters(rho: &TwoQubitOperator) -> Result<Concurrence> {
    if !rho.is_hermitian(PSD_TOL) || (rho.trace().re - 1.0).abs() > PSD_TOL {
        return Err(Error::NotDensityMatrix);
    }
    let herm = (rho.matrix() + rho.matrix().adjoint()) * C64::new(0.5, 0.0);
    let min_eig = SymmetricEigen::new(herm)
        .eigenvalues
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min);
    if min_eig < -PSD_TOL {
        return Err(Error::NotDensityMatrix);
    }
    let sqrt_rho = hermitian_sqrt(&herm);
    let sy = pauli()[1];
    let yy = TwoQubitOperator::kron(&sy, &sy);
    let m = sqrt_rho * yy.matrix() * sqrt_rho.conjugate();
    let mut r: Vec<f64> = m.singular_values().iter().copied().collect();
    r.sort_by(|a, b| b.total_cmp(a));
    let value = (r[0] - r[1] - r[2] - r[3]).max(0.0);
    Ok(Concurrence {
        value,
        method: ConcurrenceMethod::Wootters,
    })
}

/// Concurrence of an X_corr state from the three tensor expectations it
/// depends on: `⟨T11⊗T1-1⟩`, `⟨T11⊗T11⟩` and `⟨T10⊗T10⟩`.
pub fn concurrence_from_expectations(t11_t1m1: C64, t11_t11: C64, t10_t10: f64) -> f64 {
    let a = 2.0 * t11_t1m1.norm() - 0.25 - t10_t10;
    let b = 2.0 * t11_t11.norm() - 0.25 + t10_t10;
    2.0 * a.max(b).max(0.0)
}

/// Labels entering [`concurrence_from_expectations`], in argument order.
pub const XCORR_LABELS: [SphericalTensorLabel; 3] = [
    SphericalTensorLabel::product(1, 1, 1, -1),
    SphericalTensorLabel::product(1, 1, 1, 1),
    SphericalTensorLabel::product(1, 0, 1, 0),
];

/// Closed-form concurrence valid for fully correlated X states only.
pub fn concurrence_xcorr(rho: &TwoQubitOperator) -> Result<Concurrence> {
    if !is_xcorr(rho, XCORR_TOL)? {
        return Err(Error::NotXcorr);
    }
    let [z, w, zz] = XCORR_LABELS.map(|l| tensor_expectation(rho, l));
    Ok(Concurrence {
        value: concurrence_from_expectations(z, w, zz.re),
        method: ConcurrenceMethod::XcorrClosedForm,
    })
}

/// `⟨T⟩ = Tr(T ρ)`.
pub fn tensor_expectation(rho: &TwoQubitOperator, label: SphericalTensorLabel) -> C64 {
    let t = label.operator().expect("labels name valid tensors");
    (t * *rho).trace()
}
