//! Closed-form concurrence evolution of Bell states.

use crate::error::{Error, Result};
use crate::noise::{transverse_decay, Axes, NoiseSpec};
use crate::operators::{product_tensor, BellState, TwoQubitOperator, C64};
use crate::superop::{
    qubit_spin_squared, spin_superoperators, total_spin_squared, total_spin_superoperators,
    vectorize, Mat16, SuperOperator,
};

/// `η = √(1 + 8γ²)/3`.
pub fn eta(gamma: f64) -> f64 {
    (1.0 + 8.0 * gamma * gamma).sqrt() / 3.0
}

/// Noise regimes with closed-form concurrences.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Regime {
    /// Pure dephasing by any Gaussian noise; entanglement only decays
    /// asymptotically.
    Dephasing,
    IsotropicWhite {
        gamma: f64,
        t_white: f64,
    },
    TransverseWhite {
        gamma: f64,
        t_white: f64,
    },
}

impl Regime {
    fn check(&self) -> Result<()> {
        match *self {
            Regime::Dephasing => Ok(()),
            Regime::IsotropicWhite { gamma, t_white }
            | Regime::TransverseWhite { gamma, t_white } => check_white(gamma, t_white),
        }
    }

    /// Concurrence at `t` without the clipping at zero.
    fn unclipped(&self, state: BellState, t: f64) -> f64 {
        match *self {
            Regime::Dephasing => 1.0,
            Regime::IsotropicWhite { gamma, t_white } => {
                isotropic_white_unclipped(state, gamma, t / t_white)
            }
            Regime::TransverseWhite { gamma, t_white } => {
                transverse_white_unclipped(state, gamma, t / t_white)
            }
        }
    }
}

fn check_white(gamma: f64, t_white: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&gamma) {
        return Err(Error::InvalidArgument(format!(
            "gamma must lie in [0, 1], got {gamma}"
        )));
    }
    if !(t_white > 0.0 && t_white.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "T must be positive, got {t_white}"
        )));
    }
    Ok(())
}

fn check_time(t: f64) -> Result<()> {
    if t >= 0.0 && t.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!(
            "time must be non-negative, got {t}"
        )))
    }
}

/// Exact concurrence under pure dephasing, `Γ = (Γ₁ + Γ₂)/2`.
pub fn dephasing_concurrence(state: BellState, gamma_mean: f64, gamma_cross: f64) -> f64 {
    match state {
        BellState::PsiMinus | BellState::PsiPlus => (-2.0 * (gamma_mean - gamma_cross)).exp(),
        BellState::PhiPlus | BellState::PhiMinus => (-2.0 * (gamma_mean + gamma_cross)).exp(),
    }
    .min(1.0)
}

fn isotropic_white_unclipped(state: BellState, gamma: f64, s: f64) -> f64 {
    let a = (-4.0 * (1.0 - gamma) * s).exp();
    match state {
        BellState::PsiMinus => -0.5 + 1.5 * a,
        _ => -0.5 + a / 6.0 * (1.0 + 8.0 * (-6.0 * gamma * s).exp()),
    }
}

/// Concurrence under isotropic white noise with cross-correlation `gamma`.
pub fn isotropic_white_concurrence(
    state: BellState,
    gamma: f64,
    t_white: f64,
    t: f64,
) -> Result<f64> {
    check_white(gamma, t_white)?;
    check_time(t)?;
    Ok(isotropic_white_unclipped(state, gamma, t / t_white).clamp(0.0, 1.0))
}

fn transverse_white_unclipped(state: BellState, gamma: f64, s: f64) -> f64 {
    let eta = eta(gamma);
    let fast = (-3.0 * (1.0 + eta) * s).exp();
    let slow = (-3.0 * (1.0 - eta) * s).exp();
    let d = 12.0 * eta;
    match state {
        BellState::PsiMinus => {
            let k = 1.0 + 8.0 * gamma;
            -0.5 + fast * (9.0 * eta - k) / d + slow * (9.0 * eta + k) / d
        }
        BellState::PsiPlus => {
            let k = 1.0 - 8.0 * gamma;
            -0.5 + fast * (9.0 * eta - k) / d + slow * (9.0 * eta + k) / d
        }
        BellState::PhiPlus | BellState::PhiMinus => {
            -0.5 + (-2.0 * s).exp() + slow * (3.0 * eta - 1.0) / d + fast * (3.0 * eta + 1.0) / d
        }
    }
}

/// Concurrence under purely transverse white noise with cross-correlation
/// `gamma`.
pub fn transverse_white_concurrence(
    state: BellState,
    gamma: f64,
    t_white: f64,
    t: f64,
) -> Result<f64> {
    check_white(gamma, t_white)?;
    check_time(t)?;
    Ok(transverse_white_unclipped(state, gamma, t / t_white).clamp(0.0, 1.0))
}

/// First time at which the concurrence reaches zero, or `+∞` if it only
/// decays asymptotically.
///
/// The root is bracketed on `[0, 10 T]` and refined by bisection until the
/// bracket stops shrinking.
pub fn sudden_death_time(state: BellState, regime: Regime) -> Result<f64> {
    regime.check()?;
    let t_white = match regime {
        Regime::Dephasing => return Ok(f64::INFINITY),
        Regime::IsotropicWhite { t_white, .. } | Regime::TransverseWhite { t_white, .. } => t_white,
    };
    let f = |t: f64| regime.unclipped(state, t);
    let horizon = 10.0 * t_white;
    if f(horizon) > 0.0 {
        return Ok(f64::INFINITY);
    }
    // first sign change on a coarse grid
    let n = 1000;
    let mut hi = horizon;
    let mut lo = 0.0;
    for k in 1..=n {
        let t = horizon * k as f64 / n as f64;
        if f(t) <= 0.0 {
            hi = t;
            lo = horizon * (k - 1) as f64 / n as f64;
            break;
        }
    }
    loop {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi || hi - lo <= 1e-15 * hi {
            break;
        }
        if f(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Quasi-static-bath concurrence with a flag for the `Ω ≫ σ` validity
/// domain.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QsbaConcurrence {
    pub value: f64,
    /// False when `max(σ₁, σ₂)/Ω > 0.3`.
    pub valid: bool,
}

/// Ratio `σ/Ω` above which the quasi-static formulas are flagged.
pub const QSBA_VALIDITY_RATIO: f64 = 0.3;

/// Quasi-static limit `t ≪ t_c` of purely transverse noise.
///
/// Uncorrelated noise gives `Π 1/√(1 + (t/τₙ)²)` with `τₙ = Ω/σₙ²`. Fully
/// correlated noise leaves `Ψ±` untouched and gives `1/√(1 + (t/τ)²)`,
/// `τ = Ω/2σ²`, for `Φ±`; unequal amplitudes enter as `σ² = σ₁σ₂`.
pub fn qsba_concurrence(
    state: BellState,
    correlated: bool,
    sigma: [f64; 2],
    omega: f64,
    t: f64,
) -> Result<QsbaConcurrence> {
    check_time(t)?;
    if sigma.iter().any(|s| !(*s >= 0.0 && s.is_finite())) {
        return Err(Error::InvalidArgument(format!(
            "noise amplitudes must be non-negative, got {sigma:?}"
        )));
    }
    if !(omega > 0.0 && omega.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "splitting must be positive, got {omega}"
        )));
    }
    let valid = sigma[0].max(sigma[1]) / omega <= QSBA_VALIDITY_RATIO;
    let factor = |x: f64| 1.0 / (1.0 + x * x).sqrt();
    let value = if correlated {
        match state {
            BellState::PsiMinus | BellState::PsiPlus => 1.0,
            BellState::PhiPlus | BellState::PhiMinus => {
                factor(2.0 * sigma[0] * sigma[1] * t / omega)
            }
        }
    } else {
        factor(sigma[0] * sigma[0] * t / omega) * factor(sigma[1] * sigma[1] * t / omega)
    };
    Ok(QsbaConcurrence { value, valid })
}

#[derive(Clone, Debug, PartialEq)]
pub struct EigenPair {
    pub eigenvalue: f64,
    pub operator: TwoQubitOperator,
}

#[derive(Clone, Debug, PartialEq)]
pub struct EigenSystem {
    pub pairs: Vec<EigenPair>,
}

/// `𝓛 = γ𝒥² + (1-γ)(𝒥z⁽¹⁾𝒥z⁽²⁾ + 𝒥z⁽²⁾𝒥z⁽¹⁾)`.
pub fn transverse_l_superoperator(gamma: f64) -> SuperOperator {
    let [a, b] = spin_superoperators();
    total_spin_squared() * gamma + (a[2] * b[2] + b[2] * a[2]) * (1.0 - gamma)
}

fn tp(m1: i8, m2: i8) -> TwoQubitOperator {
    product_tensor(1, m1, 1, m2).expect("rank-1 labels are valid")
}

/// The nine eigenpairs of [`transverse_l_superoperator`] on the span of
/// `T1m1 ⊗ T1m2`.
///
/// The mixing coefficient `(1-3η)/2γ` is evaluated as `-4γ/(1+3η)`, which is
/// regular at `γ = 0`. The partner eigenoperator with `(1+3η)/2γ` is scaled
/// by `2γ` for the same reason and tends to `T10⊗T10` as `γ → 0`.
pub fn transverse_l_eigensystem(gamma: f64) -> Result<EigenSystem> {
    if !(0.0..=1.0).contains(&gamma) {
        return Err(Error::InvalidArgument(format!(
            "gamma must lie in [0, 1], got {gamma}"
        )));
    }
    let eta = eta(gamma);
    let sym = tp(1, -1) + tp(-1, 1);
    let pair = |eigenvalue: f64, operator: TwoQubitOperator| EigenPair {
        eigenvalue,
        operator,
    };
    let mut pairs = vec![
        pair(2.0 * (1.0 + 2.0 * gamma), tp(1, 1)),
        pair(2.0 * (1.0 + 2.0 * gamma), tp(-1, -1)),
        pair(-2.0 * (1.0 - 2.0 * gamma), tp(-1, 1) - tp(1, -1)),
        pair(
            -1.0 + 4.0 * gamma - 3.0 * eta,
            sym + tp(0, 0) * (-4.0 * gamma / (1.0 + 3.0 * eta)),
        ),
        pair(
            -1.0 + 4.0 * gamma + 3.0 * eta,
            sym * (2.0 * gamma) + tp(0, 0) * (1.0 + 3.0 * eta),
        ),
    ];
    for m in [1, -1] {
        pairs.push(pair(6.0 * gamma, tp(0, m) + tp(m, 0)));
        pairs.push(pair(2.0 * gamma, tp(0, m) - tp(m, 0)));
    }
    Ok(EigenSystem { pairs })
}

fn projector(op: &TwoQubitOperator) -> Mat16 {
    let v = vectorize(op);
    let norm = v.norm_squared();
    v * v.adjoint() / C64::new(norm, 0.0)
}

/// Heisenberg-picture propagator of transverse white noise,
/// `e^{iΩt𝒥z} e^{-[(1-γ)(𝒥₁²+𝒥₂²) - 𝒥z²]t/T} e^{-t𝓛/T}`.
///
/// On the span of `T1m1 ⊗ T1m2` it is assembled from
/// [`transverse_l_eigensystem`]; each eigenoperator carries a definite `M`
/// and `l₁ = l₂ = 1`, so every factor is diagonal there. The remaining
/// seven dimensions are handled by a matrix exponential.
pub fn transverse_white_propagator(
    gamma: f64,
    t_white: f64,
    omega: f64,
    t: f64,
) -> Result<SuperOperator> {
    check_white(gamma, t_white)?;
    check_time(t)?;
    let s = t / t_white;
    let system = transverse_l_eigensystem(gamma)?;
    let jz = total_spin_superoperators()[2];
    let mut sector = Mat16::zeros();
    let mut sector_projector = Mat16::zeros();
    for p in &system.pairs {
        let m =
            jz.apply(&p.operator).hs_inner(&p.operator).re / p.operator.hs_inner(&p.operator).re;
        let m = m.round();
        let rate = (1.0 - gamma) * 4.0 - m * m + p.eigenvalue;
        let factor = C64::new(-rate * s, m * omega * t).exp();
        let proj = projector(&p.operator);
        sector += proj * factor;
        sector_projector += proj;
    }
    let generator = jz.scale(C64::new(0.0, omega * t))
        - ((qubit_spin_squared(0) + qubit_spin_squared(1)) * (1.0 - gamma) - jz * jz
            + transverse_l_superoperator(gamma))
            * s;
    let rest = *generator.exp().matrix() * (Mat16::identity() - sector_projector);
    Ok(SuperOperator::from_matrix(sector + rest))
}

/// Pure-dephasing propagator
/// `e^{iΩt𝒥z} e^{-Γ₁(𝒥z⁽¹⁾)² - Γ₂(𝒥z⁽²⁾)² - Γ×(𝒥z⁽¹⁾𝒥z⁽²⁾ + 𝒥z⁽²⁾𝒥z⁽¹⁾)}`.
///
/// Every factor is diagonal in the vectorized product basis, so the
/// exponential is taken entrywise.
pub fn dephasing_propagator(
    gamma_auto: [f64; 2],
    gamma_cross: f64,
    omega: f64,
    t: f64,
) -> SuperOperator {
    let [a, b] = spin_superoperators();
    let (z1, z2) = (a[2].matrix().diagonal(), b[2].matrix().diagonal());
    let diag = z1.zip_map(&z2, |m1, m2| {
        let (m1, m2) = (m1.re, m2.re);
        let decay = gamma_auto[0] * m1 * m1 + gamma_auto[1] * m2 * m2 + 2.0 * gamma_cross * m1 * m2;
        C64::new(-decay, omega * t * (m1 + m2)).exp()
    });
    SuperOperator::from_matrix(Mat16::from_diagonal(&diag))
}

/// Approximate propagator of fully correlated transverse colored noise,
/// `e^{i(Ω+ΔΩ)t𝒥z} e^{-Γ⊥(t)[𝒥² - 𝒥z²]}`.
pub fn effective_dephasing_propagator(
    spec: &NoiseSpec,
    omega: f64,
    t: f64,
) -> Result<SuperOperator> {
    if spec.axes != Axes::TRANSVERSE {
        return Err(Error::MethodGeometry {
            method: "effective_dephasing".into(),
            reason: "requires purely transverse noise".into(),
        });
    }
    if spec.gamma != 1.0 {
        return Err(Error::MethodGeometry {
            method: "effective_dephasing".into(),
            reason: "requires fully correlated noise (gamma = 1)".into(),
        });
    }
    let d = transverse_decay(spec, omega, t)?;
    let jz = total_spin_superoperators()[2];
    let rotation = jz.scale(C64::new(0.0, omega * t + d.phase_shift));
    let decay = (total_spin_squared() - jz * jz) * (-d.gamma_perp);
    Ok((rotation + decay).exp())
}
