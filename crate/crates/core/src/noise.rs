//! Classical Gaussian noise acting on the two qubits: statistics, sampling
//! and the decay integrals built from the correlation functions.
//!
//! Each enabled axis carries three independent unit processes `a`, `b`, `c`.
//! The fields seen by the qubits are
//!
//! ```text
//! ω⁽¹⁾ = σ₁ (√γ c + √(1-γ) a)
//! ω⁽²⁾ = σ₂ (√γ c + √(1-γ) b)
//! ```
//!
//! which gives autocorrelations `σₙ² k(τ)` and cross-correlation
//! `γ σ₁σ₂ k(τ)` for the common normalized kernel `k`. Orthogonal axes are
//! independent.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::quadrature::adaptive_simpson;

/// Temporal statistics of one scalar noise component.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum NoiseKind {
    /// `κ(τ) = (2/T) δ(τ)`.
    White { t_white: f64 },
    /// `κ(τ) = σₙ² exp(-|τ|/t_c)`, amplitudes per qubit.
    OrnsteinUhlenbeck { sigma: [f64; 2], tc: f64 },
}

/// Which field components couple to the qubits.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Axes {
    pub x: bool,
    pub y: bool,
    pub z: bool,
}

impl Axes {
    pub const DEPHASING: Axes = Axes {
        x: false,
        y: false,
        z: true,
    };
    pub const ISOTROPIC: Axes = Axes {
        x: true,
        y: true,
        z: true,
    };
    pub const TRANSVERSE: Axes = Axes {
        x: true,
        y: true,
        z: false,
    };

    pub fn as_array(self) -> [bool; 3] {
        [self.x, self.y, self.z]
    }
}

/// Orientation of the noise relative to the quantization axis.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Geometry {
    Dephasing,
    Isotropic,
    Transverse,
}

impl Geometry {
    pub const ALL: [Geometry; 3] = [
        Geometry::Dephasing,
        Geometry::Isotropic,
        Geometry::Transverse,
    ];

    pub fn axes(self) -> Axes {
        match self {
            Geometry::Dephasing => Axes::DEPHASING,
            Geometry::Isotropic => Axes::ISOTROPIC,
            Geometry::Transverse => Axes::TRANSVERSE,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Geometry::Dephasing => "dephasing",
            Geometry::Isotropic => "isotropic",
            Geometry::Transverse => "transverse",
        }
    }
}

impl std::fmt::Display for Geometry {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for Geometry {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Geometry::ALL
            .into_iter()
            .find(|g| g.name() == s)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown geometry `{s}`")))
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NoiseSpec {
    pub kind: NoiseKind,
    pub axes: Axes,
    /// Cross-correlation degree between the two qubits' fields.
    pub gamma: f64,
}

impl NoiseSpec {
    pub fn new(kind: NoiseKind, axes: Axes, gamma: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&gamma) {
            return Err(Error::InvalidArgument(format!(
                "gamma must lie in [0, 1], got {gamma}"
            )));
        }
        match kind {
            NoiseKind::White { t_white } if !(t_white > 0.0 && t_white.is_finite()) => {
                return Err(Error::InvalidArgument(format!(
                    "white-noise timescale must be positive, got {t_white}"
                )))
            }
            NoiseKind::OrnsteinUhlenbeck { sigma, tc } => {
                if sigma.iter().any(|s| !(*s >= 0.0 && s.is_finite())) {
                    return Err(Error::InvalidArgument(format!(
                        "noise amplitudes must be non-negative, got {sigma:?}"
                    )));
                }
                if !(tc > 0.0 && tc.is_finite()) {
                    return Err(Error::InvalidArgument(format!(
                        "correlation time must be positive, got {tc}"
                    )));
                }
            }
            _ => {}
        }
        Ok(Self { kind, axes, gamma })
    }

    pub fn white(t_white: f64, axes: Axes, gamma: f64) -> Result<Self> {
        Self::new(NoiseKind::White { t_white }, axes, gamma)
    }

    pub fn ou(sigma: f64, tc: f64, axes: Axes, gamma: f64) -> Result<Self> {
        Self::new(
            NoiseKind::OrnsteinUhlenbeck {
                sigma: [sigma, sigma],
                tc,
            },
            axes,
            gamma,
        )
    }

    /// Covariance weight of the pair `(n, m)` of qubits (0-based): the
    /// correlation function is this weight times the normalized kernel.
    pub fn pair_weight(&self, n: usize, m: usize) -> f64 {
        match self.kind {
            NoiseKind::White { t_white } => {
                let w = 2.0 / t_white;
                if n == m {
                    w
                } else {
                    self.gamma * w
                }
            }
            NoiseKind::OrnsteinUhlenbeck { sigma, .. } => {
                if n == m {
                    sigma[n] * sigma[n]
                } else {
                    self.gamma * sigma[0] * sigma[1]
                }
            }
        }
    }

    /// `∫₀ᵗ (t - τ) k(τ) e^{iΩτ} dτ` for the normalized kernel `k`.
    ///
    /// This is the ordered double integral `∫₀ᵗdt'∫₀^{t'}dt'' k(t'-t'') e^{iΩ(t'-t'')}`
    /// reduced by stationarity. For white noise the delta kernel contributes
    /// half its weight at the boundary of the ordered region, so the result
    /// is `t/2`.
    pub fn kernel_integral(&self, omega: f64, t: f64) -> Complex64 {
        match self.kind {
            NoiseKind::White { .. } => Complex64::new(0.5 * t, 0.0),
            NoiseKind::OrnsteinUhlenbeck { tc, .. } => ou_kernel_integral(tc, omega, t),
        }
    }
}

/// Closed form of `∫₀ᵗ (t - τ) e^{-aτ} dτ` with `a = 1/t_c - iΩ`.
fn ou_kernel_integral(tc: f64, omega: f64, t: f64) -> Complex64 {
    let a = Complex64::new(1.0 / tc, -omega);
    let at = a * t;
    if at.norm() < 0.5 {
        // t² Σ (-at)^k / (k+2)!
        let mut term = Complex64::new(0.5, 0.0);
        let mut sum = term;
        for k in 1..40 {
            term = term * (-at) / (k as f64 + 2.0);
            sum += term;
            if term.norm() < 1e-18 * sum.norm() {
                break;
            }
        }
        sum * t * t
    } else {
        t / a - (Complex64::new(1.0, 0.0) - (-at).exp()) / (a * a)
    }
}

/// `κ(τ) = σ² e^{-|τ|/t_c}` of qubit 1.
pub fn autocorrelation(spec: &NoiseSpec, tau: f64) -> Result<f64> {
    match spec.kind {
        NoiseKind::OrnsteinUhlenbeck { sigma, tc } => {
            Ok(sigma[0] * sigma[0] * (-tau.abs() / tc).exp())
        }
        NoiseKind::White { .. } => Err(Error::UnsupportedNoise("white")),
    }
}

/// Decay functions for one evolution time.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DecayFunctions {
    /// Dephasing functions `Γ₁`, `Γ₂` of each qubit.
    pub gamma_auto: [f64; 2],
    /// Cross-correlated dephasing function `Γ×`.
    pub gamma_cross: f64,
    /// Transverse decay `Γ⊥` of qubit 1 (cosine-weighted integral).
    pub gamma_perp: f64,
    /// Splitting renormalization `ΔΩ·t` of qubit 1 (sine-weighted integral).
    pub phase_shift: f64,
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

/// Longitudinal decay `Γ(t) = ∫₀ᵗ∫₀^{t'} κ` for qubit 1.
///
/// OU: `σ² t_c [t - t_c (1 - e^{-t/t_c})]`; white: `t/T`.
pub fn dephasing_decay(spec: &NoiseSpec, t: f64) -> Result<f64> {
    check_time(t)?;
    Ok(spec.pair_weight(0, 0) * spec.kernel_integral(0.0, t).re)
}

/// Cross-correlated counterpart `Γ×(t)`.
pub fn cross_dephasing_decay(spec: &NoiseSpec, t: f64) -> Result<f64> {
    check_time(t)?;
    Ok(spec.pair_weight(0, 1) * spec.kernel_integral(0.0, t).re)
}

pub fn decay_functions(spec: &NoiseSpec, omega: f64, t: f64) -> Result<DecayFunctions> {
    check_time(t)?;
    let g = spec.kernel_integral(0.0, t).re;
    let f = spec.kernel_integral(omega, t);
    let w = spec.pair_weight(0, 0);
    Ok(DecayFunctions {
        gamma_auto: [w * g, spec.pair_weight(1, 1) * g],
        gamma_cross: spec.pair_weight(0, 1) * g,
        gamma_perp: w * f.re,
        phase_shift: w * f.im,
    })
}

/// Markovian rates `1/T₂ = σ² t_c` and `1/T₂× = γ σ₁σ₂ t_c` of OU noise.
pub fn markovian_rates(spec: &NoiseSpec) -> Result<(f64, f64)> {
    match spec.kind {
        NoiseKind::OrnsteinUhlenbeck { tc, .. } => {
            Ok((spec.pair_weight(0, 0) * tc, spec.pair_weight(0, 1) * tc))
        }
        NoiseKind::White { .. } => Err(Error::UnsupportedNoise("white")),
    }
}

/// Transverse decay `Γ⊥(t)` and splitting renormalization `ΔΩ·t`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TransverseDecay {
    pub gamma_perp: f64,
    pub phase_shift: f64,
}

pub fn transverse_decay(spec: &NoiseSpec, omega: f64, t: f64) -> Result<TransverseDecay> {
    if let NoiseKind::White { .. } = spec.kind {
        return Err(Error::UnsupportedNoise("white"));
    }
    let d = decay_functions(spec, omega, t)?;
    Ok(TransverseDecay {
        gamma_perp: d.gamma_perp,
        phase_shift: d.phase_shift,
    })
}

/// Same quantities as [`transverse_decay`] by adaptive quadrature of the
/// single-integral form; used to cross-check the closed form.
pub fn transverse_decay_quadrature(
    spec: &NoiseSpec,
    omega: f64,
    t: f64,
    tol: f64,
) -> Result<TransverseDecay> {
    check_time(t)?;
    let NoiseKind::OrnsteinUhlenbeck { tc, .. } = spec.kind else {
        return Err(Error::UnsupportedNoise("white"));
    };
    let w = spec.pair_weight(0, 0);
    let panels = 8 + (omega.abs() * t / std::f64::consts::PI).ceil() as usize;
    let cos_part = adaptive_simpson(
        |tau| (t - tau) * (-tau / tc).exp() * (omega * tau).cos(),
        0.0,
        t,
        tol / w.max(1e-300),
        panels,
    );
    let sin_part = adaptive_simpson(
        |tau| (t - tau) * (-tau / tc).exp() * (omega * tau).sin(),
        0.0,
        t,
        tol / w.max(1e-300),
        panels,
    );
    Ok(TransverseDecay {
        gamma_perp: w * cos_part,
        phase_shift: w * sin_part,
    })
}

/// Sampled fields of both qubits, piecewise constant over steps of length
/// `dt`. `fields[n][k]` is the `(x, y, z)` field of qubit `n` on
/// `[k dt, (k+1) dt)`; disabled axes hold zeros.
#[derive(Clone, Debug, PartialEq)]
pub struct NoiseTrajectoryPair {
    pub dt: f64,
    pub fields: [Vec<[f64; 3]>; 2],
}

impl NoiseTrajectoryPair {
    pub fn n_steps(&self) -> usize {
        self.fields[0].len()
    }
}

/// Random stream for trajectory `index` of an ensemble with `master_seed`.
///
/// Streams are addressed by `(seed, index)`, so any trajectory can be
/// regenerated independently of the others.
pub fn trajectory_rng(master_seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
    rng.set_stream(index);
    rng
}

fn check_sampling(n_steps: usize, dt: f64) -> Result<()> {
    if n_steps == 0 {
        return Err(Error::InvalidArgument("n_steps must be positive".into()));
    }
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "dt must be positive, got {dt}"
        )));
    }
    Ok(())
}

pub fn sample_pair(
    spec: &NoiseSpec,
    n_steps: usize,
    dt: f64,
    seed: u64,
) -> Result<NoiseTrajectoryPair> {
    sample_pair_with(spec, n_steps, dt, &mut ChaCha8Rng::seed_from_u64(seed))
}

/// Samples one trajectory pair from `rng`.
///
/// OU fields are the processes at the step midpoints `(k + 1/2) dt`, started
/// from the stationary distribution and advanced by the exact update
/// `x ← x e^{-dt/t_c} + √(1 - e^{-2dt/t_c}) ξ`. White fields are independent
/// per step with variance `2/(T dt)`.
pub fn sample_pair_with<R: Rng + ?Sized>(
    spec: &NoiseSpec,
    n_steps: usize,
    dt: f64,
    rng: &mut R,
) -> Result<NoiseTrajectoryPair> {
    check_sampling(n_steps, dt)?;
    let axes = spec.axes.as_array();
    let shared = spec.gamma.sqrt();
    let private = (1.0 - spec.gamma).sqrt();
    let mut fields = [vec![[0.0; 3]; n_steps], vec![[0.0; 3]; n_steps]];
    let mut normal = || -> f64 { rng.sample(StandardNormal) };

    match spec.kind {
        NoiseKind::White { t_white } => {
            let scale = (2.0 / (t_white * dt)).sqrt();
            let [f0, f1] = &mut fields;
            for (p, q) in f0.iter_mut().zip(f1.iter_mut()) {
                for (i, _) in axes.iter().enumerate().filter(|(_, on)| **on) {
                    let (a, b, c) = (normal(), normal(), normal());
                    p[i] = scale * (shared * c + private * a);
                    q[i] = scale * (shared * c + private * b);
                }
            }
        }
        NoiseKind::OrnsteinUhlenbeck { sigma, tc } => {
            let decay = (-dt / tc).exp();
            let kick = (-(2.0 * dt / tc)).exp_m1().abs().sqrt();
            let mut state = [[0.0_f64; 3]; 3];
            for (i, _) in axes.iter().enumerate().filter(|(_, on)| **on) {
                state[i] = [normal(), normal(), normal()];
            }
            let [f0, f1] = &mut fields;
            for (k, (p, q)) in f0.iter_mut().zip(f1.iter_mut()).enumerate() {
                if k > 0 {
                    for (i, _) in axes.iter().enumerate().filter(|(_, on)| **on) {
                        for x in state[i].iter_mut() {
                            *x = *x * decay + kick * normal();
                        }
                    }
                }
                for (i, _) in axes.iter().enumerate().filter(|(_, on)| **on) {
                    let [a, b, c] = state[i];
                    p[i] = sigma[0] * (shared * c + private * a);
                    q[i] = sigma[1] * (shared * c + private * b);
                }
            }
        }
    }
    Ok(NoiseTrajectoryPair { dt, fields })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ou(sigma: f64, tc: f64, gamma: f64) -> NoiseSpec {
        NoiseSpec::ou(sigma, tc, Axes::ISOTROPIC, gamma).unwrap()
    }

    /// Composite 8-point Gauss-Legendre on the single-integral form.
    fn gauss_legendre<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, panels: usize) -> f64 {
        const X: [f64; 4] = [
            0.183_434_642_495_649_8,
            0.525_532_409_916_329,
            0.796_666_477_413_626_7,
            0.960_289_856_497_536_3,
        ];
        const W: [f64; 4] = [
            0.362_683_783_378_362,
            0.313_706_645_877_887_3,
            0.222_381_034_453_374_5,
            0.101_228_536_290_376_3,
        ];
        let h = (b - a) / panels as f64;
        (0..panels)
            .map(|p| {
                let mid = a + (p as f64 + 0.5) * h;
                let half = 0.5 * h;
                X.iter()
                    .zip(W.iter())
                    .map(|(x, w)| w * (f(mid - half * x) + f(mid + half * x)))
                    .sum::<f64>()
                    * half
            })
            .sum()
    }

    #[test]
    fn autocorrelation_values() {
        let s = ou(2.0, 3.0, 0.0);
        assert_eq!(autocorrelation(&s, 0.0).unwrap(), 4.0);
        assert!((autocorrelation(&s, 3.0).unwrap() - 4.0 / std::f64::consts::E).abs() < 1e-15);
        assert_eq!(
            autocorrelation(&s, -1.3).unwrap(),
            autocorrelation(&s, 1.3).unwrap()
        );
        let w = NoiseSpec::white(1.0, Axes::DEPHASING, 0.0).unwrap();
        assert!(matches!(
            autocorrelation(&w, 0.0),
            Err(Error::UnsupportedNoise(_))
        ));
    }

    #[test]
    fn dephasing_decay_limits() {
        let s = ou(1.0, 1.0, 0.0);
        let t = 0.01;
        let g = dephasing_decay(&s, t).unwrap();
        assert!((g / (0.5 * t * t) - 1.0).abs() < 0.01);
        let t = 200.0;
        let g = dephasing_decay(&s, t).unwrap();
        assert!((g - (t - 1.0)).abs() < 1e-9);
        let w = NoiseSpec::white(2.5, Axes::DEPHASING, 0.4).unwrap();
        assert!((dephasing_decay(&w, 2.5).unwrap() - 1.0).abs() < 1e-15);
        assert!((cross_dephasing_decay(&w, 2.5).unwrap() - 0.4).abs() < 1e-15);
        assert!(dephasing_decay(&w, -1.0).is_err());
    }

    #[test]
    fn decay_closed_form_matches_series_and_direct_formula() {
        let s = ou(1.3, 0.7, 0.0);
        for &t in &[1e-6, 0.01, 0.3, 0.349, 0.351, 1.0, 5.0] {
            let direct = 1.69 * 0.7 * (t + 0.7 * (-t / 0.7_f64).exp_m1());
            let got = dephasing_decay(&s, t).unwrap();
            assert!((got - direct).abs() <= 1e-9 * direct, "t = {t}");
        }
    }

    #[test]
    fn markovian_rates_values() {
        assert_eq!(markovian_rates(&ou(1.0, 1.0, 0.0)).unwrap(), (1.0, 0.0));
        let (r, rx) = markovian_rates(&ou(5.0, 10.0, 0.5)).unwrap();
        assert!((r - 250.0).abs() < 1e-12 && (rx - 125.0).abs() < 1e-12);
        let w = NoiseSpec::white(1.0, Axes::DEPHASING, 0.0).unwrap();
        assert!(markovian_rates(&w).is_err());
    }

    #[test]
    fn transverse_decay_matches_independent_quadrature() {
        let s = NoiseSpec::ou(4.0, 10.0, Axes::TRANSVERSE, 1.0).unwrap();
        let omega = 40.0;
        for k in 0..=50 {
            let t = k as f64;
            let closed = transverse_decay(&s, omega, t).unwrap();
            let panels = 40 + 20 * k;
            let cos = 16.0
                * gauss_legendre(
                    |tau| (t - tau) * (-tau / 10.0).exp() * (omega * tau).cos(),
                    0.0,
                    t,
                    panels,
                );
            let sin = 16.0
                * gauss_legendre(
                    |tau| (t - tau) * (-tau / 10.0).exp() * (omega * tau).sin(),
                    0.0,
                    t,
                    panels,
                );
            assert!((closed.gamma_perp - cos).abs() < 1e-9, "t = {t}");
            assert!((closed.phase_shift - sin).abs() < 1e-9, "t = {t}");
            if k % 10 == 5 {
                let quad = transverse_decay_quadrature(&s, omega, t, 1e-8).unwrap();
                assert!((closed.gamma_perp - quad.gamma_perp).abs() < 1e-7);
                assert!((closed.phase_shift - quad.phase_shift).abs() < 1e-7);
            }
        }
    }

    #[test]
    fn transverse_decay_limits() {
        let s = NoiseSpec::ou(4.0, 10.0, Axes::TRANSVERSE, 0.0).unwrap();
        for &t in &[0.0, 0.5, 2.0] {
            let d = transverse_decay(&s, 0.0, t).unwrap();
            assert!((d.gamma_perp - dephasing_decay(&s, t).unwrap()).abs() < 1e-12);
            assert_eq!(d.phase_shift, 0.0);
        }
        // strong precession: Γ⊥ stays O(σ²/Ω²) for t ≪ t_c
        let s = NoiseSpec::ou(1.0, 1000.0, Axes::TRANSVERSE, 0.0).unwrap();
        for &omega in &[50.0, 100.0, 200.0] {
            for k in 1..50 {
                let t = k as f64 * 0.05;
                let d = transverse_decay(&s, omega, t).unwrap();
                assert!(d.gamma_perp <= 2.0 / (omega * omega) * 1.01);
            }
            let peak = transverse_decay(&s, omega, std::f64::consts::PI / omega).unwrap();
            assert!((peak.gamma_perp * omega * omega / 2.0 - 1.0).abs() < 0.01);
        }
        let w = NoiseSpec::white(1.0, Axes::TRANSVERSE, 0.0).unwrap();
        assert!(transverse_decay(&w, 1.0, 1.0).is_err());
    }

    #[test]
    fn decay_functions_are_monotone_and_start_at_zero() {
        let s = ou(2.0, 0.5, 0.3);
        let d0 = decay_functions(&s, 3.0, 0.0).unwrap();
        assert_eq!(d0.gamma_auto, [0.0, 0.0]);
        assert_eq!(d0.gamma_cross, 0.0);
        let mut prev = d0;
        for k in 1..200 {
            let d = decay_functions(&s, 3.0, k as f64 * 0.05).unwrap();
            assert!(d.gamma_auto[0] >= prev.gamma_auto[0]);
            assert!(d.gamma_cross >= prev.gamma_cross);
            prev = d;
        }
    }

    #[test]
    fn sampler_rejects_bad_grid() {
        let s = ou(1.0, 1.0, 0.0);
        assert!(sample_pair(&s, 0, 0.1, 1).is_err());
        assert!(sample_pair(&s, 10, 0.0, 1).is_err());
        assert!(sample_pair(&s, 10, -0.1, 1).is_err());
    }

    #[test]
    fn full_correlation_gives_identical_fields() {
        let s = ou(1.5, 2.0, 1.0);
        let p = sample_pair(&s, 500, 0.01, 9).unwrap();
        assert_eq!(p.fields[0], p.fields[1]);
        let w = NoiseSpec::white(1.0, Axes::TRANSVERSE, 1.0).unwrap();
        let p = sample_pair(&w, 500, 0.01, 9).unwrap();
        assert_eq!(p.fields[0], p.fields[1]);
        assert!(p.fields[0].iter().all(|f| f[2] == 0.0));
    }

    #[test]
    fn streams_are_reproducible_per_index() {
        let s = ou(1.0, 1.0, 0.5);
        let a = sample_pair_with(&s, 64, 0.05, &mut trajectory_rng(7, 3)).unwrap();
        let _ = sample_pair_with(&s, 64, 0.05, &mut trajectory_rng(7, 2)).unwrap();
        let b = sample_pair_with(&s, 64, 0.05, &mut trajectory_rng(7, 3)).unwrap();
        assert_eq!(a, b);
        let c = sample_pair_with(&s, 64, 0.05, &mut trajectory_rng(7, 4)).unwrap();
        assert_ne!(a, c);
    }

    struct Moments {
        mean: f64,
        se: f64,
    }

    fn moments(xs: &[f64]) -> Moments {
        let n = xs.len() as f64;
        let mean = xs.iter().sum::<f64>() / n;
        let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
        Moments {
            mean,
            se: (var / n).sqrt(),
        }
    }

    #[test]
    fn ensemble_statistics_match_construction() {
        // 1e5 trajectory pairs, σ = 1, t_c = 1, γ = 0.5
        let spec = NoiseSpec::ou(1.0, 1.0, Axes::DEPHASING, 0.5).unwrap();
        let dt = 0.1;
        let lag = 10; // lag t_c
        let n = 100_000;
        let mut var0 = Vec::with_capacity(n);
        let mut var_last = Vec::with_capacity(n);
        let mut cross = Vec::with_capacity(n);
        let mut auto_lag = Vec::with_capacity(n);
        let mut var2 = Vec::with_capacity(n);
        for i in 0..n {
            let p =
                sample_pair_with(&spec, lag + 1, dt, &mut trajectory_rng(11, i as u64)).unwrap();
            let (w1, w2) = (&p.fields[0], &p.fields[1]);
            var0.push(w1[0][2] * w1[0][2]);
            var_last.push(w1[lag][2] * w1[lag][2]);
            var2.push(w2[0][2] * w2[0][2]);
            cross.push(w1[0][2] * w2[0][2]);
            auto_lag.push(w1[0][2] * w1[lag][2]);
        }
        let check = |xs: &[f64], want: f64, what: &str| {
            let m = moments(xs);
            assert!(
                (m.mean - want).abs() < 4.0 * m.se,
                "{what}: {} vs {want} (se {})",
                m.mean,
                m.se
            );
        };
        check(&var0, 1.0, "variance at step 0");
        check(&var_last, 1.0, "variance at last step");
        check(&var2, 1.0, "variance of qubit 2");
        check(&cross, 0.5, "cross-covariance");
        check(&auto_lag, (-1.0_f64).exp(), "autocorrelation at t_c");
    }

    #[test]
    fn independent_fields_are_uncorrelated() {
        let spec = NoiseSpec::ou(1.0, 1.0, Axes::TRANSVERSE, 0.0).unwrap();
        let n = 20_000;
        let cross: Vec<f64> = (0..n)
            .map(|i| {
                let p = sample_pair_with(&spec, 1, 0.1, &mut trajectory_rng(5, i)).unwrap();
                p.fields[0][0][0] * p.fields[1][0][0]
            })
            .collect();
        let m = moments(&cross);
        assert!(m.mean.abs() < 4.0 * m.se);
    }

    #[test]
    fn white_noise_variance() {
        let spec = NoiseSpec::white(2.0, Axes::DEPHASING, 0.25).unwrap();
        let dt = 0.01;
        let p = sample_pair(&spec, 200_000, dt, 3).unwrap();
        let v1: Vec<f64> = p.fields[0].iter().map(|f| f[2] * f[2]).collect();
        let cv: Vec<f64> = p.fields[0]
            .iter()
            .zip(&p.fields[1])
            .map(|(a, b)| a[2] * b[2])
            .collect();
        let want = 2.0 / (2.0 * dt);
        let m = moments(&v1);
        assert!((m.mean - want).abs() < 4.0 * m.se);
        let m = moments(&cv);
        assert!((m.mean - 0.25 * want).abs() < 4.0 * m.se);
    }

    #[test]
    fn spec_validation() {
        assert!(NoiseSpec::ou(1.0, 1.0, Axes::ISOTROPIC, 1.2).is_err());
        assert!(NoiseSpec::ou(-1.0, 1.0, Axes::ISOTROPIC, 0.2).is_err());
        assert!(NoiseSpec::ou(1.0, 0.0, Axes::ISOTROPIC, 0.2).is_err());
        assert!(NoiseSpec::white(0.0, Axes::ISOTROPIC, 0.2).is_err());
    }
}
