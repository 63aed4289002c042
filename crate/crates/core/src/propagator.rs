//! Noise-averaged evolution: Monte Carlo trajectories and the second-order
//! cumulant superoperator.

use rayon::prelude::*;

use crate::entanglement::{concurrence_from_expectations, concurrence_wootters, XCORR_LABELS};
use crate::error::{Error, Result};
use crate::noise::{sample_pair_with, trajectory_rng, NoiseSpec, NoiseTrajectoryPair};
use crate::operators::{spin_half, BellState, Mat2, SphericalTensorLabel, TwoQubitOperator, C64};
use crate::scenario::Scenario;
use crate::superop::{spin_superoperators, total_spin_superoperators, SuperOperator};

/// `exp(-i dt (b·σ)/2)` by the axis-angle formula.
fn step_unitary(b: [f64; 3], dt: f64) -> Mat2 {
    let norm = (b[0] * b[0] + b[1] * b[1] + b[2] * b[2]).sqrt();
    let half = 0.5 * norm * dt;
    let (s, c) = half.sin_cos();
    if norm == 0.0 {
        return Mat2::identity();
    }
    let k = s / norm;
    let (x, y, z) = (k * b[0], k * b[1], k * b[2]);
    Mat2::new(
        C64::new(c, -z),
        C64::new(-y, -x),
        C64::new(y, -x),
        C64::new(c, z),
    )
}

/// Propagator of one qubit accumulated over the sampled field, recorded
/// after every `stride` steps (and at `t = 0`).
fn qubit_propagators(omega: f64, fields: &[[f64; 3]], dt: f64, stride: usize) -> Vec<Mat2> {
    let mut out = Vec::with_capacity(fields.len() / stride + 1);
    let mut u = Mat2::identity();
    out.push(u);
    for (k, w) in fields.iter().enumerate() {
        u = step_unitary([w[0], w[1], omega + w[2]], dt) * u;
        if (k + 1) % stride == 0 {
            out.push(u);
        }
    }
    out
}

fn check_state(rho0: &TwoQubitOperator) -> Result<()> {
    if !rho0.is_density_matrix(crate::operators::DENSITY_TOL) {
        return Err(Error::NotDensityMatrix);
    }
    Ok(())
}

/// States `U(t_k) ρ₀ U(t_k)†` for `k = 0..=n_steps` along one noise
/// realization, with `H(t) = Ω(Jz⁽¹⁾ + Jz⁽²⁾) + Σₙ ω⁽ⁿ⁾(t)·J⁽ⁿ⁾` held
/// constant over each step.
pub fn evolve_trajectory(
    omega: f64,
    trajectory: &NoiseTrajectoryPair,
    rho0: &TwoQubitOperator,
) -> Result<Vec<TwoQubitOperator>> {
    check_state(rho0)?;
    let [f1, f2] = &trajectory.fields;
    if f1.len() != f2.len() {
        return Err(Error::InvalidArgument(format!(
            "qubit trajectories differ in length: {} vs {}",
            f1.len(),
            f2.len()
        )));
    }
    let u1 = qubit_propagators(omega, f1, trajectory.dt, 1);
    let u2 = qubit_propagators(omega, f2, trajectory.dt, 1);
    Ok(u1
        .iter()
        .zip(&u2)
        .map(|(a, b)| {
            let u = TwoQubitOperator::kron(a, b);
            u * *rho0 * u.dagger()
        })
        .collect())
}

/// Monte Carlo averages for one initial state.
#[derive(Clone, Debug, PartialEq)]
pub struct StateEnsemble {
    pub state: BellState,
    /// Ensemble-averaged density matrix at each output time.
    pub mean_states: Vec<TwoQubitOperator>,
    /// Concurrence of the averaged state.
    pub concurrence: Vec<f64>,
    /// Batch-means standard error of `concurrence`.
    pub stderr: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct EnsembleResult {
    pub times: Vec<f64>,
    pub trajectories: usize,
    pub seed: u64,
    pub dt: f64,
    pub batches: usize,
    pub states: Vec<StateEnsemble>,
}

/// Number of batch means used for the standard error.
pub fn batch_count(trajectories: usize) -> usize {
    if trajectories >= 2000 {
        20
    } else {
        (trajectories / 100).max(2)
    }
}

/// Sum over one batch of trajectories, indexed `[state][time]`.
fn batch_sum(
    scenario: &Scenario,
    rho0: &[TwoQubitOperator],
    range: std::ops::Range<usize>,
    dt: f64,
    stride: usize,
) -> Result<Vec<Vec<TwoQubitOperator>>> {
    let n_times = scenario.n_points;
    let n_steps = (n_times - 1) * stride;
    let mut sums = vec![vec![TwoQubitOperator::zero(); n_times]; rho0.len()];
    for index in range {
        let mut rng = trajectory_rng(scenario.seed, index as u64);
        let traj = sample_pair_with(&scenario.noise, n_steps, dt, &mut rng)?;
        let u1 = qubit_propagators(scenario.omega, &traj.fields[0], dt, stride);
        let u2 = qubit_propagators(scenario.omega, &traj.fields[1], dt, stride);
        for (k, (a, b)) in u1.iter().zip(&u2).enumerate() {
            let u = TwoQubitOperator::kron(a, b);
            let ud = u.dagger();
            for (s, rho) in rho0.iter().enumerate() {
                sums[s][k] += u * *rho * ud;
            }
        }
    }
    Ok(sums)
}

fn wootters(rho: &TwoQubitOperator) -> Result<f64> {
    concurrence_wootters(rho)
        .map(|c| c.value)
        .map_err(|e| Error::Numerical(format!("concurrence of averaged state: {e}")))
}

/// Averages the evolution of every state in `scenario` over
/// `scenario.trajectories` noise realizations.
///
/// Trajectory `i` draws its noise from the stream `(seed, i)`. Trajectories
/// are split into contiguous batches, each summed in index order, and the
/// batch sums are combined in batch order, so the result does not depend on
/// how many worker threads run the batches.
pub fn ensemble_average(scenario: &Scenario) -> Result<EnsembleResult> {
    let n = scenario.trajectories;
    let nb = batch_count(n);
    if n < 2 * 100 {
        return Err(Error::InvalidArgument(format!(
            "ensemble needs at least 200 trajectories, got {n}"
        )));
    }
    if scenario.states.is_empty() {
        return Err(Error::InvalidArgument("no initial states requested".into()));
    }
    let (dt, stride) = scenario.time_step();
    let rho0: Vec<TwoQubitOperator> = scenario.states.iter().map(|s| s.density_matrix()).collect();
    let bounds: Vec<(usize, usize)> = (0..nb).map(|b| (b * n / nb, (b + 1) * n / nb)).collect();
    let batches: Vec<Vec<Vec<TwoQubitOperator>>> = bounds
        .par_iter()
        .map(|&(lo, hi)| batch_sum(scenario, &rho0, lo..hi, dt, stride))
        .collect::<Result<_>>()?;

    let times = scenario.times();
    let mut states = Vec::with_capacity(rho0.len());
    for (s, &state) in scenario.states.iter().enumerate() {
        let mut mean_states = Vec::with_capacity(times.len());
        let mut concurrence = Vec::with_capacity(times.len());
        let mut stderr = Vec::with_capacity(times.len());
        for k in 0..times.len() {
            let mut total = TwoQubitOperator::zero();
            let mut batch_c = Vec::with_capacity(nb);
            for (b, sums) in batches.iter().enumerate() {
                total += sums[s][k];
                let size = (bounds[b].1 - bounds[b].0) as f64;
                batch_c.push(wootters(&(sums[s][k] * (1.0 / size)))?);
            }
            let mean = total * (1.0 / n as f64);
            let c_bar = batch_c.iter().sum::<f64>() / nb as f64;
            let var = batch_c.iter().map(|c| (c - c_bar).powi(2)).sum::<f64>() / (nb as f64 - 1.0);
            concurrence.push(wootters(&mean)?);
            stderr.push((var / nb as f64).sqrt());
            mean_states.push(mean);
        }
        states.push(StateEnsemble {
            state,
            mean_states,
            concurrence,
            stderr,
        });
    }
    Ok(EnsembleResult {
        times,
        trajectories: n,
        seed: scenario.seed,
        dt,
        batches: nb,
        states,
    })
}

/// Second-order cumulant generator `𝓚₂(t)` in the Heisenberg picture.
///
/// With `F(Ω, t) = ∫₀ᵗ (t-τ) k(τ) e^{iΩτ} dτ` and pair weights `cₙₘ`:
///
/// ```text
/// 𝓚₂ = -Σₙₘ cₙₘ [ Re F(0)  𝒥z⁽ⁿ⁾𝒥z⁽ᵐ⁾
///              + Re F(Ω) (𝒥x⁽ⁿ⁾𝒥x⁽ᵐ⁾ + 𝒥y⁽ⁿ⁾𝒥y⁽ᵐ⁾)
///              + Im F(Ω) (𝒥y⁽ⁿ⁾𝒥x⁽ᵐ⁾ - 𝒥x⁽ⁿ⁾𝒥y⁽ᵐ⁾) ]
/// ```
///
/// keeping only the terms of enabled axes. The transverse weights follow
/// from rotating the noise couplings into the frame of `Ω Jz`.
pub fn cumulant2_generator(noise: &NoiseSpec, omega: f64, t: f64) -> Result<SuperOperator> {
    if !(t >= 0.0 && t.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "time must be non-negative, got {t}"
        )));
    }
    let axes = noise.axes;
    if axes.x != axes.y {
        return Err(Error::InvalidArgument(
            "transverse noise must act on both x and y".into(),
        ));
    }
    let j = spin_superoperators();
    let f0 = noise.kernel_integral(0.0, t).re;
    let fw = noise.kernel_integral(omega, t);
    let mut k2 = SuperOperator::zero();
    for n in 0..2 {
        for m in 0..2 {
            let c = noise.pair_weight(n, m);
            if axes.z {
                k2 = k2 + j[n][2] * j[m][2] * (c * f0);
            }
            if axes.x {
                k2 = k2
                    + (j[n][0] * j[m][0] + j[n][1] * j[m][1]) * (c * fw.re)
                    + (j[n][1] * j[m][0] - j[n][0] * j[m][1]) * (c * fw.im);
            }
        }
    }
    Ok(-k2)
}

/// `𝒰(t) = exp(𝓚₂(t)) e^{itΩ𝒥z}`, the noise-averaged Heisenberg
/// propagator without time ordering of `𝓚₂`.
pub fn cumulant2_propagator(noise: &NoiseSpec, omega: f64, t: f64) -> Result<SuperOperator> {
    let k2 = cumulant2_generator(noise, omega, t)?;
    let rotation = total_spin_superoperators()[2].scale(C64::new(0.0, omega * t));
    Ok(k2.exp() * rotation.exp())
}

/// `Tr(ρ₀ 𝒰(T))` for the tensor `T` named by `label`.
pub fn heisenberg_expectation(
    u: &SuperOperator,
    label: SphericalTensorLabel,
    rho0: &TwoQubitOperator,
) -> C64 {
    let t = label.operator().expect("labels name valid tensors");
    (*rho0 * u.apply(&t)).trace()
}

/// X-state concurrence from Heisenberg-propagated tensor expectations.
pub fn heisenberg_concurrence(u: &SuperOperator, rho0: &TwoQubitOperator) -> f64 {
    let [a, b, c] = XCORR_LABELS.map(|l| heisenberg_expectation(u, l, rho0));
    concurrence_from_expectations(a, b, c.re).min(1.0)
}

/// Single-qubit Hamiltonian `Ω Jz + ω·J` used by the trajectory steps,
/// exposed for cross-checks.
pub fn qubit_hamiltonian(omega: f64, field: [f64; 3]) -> Mat2 {
    let [jx, jy, jz] = spin_half();
    jx * C64::new(field[0], 0.0)
        + jy * C64::new(field[1], 0.0)
        + jz * C64::new(omega + field[2], 0.0)
}
