//! Time-dependent Schrödinger propagators for a ground state coupled to one
//! or more excited levels by a chirped pulse or a pulse train, plus the
//! first-order analytic step unitaries used as oracles.
//!
//! Two frames are used. The continuous pulse integrates in the frame rotating
//! with the instantaneous field: excited level `j` carries the diagonal
//! `Delta_j + detuning(t)` and the coupling is `-(g_j/2) rabi(t)`. The train
//! integrates in the frame rotating at the carrier reference, where the
//! diagonal vanishes and each subpulse couples through its carrier phase:
//!
//! ```text
//! H_{j0}(t) = -(g_j/2) rabi_k(t) exp(+i [Delta_j t + phase_k(t)])
//! ```
//!
//! with `phase_k(t) = carrier_phase_k + delta_k (t - t_k)` the accumulated
//! optical phase of subpulse `k`. Free segments are exactly the identity in
//! this frame. Because the phases reference one coherent clock, a
//! constant-frequency train reduces to a plain `exp(i delta t)` coupling and
//! the comb sidebands at multiples of `2 pi / spacing` come out with no extra
//! machinery.
//!
//! Integration is classical fixed-step fourth-order Runge-Kutta with no
//! renormalization; norm drift is a measured quantity and exceeding
//! [`NORM_TOLERANCE`] is reported as a numerical failure.

use num_complex::Complex64 as C64;

use crate::digitizer::PulseTrain;
use crate::error::{Error, Result};
use crate::pulses::ContinuousPulse;

/// Allowed end-to-end drift of the state norm for any propagation.
pub const NORM_TOLERANCE: f64 = 1e-10;

/// Default RK4 substeps between consecutive recorded samples of a continuous
/// propagation.
pub const DEFAULT_STEPS_PER_SAMPLE: usize = 400;

/// Default RK4 steps across one subpulse support.
pub const DEFAULT_STEPS_PER_SUBPULSE: usize = 400;

/// Ground state plus `M` excited levels driven by one field.
///
/// `detunings[j]` is the offset of excited level `j` from the carrier
/// reference of the pulse or train (the frequency about which the chirp ramp
/// and the subpulse detunings are measured). `weights[j]` multiplies the
/// field's Rabi frequency on that transition.
#[derive(Debug, Clone, PartialEq)]
pub struct LevelSystem {
    detunings: Vec<f64>,
    weights: Vec<f64>,
}

impl LevelSystem {
    pub fn new(detunings: Vec<f64>, weights: Vec<f64>) -> Result<Self> {
        if detunings.is_empty() {
            return Err(Error::invalid("a level system needs at least one excited level"));
        }
        if detunings.len() != weights.len() {
            return Err(Error::invalid(format!(
                "got {} detunings but {} coupling weights",
                detunings.len(),
                weights.len()
            )));
        }
        if weights.iter().any(|&g| g < 0.0 || !g.is_finite()) {
            return Err(Error::invalid("coupling weights must be non-negative"));
        }
        if detunings.iter().any(|d| !d.is_finite()) {
            return Err(Error::invalid("detunings must be finite"));
        }
        Ok(LevelSystem { detunings, weights })
    }

    /// One excited level with unit coupling weight.
    pub fn two_level(detuning: f64) -> Self {
        LevelSystem {
            detunings: vec![detuning],
            weights: vec![1.0],
        }
    }

    pub fn num_excited(&self) -> usize {
        self.detunings.len()
    }

    pub fn detunings(&self) -> &[f64] {
        &self.detunings
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }
}

/// Complex amplitudes over ground + excited levels, unit norm.
#[derive(Debug, Clone, PartialEq)]
pub struct QuantumState {
    amplitudes: Vec<C64>,
}

impl QuantumState {
    /// Validate a normalized amplitude vector (norm within 1e-12 of 1).
    pub fn new(amplitudes: Vec<C64>) -> Result<Self> {
        if amplitudes.len() < 2 {
            return Err(Error::invalid("a state needs at least two levels"));
        }
        let norm: f64 = amplitudes.iter().map(|c| c.norm_sqr()).sum();
        if (norm - 1.0).abs() > 1e-12 {
            return Err(Error::invalid(format!(
                "state norm^2 is {norm}, expected 1 within 1e-12"
            )));
        }
        Ok(QuantumState { amplitudes })
    }

    /// All population in the ground state of a system with `num_excited`
    /// excited levels.
    pub fn ground(num_excited: usize) -> Self {
        let mut amplitudes = vec![C64::new(0.0, 0.0); num_excited + 1];
        amplitudes[0] = C64::new(1.0, 0.0);
        QuantumState { amplitudes }
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amplitudes
    }

    pub fn population(&self, level: usize) -> f64 {
        self.amplitudes[level].norm_sqr()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|c| c.norm_sqr()).sum()
    }
}

/// Recorded propagation: times, state vectors and derived populations.
#[derive(Debug, Clone)]
pub struct Trajectory {
    times: Vec<f64>,
    states: Vec<Vec<C64>>,
}

impl Trajectory {
    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn states(&self) -> &[Vec<C64>] {
        &self.states
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn num_levels(&self) -> usize {
        self.states[0].len()
    }

    /// Population history of one level.
    pub fn population(&self, level: usize) -> Vec<f64> {
        self.states.iter().map(|s| s[level].norm_sqr()).collect()
    }

    pub fn final_state(&self) -> &[C64] {
        self.states.last().unwrap()
    }

    pub fn final_population(&self, level: usize) -> f64 {
        self.final_state()[level].norm_sqr()
    }

    /// Largest deviation of any recorded norm^2 from 1.
    pub fn max_norm_drift(&self) -> f64 {
        self.states
            .iter()
            .map(|s| (s.iter().map(|c| c.norm_sqr()).sum::<f64>() - 1.0).abs())
            .fold(0.0, f64::max)
    }
}

// ---------------------------------------------------------------------------
// RK4 core
// ---------------------------------------------------------------------------

struct Rk4Scratch {
    k1: Vec<C64>,
    k2: Vec<C64>,
    k3: Vec<C64>,
    k4: Vec<C64>,
    tmp: Vec<C64>,
}

impl Rk4Scratch {
    fn new(dim: usize) -> Self {
        let z = vec![C64::new(0.0, 0.0); dim];
        Rk4Scratch {
            k1: z.clone(),
            k2: z.clone(),
            k3: z.clone(),
            k4: z.clone(),
            tmp: z,
        }
    }
}

#[allow(clippy::needless_range_loop)]
fn rk4_step<F>(rhs: &F, t: f64, h: f64, y: &mut [C64], s: &mut Rk4Scratch)
where
    F: Fn(f64, &[C64], &mut [C64]),
{
    rhs(t, y, &mut s.k1);
    for i in 0..y.len() {
        s.tmp[i] = y[i] + s.k1[i] * (h / 2.0);
    }
    rhs(t + h / 2.0, &s.tmp, &mut s.k2);
    for i in 0..y.len() {
        s.tmp[i] = y[i] + s.k2[i] * (h / 2.0);
    }
    rhs(t + h / 2.0, &s.tmp, &mut s.k3);
    for i in 0..y.len() {
        s.tmp[i] = y[i] + s.k3[i] * h;
    }
    rhs(t + h, &s.tmp, &mut s.k4);
    for i in 0..y.len() {
        y[i] += (s.k1[i] + (s.k2[i] + s.k3[i]) * 2.0 + s.k4[i]) * (h / 6.0);
    }
}

fn check_recorded(t: f64, y: &[C64]) -> Result<()> {
    let mut norm = 0.0;
    for c in y {
        if !c.re.is_finite() || !c.im.is_finite() {
            return Err(Error::Numerical(format!(
                "non-finite amplitude at t = {t}"
            )));
        }
        norm += c.norm_sqr();
    }
    if (norm - 1.0).abs() > NORM_TOLERANCE {
        return Err(Error::Numerical(format!(
            "norm^2 drifted to {norm} at t = {t} (|drift| {:.3e} exceeds {NORM_TOLERANCE:.0e})",
            (norm - 1.0).abs()
        )));
    }
    Ok(())
}

fn validate_initial(system: &LevelSystem, initial: &QuantumState) -> Result<()> {
    if initial.amplitudes().len() != system.num_excited() + 1 {
        return Err(Error::invalid(format!(
            "initial state has {} levels but the system has {}",
            initial.amplitudes().len(),
            system.num_excited() + 1
        )));
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Continuous-pulse propagation
// ---------------------------------------------------------------------------

/// Propagate under the chirped pulse from the ground state, sampling
/// `sample_count` uniform times across the pulse support.
pub fn propagate_continuous(
    pulse: &ContinuousPulse,
    system: &LevelSystem,
    sample_count: usize,
) -> Result<Trajectory> {
    propagate_continuous_with(
        pulse,
        system,
        sample_count,
        DEFAULT_STEPS_PER_SAMPLE,
        &QuantumState::ground(system.num_excited()),
    )
}

/// Continuous propagation with explicit integrator resolution and initial
/// state. The RK4 step is `duration / ((sample_count - 1) * steps_per_sample)`.
pub fn propagate_continuous_with(
    pulse: &ContinuousPulse,
    system: &LevelSystem,
    sample_count: usize,
    steps_per_sample: usize,
    initial: &QuantumState,
) -> Result<Trajectory> {
    if sample_count < 2 {
        return Err(Error::invalid(format!(
            "sample_count must be at least 2, got {sample_count}"
        )));
    }
    if steps_per_sample == 0 {
        return Err(Error::invalid("steps_per_sample must be positive"));
    }
    validate_initial(system, initial)?;
    let m = system.num_excited();
    let rhs = |t: f64, y: &[C64], dy: &mut [C64]| {
        let omega = pulse.rabi(t);
        let ramp = pulse.detuning(t);
        // i dc/dt = H c with H_{j j} = Delta_j + ramp, H_{0 j} = -(g_j/2) omega.
        let mut acc = C64::new(0.0, 0.0);
        for j in 0..m {
            let h0j = -0.5 * system.weights()[j] * omega;
            let d_j = system.detunings()[j] + ramp;
            dy[j + 1] = C64::new(0.0, -1.0) * (h0j * y[0] + d_j * y[j + 1]);
            acc += h0j * y[j + 1];
        }
        dy[0] = C64::new(0.0, -1.0) * acc;
    };
    run_sampled(rhs, pulse.duration(), sample_count, steps_per_sample, initial)
}

/// Same dynamics in the carrier frame, where the ramp appears as a coupling
/// phase factor instead of a diagonal term. Populations must agree with
/// [`propagate_continuous`]; kept as the second route of that check.
pub fn propagate_continuous_phase_frame(
    pulse: &ContinuousPulse,
    system: &LevelSystem,
    sample_count: usize,
    steps_per_sample: usize,
) -> Result<Trajectory> {
    if sample_count < 2 {
        return Err(Error::invalid(format!(
            "sample_count must be at least 2, got {sample_count}"
        )));
    }
    let m = system.num_excited();
    let initial = QuantumState::ground(m);
    let rhs = |t: f64, y: &[C64], dy: &mut [C64]| {
        let omega = pulse.rabi(t);
        let ramp_phase = pulse.detuning_phase(t);
        let mut acc = C64::new(0.0, 0.0);
        for j in 0..m {
            let phase = system.detunings()[j] * t + ramp_phase;
            let hj0 = C64::from_polar(-0.5 * system.weights()[j] * omega, phase);
            dy[j + 1] = C64::new(0.0, -1.0) * hj0 * y[0];
            acc += hj0.conj() * y[j + 1];
        }
        dy[0] = C64::new(0.0, -1.0) * acc;
    };
    run_sampled(rhs, pulse.duration(), sample_count, steps_per_sample, &initial)
}

fn run_sampled<F>(
    rhs: F,
    duration: f64,
    sample_count: usize,
    steps_per_sample: usize,
    initial: &QuantumState,
) -> Result<Trajectory>
where
    F: Fn(f64, &[C64], &mut [C64]),
{
    let mut y = initial.amplitudes().to_vec();
    let mut scratch = Rk4Scratch::new(y.len());
    let mut times = Vec::with_capacity(sample_count);
    let mut states = Vec::with_capacity(sample_count);
    times.push(0.0);
    states.push(y.clone());
    let sample_dt = duration / (sample_count - 1) as f64;
    for i in 0..sample_count - 1 {
        let t0 = i as f64 * sample_dt;
        let h = sample_dt / steps_per_sample as f64;
        for s in 0..steps_per_sample {
            rk4_step(&rhs, t0 + s as f64 * h, h, &mut y, &mut scratch);
        }
        let t1 = (i + 1) as f64 * sample_dt;
        check_recorded(t1, &y)?;
        times.push(t1);
        states.push(y.clone());
    }
    Ok(Trajectory { times, states })
}

// ---------------------------------------------------------------------------
// Train propagation
// ---------------------------------------------------------------------------

/// Propagate under a pulse train from the ground state.
///
/// Each subpulse support is integrated with RK4 and sampled at
/// `samples_per_subpulse` interior points plus its boundaries; between
/// subpulses the frame is free and the state is constant, recorded at both
/// gap edges so linear interpolation of the result is exact there.
pub fn propagate_train(
    train: &PulseTrain,
    system: &LevelSystem,
    samples_per_subpulse: usize,
) -> Result<Trajectory> {
    propagate_train_with(
        train,
        system,
        samples_per_subpulse,
        DEFAULT_STEPS_PER_SUBPULSE,
        &QuantumState::ground(system.num_excited()),
    )
}

/// Train propagation with explicit integrator resolution and initial state.
pub fn propagate_train_with(
    train: &PulseTrain,
    system: &LevelSystem,
    samples_per_subpulse: usize,
    steps_per_subpulse: usize,
    initial: &QuantumState,
) -> Result<Trajectory> {
    if samples_per_subpulse < 2 {
        return Err(Error::invalid(format!(
            "samples_per_subpulse must be at least 2, got {samples_per_subpulse}"
        )));
    }
    if steps_per_subpulse == 0 {
        return Err(Error::invalid("steps_per_subpulse must be positive"));
    }
    validate_initial(system, initial)?;
    // Round the step count up to a multiple of the sample count so records
    // fall exactly on integration steps.
    let per_sample = steps_per_subpulse.div_ceil(samples_per_subpulse);
    let steps = per_sample * samples_per_subpulse;
    let m = system.num_excited();
    let mut y = initial.amplitudes().to_vec();
    let mut scratch = Rk4Scratch::new(y.len());
    let mut times = Vec::new();
    let mut states = Vec::new();
    times.push(train.start());
    states.push(y.clone());
    for (k, sp) in train.subpulses().iter().enumerate() {
        if k > 0 {
            // Free segment: identity in this frame. Record the gap end so the
            // constant stretch is represented exactly.
            times.push(sp.start());
            states.push(y.clone());
        }
        let t0 = sp.start();
        let h = sp.duration / steps as f64;
        let rhs = |t: f64, y: &[C64], dy: &mut [C64]| {
            let omega = sp.rabi(t);
            let base_phase = sp.carrier_phase_at(t);
            let mut acc = C64::new(0.0, 0.0);
            for j in 0..m {
                let phase = system.detunings()[j] * t + base_phase;
                let hj0 = C64::from_polar(-0.5 * system.weights()[j] * omega, phase);
                dy[j + 1] = C64::new(0.0, -1.0) * hj0 * y[0];
                acc += hj0.conj() * y[j + 1];
            }
            dy[0] = C64::new(0.0, -1.0) * acc;
        };
        for s in 0..steps {
            rk4_step(&rhs, t0 + s as f64 * h, h, &mut y, &mut scratch);
            if (s + 1) % per_sample == 0 {
                let t = t0 + (s + 1) as f64 * h;
                check_recorded(t, &y)?;
                times.push(t);
                states.push(y.clone());
            }
        }
    }
    Ok(Trajectory { times, states })
}

// ---------------------------------------------------------------------------
// First-order step unitaries and the analytic train oracle
// ---------------------------------------------------------------------------

/// A dense 2x2 complex matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mat2(pub [[C64; 2]; 2]);

impl Mat2 {
    pub fn identity() -> Self {
        Mat2([
            [C64::new(1.0, 0.0), C64::new(0.0, 0.0)],
            [C64::new(0.0, 0.0), C64::new(1.0, 0.0)],
        ])
    }

    pub fn mul(&self, rhs: &Mat2) -> Mat2 {
        let a = &self.0;
        let b = &rhs.0;
        let mut out = [[C64::new(0.0, 0.0); 2]; 2];
        for i in 0..2 {
            for j in 0..2 {
                out[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
            }
        }
        Mat2(out)
    }

    pub fn adjoint(&self) -> Mat2 {
        Mat2([
            [self.0[0][0].conj(), self.0[1][0].conj()],
            [self.0[0][1].conj(), self.0[1][1].conj()],
        ])
    }

    pub fn apply(&self, v: [C64; 2]) -> [C64; 2] {
        [
            self.0[0][0] * v[0] + self.0[0][1] * v[1],
            self.0[1][0] * v[0] + self.0[1][1] * v[1],
        ]
    }

    /// Largest entry-wise absolute difference.
    pub fn max_abs_diff(&self, rhs: &Mat2) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..2 {
            for j in 0..2 {
                worst = worst.max((self.0[i][j] - rhs.0[i][j]).norm());
            }
        }
        worst
    }
}

use crate::digitizer::SubpulseIntegrals;

/// Exact exponential of the time-averaged subpulse generator,
/// `exp(i (A_k sigma_1 + phi_k sigma_3) / 2)`:
///
/// ```text
/// cos(Ae/2) I + i sin(Ae/2) (A_k sigma_1 + phi_k sigma_3) / Ae
/// ```
///
/// with `Ae = sqrt(A_k^2 + phi_k^2)`; identity when `Ae = 0`.
pub fn magnus_subpulse_unitary(si: &SubpulseIntegrals) -> Mat2 {
    let ae = si.effective_area;
    if ae == 0.0 {
        return Mat2::identity();
    }
    let c = (ae / 2.0).cos();
    let s = (ae / 2.0).sin();
    let sx = s * si.area / ae;
    let sz = s * si.free_phase / ae;
    Mat2([
        [C64::new(c, sz), C64::new(0.0, sx)],
        [C64::new(0.0, sx), C64::new(c, -sz)],
    ])
}

/// First-order (linearized) step `I + (i/2) A_k sigma_1 + (i/2) phi_k
/// sigma_3`. Unitary only to first order in the effective area.
pub fn linearized_subpulse_unitary(si: &SubpulseIntegrals) -> Mat2 {
    Mat2([
        [C64::new(1.0, si.free_phase / 2.0), C64::new(0.0, si.area / 2.0)],
        [C64::new(0.0, si.area / 2.0), C64::new(1.0, -si.free_phase / 2.0)],
    ])
}

/// Result of the first-order train oracle.
#[derive(Debug, Clone)]
pub struct AnalyticTrainRecord {
    /// Raw (approximately unitary) product of all phase-dressed steps.
    pub final_matrix: Mat2,
    /// Subpulse peak times, one entry per step.
    pub times: Vec<f64>,
    /// `[P_0, P_1]` after each step, from the per-step renormalized state.
    pub populations: Vec<[f64; 2]>,
}

/// First-order analytic propagation of a two-level system under a train.
///
/// Each subpulse contributes the phase-dressed linear step
///
/// ```text
/// u_k = I + (i/2) A_k cos(theta_k) sigma_1 - (i/2) A_k sin(theta_k) sigma_2
/// ```
///
/// where `theta_k` is the total kick phase: the subpulse carrier phase at its
/// peak plus the system detuning times the peak time (so `theta_k = delta t_k`
/// for a constant-frequency train driving a resonant level). This is the
/// linearized step of [`propagate_train`] in the same frame, where free
/// evolution is the identity and the whole detuning history lives in the kick
/// phases; composing it with an additional free-phase diagonal would count
/// the detuning twice. For a constant-frequency train the composition is
/// population-equivalent to dressing plain `I + (i/2) A_k sigma_1 + (i/2)
/// phi_k sigma_3` steps with their accumulated frame phases.
///
/// The state is renormalized after every step before populations are read
/// off, since the linear step is not exactly unitary. Serves as the
/// first-order cross-check of [`propagate_train`].
pub fn analytic_train_propagator(
    train: &PulseTrain,
    system: &LevelSystem,
) -> Result<AnalyticTrainRecord> {
    if system.num_excited() != 1 {
        return Err(Error::invalid(format!(
            "the analytic train propagator is two-level only, got {} excited levels",
            system.num_excited()
        )));
    }
    let delta_sys = system.detunings()[0];
    let weight = system.weights()[0];
    let mut u_total = Mat2::identity();
    let mut state = [C64::new(1.0, 0.0), C64::new(0.0, 0.0)];
    let mut times = Vec::with_capacity(train.len());
    let mut populations = Vec::with_capacity(train.len());
    for sp in train.subpulses() {
        let si = crate::digitizer::subpulse_integrals(sp, train.period());
        let area = weight * si.area;
        let theta = sp.carrier_phase + delta_sys * sp.peak_time;
        let off01 = C64::new(0.0, area / 2.0) * C64::from_polar(1.0, theta);
        let off10 = C64::new(0.0, area / 2.0) * C64::from_polar(1.0, -theta);
        let u_k = Mat2([
            [C64::new(1.0, 0.0), off01],
            [off10, C64::new(1.0, 0.0)],
        ]);
        u_total = u_k.mul(&u_total);
        state = u_k.apply(state);
        let norm = (state[0].norm_sqr() + state[1].norm_sqr()).sqrt();
        state[0] /= norm;
        state[1] /= norm;
        times.push(sp.peak_time);
        populations.push([state[0].norm_sqr(), state[1].norm_sqr()]);
    }
    Ok(AnalyticTrainRecord {
        final_matrix: u_total,
        times,
        populations,
    })
}
