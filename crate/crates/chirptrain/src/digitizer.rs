//! Compilation of a long chirped pulse into an equivalent weak-subpulse train.
//!
//! The compiler slices the source pulse into `N` uniform samples with spacing
//! `dt = duration / (N - 1)` and builds one subpulse per sample so that the
//! subpulse area and the free-evolution phase per train period reproduce the
//! sliced first-order propagator of the source:
//!
//! ```text
//! A_k = rabi(t_k) * dt        and        T * delta_k = detuning(t_k) * dt
//! ```
//!
//! Two layouts satisfy these conditions. In the duration-matched regime the
//! train spans the source pulse itself: subpulses peak exactly at the sample
//! times, the subpulse duration is `dt / (1 + r1)` and the gap-to-subpulse
//! ratio `r1 = T / tau` fixes the amplitude boost `(1 + r1) / S0`. In the
//! time-scaled regime the train runs on its own clock with period `T = r1 *
//! tau` and `tau = duration / (N * r2)`; populations then reproduce the
//! source dynamics after a linear stretch of the time axis.
//!
//! Exact prefactors are used throughout, so the matching identities hold to
//! machine precision and `verify_matching` reports pure rounding noise.

use crate::error::{Error, Result};
use crate::pulses::{ContinuousPulse, EnvelopeShape};

/// One subpulse of a train.
///
/// `carrier_phase` is the accumulated optical phase of the subpulse carrier
/// at its peak, relative to the frame rotating at the train's carrier
/// reference. The train is phase coherent: for a constant-frequency train
/// with detuning `d` the phase is `d * peak_time`, i.e. plain absolute-time
/// referencing, which is what produces the frequency-comb sidebands. For a
/// frequency-swept train the phases follow the accumulated detuning integral
/// of the source chirp, keeping the subpulse carriers mutually coherent the
/// way a mode-locked, frequency-stepped source would.
#[derive(Debug, Clone, PartialEq)]
pub struct Subpulse {
    pub peak_rabi: f64,
    pub detuning: f64,
    pub peak_time: f64,
    pub duration: f64,
    pub envelope: EnvelopeShape,
    pub carrier_phase: f64,
}

impl Subpulse {
    /// Instantaneous Rabi frequency at absolute time `t`.
    pub fn rabi(&self, t: f64) -> f64 {
        let local = t - (self.peak_time - self.duration / 2.0);
        self.peak_rabi
            * self
                .envelope
                .value(local, self.duration)
                .expect("subpulse duration validated at train construction")
    }

    /// Start of the support.
    pub fn start(&self) -> f64 {
        self.peak_time - self.duration / 2.0
    }

    /// End of the support.
    pub fn end(&self) -> f64 {
        self.peak_time + self.duration / 2.0
    }

    /// Carrier phase at absolute time `t` within this subpulse.
    pub fn carrier_phase_at(&self, t: f64) -> f64 {
        self.carrier_phase + self.detuning * (t - self.peak_time)
    }
}

/// Per-subpulse first-order integrals.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SubpulseIntegrals {
    /// Subpulse area `A_k = peak_rabi * tau * S0`.
    pub area: f64,
    /// Free-evolution phase per period, `phi_k = T * delta_k`.
    pub free_phase: f64,
    /// Effective area `sqrt(A_k^2 + phi_k^2)`.
    pub effective_area: f64,
}

/// Area and phase integrals of a subpulse over one train period.
pub fn subpulse_integrals(sp: &Subpulse, period: f64) -> SubpulseIntegrals {
    let area = sp.peak_rabi * sp.duration * sp.envelope.shape_factor();
    let free_phase = period * sp.detuning;
    SubpulseIntegrals {
        area,
        free_phase,
        effective_area: area.hypot(free_phase),
    }
}

/// An immutable train of phase-coherent subpulses.
#[derive(Debug, Clone, PartialEq)]
pub struct PulseTrain {
    subpulses: Vec<Subpulse>,
    period: f64,
    r1: f64,
    r2: f64,
    source: Option<ContinuousPulse>,
}

impl PulseTrain {
    /// Validate and assemble a train from raw subpulses.
    ///
    /// Requires at least two subpulses sharing one duration and envelope,
    /// uniformly spaced peaks, and a spacing no smaller than the subpulse
    /// duration (no overlap).
    pub fn new(
        subpulses: Vec<Subpulse>,
        period: f64,
        r1: f64,
        r2: f64,
        source: Option<ContinuousPulse>,
    ) -> Result<Self> {
        if subpulses.len() < 2 {
            return Err(Error::invalid(format!(
                "a train needs at least 2 subpulses, got {}",
                subpulses.len()
            )));
        }
        let tau = subpulses[0].duration;
        if tau <= 0.0 || tau.is_nan() {
            return Err(Error::invalid("subpulse duration must be positive"));
        }
        let spacing = subpulses[1].peak_time - subpulses[0].peak_time;
        if spacing < tau * (1.0 - 1e-12) {
            return Err(Error::invalid(format!(
                "subpulses overlap: spacing {spacing} is smaller than duration {tau}"
            )));
        }
        let scale = spacing.abs() + subpulses.last().unwrap().peak_time.abs();
        for (k, sp) in subpulses.iter().enumerate() {
            if sp.peak_rabi < 0.0 || !sp.peak_rabi.is_finite() {
                return Err(Error::invalid(format!(
                    "subpulse {k} has invalid peak Rabi frequency {}",
                    sp.peak_rabi
                )));
            }
            if sp.duration != tau || sp.envelope != subpulses[0].envelope {
                return Err(Error::invalid(format!(
                    "subpulse {k} does not share the common duration and envelope"
                )));
            }
            if k > 0 {
                let d = sp.peak_time - subpulses[k - 1].peak_time;
                if (d - spacing).abs() > 1e-12 * scale.max(1.0) {
                    return Err(Error::invalid(format!(
                        "subpulse peaks are not uniformly spaced at index {k}"
                    )));
                }
            }
        }
        if period <= 0.0 || r1 < 1.0 || r2 <= 0.0 || (period + r1 + r2).is_nan() {
            return Err(Error::invalid(
                "train period must be positive, r1 >= 1 and r2 > 0",
            ));
        }
        Ok(PulseTrain {
            subpulses,
            period,
            r1,
            r2,
            source,
        })
    }

    /// A constant-frequency train of identical subpulses: peaks at
    /// `t0 + k * period`, all with the given detuning from the carrier and
    /// absolute-time carrier phases `detuning * t_k`.
    pub fn constant_frequency(
        peak_rabi: f64,
        detuning: f64,
        count: usize,
        duration: f64,
        period: f64,
        envelope: EnvelopeShape,
        t0: f64,
    ) -> Result<Self> {
        if count < 2 {
            return Err(Error::invalid(format!(
                "a train needs at least 2 subpulses, got {count}"
            )));
        }
        if duration <= 0.0 || period < duration || (duration + period).is_nan() {
            return Err(Error::invalid(
                "need duration > 0 and period >= duration (no overlap)",
            ));
        }
        let subpulses = (0..count)
            .map(|k| {
                let t_k = t0 + k as f64 * period;
                Subpulse {
                    peak_rabi,
                    detuning,
                    peak_time: t_k,
                    duration,
                    envelope: envelope.clone(),
                    carrier_phase: detuning * t_k,
                }
            })
            .collect();
        PulseTrain::new(subpulses, period, period / duration, 1.0, None)
    }

    pub fn subpulses(&self) -> &[Subpulse] {
        &self.subpulses
    }

    pub fn len(&self) -> usize {
        self.subpulses.len()
    }

    pub fn is_empty(&self) -> bool {
        self.subpulses.is_empty()
    }

    /// Period `T` entering the free-evolution phase `phi_k = T * delta_k`.
    pub fn period(&self) -> f64 {
        self.period
    }

    /// Actual peak-to-peak spacing. Equals `T` for constant-frequency and
    /// time-scaled trains; equals `T + tau` in the duration-matched regime
    /// where the train tiles the source duration.
    pub fn spacing(&self) -> f64 {
        self.subpulses[1].peak_time - self.subpulses[0].peak_time
    }

    pub fn r1(&self) -> f64 {
        self.r1
    }

    pub fn r2(&self) -> f64 {
        self.r2
    }

    pub fn subpulse_duration(&self) -> f64 {
        self.subpulses[0].duration
    }

    pub fn envelope(&self) -> &EnvelopeShape {
        &self.subpulses[0].envelope
    }

    pub fn source(&self) -> Option<&ContinuousPulse> {
        self.source.as_ref()
    }

    /// Angular frequency of comb tooth `n`: `2 pi n / spacing`.
    pub fn tooth_frequency(&self, n: i32) -> f64 {
        2.0 * std::f64::consts::PI * n as f64 / self.spacing()
    }

    /// Start of the first subpulse support.
    pub fn start(&self) -> f64 {
        self.subpulses[0].start()
    }

    /// End of the last subpulse support.
    pub fn end(&self) -> f64 {
        self.subpulses.last().unwrap().end()
    }

    /// Integrals of every subpulse against the train period.
    pub fn integrals(&self) -> Vec<SubpulseIntegrals> {
        self.subpulses
            .iter()
            .map(|sp| subpulse_integrals(sp, self.period))
            .collect()
    }

    /// A copy with every subpulse amplitude multiplied by `factor`.
    pub fn scale_amplitudes(&self, factor: f64) -> Result<Self> {
        if factor < 0.0 || !factor.is_finite() {
            return Err(Error::invalid(format!(
                "amplitude scale factor must be non-negative, got {factor}"
            )));
        }
        let mut scaled = self.clone();
        for sp in &mut scaled.subpulses {
            sp.peak_rabi *= factor;
        }
        Ok(scaled)
    }
}

fn check_counts(n: usize, r1: f64) -> Result<()> {
    if n < 2 {
        return Err(Error::invalid(format!(
            "need at least 2 subpulses, got {n}"
        )));
    }
    if r1 < 1.0 || r1.is_nan() {
        return Err(Error::invalid(format!(
            "subpulses overlap: r1 must be >= 1, got {r1}"
        )));
    }
    Ok(())
}

/// Duration-matched digitization: the train spans the source pulse.
///
/// Subpulses peak exactly at the sample times `t_k = k * duration / (N-1)`;
/// with `dt = T + tau` this gives `A_k = rabi(t_k) * dt` and `T * delta_k =
/// detuning(t_k) * dt` identically.
pub fn digitize_matched(source: &ContinuousPulse, n: usize, r1: f64) -> Result<PulseTrain> {
    check_counts(n, r1)?;
    let dt = source.duration() / (n - 1) as f64;
    let tau = dt / (1.0 + r1);
    let period = r1 * tau;
    let s0 = source.envelope().shape_factor();
    let subpulses = (0..n)
        .map(|k| {
            let t_k = k as f64 * dt;
            Subpulse {
                peak_rabi: source.rabi(t_k) * (1.0 + r1) / s0,
                detuning: source.detuning(t_k) * (1.0 + 1.0 / r1),
                peak_time: t_k,
                duration: tau,
                envelope: source.envelope().clone(),
                carrier_phase: source.detuning_phase(t_k),
            }
        })
        .collect();
    let r2 = (n - 1) as f64 * (1.0 + r1) / n as f64;
    PulseTrain::new(subpulses, period, r1, r2, Some(source.clone()))
}

/// Time-scaled digitization: the train runs on its own clock.
///
/// The subpulse duration is `tau = duration / (N * r2)`, the period `T = r1 *
/// tau`, and the first subpulse peaks at `tau / 2`. Source samples are taken
/// at `k * duration / (N-1)`; the exact prefactor `N / (N-1)` keeps the
/// matching identities exact for any `N`.
pub fn digitize_scaled(source: &ContinuousPulse, n: usize, r1: f64, r2: f64) -> Result<PulseTrain> {
    check_counts(n, r1)?;
    if r2 <= 0.0 || r2.is_nan() {
        return Err(Error::invalid(format!("r2 must be positive, got {r2}")));
    }
    let tau = source.duration() / (n as f64 * r2);
    let period = r1 * tau;
    let s0 = source.envelope().shape_factor();
    let sample_dt = source.duration() / (n - 1) as f64;
    let boost = n as f64 / (n - 1) as f64;
    let subpulses = (0..n)
        .map(|k| {
            let t_src = k as f64 * sample_dt;
            Subpulse {
                peak_rabi: source.rabi(t_src) * (r2 / s0) * boost,
                detuning: source.detuning(t_src) * (r2 / r1) * boost,
                peak_time: tau / 2.0 + k as f64 * period,
                duration: tau,
                envelope: source.envelope().clone(),
                carrier_phase: source.detuning_phase(t_src),
            }
        })
        .collect();
    PulseTrain::new(subpulses, period, r1, r2, Some(source.clone()))
}

/// Residuals of the matching conditions for one train against its source.
#[derive(Debug, Clone)]
pub struct MatchingReport {
    /// `|A_k - rabi(t_k) * dt|` per subpulse.
    pub area_residuals: Vec<f64>,
    /// `|T * delta_k - detuning(t_k) * dt|` per subpulse.
    pub phase_residuals: Vec<f64>,
    pub max_area_residual: f64,
    pub rms_area_residual: f64,
    pub max_phase_residual: f64,
    pub rms_phase_residual: f64,
}

fn max_rms(v: &[f64]) -> (f64, f64) {
    let max = v.iter().cloned().fold(0.0, f64::max);
    let rms = (v.iter().map(|x| x * x).sum::<f64>() / v.len() as f64).sqrt();
    (max, rms)
}

/// Check the matching identities of a train against a source pulse.
///
/// Sampling is reconstructed from the train length as `t_k = k * duration /
/// (N-1)`. Errors if the train geometry does not correspond to a sampling of
/// this source (its `N * r2 * tau` does not reproduce the source duration).
pub fn verify_matching(train: &PulseTrain, source: &ContinuousPulse) -> Result<MatchingReport> {
    let n = train.len();
    let implied = n as f64 * train.r2() * train.subpulse_duration();
    if (implied - source.duration()).abs() > 1e-9 * source.duration() {
        return Err(Error::invalid(format!(
            "train does not sample this source: N * r2 * tau = {implied} but the source duration is {}",
            source.duration()
        )));
    }
    let dt = source.duration() / (n - 1) as f64;
    let s0 = train.envelope().shape_factor();
    let mut area_residuals = Vec::with_capacity(n);
    let mut phase_residuals = Vec::with_capacity(n);
    for (k, sp) in train.subpulses().iter().enumerate() {
        let t_k = k as f64 * dt;
        let a_k = sp.peak_rabi * sp.duration * s0;
        area_residuals.push((a_k - source.rabi(t_k) * dt).abs());
        phase_residuals.push((train.period() * sp.detuning - source.detuning(t_k) * dt).abs());
    }
    let (max_area_residual, rms_area_residual) = max_rms(&area_residuals);
    let (max_phase_residual, rms_phase_residual) = max_rms(&phase_residuals);
    Ok(MatchingReport {
        area_residuals,
        phase_residuals,
        max_area_residual,
        rms_area_residual,
        max_phase_residual,
        rms_phase_residual,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pulses::{ContinuousPulse, EnvelopeShape};
    use proptest::prelude::*;
    use std::f64::consts::PI;

    fn strong_chirp_source() -> ContinuousPulse {
        ContinuousPulse::from_area(5.0 * PI, 1.0, 291.6, EnvelopeShape::Blackman, 0.0).unwrap()
    }

    #[test]
    fn matched_counts_and_center() {
        let train = digitize_matched(&strong_chirp_source(), 101, 100.0).unwrap();
        assert_eq!(train.len(), 101);
        // Odd N puts one subpulse exactly on the ramp center: zero detuning
        // and the largest amplitude.
        let mid = &train.subpulses()[50];
        assert_eq!(mid.detuning, 0.0);
        let max_rabi = train
            .subpulses()
            .iter()
            .map(|s| s.peak_rabi)
            .fold(0.0, f64::max);
        assert_eq!(mid.peak_rabi, max_rabi);
    }

    #[test]
    fn matched_even_count_straddles_center() {
        let train = digitize_matched(&strong_chirp_source(), 100, 100.0).unwrap();
        let a = &train.subpulses()[49];
        let b = &train.subpulses()[50];
        assert!((a.detuning + b.detuning).abs() < 1e-10);
        assert!((a.peak_rabi - b.peak_rabi).abs() < 1e-9 * a.peak_rabi);
    }

    #[test]
    fn zero_source_gives_zero_amplitudes_with_chirped_detunings() {
        let src =
            ContinuousPulse::from_peak_rabi(0.0, 1.0, 64.8, EnvelopeShape::Blackman, 0.0).unwrap();
        let train = digitize_matched(&src, 50, 10.0).unwrap();
        for sp in train.subpulses() {
            assert_eq!(sp.peak_rabi, 0.0);
        }
        assert!(train.subpulses()[0].detuning < 0.0);
        assert!(train.subpulses()[49].detuning > 0.0);
    }

    #[test]
    fn matched_two_subpulses_at_r1_one() {
        let src = strong_chirp_source();
        let train = digitize_matched(&src, 2, 1.0).unwrap();
        assert_eq!(train.len(), 2);
        assert_eq!(train.subpulses()[0].peak_time, 0.0);
        assert_eq!(train.subpulses()[1].peak_time, 1.0);
        for (k, sp) in train.subpulses().iter().enumerate() {
            let expect = src.rabi(k as f64) * 2.0 / 0.42;
            assert!((sp.peak_rabi - expect).abs() <= 1e-12 * expect.abs().max(1.0));
        }
    }

    #[test]
    fn digitize_rejects_bad_counts() {
        let src = strong_chirp_source();
        assert!(digitize_matched(&src, 1, 100.0).is_err());
        assert!(digitize_matched(&src, 100, 0.5).is_err());
        assert!(digitize_scaled(&src, 100, 100.0, 0.0).is_err());
        assert!(digitize_scaled(&src, 1, 100.0, 1.0).is_err());
    }

    #[test]
    fn scaled_layout_r2_one() {
        let train = digitize_scaled(&strong_chirp_source(), 100, 100.0, 1.0).unwrap();
        assert!((train.subpulse_duration() - 0.01).abs() < 1e-15);
        assert!((train.period() - 1.0).abs() < 1e-12);
        assert!((train.spacing() - train.period()).abs() < 1e-12);
        assert!((train.subpulses()[0].peak_time - 0.005).abs() < 1e-15);
    }

    #[test]
    fn scaled_zero_source_is_zero_train() {
        let src =
            ContinuousPulse::from_peak_rabi(0.0, 1.0, 0.0, EnvelopeShape::Blackman, 0.0).unwrap();
        let train = digitize_scaled(&src, 10, 5.0, 1.0).unwrap();
        assert!(train.subpulses().iter().all(|s| s.peak_rabi == 0.0));
    }

    #[test]
    fn subpulse_integrals_examples() {
        let sp = Subpulse {
            peak_rabi: 0.0,
            detuning: 0.0,
            peak_time: 0.0,
            duration: 1.0,
            envelope: EnvelopeShape::Blackman,
            carrier_phase: 0.0,
        };
        let si = subpulse_integrals(&sp, 2.0);
        assert_eq!((si.area, si.free_phase, si.effective_area), (0.0, 0.0, 0.0));

        // Pythagorean check: A_k = 3, phi_k = 4 -> A_ek = 5.
        let sp = Subpulse {
            peak_rabi: 3.0 / 0.42,
            duration: 1.0,
            detuning: 2.0,
            peak_time: 0.0,
            envelope: EnvelopeShape::Blackman,
            carrier_phase: 0.0,
        };
        let si = subpulse_integrals(&sp, 2.0);
        assert!((si.area - 3.0).abs() < 1e-12);
        assert!((si.free_phase - 4.0).abs() < 1e-12);
        assert!((si.effective_area - 5.0).abs() < 1e-12);
    }

    #[test]
    fn middle_subpulse_area_matches_quadrature() {
        let train = digitize_matched(&strong_chirp_source(), 101, 100.0).unwrap();
        let sp = &train.subpulses()[50];
        let si = subpulse_integrals(sp, train.period());
        let quad = crate::quad::simpson(|t| sp.rabi(t), sp.start(), sp.end());
        assert!(
            (si.area - quad).abs() < 1e-10 * si.area,
            "area {} vs quadrature {}",
            si.area,
            quad
        );
    }

    #[test]
    fn matching_residuals_vanish_by_construction() {
        let src = strong_chirp_source();
        for train in [
            digitize_matched(&src, 100, 100.0).unwrap(),
            digitize_scaled(&src, 100, 100.0, 1.0).unwrap(),
            digitize_scaled(&src, 77, 13.0, 4.2).unwrap(),
        ] {
            let report = verify_matching(&train, &src).unwrap();
            let max_area = train
                .integrals()
                .iter()
                .map(|si| si.area)
                .fold(0.0, f64::max);
            assert!(
                report.max_area_residual <= 1e-12 * max_area,
                "area residual {}",
                report.max_area_residual
            );
            assert!(report.max_phase_residual <= 1e-12 * max_area.max(1.0));
        }
    }

    #[test]
    fn matching_flags_perturbed_amplitude() {
        let src = strong_chirp_source();
        let mut train = digitize_matched(&src, 100, 100.0).unwrap();
        let k = 50;
        let a_k = train.integrals()[k].area;
        train.subpulses[k].peak_rabi *= 1.1;
        let report = verify_matching(&train, &src).unwrap();
        assert!((report.max_area_residual - 0.1 * a_k).abs() < 1e-9 * a_k);
        assert!((report.area_residuals[k] - 0.1 * a_k).abs() < 1e-9 * a_k);
    }

    #[test]
    fn matching_rejects_foreign_source() {
        let src = strong_chirp_source();
        let other =
            ContinuousPulse::from_area(PI, 2.0, 0.0, EnvelopeShape::Blackman, 0.0).unwrap();
        let train = digitize_matched(&src, 100, 100.0).unwrap();
        assert!(verify_matching(&train, &other).is_err());
    }

    #[test]
    fn zero_train_matches_zero_source() {
        let src =
            ContinuousPulse::from_peak_rabi(0.0, 1.0, 0.0, EnvelopeShape::Blackman, 0.0).unwrap();
        let train = digitize_matched(&src, 20, 10.0).unwrap();
        let report = verify_matching(&train, &src).unwrap();
        assert_eq!(report.max_area_residual, 0.0);
        assert_eq!(report.max_phase_residual, 0.0);
    }

    #[test]
    fn detuning_fidelity_exact_ratio() {
        let src = strong_chirp_source();
        let r1 = 100.0;
        let train = digitize_matched(&src, 100, r1).unwrap();
        for (k, sp) in train.subpulses().iter().enumerate() {
            let d_src = src.detuning(k as f64 / 99.0);
            if d_src != 0.0 {
                assert!((sp.detuning / d_src - (1.0 + 1.0 / r1)).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn regime_consistency_matched_vs_scaled() {
        let src = strong_chirp_source();
        let (n, r1) = (100usize, 100.0);
        let matched = digitize_matched(&src, n, r1).unwrap();
        let r2 = (n - 1) as f64 * (1.0 + r1) / n as f64;
        let scaled = digitize_scaled(&src, n, r1, r2).unwrap();
        assert!((matched.subpulse_duration() - scaled.subpulse_duration()).abs()
            < 1e-12 * matched.subpulse_duration());
        for (a, b) in matched.subpulses().iter().zip(scaled.subpulses()) {
            let scale = a.peak_rabi.abs().max(1e-300);
            assert!((a.peak_rabi - b.peak_rabi).abs() < 1e-12 * scale);
            let dscale = a.detuning.abs().max(1e-12);
            assert!((a.detuning - b.detuning).abs() < 1e-12 * dscale);
        }
    }

    #[test]
    fn constant_frequency_train_phases_are_absolute_time() {
        let train = PulseTrain::constant_frequency(
            1.0,
            2.5,
            10,
            0.1,
            1.0,
            EnvelopeShape::Blackman,
            0.05,
        )
        .unwrap();
        for sp in train.subpulses() {
            assert!((sp.carrier_phase - 2.5 * sp.peak_time).abs() < 1e-12);
        }
        assert_eq!(train.spacing(), 1.0);
        assert!((train.tooth_frequency(3) - 6.0 * PI).abs() < 1e-12);
    }

    #[test]
    fn train_construction_rejects_overlap_and_nonuniform() {
        let sp = |t: f64| Subpulse {
            peak_rabi: 1.0,
            detuning: 0.0,
            peak_time: t,
            duration: 1.0,
            envelope: EnvelopeShape::Blackman,
            carrier_phase: 0.0,
        };
        // Overlapping spacing.
        assert!(PulseTrain::new(vec![sp(0.0), sp(0.5)], 0.5, 1.0, 1.0, None).is_err());
        // Non-uniform spacing.
        assert!(
            PulseTrain::new(vec![sp(0.0), sp(2.0), sp(5.0)], 2.0, 2.0, 1.0, None).is_err()
        );
    }

    proptest! {
        #[test]
        fn uniform_spacing_and_exact_identities(
            n in 2usize..200,
            r1 in 1.0f64..200.0,
            area in 0.0f64..20.0,
            chirp in -300.0f64..300.0,
        ) {
            let src = ContinuousPulse::from_area(
                area, 1.0, chirp, EnvelopeShape::Blackman, 0.0,
            ).unwrap();
            let train = digitize_matched(&src, n, r1).unwrap();
            let spacing = train.spacing();
            for w in train.subpulses().windows(2) {
                let d = w[1].peak_time - w[0].peak_time;
                prop_assert!((d - spacing).abs() <= 1e-12 * spacing.max(1.0));
            }
            prop_assert!((spacing - (train.period() + train.subpulse_duration())).abs()
                <= 1e-12 * spacing);
            let report = verify_matching(&train, &src).unwrap();
            let max_area = train.integrals().iter().map(|s| s.area).fold(0.0, f64::max);
            prop_assert!(report.max_area_residual <= 1e-12 * max_area.max(1e-300));
        }

        #[test]
        fn effective_area_is_hypotenuse(
            rabi in 0.0f64..50.0,
            det in -50.0f64..50.0,
            period in 0.1f64..10.0,
        ) {
            let sp = Subpulse {
                peak_rabi: rabi,
                detuning: det,
                peak_time: 0.0,
                duration: 0.05,
                envelope: EnvelopeShape::Blackman,
                carrier_phase: 0.0,
            };
            let si = subpulse_integrals(&sp, period);
            let expect = (si.area * si.area + si.free_phase * si.free_phase).sqrt();
            prop_assert!((si.effective_area - expect).abs() <= 1e-12 * expect.max(1e-300));
            prop_assert!(si.area >= 0.0);
        }
    }
}
