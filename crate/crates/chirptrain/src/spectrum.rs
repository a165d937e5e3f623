//! Frequency-comb tooth amplitudes of a pulse train and the first-order
//! sideband yields they predict.
//!
//! For a phase-coherent train the spectrum is a comb with teeth spaced by
//! `2 pi / spacing`. All subpulses share one envelope shape, so every tooth
//! weight carries the same comb-structure factor and tooth ratios reduce to
//! ratios of the single-subpulse envelope transform. Only those ratios are
//! used downstream.

use num_complex::Complex64 as C64;

use crate::digitizer::PulseTrain;
use crate::error::{Error, Result};
use crate::quad;

/// Magnitude of the single-subpulse envelope transform at comb tooth `n`,
/// `|int_0^tau envelope(t) exp(-i 2 pi n t / spacing) dt|`.
///
/// At `n = 0` this is `tau * S0`. The common comb factor of the train is
/// deliberately not included; it cancels in every ratio.
pub fn sideband_amplitude(train: &PulseTrain, n: i32) -> f64 {
    let tau = train.subpulse_duration();
    let omega = train.tooth_frequency(n);
    let env = train.envelope();
    quad::simpson_complex(
        |t| {
            let v = env.value(t, tau).expect("tau validated at construction");
            C64::from_polar(v, -omega * t)
        },
        0.0,
        tau,
    )
    .norm()
}

/// Tooth-to-carrier amplitude ratio `F(n) / F(0)`.
pub fn sideband_ratio(train: &PulseTrain, n: i32) -> f64 {
    sideband_amplitude(train, n) / sideband_amplitude(train, 0)
}

/// First-order transfer yield at tooth `n` of a train whose cumulative area
/// at the carrier is pi: `sin^2((pi/2) F(n) / F(0))`.
pub fn predicted_sideband_yield(train: &PulseTrain, n: i32) -> f64 {
    let r = sideband_ratio(train, n);
    let s = (std::f64::consts::FRAC_PI_2 * r).sin();
    s * s
}

/// Closed-form yield for Gaussian subpulses, `sin^2((pi/2) exp(-tau^2 n^2 /
/// T^2))`.
///
/// `tau` is a bare width parameter applied verbatim. For it to equal the
/// true transform ratio of a Gaussian envelope of standard deviation
/// `sigma`, pass `tau = pi * sqrt(2) * sigma`
/// ([`crate::pulses::EnvelopeShape::gaussian_spectral_width`] computes this
/// from the envelope duration).
pub fn gaussian_sideband_yield(n: i32, tau: f64, period: f64) -> Result<f64> {
    if period <= 0.0 || period.is_nan() {
        return Err(Error::invalid(format!(
            "period must be positive, got {period}"
        )));
    }
    let x = tau * n as f64 / period;
    let s = (std::f64::consts::FRAC_PI_2 * (-x * x).exp()).sin();
    Ok(s * s)
}

/// Amplitude prefactor `sqrt(F(n)^2 + F(m)^2) / F(0)` seen by a train that
/// drives two excited states through teeth `n` and `m` at once. Dividing the
/// subpulse amplitudes by it restores a pi bright-state area.
pub fn superposition_prefactor(train: &PulseTrain, n: i32, m: i32) -> f64 {
    let f0 = sideband_amplitude(train, 0);
    sideband_amplitude(train, n).hypot(sideband_amplitude(train, m)) / f0
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::digitizer::digitize_scaled;
    use crate::pulses::{ContinuousPulse, EnvelopeShape};
    use proptest::prelude::*;
    use std::f64::consts::PI;

    fn uniform_train(envelope: EnvelopeShape) -> PulseTrain {
        let src = ContinuousPulse::from_area(PI, 1.0, 0.0, envelope, 0.0).unwrap();
        digitize_scaled(&src, 100, 100.0, 1.0).unwrap()
    }

    #[test]
    fn carrier_amplitude_is_area_of_envelope() {
        for env in [EnvelopeShape::Blackman, EnvelopeShape::Gaussian] {
            let train = uniform_train(env.clone());
            let expect = train.subpulse_duration() * env.shape_factor();
            let f0 = sideband_amplitude(&train, 0);
            assert!(
                (f0 - expect).abs() < 1e-10 * expect,
                "{env:?}: F(0) = {f0}, tau S0 = {expect}"
            );
        }
    }

    #[test]
    fn gaussian_ratio_matches_closed_form() {
        // The closed form assumes an untruncated transform; +-3 sigma
        // truncation perturbs the ratio at the few-1e-3 level.
        let train = uniform_train(EnvelopeShape::Gaussian);
        let width = EnvelopeShape::gaussian_spectral_width(train.subpulse_duration());
        let spacing = train.spacing();
        for n in [1, 10, 50, 100] {
            let x = width * n as f64 / spacing;
            let closed = (-x * x).exp();
            let ratio = sideband_ratio(&train, n);
            assert!(
                (ratio - closed).abs() < 5e-3,
                "n = {n}: quadrature {ratio} vs closed {closed}"
            );
        }
    }

    #[test]
    fn blackman_ratio_at_tooth_r1_is_25_over_42() {
        // At omega * tau = 2 pi only the first-harmonic term of the window
        // survives the integral: |F| = 0.25 tau against F(0) = 0.42 tau.
        let train = uniform_train(EnvelopeShape::Blackman);
        let ratio = sideband_ratio(&train, 100);
        assert!(
            (ratio - 25.0 / 42.0).abs() < 1e-9,
            "ratio {ratio} vs 25/42 = {}",
            25.0 / 42.0
        );
        let yield_100 = predicted_sideband_yield(&train, 100);
        let expect = (PI / 2.0 * 25.0 / 42.0).sin().powi(2);
        assert!((yield_100 - expect).abs() < 1e-9);
    }

    #[test]
    fn yield_examples() {
        let train = uniform_train(EnvelopeShape::Blackman);
        assert!((predicted_sideband_yield(&train, 0) - 1.0).abs() < 1e-12);
        // Far past the spectral nulls the yield vanishes.
        assert!(predicted_sideband_yield(&train, 2000) < 1e-4);
    }

    #[test]
    fn gaussian_closed_form_examples() {
        assert!((gaussian_sideband_yield(0, 0.01, 1.0).unwrap() - 1.0).abs() < 1e-15);
        let y = gaussian_sideband_yield(100, 0.01, 1.0).unwrap();
        let expect = (PI / 2.0 * (-1.0f64).exp()).sin().powi(2);
        assert!((y - expect).abs() < 1e-12);
        assert!((y - 0.2983).abs() < 1e-4);
        let y10 = gaussian_sideband_yield(10, 0.01, 1.0).unwrap();
        assert!((y10 - 0.9998).abs() < 1e-4);
        assert!(gaussian_sideband_yield(1, 0.01, 0.0).is_err());
    }

    #[test]
    fn prefactor_examples() {
        let train = uniform_train(EnvelopeShape::Blackman);
        let f = superposition_prefactor(&train, 0, 0);
        assert!((f - std::f64::consts::SQRT_2).abs() < 1e-12);
        // A far tooth contributes nothing: the prefactor collapses to the
        // surviving ratio.
        let f = superposition_prefactor(&train, 10, 2000);
        assert!((f - sideband_ratio(&train, 10)).abs() < 1e-6);
        let f = superposition_prefactor(&train, 0, 10);
        let expect = (1.0f64 + sideband_ratio(&train, 10).powi(2)).sqrt();
        assert!((f - expect).abs() < 1e-12);
    }

    #[test]
    fn blackman_ratio_monotone_up_to_tooth_count() {
        let train = uniform_train(EnvelopeShape::Blackman);
        let mut prev = sideband_ratio(&train, 0);
        for n in 1..=100 {
            let r = sideband_ratio(&train, n);
            assert!(
                r <= prev + 1e-12,
                "ratio increased at n = {n}: {prev} -> {r}"
            );
            prev = r;
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]

        #[test]
        fn symmetric_in_tooth_sign(n in 0i32..300) {
            let train = uniform_train(EnvelopeShape::Blackman);
            let plus = sideband_amplitude(&train, n);
            let minus = sideband_amplitude(&train, -n);
            prop_assert!((plus - minus).abs() <= 1e-12 * plus.max(1e-300));
        }

        #[test]
        fn gaussian_ratio_monotone(n in 1i32..200) {
            let train = uniform_train(EnvelopeShape::Gaussian);
            prop_assert!(
                sideband_ratio(&train, n) <= sideband_ratio(&train, n - 1) + 1e-12
            );
        }

        #[test]
        fn prefactor_bound(n in 0i32..300, m in 0i32..300) {
            let train = uniform_train(EnvelopeShape::Blackman);
            let f0 = sideband_amplitude(&train, 0);
            let fn_ = sideband_amplitude(&train, n);
            let fm = sideband_amplitude(&train, m);
            let f = superposition_prefactor(&train, n, m);
            let normalized = f * f0 / fn_.max(fm);
            prop_assert!((1.0 - 1e-12..=std::f64::consts::SQRT_2 + 1e-12).contains(&normalized));
        }
    }
}
