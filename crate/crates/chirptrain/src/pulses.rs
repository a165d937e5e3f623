//! Pulse envelopes and the long chirped reference pulse.
//!
//! Everything is kept in dimensionless units: the reference pulse duration
//! sets the time unit and all angular frequencies are multiples of its
//! inverse. A linear chirp is parametrized by its rate `alpha`, so the
//! dimensionless chirp of a pulse of duration `d` is `alpha * d^2`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quad;

/// Shape factor of the Blackman window: the time average of
/// `0.42 - 0.5 cos(2 pi x) + 0.08 cos(4 pi x)` over one period.
pub const BLACKMAN_SHAPE_FACTOR: f64 = 0.42;

/// Normalized pulse envelope on the support `[0, duration]`.
///
/// The peak of every shape is 1 and the value is exactly 0 outside the
/// support. The Gaussian variant is truncated at +-3 standard deviations
/// with `sigma = duration / 6`, leaving a step of ~0.011 of the peak at the
/// edges; it is not renormalized.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EnvelopeShape {
    Blackman,
    Gaussian,
    /// Piecewise-linear table of `(fraction of duration, amplitude)` samples.
    #[serde(skip)]
    SampledTable(Vec<(f64, f64)>),
}

impl EnvelopeShape {
    /// Build a table envelope from `(fraction, amplitude)` samples.
    ///
    /// Fractions must start at 0, end at 1 and increase strictly; amplitudes
    /// must be non-negative with a positive maximum. The amplitudes are
    /// rescaled so the peak is 1.
    pub fn sampled(samples: &[(f64, f64)]) -> Result<Self> {
        if samples.len() < 2 {
            return Err(Error::invalid("sampled envelope needs at least 2 points"));
        }
        if samples[0].0 != 0.0 || samples[samples.len() - 1].0 != 1.0 {
            return Err(Error::invalid(
                "sampled envelope fractions must span [0, 1]",
            ));
        }
        let mut peak = 0.0f64;
        for (i, &(x, y)) in samples.iter().enumerate() {
            if !(0.0..=1.0).contains(&x) || !x.is_finite() || !y.is_finite() || y < 0.0 {
                return Err(Error::invalid("sampled envelope has an invalid point"));
            }
            if i > 0 && x <= samples[i - 1].0 {
                return Err(Error::invalid(
                    "sampled envelope fractions must increase strictly",
                ));
            }
            peak = peak.max(y);
        }
        if peak <= 0.0 {
            return Err(Error::invalid("sampled envelope is identically zero"));
        }
        Ok(EnvelopeShape::SampledTable(
            samples.iter().map(|&(x, y)| (x, y / peak)).collect(),
        ))
    }

    /// Envelope value at time `t` for a pulse of the given duration.
    ///
    /// Returns 0 outside `[0, duration]`; errors on a non-positive duration.
    pub fn value(&self, t: f64, duration: f64) -> Result<f64> {
        if duration <= 0.0 || duration.is_nan() {
            return Err(Error::invalid(format!(
                "envelope duration must be positive, got {duration}"
            )));
        }
        if t < 0.0 || t > duration {
            return Ok(0.0);
        }
        let x = t / duration;
        Ok(self.value_unit(x))
    }

    // Value as a function of the fraction x in [0, 1].
    fn value_unit(&self, x: f64) -> f64 {
        use std::f64::consts::PI;
        match self {
            EnvelopeShape::Blackman => {
                let v = 0.42 - 0.5 * (2.0 * PI * x).cos() + 0.08 * (4.0 * PI * x).cos();
                v.max(0.0)
            }
            EnvelopeShape::Gaussian => {
                let sigma = 1.0 / 6.0;
                (-((x - 0.5) * (x - 0.5)) / (2.0 * sigma * sigma)).exp()
            }
            EnvelopeShape::SampledTable(samples) => {
                let mut i = 0;
                while i + 2 < samples.len() && x > samples[i + 1].0 {
                    i += 1;
                }
                let (x0, y0) = samples[i];
                let (x1, y1) = samples[i + 1];
                y0 + (y1 - y0) * (x - x0) / (x1 - x0)
            }
        }
    }

    /// Shape factor `S0`: the time average of the envelope over its support.
    ///
    /// Analytic for the Blackman window (0.42) and for tables (trapezoid of
    /// the linear interpolant is exact); quadrature for the Gaussian.
    pub fn shape_factor(&self) -> f64 {
        match self {
            EnvelopeShape::Blackman => BLACKMAN_SHAPE_FACTOR,
            EnvelopeShape::Gaussian => quad::simpson(|x| self.value_unit(x), 0.0, 1.0),
            EnvelopeShape::SampledTable(samples) => samples
                .windows(2)
                .map(|w| (w[1].0 - w[0].0) * (w[0].1 + w[1].1) / 2.0)
                .sum(),
        }
    }

    /// Width parameter of the Gaussian envelope as it enters comb-tooth
    /// spectra of the form `exp(-width^2 n^2 / T^2)`.
    ///
    /// The untruncated transform of a Gaussian of standard deviation `sigma`
    /// gives tooth ratios `exp(-2 pi^2 sigma^2 n^2 / T^2)`, so the bare width
    /// in that convention is `pi sqrt(2) sigma`. With `sigma = duration / 6`
    /// this is roughly `0.74 * duration`.
    pub fn gaussian_spectral_width(duration: f64) -> f64 {
        std::f64::consts::PI * std::f64::consts::SQRT_2 * duration / 6.0
    }
}

/// The long chirped reference pulse.
///
/// Rabi frequency `peak_rabi * envelope(t)` on `[0, duration]` and
/// instantaneous detuning `carrier_offset + chirp_rate * (t - duration/2)`,
/// so the frequency ramp crosses the carrier at the pulse center.
#[derive(Debug, Clone, PartialEq)]
pub struct ContinuousPulse {
    peak_rabi: f64,
    duration: f64,
    chirp_rate: f64,
    envelope: EnvelopeShape,
    carrier_offset: f64,
}

impl ContinuousPulse {
    pub fn from_peak_rabi(
        peak_rabi: f64,
        duration: f64,
        chirp_rate: f64,
        envelope: EnvelopeShape,
        carrier_offset: f64,
    ) -> Result<Self> {
        if duration <= 0.0 || !duration.is_finite() {
            return Err(Error::invalid(format!(
                "pulse duration must be positive, got {duration}"
            )));
        }
        if peak_rabi < 0.0 || !peak_rabi.is_finite() {
            return Err(Error::invalid(format!(
                "peak Rabi frequency must be non-negative, got {peak_rabi}"
            )));
        }
        if !chirp_rate.is_finite() || !carrier_offset.is_finite() {
            return Err(Error::invalid("chirp rate and carrier offset must be finite"));
        }
        Ok(ContinuousPulse {
            peak_rabi,
            duration,
            chirp_rate,
            envelope,
            carrier_offset,
        })
    }

    /// Build from a total pulse area; the peak Rabi frequency is
    /// `area / (duration * S0)`.
    pub fn from_area(
        area: f64,
        duration: f64,
        chirp_rate: f64,
        envelope: EnvelopeShape,
        carrier_offset: f64,
    ) -> Result<Self> {
        if area < 0.0 || !area.is_finite() {
            return Err(Error::invalid(format!(
                "pulse area must be non-negative, got {area}"
            )));
        }
        if duration <= 0.0 || duration.is_nan() {
            return Err(Error::invalid(format!(
                "pulse duration must be positive, got {duration}"
            )));
        }
        let s0 = envelope.shape_factor();
        Self::from_peak_rabi(area / (duration * s0), duration, chirp_rate, envelope, carrier_offset)
    }

    pub fn peak_rabi(&self) -> f64 {
        self.peak_rabi
    }

    pub fn duration(&self) -> f64 {
        self.duration
    }

    pub fn chirp_rate(&self) -> f64 {
        self.chirp_rate
    }

    /// Dimensionless chirp `alpha * duration^2`.
    pub fn dimensionless_chirp(&self) -> f64 {
        self.chirp_rate * self.duration * self.duration
    }

    pub fn envelope(&self) -> &EnvelopeShape {
        &self.envelope
    }

    pub fn carrier_offset(&self) -> f64 {
        self.carrier_offset
    }

    /// Instantaneous Rabi frequency; 0 outside the support.
    pub fn rabi(&self, t: f64) -> f64 {
        self.peak_rabi
            * self
                .envelope
                .value(t, self.duration)
                .expect("duration validated at construction")
    }

    /// Instantaneous detuning of the frequency ramp.
    pub fn detuning(&self, t: f64) -> f64 {
        self.carrier_offset + self.chirp_rate * (t - self.duration / 2.0)
    }

    /// Accumulated detuning phase `int_0^t detuning(s) ds` (closed form).
    pub fn detuning_phase(&self, t: f64) -> f64 {
        self.carrier_offset * t + self.chirp_rate * t * (t - self.duration) / 2.0
    }

    /// Total pulse area `int rabi(t) dt` by quadrature over the support.
    pub fn area(&self) -> f64 {
        quad::simpson(|t| self.rabi(t), 0.0, self.duration)
    }
}
