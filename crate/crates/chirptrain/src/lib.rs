//! Digitized adiabatic passage with pulse trains.
//!
//! A long chirped pulse drives robust population transfer in a two-level
//! system. This crate compiles such a pulse into an equivalent train of weak
//! subpulses whose areas and detunings sample the continuous drive, simulates
//! both the continuous and the digitized dynamics (including the
//! frequency-comb sidebands a phase-coherent train carries), and quantifies
//! how faithfully the train reproduces the continuous populations.
//!
//! Units are dimensionless: `hbar = 1`, the reference pulse duration is the
//! time unit, and every angular frequency is a multiple of its inverse.
//!
//! Modules:
//! - [`pulses`] — envelopes and the chirped reference pulse
//! - [`digitizer`] — matching-condition compiler producing [`digitizer::PulseTrain`]
//! - [`dynamics`] — Schrödinger propagators and first-order step unitaries
//! - [`spectrum`] — comb-tooth amplitudes and predicted sideband yields
//! - [`metrics`] — continuous-vs-train error and experiment yields
//! - [`cli`] — configuration parsing and the experiment runner
//! - [`table`] — deterministic comma-separated output

pub mod cli;
pub mod digitizer;
pub mod dynamics;
pub mod error;
pub mod metrics;
pub mod pulses;
mod quad;
pub mod spectrum;
pub mod table;

pub use error::{Error, Result};
