//! Agreement metrics between continuous and digitized dynamics, and the
//! derived yields used by the sweep experiments.

use crate::digitizer::PulseTrain;
use crate::dynamics::{self, LevelSystem, Trajectory};
use crate::error::{Error, Result};
use crate::pulses::ContinuousPulse;
use crate::spectrum;

/// Maps train time onto the continuous-pulse time axis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TimeMapping {
    /// Duration-matched trains live on the source time axis already.
    Identity,
    /// Linear stretch `t -> (t - t0) * factor` taking the train support onto
    /// the source support.
    LinearStretch { t0: f64, factor: f64 },
}

impl TimeMapping {
    /// Stretch the full train support onto the full pulse support.
    pub fn stretch(train: &PulseTrain, pulse: &ContinuousPulse) -> Self {
        let span = train.end() - train.start();
        TimeMapping::LinearStretch {
            t0: train.start(),
            factor: pulse.duration() / span,
        }
    }

    fn apply(&self, t: f64) -> f64 {
        match *self {
            TimeMapping::Identity => t,
            TimeMapping::LinearStretch { t0, factor } => (t - t0) * factor,
        }
    }
}

pub(crate) fn interp_grid(times: &[f64], values: &[f64], t: f64) -> f64 {
    // Clamped linear interpolation on a sorted grid.
    if t <= times[0] {
        return values[0];
    }
    if t >= times[times.len() - 1] {
        return values[values.len() - 1];
    }
    let i = times.partition_point(|&x| x < t);
    let (t0, t1) = (times[i - 1], times[i]);
    if t1 == t0 {
        return values[i];
    }
    let w = (t - t0) / (t1 - t0);
    values[i - 1] * (1.0 - w) + values[i] * w
}

/// RMS population difference between two trajectories,
/// `sqrt( (1/D) * int (P_a(t) - P_b(t))^2 dt )`, integrated over the
/// continuous trajectory's span `D` on the union of both time grids with
/// linear interpolation.
///
/// Dimensionless and symmetric in its arguments. The train populations are
/// constant across free-evolution gaps and both gap edges are recorded, so
/// the interpolation is exact there.
pub fn integrated_population_error(
    continuous: &Trajectory,
    train: &Trajectory,
    mapping: TimeMapping,
) -> Result<f64> {
    integrated_population_error_on_level(continuous, train, mapping, 0)
}

/// Same metric evaluated on the population of an arbitrary level.
pub fn integrated_population_error_on_level(
    continuous: &Trajectory,
    train: &Trajectory,
    mapping: TimeMapping,
    level: usize,
) -> Result<f64> {
    let ct = continuous.times();
    let (lo, hi) = (ct[0], ct[ct.len() - 1]);
    let mapped: Vec<f64> = train.times().iter().map(|&t| mapping.apply(t)).collect();
    let (m_lo, m_hi) = (mapped[0], mapped[mapped.len() - 1]);
    if m_hi <= lo || m_lo >= hi {
        return Err(Error::invalid(format!(
            "trajectory supports do not overlap after mapping: [{m_lo}, {m_hi}] vs [{lo}, {hi}]"
        )));
    }
    let p_cont = continuous.population(level);
    let p_train = train.population(level);

    let mut grid: Vec<f64> = ct
        .iter()
        .cloned()
        .chain(mapped.iter().cloned().filter(|&t| t > lo && t < hi))
        .collect();
    grid.sort_by(|a, b| a.partial_cmp(b).unwrap());
    grid.dedup();

    let mut integral = 0.0;
    let mut prev_t = grid[0];
    let mut prev_d = interp_grid(ct, &p_cont, prev_t) - interp_grid(&mapped, &p_train, prev_t);
    for &t in &grid[1..] {
        let d = interp_grid(ct, &p_cont, t) - interp_grid(&mapped, &p_train, t);
        integral += (t - prev_t) * (prev_d * prev_d + d * d) / 2.0;
        prev_t = t;
        prev_d = d;
    }
    Ok((integral / (hi - lo)).sqrt())
}

/// Final-time population of one level.
pub fn final_yield(traj: &Trajectory, level: usize) -> Result<f64> {
    if level >= traj.num_levels() {
        return Err(Error::invalid(format!(
            "level {level} out of range for a {}-level trajectory",
            traj.num_levels()
        )));
    }
    Ok(traj.final_population(level))
}

/// Final-time `P_1 / (P_1 + P_2)` of a two-excited-level trajectory.
pub fn superposition_ratio(traj: &Trajectory) -> Result<f64> {
    if traj.num_levels() != 3 {
        return Err(Error::invalid(format!(
            "superposition ratio needs exactly 2 excited levels, trajectory has {}",
            traj.num_levels() - 1
        )));
    }
    let p1 = traj.final_population(1);
    let p2 = traj.final_population(2);
    if p1 + p2 < 1e-12 {
        return Err(Error::UndefinedRatio(format!(
            "excited-state population {} is below 1e-12",
            p1 + p2
        )));
    }
    Ok(p1 / (p1 + p2))
}

/// Final yields across carrier offsets around comb tooth `n`.
///
/// The train amplitudes are rescaled by `F(0) / F(n)` so the local area at
/// the tooth is back to the carrier value, then the transition is placed at
/// `2 pi n / spacing + offset` for each offset.
pub fn detuning_profile(
    train: &PulseTrain,
    n: i32,
    offsets: &[f64],
    steps_per_subpulse: usize,
) -> Result<Vec<f64>> {
    let rescale = 1.0 / spectrum::sideband_ratio(train, n);
    let rescaled = train.scale_amplitudes(rescale)?;
    let tooth = train.tooth_frequency(n);
    offsets
        .iter()
        .map(|&off| {
            let system = LevelSystem::two_level(tooth + off);
            let traj = dynamics::propagate_train_with(
                &rescaled,
                &system,
                2,
                steps_per_subpulse,
                &dynamics::QuantumState::ground(1),
            )?;
            final_yield(&traj, 1)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::digitizer::{digitize_matched, digitize_scaled};
    use crate::dynamics::{propagate_continuous_with, propagate_train_with, QuantumState};
    use crate::pulses::{ContinuousPulse, EnvelopeShape};
    use std::f64::consts::PI;

    fn strong_chirp() -> ContinuousPulse {
        ContinuousPulse::from_area(5.0 * PI, 1.0, 291.6, EnvelopeShape::Blackman, 0.0).unwrap()
    }

    fn pi_train() -> PulseTrain {
        let src = ContinuousPulse::from_area(PI, 1.0, 0.0, EnvelopeShape::Blackman, 0.0).unwrap();
        digitize_scaled(&src, 40, 20.0, 1.0).unwrap()
    }

    // Default-scale train for tooth-sensitive checks: second-order light
    // shifts scale with the subpulse areas and are small only here.
    fn pi_train_default() -> PulseTrain {
        let src = ContinuousPulse::from_area(PI, 1.0, 0.0, EnvelopeShape::Blackman, 0.0).unwrap();
        digitize_scaled(&src, 100, 100.0, 1.0).unwrap()
    }

    #[test]
    fn identical_trajectories_have_zero_error() {
        let sys = LevelSystem::two_level(0.0);
        let traj =
            propagate_continuous_with(&strong_chirp(), &sys, 101, 200, &QuantumState::ground(1)).unwrap();
        let sigma = integrated_population_error(&traj, &traj, TimeMapping::Identity).unwrap();
        assert_eq!(sigma, 0.0);
    }

    #[test]
    fn error_is_symmetric_and_level_independent() {
        let sys = LevelSystem::two_level(0.0);
        let cont =
            propagate_continuous_with(&strong_chirp(), &sys, 201, 200, &QuantumState::ground(1)).unwrap();
        let train = digitize_matched(&strong_chirp(), 50, 100.0).unwrap();
        let traj = propagate_train_with(&train, &sys, 4, 400, &QuantumState::ground(1)).unwrap();

        let ab = integrated_population_error(&cont, &traj, TimeMapping::Identity).unwrap();
        let ba = integrated_population_error(&traj, &cont, TimeMapping::Identity).unwrap();
        // Swapping the roles changes the integration span from the continuous
        // support to the train support; over the common span the integrand is
        // symmetric. Normalize the spans for the comparison.
        let cont_span = cont.times()[cont.len() - 1] - cont.times()[0];
        let train_span = traj.times()[traj.len() - 1] - traj.times()[0];
        assert!(
            (ab * cont_span.sqrt() - ba * train_span.sqrt()).abs() < 2e-3 * ab,
            "asymmetry beyond interpolation noise: {ab} vs {ba}"
        );

        let on_p1 =
            integrated_population_error_on_level(&cont, &traj, TimeMapping::Identity, 1).unwrap();
        assert!(
            (ab - on_p1).abs() < 1e-10,
            "P0-based {ab} vs P1-based {on_p1}"
        );
    }

    #[test]
    fn matched_train_small_error() {
        let sys = LevelSystem::two_level(0.0);
        let cont =
            propagate_continuous_with(&strong_chirp(), &sys, 401, 100, &QuantumState::ground(1)).unwrap();
        let train = digitize_matched(&strong_chirp(), 100, 100.0).unwrap();
        let traj = propagate_train_with(&train, &sys, 10, 200, &QuantumState::ground(1)).unwrap();
        let sigma = integrated_population_error(&cont, &traj, TimeMapping::Identity).unwrap();
        assert!(sigma < 0.02, "sigma_P = {sigma}");
    }

    #[test]
    fn scaled_train_matches_after_stretch() {
        let sys = LevelSystem::two_level(0.0);
        let cont =
            propagate_continuous_with(&strong_chirp(), &sys, 401, 100, &QuantumState::ground(1)).unwrap();
        let train = digitize_scaled(&strong_chirp(), 100, 100.0, 1.0).unwrap();
        let traj = propagate_train_with(&train, &sys, 10, 200, &QuantumState::ground(1)).unwrap();
        let mapping = TimeMapping::stretch(&train, &strong_chirp());
        let sigma = integrated_population_error(&cont, &traj, mapping).unwrap();
        assert!(sigma < 0.02, "stretched sigma_P = {sigma}");
    }

    #[test]
    fn non_overlapping_supports_error() {
        let sys = LevelSystem::two_level(0.0);
        let cont =
            propagate_continuous_with(&strong_chirp(), &sys, 51, 400, &QuantumState::ground(1)).unwrap();
        let train = digitize_scaled(&strong_chirp(), 10, 10.0, 1.0).unwrap();
        let traj = propagate_train_with(&train, &sys, 2, 400, &QuantumState::ground(1)).unwrap();
        // An absurd mapping that pushes the train far outside the pulse.
        let mapping = TimeMapping::LinearStretch {
            t0: -100.0,
            factor: -1.0,
        };
        assert!(integrated_population_error(&cont, &traj, mapping).is_err());
    }

    #[test]
    fn final_yield_examples() {
        let sys = LevelSystem::two_level(0.0);
        let pi_pulse =
            ContinuousPulse::from_area(PI, 1.0, 0.0, EnvelopeShape::Blackman, 0.0).unwrap();
        let traj =
            propagate_continuous_with(&pi_pulse, &sys, 201, 200, &QuantumState::ground(1))
                .unwrap();
        assert!((final_yield(&traj, 1).unwrap() - 1.0).abs() < 1e-6);

        let dark =
            ContinuousPulse::from_peak_rabi(0.0, 1.0, 0.0, EnvelopeShape::Blackman, 0.0).unwrap();
        let traj =
            propagate_continuous_with(&dark, &sys, 11, 10, &QuantumState::ground(1)).unwrap();
        assert_eq!(final_yield(&traj, 1).unwrap(), 0.0);
        assert!(final_yield(&traj, 5).is_err());
    }

    #[test]
    fn superposition_ratio_symmetric_half() {
        // Both excited levels resonant with the carrier and equally coupled:
        // the populations split evenly.
        let sys = LevelSystem::new(vec![0.0, 0.0], vec![1.0, 1.0]).unwrap();
        let train = pi_train();
        let traj = propagate_train_with(&train, &sys, 2, 100, &QuantumState::ground(2)).unwrap();
        let ratio = superposition_ratio(&traj).unwrap();
        assert!((ratio - 0.5).abs() < 1e-10, "ratio {ratio}");
    }

    #[test]
    fn superposition_ratio_needs_excited_population() {
        let sys = LevelSystem::new(vec![0.0, 0.0], vec![1.0, 1.0]).unwrap();
        let src =
            ContinuousPulse::from_peak_rabi(0.0, 1.0, 0.0, EnvelopeShape::Blackman, 0.0).unwrap();
        let train = digitize_scaled(&src, 10, 10.0, 1.0).unwrap();
        let traj = propagate_train_with(&train, &sys, 2, 50, &QuantumState::ground(2)).unwrap();
        assert!(matches!(
            superposition_ratio(&traj),
            Err(Error::UndefinedRatio(_))
        ));
        let two_level = propagate_train_with(
            &pi_train(),
            &LevelSystem::two_level(0.0),
            2,
            200,
            &QuantumState::ground(1),
        )
        .unwrap();
        assert!(superposition_ratio(&two_level).is_err());
    }

    #[test]
    fn kappa_scaling_leaves_ratio_unchanged_at_low_teeth() {
        let train = pi_train_default();
        let n = 2;
        let tooth = train.tooth_frequency(n);
        let sys = LevelSystem::new(vec![0.0, tooth], vec![1.0, 1.0]).unwrap();
        let prefactor = spectrum::superposition_prefactor(&train, 0, n);
        let base_train = train.scale_amplitudes(1.0 / prefactor).unwrap();
        let ratio = |kappa: f64| {
            let t = base_train.scale_amplitudes(kappa).unwrap();
            let traj = propagate_train_with(&t, &sys, 2, 200, &QuantumState::ground(2)).unwrap();
            superposition_ratio(&traj).unwrap()
        };
        let base = ratio(1.0);
        for kappa in [0.5, 1.5] {
            assert!(
                (ratio(kappa) - base).abs() < 1e-6,
                "kappa {kappa}: {} vs {base}",
                ratio(kappa)
            );
        }
    }

    #[test]
    fn detuning_profile_peaks_on_tooth() {
        let train = pi_train();
        for n in [0, 3] {
            let yields = detuning_profile(&train, n, &[0.0], 200).unwrap();
            assert!(yields[0] > 0.99, "tooth {n} peak {}", yields[0]);
        }
        // Midway between teeth the kicks alternate sign and cancel.
        let half = PI / train.spacing();
        let yields = detuning_profile(&train, 0, &[half], 200).unwrap();
        assert!(yields[0] < 0.1, "midway yield {}", yields[0]);
    }

    #[test]
    fn adjacent_tooth_profiles_agree() {
        // Shifting the carrier by one tooth spacing and retargeting the next
        // sideband reproduces the same yield.
        let train = pi_train_default();
        let offsets = [-0.02 * 2.0 * PI / train.spacing(), 0.0, 0.002 * 2.0 * PI / train.spacing()];
        let a = detuning_profile(&train, 1, &offsets, 200).unwrap();
        let b = detuning_profile(&train, 2, &offsets, 200).unwrap();
        for (x, y) in a.iter().zip(&b) {
            assert!((x - y).abs() < 1e-3, "profiles differ: {x} vs {y}");
        }
    }
}
