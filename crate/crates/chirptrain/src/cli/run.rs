//! Experiment dispatch: builds the physics objects described by a validated
//! configuration, runs the requested experiment, and writes result tables
//! plus a run manifest.
//!
//! Determinism contract: identical configurations produce byte-identical
//! tables. Sweep points may be computed in parallel but rows are emitted in
//! parameter order; only the manifest carries timing.

use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;

use crate::cli::config::{ExperimentConfig, ExperimentKind, PulseConfig, SweepCase, TrainConfig};
use crate::digitizer::{digitize_matched, digitize_scaled, PulseTrain};
use crate::dynamics::{
    propagate_continuous_with, propagate_train_with, LevelSystem, QuantumState, Trajectory,
};
use crate::error::{Error, Result};
use crate::metrics::{self, TimeMapping};
use crate::pulses::ContinuousPulse;
use crate::spectrum;
use crate::table::{fmt_float, write_csv, write_train_csv, write_trajectory_csv};

/// Command-line overrides applied on top of the configuration.
#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    /// Output directory override.
    pub out_dir: Option<PathBuf>,
    /// Worker threads for sweep parallelism; default lets the pool decide.
    pub threads: Option<usize>,
}

/// What a run produced.
#[derive(Debug, Clone)]
pub struct RunSummary {
    pub out_dir: PathBuf,
    pub tables: Vec<PathBuf>,
    pub manifest: PathBuf,
    pub wall_seconds: f64,
}

pub fn build_pulse(cfg: &PulseConfig) -> Result<ContinuousPulse> {
    ContinuousPulse::from_peak_rabi(
        cfg.peak_rabi,
        cfg.duration,
        cfg.chirp / (cfg.duration * cfg.duration),
        cfg.envelope.clone(),
        cfg.carrier_offset,
    )
}

pub fn build_train(pulse: &ContinuousPulse, cfg: &TrainConfig) -> Result<PulseTrain> {
    match cfg.r2 {
        Some(r2) => digitize_scaled(pulse, cfg.count, cfg.r1, r2),
        None => digitize_matched(pulse, cfg.count, cfg.r1),
    }
}

fn build_system(config: &ExperimentConfig, train: Option<&PulseTrain>) -> Result<LevelSystem> {
    let detunings = if let Some(d) = &config.system.detunings {
        d.clone()
    } else if let Some(orders) = &config.system.sideband_orders {
        let train = train.ok_or_else(|| {
            Error::invalid("sideband orders need a train to resolve against")
        })?;
        orders.iter().map(|&n| train.tooth_frequency(n)).collect()
    } else {
        vec![0.0]
    };
    LevelSystem::new(detunings, config.system.weights.clone())
}

/// Run one experiment end to end. The configuration must already be
/// validated; this only performs computation and output.
pub fn run_experiment(config: &ExperimentConfig, opts: &RunOptions) -> Result<RunSummary> {
    let started = Instant::now();
    let out_dir = opts
        .out_dir
        .clone()
        .unwrap_or_else(|| PathBuf::from(&config.output.dir));

    let tables = match opts.threads {
        Some(k) => rayon::ThreadPoolBuilder::new()
            .num_threads(k)
            .build()
            .map_err(|e| Error::invalid(format!("cannot build thread pool: {e}")))?
            .install(|| dispatch(config, &out_dir)),
        None => dispatch(config, &out_dir),
    }?;

    let wall_seconds = started.elapsed().as_secs_f64();
    let manifest = write_manifest(config, &out_dir, wall_seconds)?;
    Ok(RunSummary {
        out_dir,
        tables,
        manifest,
        wall_seconds,
    })
}

fn dispatch(config: &ExperimentConfig, out_dir: &Path) -> Result<Vec<PathBuf>> {
    match config.experiment {
        ExperimentKind::Continuous => run_continuous(config, out_dir),
        ExperimentKind::Digitize => run_digitize(config, out_dir),
        ExperimentKind::Compare => run_compare(config, out_dir),
        ExperimentKind::ErrorSweep => run_error_sweep(config, out_dir),
        ExperimentKind::SidebandScan => run_sideband_scan(config, out_dir),
        ExperimentKind::DetuningProfile => run_detuning_profile(config, out_dir),
        ExperimentKind::Superposition => run_superposition(config, out_dir),
    }
}

fn ensure_dir(dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    Ok(())
}

fn run_continuous(config: &ExperimentConfig, out_dir: &Path) -> Result<Vec<PathBuf>> {
    let pulse = build_pulse(&config.pulse)?;
    let system = build_system(config, None)?;
    let traj = propagate_continuous_with(
        &pulse,
        &system,
        config.integrator.sample_count,
        config.integrator.steps_per_sample,
        &QuantumState::ground(system.num_excited()),
    )?;
    ensure_dir(out_dir)?;
    let path = out_dir.join("trajectory.csv");
    write_trajectory_csv(&path, &traj)?;
    Ok(vec![path])
}

fn run_digitize(config: &ExperimentConfig, out_dir: &Path) -> Result<Vec<PathBuf>> {
    let pulse = build_pulse(&config.pulse)?;
    let train = build_train(&pulse, &config.train)?;
    ensure_dir(out_dir)?;
    let path = out_dir.join("train.csv");
    write_train_csv(&path, &train)?;
    Ok(vec![path])
}

fn train_mapping(config: &ExperimentConfig, train: &PulseTrain, pulse: &ContinuousPulse) -> TimeMapping {
    if config.train.r2.is_some() {
        TimeMapping::stretch(train, pulse)
    } else {
        TimeMapping::Identity
    }
}

fn run_compare(config: &ExperimentConfig, out_dir: &Path) -> Result<Vec<PathBuf>> {
    let pulse = build_pulse(&config.pulse)?;
    let train = build_train(&pulse, &config.train)?;
    let system = build_system(config, Some(&train))?;
    let levels = system.num_excited() + 1;
    let ground = QuantumState::ground(system.num_excited());

    let cont = propagate_continuous_with(
        &pulse,
        &system,
        config.integrator.sample_count,
        config.integrator.steps_per_sample,
        &ground,
    )?;
    let traj = propagate_train_with(
        &train,
        &system,
        config.integrator.samples_per_subpulse,
        config.integrator.steps_per_subpulse,
        &ground,
    )?;
    let mapping = train_mapping(config, &train, &pulse);
    let sigma = metrics::integrated_population_error(&cont, &traj, mapping)?;

    // Populations of both runs on the union of the two grids.
    let mapped: Vec<f64> = traj.times().iter().map(|&t| match mapping {
        TimeMapping::Identity => t,
        TimeMapping::LinearStretch { t0, factor } => (t - t0) * factor,
    }).collect();
    let (lo, hi) = (cont.times()[0], *cont.times().last().unwrap());
    let mut grid: Vec<f64> = cont
        .times()
        .iter()
        .cloned()
        .chain(mapped.iter().cloned().filter(|&t| t > lo && t < hi))
        .collect();
    grid.sort_by(|a, b| a.partial_cmp(b).unwrap());
    grid.dedup();

    let mut header: Vec<String> = vec!["time".to_string()];
    for j in 0..levels {
        header.push(format!("p{j}_continuous"));
    }
    for j in 0..levels {
        header.push(format!("p{j}_train"));
    }
    let header_refs: Vec<&str> = header.iter().map(String::as_str).collect();
    let cont_pops: Vec<Vec<f64>> = (0..levels).map(|j| cont.population(j)).collect();
    let train_pops: Vec<Vec<f64>> = (0..levels).map(|j| traj.population(j)).collect();
    let rows: Vec<Vec<String>> = grid
        .iter()
        .map(|&t| {
            let mut row = vec![fmt_float(t)];
            for pops in &cont_pops {
                row.push(fmt_float(metrics::interp_grid(cont.times(), pops, t)));
            }
            for pops in &train_pops {
                row.push(fmt_float(metrics::interp_grid(&mapped, pops, t)));
            }
            row
        })
        .collect();

    ensure_dir(out_dir)?;
    let populations = out_dir.join("compare.csv");
    write_csv(&populations, &header_refs, &rows)?;

    let mut sum_header = vec!["sigma_p".to_string()];
    let mut sum_row = vec![fmt_float(sigma)];
    for j in 0..levels {
        sum_header.push(format!("final_p{j}_continuous"));
        sum_row.push(fmt_float(cont.final_population(j)));
    }
    for j in 0..levels {
        sum_header.push(format!("final_p{j}_train"));
        sum_row.push(fmt_float(traj.final_population(j)));
    }
    let sum_refs: Vec<&str> = sum_header.iter().map(String::as_str).collect();
    let summary = out_dir.join("summary.csv");
    write_csv(&summary, &sum_refs, &[sum_row])?;
    Ok(vec![populations, summary])
}

fn run_error_sweep(config: &ExperimentConfig, out_dir: &Path) -> Result<Vec<PathBuf>> {
    let sweep = config.sweep.as_ref().expect("validated");
    let system = build_system(config, None)?;
    let ground = QuantumState::ground(system.num_excited());

    // One continuous reference per (area, chirp) case.
    let references: Vec<(SweepCase, ContinuousPulse, Trajectory)> = sweep
        .cases
        .par_iter()
        .map(|case| {
            let pulse = ContinuousPulse::from_area(
                case.area,
                config.pulse.duration,
                case.chirp / (config.pulse.duration * config.pulse.duration),
                config.pulse.envelope.clone(),
                config.pulse.carrier_offset,
            )?;
            let traj = propagate_continuous_with(
                &pulse,
                &system,
                config.integrator.sample_count,
                config.integrator.steps_per_sample,
                &ground,
            )?;
            Ok((case.clone(), pulse, traj))
        })
        .collect::<Result<_>>()?;

    let points: Vec<(usize, usize)> = (0..references.len())
        .flat_map(|c| (0..sweep.counts.len()).map(move |n| (c, n)))
        .collect();
    let rows: Vec<Vec<String>> = points
        .par_iter()
        .map(|&(ci, ni)| {
            let (case, pulse, cont) = &references[ci];
            let count = sweep.counts[ni];
            let train_cfg = TrainConfig {
                count,
                r1: config.train.r1,
                r2: config.train.r2,
            };
            let train = build_train(pulse, &train_cfg)?;
            let traj = propagate_train_with(
                &train,
                &system,
                config.integrator.samples_per_subpulse,
                config.integrator.steps_per_subpulse,
                &ground,
            )?;
            let mapping = train_mapping(config, &train, pulse);
            let sigma = metrics::integrated_population_error(cont, &traj, mapping)?;
            Ok(vec![
                fmt_float(case.area),
                fmt_float(case.chirp),
                count.to_string(),
                fmt_float(config.train.r1),
                fmt_float(sigma),
            ])
        })
        .collect::<Result<_>>()?;

    ensure_dir(out_dir)?;
    let path = out_dir.join("error_sweep.csv");
    write_csv(&path, &["area", "chirp", "count", "r1", "sigma_p"], &rows)?;
    Ok(vec![path])
}

fn run_sideband_scan(config: &ExperimentConfig, out_dir: &Path) -> Result<Vec<PathBuf>> {
    let scan = config.scan.as_ref().expect("validated");
    let pulse = build_pulse(&config.pulse)?;
    let train = build_train(&pulse, &config.train)?;
    let weights = config.system.weights.clone();
    let rows: Vec<Vec<String>> = (0..=scan.max_order)
        .collect::<Vec<_>>()
        .par_iter()
        .map(|&n| {
            let ratio = spectrum::sideband_ratio(&train, n);
            let predicted = spectrum::predicted_sideband_yield(&train, n);
            let system = LevelSystem::new(vec![train.tooth_frequency(n)], weights.clone())?;
            let traj = propagate_train_with(
                &train,
                &system,
                config.integrator.samples_per_subpulse,
                config.integrator.steps_per_subpulse,
                &QuantumState::ground(1),
            )?;
            Ok(vec![
                n.to_string(),
                fmt_float(ratio),
                fmt_float(predicted),
                fmt_float(traj.final_population(1)),
            ])
        })
        .collect::<Result<_>>()?;

    ensure_dir(out_dir)?;
    let path = out_dir.join("sideband_scan.csv");
    write_csv(
        &path,
        &["order", "amplitude_ratio", "predicted_yield", "simulated_yield"],
        &rows,
    )?;
    Ok(vec![path])
}

fn run_detuning_profile(config: &ExperimentConfig, out_dir: &Path) -> Result<Vec<PathBuf>> {
    let profile = config.profile.as_ref().expect("validated");
    let pulse = build_pulse(&config.pulse)?;
    let train = build_train(&pulse, &config.train)?;
    let spacing = train.spacing();
    let count = profile.offset_count;
    let offsets: Vec<f64> = (0..count)
        .map(|j| {
            let frac = -profile.offset_fraction
                + 2.0 * profile.offset_fraction * j as f64 / (count - 1) as f64;
            frac * 2.0 * std::f64::consts::PI / spacing
        })
        .collect();
    let profiles: Vec<(i32, Vec<f64>)> = profile
        .orders
        .par_iter()
        .map(|&n| {
            let yields = metrics::detuning_profile(
                &train,
                n,
                &offsets,
                config.integrator.steps_per_subpulse,
            )?;
            Ok((n, yields))
        })
        .collect::<Result<_>>()?;

    let mut rows = Vec::with_capacity(profile.orders.len() * count);
    for (n, yields) in &profiles {
        for (off, y) in offsets.iter().zip(yields) {
            rows.push(vec![n.to_string(), fmt_float(*off), fmt_float(*y)]);
        }
    }
    ensure_dir(out_dir)?;
    let path = out_dir.join("detuning_profile.csv");
    write_csv(&path, &["order", "offset", "final_p1"], &rows)?;
    Ok(vec![path])
}

fn run_superposition(config: &ExperimentConfig, out_dir: &Path) -> Result<Vec<PathBuf>> {
    let sup = config.superposition.as_ref().expect("validated");
    let pulse = build_pulse(&config.pulse)?;
    let train = build_train(&pulse, &config.train)?;
    let weights = config.system.weights.clone();
    let rows: Vec<Vec<String>> = sup
        .orders
        .par_iter()
        .map(|&n| {
            let f0 = spectrum::sideband_amplitude(&train, 0);
            let f_n = spectrum::sideband_amplitude(&train, n);
            let predicted = f0 * f0 / (f0 * f0 + f_n * f_n);
            let driven = if sup.apply_prefactor {
                train.scale_amplitudes(1.0 / spectrum::superposition_prefactor(&train, 0, n))?
            } else {
                train.clone()
            };
            let system = LevelSystem::new(
                vec![0.0, train.tooth_frequency(n)],
                weights.clone(),
            )?;
            let traj = propagate_train_with(
                &driven,
                &system,
                config.integrator.samples_per_subpulse,
                config.integrator.steps_per_subpulse,
                &QuantumState::ground(2),
            )?;
            let simulated = metrics::superposition_ratio(&traj)?;
            Ok(vec![
                n.to_string(),
                fmt_float(f0),
                fmt_float(f_n),
                fmt_float(predicted),
                fmt_float(simulated),
            ])
        })
        .collect::<Result<_>>()?;

    ensure_dir(out_dir)?;
    let path = out_dir.join("superposition.csv");
    write_csv(
        &path,
        &["order", "f0", "fn", "predicted_ratio", "simulated_ratio"],
        &rows,
    )?;
    Ok(vec![path])
}

#[derive(Serialize)]
struct Provenance<'a> {
    tool: &'static str,
    version: &'static str,
    experiment: &'a str,
    wall_seconds: f64,
}

#[derive(Serialize)]
struct Manifest<'a> {
    provenance: Provenance<'a>,
    config: &'a ExperimentConfig,
}

fn write_manifest(config: &ExperimentConfig, out_dir: &Path, wall_seconds: f64) -> Result<PathBuf> {
    let manifest = Manifest {
        provenance: Provenance {
            tool: "chirptrain",
            version: env!("CARGO_PKG_VERSION"),
            experiment: config.experiment.name(),
            wall_seconds,
        },
        config,
    };
    let text = toml::to_string(&manifest)
        .map_err(|e| Error::invalid(format!("manifest serialization failed: {e}")))?;
    let path = out_dir.join("manifest.toml");
    std::fs::write(&path, text)?;
    Ok(path)
}
