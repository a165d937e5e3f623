use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use chirptrain::cli::{self, ExperimentKind, RunOptions};

/// Digitized adiabatic passage: compile chirped pulses into pulse trains and
/// simulate both.
#[derive(Parser)]
#[command(name = "chirptrain", version, about)]
struct Cli {
    #[command(subcommand)]
    experiment: Experiment,
}

#[derive(Args)]
struct Common {
    /// Experiment configuration file (TOML).
    #[arg(long)]
    config: PathBuf,
    /// Output directory; overrides `output.dir` from the configuration.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads for sweep parallelism.
    #[arg(long)]
    threads: Option<usize>,
}

#[derive(Subcommand)]
enum Experiment {
    /// Propagate the continuous chirped pulse and export the trajectory.
    Continuous(Common),
    /// Compile the pulse into a train and export the subpulse table.
    Digitize(Common),
    /// Run both propagations and export populations plus the error metric.
    Compare(Common),
    /// Sweep the train error metric over subpulse counts and pulse cases.
    ErrorSweep(Common),
    /// Scan transfer yield across comb teeth.
    SidebandScan(Common),
    /// Scan yield around selected comb teeth.
    DetuningProfile(Common),
    /// Drive two excited levels through different teeth and export ratios.
    Superposition(Common),
}

impl Experiment {
    fn kind(&self) -> ExperimentKind {
        match self {
            Experiment::Continuous(_) => ExperimentKind::Continuous,
            Experiment::Digitize(_) => ExperimentKind::Digitize,
            Experiment::Compare(_) => ExperimentKind::Compare,
            Experiment::ErrorSweep(_) => ExperimentKind::ErrorSweep,
            Experiment::SidebandScan(_) => ExperimentKind::SidebandScan,
            Experiment::DetuningProfile(_) => ExperimentKind::DetuningProfile,
            Experiment::Superposition(_) => ExperimentKind::Superposition,
        }
    }

    fn common(&self) -> &Common {
        match self {
            Experiment::Continuous(c)
            | Experiment::Digitize(c)
            | Experiment::Compare(c)
            | Experiment::ErrorSweep(c)
            | Experiment::SidebandScan(c)
            | Experiment::DetuningProfile(c)
            | Experiment::Superposition(c) => c,
        }
    }
}

fn main() -> ExitCode {
    let args = Cli::parse();
    let common = args.experiment.common();

    let text = match std::fs::read_to_string(&common.config) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("error: cannot read {}: {e}", common.config.display());
            return ExitCode::from(2);
        }
    };
    let config = match cli::validate_config(&text) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    if config.experiment != args.experiment.kind() {
        eprintln!(
            "error: configuration is for `{}` but the `{}` experiment was requested",
            config.experiment.name(),
            args.experiment.kind().name()
        );
        return ExitCode::from(2);
    }

    let opts = RunOptions {
        out_dir: common.out.clone(),
        threads: common.threads,
    };
    match cli::run_experiment(&config, &opts) {
        Ok(summary) => {
            for table in &summary.tables {
                println!("wrote {}", table.display());
            }
            println!("wrote {}", summary.manifest.display());
            println!(
                "{} finished in {:.3} s",
                config.experiment.name(),
                summary.wall_seconds
            );
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(3)
        }
    }
}
