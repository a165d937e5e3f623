//! Experiment configuration: TOML schema, defaults, and fail-fast
//! validation.
//!
//! `validate_config` either returns a fully resolved [`ExperimentConfig`]
//! (every default made explicit, ready to be echoed into a run manifest) or a
//! [`ConfigError`] carrying one diagnostic per problem. No computation starts
//! and no output is written while diagnostics exist.

use serde::{Deserialize, Serialize};

use crate::pulses::EnvelopeShape;

/// The experiments the runner knows how to dispatch.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentKind {
    Continuous,
    Digitize,
    Compare,
    ErrorSweep,
    SidebandScan,
    DetuningProfile,
    Superposition,
}

impl ExperimentKind {
    pub fn name(&self) -> &'static str {
        match self {
            ExperimentKind::Continuous => "continuous",
            ExperimentKind::Digitize => "digitize",
            ExperimentKind::Compare => "compare",
            ExperimentKind::ErrorSweep => "error-sweep",
            ExperimentKind::SidebandScan => "sideband-scan",
            ExperimentKind::DetuningProfile => "detuning-profile",
            ExperimentKind::Superposition => "superposition",
        }
    }
}

/// One problem found while validating a configuration.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Diagnostic {
    /// Dotted path of the offending field, or `(toml)` for parse errors.
    pub field: String,
    pub message: String,
}

impl std::fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}: {}", self.field, self.message)
    }
}

/// All diagnostics for one rejected configuration.
#[derive(Debug, Clone)]
pub struct ConfigError {
    pub diagnostics: Vec<Diagnostic>,
}

impl std::fmt::Display for ConfigError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "invalid configuration:")?;
        for d in &self.diagnostics {
            writeln!(f,"  {d}")?;
        }
        Ok(())
    }
}

impl std::error::Error for ConfigError {}

// ---------------------------------------------------------------------------
// Raw (as-parsed) schema
// ---------------------------------------------------------------------------

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    experiment: ExperimentKind,
    pulse: RawPulse,
    train: Option<RawTrain>,
    system: Option<RawSystem>,
    integrator: Option<RawIntegrator>,
    output: Option<RawOutput>,
    sweep: Option<SweepConfig>,
    scan: Option<ScanConfig>,
    profile: Option<ProfileConfig>,
    superposition: Option<SuperpositionConfig>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawPulse {
    envelope: Option<EnvelopeShape>,
    area: Option<f64>,
    peak_rabi: Option<f64>,
    duration: Option<f64>,
    chirp: Option<f64>,
    carrier_offset: Option<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawTrain {
    count: Option<usize>,
    r1: Option<f64>,
    r2: Option<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSystem {
    detunings: Option<Vec<f64>>,
    sideband_orders: Option<Vec<i32>>,
    weights: Option<Vec<f64>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawIntegrator {
    sample_count: Option<usize>,
    steps_per_sample: Option<usize>,
    samples_per_subpulse: Option<usize>,
    steps_per_subpulse: Option<usize>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawOutput {
    dir: Option<String>,
}

// ---------------------------------------------------------------------------
// Resolved schema (all defaults explicit)
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PulseConfig {
    pub envelope: EnvelopeShape,
    /// Total pulse area; derived from `peak_rabi` when that was given.
    pub area: f64,
    /// Peak Rabi frequency; derived from `area` when that was given.
    pub peak_rabi: f64,
    pub duration: f64,
    /// Dimensionless chirp `alpha * duration^2`.
    pub chirp: f64,
    pub carrier_offset: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrainConfig {
    pub count: usize,
    pub r1: f64,
    /// Present selects the time-scaled regime; absent means duration-matched.
    pub r2: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SystemConfig {
    /// Raw detunings from the carrier reference, if given that way.
    pub detunings: Option<Vec<f64>>,
    /// Comb-tooth orders resolved against the train spacing at run time.
    pub sideband_orders: Option<Vec<i32>>,
    pub weights: Vec<f64>,
}

impl SystemConfig {
    pub fn num_excited(&self) -> usize {
        self.detunings
            .as_ref()
            .map(Vec::len)
            .or_else(|| self.sideband_orders.as_ref().map(Vec::len))
            .unwrap_or(0)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IntegratorConfig {
    pub sample_count: usize,
    pub steps_per_sample: usize,
    pub samples_per_subpulse: usize,
    pub steps_per_subpulse: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OutputConfig {
    pub dir: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepCase {
    pub area: f64,
    pub chirp: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    /// Subpulse counts to sweep.
    pub counts: Vec<usize>,
    pub cases: Vec<SweepCase>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScanConfig {
    /// Scan teeth 0..=max_order.
    pub max_order: i32,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProfileConfig {
    pub orders: Vec<i32>,
    /// Half-width of the offset scan as a fraction of the tooth spacing.
    pub offset_fraction: f64,
    /// Number of uniformly spaced offsets across the scan window.
    pub offset_count: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SuperpositionConfig {
    /// Tooth orders for the second excited level; the first sits at order 0.
    pub orders: Vec<i32>,
    /// Divide subpulse amplitudes by the two-tooth prefactor so the
    /// bright-state area stays at the carrier value.
    pub apply_prefactor: bool,
}

/// A complete, validated experiment description.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentConfig {
    pub experiment: ExperimentKind,
    pub pulse: PulseConfig,
    pub train: TrainConfig,
    pub system: SystemConfig,
    pub integrator: IntegratorConfig,
    pub output: OutputConfig,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepConfig>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub scan: Option<ScanConfig>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub profile: Option<ProfileConfig>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub superposition: Option<SuperpositionConfig>,
}

/// Parse and validate a configuration document.
pub fn validate_config(text: &str) -> Result<ExperimentConfig, ConfigError> {
    let raw: RawConfig = toml::from_str(text).map_err(|e| ConfigError {
        diagnostics: vec![Diagnostic {
            field: "(toml)".to_string(),
            message: e.to_string(),
        }],
    })?;

    let mut diags: Vec<Diagnostic> = Vec::new();
    fn d(field: &str, message: String) -> Diagnostic {
        Diagnostic {
            field: field.to_string(),
            message,
        }
    }

    // Pulse.
    let envelope = raw.pulse.envelope.unwrap_or(EnvelopeShape::Blackman);
    let duration = raw.pulse.duration.unwrap_or(1.0);
    if duration <= 0.0 || duration.is_nan() {
        diags.push(d("pulse.duration", format!("must be positive, got {duration}")));
    }
    let chirp = raw.pulse.chirp.unwrap_or(0.0);
    let carrier_offset = raw.pulse.carrier_offset.unwrap_or(0.0);
    let s0 = envelope.shape_factor();
    let (area, peak_rabi) = match (raw.pulse.area, raw.pulse.peak_rabi) {
        (Some(a), None) => {
            if a < 0.0 {
                diags.push(d("pulse.area", format!("must be non-negative, got {a}")));
            }
            (a, a / (duration * s0))
        }
        (None, Some(p)) => {
            if p < 0.0 {
                diags.push(d("pulse.peak_rabi", format!("must be non-negative, got {p}")));
            }
            (p * duration * s0, p)
        }
        (Some(_), Some(_)) => {
            diags.push(d(
                "pulse",
                "`area` and `peak_rabi` are mutually exclusive; set exactly one".to_string(),
            ));
            (0.0, 0.0)
        }
        (None, None) => {
            diags.push(d(
                "pulse",
                "exactly one of `area` or `peak_rabi` must be set".to_string(),
            ));
            (0.0, 0.0)
        }
    };
    let pulse = PulseConfig {
        envelope,
        area,
        peak_rabi,
        duration,
        chirp,
        carrier_offset,
    };

    // Train.
    let rt = raw.train.unwrap_or(RawTrain {
        count: None,
        r1: None,
        r2: None,
    });
    let count = rt.count.unwrap_or(100);
    if count < 2 {
        diags.push(d("train.count", format!("need at least 2 subpulses, got {count}")));
    }
    let r1 = rt.r1.unwrap_or(100.0);
    if r1 < 1.0 || r1.is_nan() {
        diags.push(d("train.r1", format!("subpulses overlap: r1 must be >= 1, got {r1}")));
    }
    if let Some(r2) = rt.r2 {
        if r2 <= 0.0 || r2.is_nan() {
            diags.push(d("train.r2", format!("must be positive, got {r2}")));
        }
    }
    let train = TrainConfig {
        count,
        r1,
        r2: rt.r2,
    };

    // System.
    let rs = raw.system.unwrap_or(RawSystem {
        detunings: None,
        sideband_orders: None,
        weights: None,
    });
    let (detunings, sideband_orders) = match (rs.detunings, rs.sideband_orders) {
        (Some(_), Some(_)) => {
            diags.push(d(
                "system",
                "`detunings` and `sideband_orders` are mutually exclusive".to_string(),
            ));
            (None, None)
        }
        (None, None) => (Some(vec![0.0]), None),
        (d, o) => (d, o),
    };
    let m = detunings
        .as_ref()
        .map(Vec::len)
        .or_else(|| sideband_orders.as_ref().map(Vec::len))
        .unwrap_or(1);
    if m == 0 {
        diags.push(d("system", "need at least one excited level".to_string()));
    }
    let weights = rs.weights.unwrap_or_else(|| vec![1.0; m]);
    if weights.len() != m {
        diags.push(d(
            "system.weights",
            format!("got {} weights for {} excited levels", weights.len(), m),
        ));
    }
    if weights.iter().any(|&w| w < 0.0) {
        diags.push(d("system.weights", "weights must be non-negative".to_string()));
    }
    if sideband_orders.is_some()
        && matches!(raw.experiment, ExperimentKind::Continuous)
    {
        diags.push(d(
            "system.sideband_orders",
            "tooth orders need a train; use raw `detunings` for a continuous run".to_string(),
        ));
    }
    let system = SystemConfig {
        detunings,
        sideband_orders,
        weights,
    };

    // Integrator.
    let ri = raw.integrator.unwrap_or(RawIntegrator {
        sample_count: None,
        steps_per_sample: None,
        samples_per_subpulse: None,
        steps_per_subpulse: None,
    });
    let integrator = IntegratorConfig {
        sample_count: ri.sample_count.unwrap_or(2000),
        steps_per_sample: ri.steps_per_sample.unwrap_or(400),
        samples_per_subpulse: ri.samples_per_subpulse.unwrap_or(20),
        steps_per_subpulse: ri.steps_per_subpulse.unwrap_or(400),
    };
    if integrator.sample_count < 2 {
        diags.push(d("integrator.sample_count", "must be at least 2".to_string()));
    }
    if integrator.samples_per_subpulse < 2 {
        diags.push(d("integrator.samples_per_subpulse", "must be at least 2".to_string()));
    }
    if integrator.steps_per_sample == 0 {
        diags.push(d("integrator.steps_per_sample", "must be positive".to_string()));
    }
    if integrator.steps_per_subpulse == 0 {
        diags.push(d("integrator.steps_per_subpulse", "must be positive".to_string()));
    }

    let output = OutputConfig {
        dir: raw.output.and_then(|o| o.dir).unwrap_or_else(|| "out".to_string()),
    };

    // Experiment-specific sections: exactly the one that belongs.
    let expect_section = |present: bool,
                          needed: bool,
                          name: &str,
                          experiment: ExperimentKind,
                          diags: &mut Vec<Diagnostic>| {
        if needed && !present {
            diags.push(Diagnostic {
                field: name.to_string(),
                message: format!(
                    "section is required for the `{}` experiment",
                    experiment.name()
                ),
            });
        }
        if present && !needed {
            diags.push(Diagnostic {
                field: name.to_string(),
                message: format!(
                    "section does not apply to the `{}` experiment",
                    experiment.name()
                ),
            });
        }
    };
    let kind = raw.experiment;
    expect_section(
        raw.sweep.is_some(),
        kind == ExperimentKind::ErrorSweep,
        "sweep",
        kind,
        &mut diags,
    );
    expect_section(
        raw.scan.is_some(),
        kind == ExperimentKind::SidebandScan,
        "scan",
        kind,
        &mut diags,
    );
    expect_section(
        raw.profile.is_some(),
        kind == ExperimentKind::DetuningProfile,
        "profile",
        kind,
        &mut diags,
    );
    expect_section(
        raw.superposition.is_some(),
        kind == ExperimentKind::Superposition,
        "superposition",
        kind,
        &mut diags,
    );

    if let Some(sweep) = &raw.sweep {
        if sweep.counts.is_empty() {
            diags.push(Diagnostic {
                field: "sweep.counts".to_string(),
                message: "need at least one subpulse count".to_string(),
            });
        }
        if sweep.counts.iter().any(|&n| n < 2) {
            diags.push(Diagnostic {
                field: "sweep.counts".to_string(),
                message: "every count must be at least 2".to_string(),
            });
        }
        if sweep.cases.is_empty() {
            diags.push(Diagnostic {
                field: "sweep.cases".to_string(),
                message: "need at least one (area, chirp) case".to_string(),
            });
        }
        if sweep.cases.iter().any(|c| c.area < 0.0) {
            diags.push(Diagnostic {
                field: "sweep.cases".to_string(),
                message: "areas must be non-negative".to_string(),
            });
        }
    }
    if let Some(scan) = &raw.scan {
        if scan.max_order < 0 {
            diags.push(Diagnostic {
                field: "scan.max_order".to_string(),
                message: format!("must be non-negative, got {}", scan.max_order),
            });
        }
    }
    if let Some(profile) = &raw.profile {
        if profile.orders.is_empty() {
            diags.push(Diagnostic {
                field: "profile.orders".to_string(),
                message: "need at least one tooth order".to_string(),
            });
        }
        if !(profile.offset_fraction > 0.0 && profile.offset_fraction <= 0.5) {
            diags.push(Diagnostic {
                field: "profile.offset_fraction".to_string(),
                message: format!(
                    "must be in (0, 0.5], got {}",
                    profile.offset_fraction
                ),
            });
        }
        if profile.offset_count < 3 {
            diags.push(Diagnostic {
                field: "profile.offset_count".to_string(),
                message: "need at least 3 offsets".to_string(),
            });
        }
    }
    if let Some(sup) = &raw.superposition {
        if sup.orders.is_empty() {
            diags.push(Diagnostic {
                field: "superposition.orders".to_string(),
                message: "need at least one tooth order".to_string(),
            });
        }
        if system.num_excited() != 2 {
            diags.push(Diagnostic {
                field: "system".to_string(),
                message: format!(
                    "superposition needs exactly 2 excited levels, got {}",
                    system.num_excited()
                ),
            });
        }
    }
    // The sideband experiments assume a constant-frequency train.
    if matches!(
        kind,
        ExperimentKind::SidebandScan | ExperimentKind::DetuningProfile | ExperimentKind::Superposition
    ) && (pulse.chirp != 0.0 || pulse.carrier_offset != 0.0)
    {
        diags.push(d(
            "pulse.chirp",
            "sideband experiments need a constant-frequency train: set chirp = 0 and carrier_offset = 0"
                .to_string(),
        ));
    }

    if diags.is_empty() {
        Ok(ExperimentConfig {
            experiment: kind,
            pulse,
            train,
            system,
            integrator,
            output,
            sweep: raw.sweep,
            scan: raw.scan,
            profile: raw.profile,
            superposition: raw.superposition,
        })
    } else {
        Err(ConfigError { diagnostics: diags })
    }
}
