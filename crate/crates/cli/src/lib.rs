//! Command-line front end: loads configs, runs the experiment suites and
//! serializes reports.
//!
//! Reports are deterministic: identical config and seed give byte-identical
//! files. Wall-clock timing therefore goes to stderr, never into a report.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};
use serde::{Deserialize, Serialize};

use acsqc_core::compiler;
use acsqc_core::evolve::{self, IntegratorOptions};
use acsqc_core::recursion;
use acsqc_core::schedule::{self, ChainStyle, Schedule, ScheduleShape};
use acsqc_core::RotationProfile;

/// Sign conventions echoed into every report.
pub const CONVENTION: &str = "U(theta)=exp(-i*theta*Z/2); U X U' = cos(theta) X + sin(theta) Y; \
     local field M(-theta) = cos(theta) X - sin(theta) Y; per-step gate U(theta_next)*H";

#[derive(Parser, Debug)]
#[command(name = "acsqc", version, about = "Adiabatic cluster-state computing simulator")]
pub struct Cli {
    #[command(subcommand)]
    pub mode: Mode,
}

#[derive(Subcommand, Debug)]
pub enum Mode {
    /// Replay a dragging plan symbolically and print the frame trace.
    Symbolic(ModeArgs),
    /// Integrate a chain plan and report leakage, fidelity and expectations.
    Evolve(ModeArgs),
    /// Scan instantaneous gaps over a chain plan (CSV output).
    GapScan(ModeArgs),
    /// Compile a circuit file to a cluster layout (JSON output).
    Compile(ModeArgs),
    /// Compile, execute and verify a circuit file against its oracle.
    Verify(ModeArgs),
}

#[derive(Parser, Debug, Default)]
pub struct ModeArgs {
    /// Chain length.
    #[arg(long)]
    pub n: Option<usize>,
    /// Comma-separated site angles (must start and end with 0).
    #[arg(long)]
    pub thetas: Option<String>,
    /// Schedule shape: linear | smooth.
    #[arg(long)]
    pub schedule: Option<String>,
    /// Duration per dragging step in units of 1/delta.
    #[arg(long)]
    pub tstep: Option<f64>,
    /// Energy scale.
    #[arg(long)]
    pub delta: Option<f64>,
    /// Report output path (stdout when absent).
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Seed echoed into the report (randomized suites only).
    #[arg(long)]
    pub seed: Option<u64>,
    /// Gap samples per step.
    #[arg(long)]
    pub samples: Option<usize>,
    /// Circuit file (compile / verify).
    #[arg(long)]
    pub circuit: Option<PathBuf>,
    /// JSON config file; explicit flags override its fields.
    #[arg(long)]
    pub config: Option<PathBuf>,
}

/// A fully resolved experiment configuration.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct ExperimentConfig {
    pub mode: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub thetas: Option<Vec<f64>>,
    #[serde(default = "default_schedule")]
    pub schedule: String,
    #[serde(default = "default_tstep")]
    pub tstep: f64,
    #[serde(default = "default_delta")]
    pub delta: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default = "default_samples")]
    pub samples: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub circuit: Option<PathBuf>,
}

fn default_schedule() -> String {
    "linear".into()
}

fn default_tstep() -> f64 {
    50.0
}

fn default_delta() -> f64 {
    1.0
}

fn default_samples() -> usize {
    40
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        match self.mode.as_str() {
            "symbolic" | "evolve" | "gap-scan" => {
                if self.n.is_none() {
                    bail!("mode '{}' requires --n", self.mode);
                }
            }
            "compile" | "verify" => {
                if self.circuit.is_none() {
                    bail!("mode '{}' requires --circuit", self.mode);
                }
            }
            other => bail!("unknown mode '{other}'"),
        }
        if self.tstep <= 0.0 || !self.tstep.is_finite() {
            bail!("tstep must be positive and finite, got {}", self.tstep);
        }
        if self.delta <= 0.0 || !self.delta.is_finite() {
            bail!("delta must be positive and finite, got {}", self.delta);
        }
        if self.samples < 2 {
            bail!("samples must be at least 2, got {}", self.samples);
        }
        self.schedule
            .parse::<ScheduleShape>()
            .map_err(|e| anyhow::anyhow!("{e}"))?;
        Ok(())
    }

    pub fn schedule(&self) -> Result<Schedule> {
        let shape = self
            .schedule
            .parse::<ScheduleShape>()
            .map_err(|e| anyhow::anyhow!("{e}"))?;
        Schedule::new(shape, self.tstep).map_err(|e| anyhow::anyhow!("{e}"))
    }

    pub fn profile(&self) -> Result<RotationProfile> {
        let n = self.n.context("--n required")?;
        match &self.thetas {
            None => Ok(RotationProfile::untwisted(n)),
            Some(v) => {
                if v.len() != n {
                    bail!("--thetas needs {n} entries, got {}", v.len());
                }
                RotationProfile::new(v.clone()).map_err(|e| anyhow::anyhow!("{e}"))
            }
        }
    }
}

/// Loads a config file and applies defaults.
pub fn load_config(path: &Path) -> Result<ExperimentConfig> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("reading config {}", path.display()))?;
    let config: ExperimentConfig = serde_json::from_str(&text)
        .with_context(|| format!("parsing config {}", path.display()))?;
    config.validate()?;
    Ok(config)
}

fn merge(args: &ModeArgs, mode: &str) -> Result<ExperimentConfig> {
    let mut config = match &args.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .with_context(|| format!("reading config {}", path.display()))?;
            let mut c: ExperimentConfig = serde_json::from_str(&text)
                .with_context(|| format!("parsing config {}", path.display()))?;
            c.mode = mode.to_string();
            c
        }
        None => ExperimentConfig {
            mode: mode.to_string(),
            n: None,
            thetas: None,
            schedule: default_schedule(),
            tstep: default_tstep(),
            delta: default_delta(),
            out: None,
            seed: None,
            samples: default_samples(),
            circuit: None,
        },
    };
    if let Some(n) = args.n {
        config.n = Some(n);
    }
    if let Some(t) = &args.thetas {
        let parsed: std::result::Result<Vec<f64>, _> =
            t.split(',').map(|x| x.trim().parse::<f64>()).collect();
        config.thetas = Some(parsed.context("parsing --thetas")?);
    }
    if let Some(s) = &args.schedule {
        config.schedule = s.clone();
    }
    if let Some(t) = args.tstep {
        config.tstep = t;
    }
    if let Some(d) = args.delta {
        config.delta = d;
    }
    if let Some(o) = &args.out {
        config.out = Some(o.clone());
    }
    if let Some(s) = args.seed {
        config.seed = Some(s);
    }
    if let Some(s) = args.samples {
        config.samples = s;
    }
    if let Some(c) = &args.circuit {
        config.circuit = Some(c.clone());
    }
    config.validate()?;
    Ok(config)
}

#[derive(Debug, Serialize)]
struct Versions {
    name: &'static str,
    version: &'static str,
}

fn versions() -> Versions {
    Versions {
        name: "acsqc",
        version: env!("CARGO_PKG_VERSION"),
    }
}

/// A structured report with the config echo and deterministic outputs.
#[derive(Debug, Serialize)]
pub struct RunReport<T: Serialize> {
    pub config: ExperimentConfig,
    pub versions_name: String,
    pub versions_version: String,
    pub convention: String,
    pub output: T,
}

fn make_report<T: Serialize>(config: &ExperimentConfig, output: T) -> RunReport<T> {
    let v = versions();
    RunReport {
        config: config.clone(),
        versions_name: v.name.to_string(),
        versions_version: v.version.to_string(),
        convention: CONVENTION.to_string(),
        output,
    }
}

/// Writes text to the config's output path, or stdout.
pub fn write_report(text: &str, out: Option<&Path>) -> Result<()> {
    match out {
        Some(path) => {
            std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))?;
            eprintln!("report written to {}", path.display());
        }
        None => print!("{text}"),
    }
    Ok(())
}

fn json_report<T: Serialize>(config: &ExperimentConfig, output: T) -> Result<String> {
    let report = make_report(config, output);
    let mut text = serde_json::to_string_pretty(&report)?;
    text.push('\n');
    Ok(text)
}

#[derive(Debug, Serialize)]
struct SymbolicOutput {
    n: usize,
    twisted: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    frame_trace: Option<Vec<String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    final_logical_x: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    final_logical_z: Option<String>,
    /// Restricted coefficient rows per stage (twisted runs).
    #[serde(skip_serializing_if = "Option::is_none")]
    coefficient_tables: Option<Vec<Vec<Vec<f64>>>>,
    /// Per-site frame-relation discrepancies for this profile.
    #[serde(skip_serializing_if = "Option::is_none")]
    frame_check_discrepancies: Option<Vec<f64>>,
    /// Pauli-transfer rows (X, Y, Z) of the derived net gate.
    net_gate_transfer: Vec<Vec<f64>>,
}

#[derive(Debug, Serialize)]
struct FrameCheckSweep {
    n_max: usize,
    seed: u64,
    trials: usize,
    max_discrepancy: f64,
}

/// Seeded random-profile sweep of the per-step frame relation; `--samples`
/// sets the trial count.
fn run_frame_check_sweep(config: &ExperimentConfig, seed: u64) -> Result<String> {
    use rand::prelude::*;
    let n_max = config.n.unwrap().max(3);
    let trials = config.samples;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let mut worst = 0.0f64;
    for _ in 0..trials {
        let n = rng.random_range(3..=n_max);
        let interior: Vec<f64> = (0..n - 2)
            .map(|_| rng.random_range(-std::f64::consts::PI..std::f64::consts::PI))
            .collect();
        let profile =
            RotationProfile::from_interior(n, &interior).map_err(|e| anyhow::anyhow!("{e}"))?;
        for i in 1..=n - 2 {
            worst = worst.max(
                recursion::frame_gate_check(i, &profile).map_err(|e| anyhow::anyhow!("{e}"))?,
            );
        }
    }
    json_report(
        config,
        FrameCheckSweep {
            n_max,
            seed,
            trials,
            max_discrepancy: worst,
        },
    )
}

fn run_symbolic(config: &ExperimentConfig) -> Result<String> {
    if let Some(seed) = config.seed {
        return run_frame_check_sweep(config, seed);
    }
    let n = config.n.unwrap();
    let profile = config.profile()?;
    let net = recursion::net_gate(&profile);
    let transfer = acsqc_core::gates::transfer_matrix(&net)
        .iter()
        .map(|row| row.to_vec())
        .collect::<Vec<_>>();

    let output = if profile.is_untwisted() {
        let plan = schedule::chain_plan(n, config.delta, &ChainStyle::Plain, config.schedule()?)
            .map_err(|e| anyhow::anyhow!("{e}"))?;
        let (in_frame, _) = schedule::chain_frames(n).map_err(|e| anyhow::anyhow!("{e}"))?;
        let frames = plan
            .replay_symbolic(&in_frame)
            .map_err(|e| anyhow::anyhow!("{e}"))?;
        let trace: Vec<String> = frames.iter().map(|f| f.to_string()).collect();
        let last = frames
            .last()
            .context("no steps")?
            .with_canonical_logicals()
            .map_err(|e| anyhow::anyhow!("{e}"))?;
        SymbolicOutput {
            n,
            twisted: false,
            final_logical_x: Some(last.logicals()[0].x_op.to_string()),
            final_logical_z: Some(last.logicals()[0].z_op.to_string()),
            frame_trace: Some(trace),
            coefficient_tables: None,
            frame_check_discrepancies: None,
            net_gate_transfer: transfer,
        }
    } else {
        let tables = recursion::tables_for_profile(&profile)
            .map_err(|e| anyhow::anyhow!("{e}"))?;
        let restricted: Vec<Vec<Vec<f64>>> = tables
            .iter()
            .map(|t| {
                t.restricted()
                    .map(|r| r.iter().map(|row| row.to_vec()).collect())
            })
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| anyhow::anyhow!("{e}"))?;
        let discrepancies = (1..=n - 2)
            .map(|i| recursion::frame_gate_check(i, &profile))
            .collect::<acsqc_core::Result<Vec<f64>>>()
            .map_err(|e| anyhow::anyhow!("{e}"))?;
        SymbolicOutput {
            n,
            twisted: true,
            frame_trace: None,
            final_logical_x: None,
            final_logical_z: None,
            coefficient_tables: Some(restricted),
            frame_check_discrepancies: Some(discrepancies),
            net_gate_transfer: transfer,
        }
    };
    json_report(config, output)
}

#[derive(Debug, Serialize)]
struct RouteOutput {
    leakage: f64,
    fidelity_vs_predicted: f64,
    norm_drift: f64,
    substeps_per_step: Vec<usize>,
}

#[derive(Debug, Serialize)]
struct EvolveOutput {
    n: usize,
    leakage: f64,
    fidelity_vs_predicted: f64,
    norm_drift: f64,
    substeps_per_step: Vec<usize>,
    /// Refined per-step minimum gaps (dense path, small chains only).
    min_gaps: Vec<f64>,
    /// `<G>` for each replayed-frame generator after each step (plain chains).
    #[serde(skip_serializing_if = "Option::is_none")]
    generator_expectations: Option<Vec<Vec<f64>>>,
    /// The same run through the twisted-Hamiltonian route (rotated profiles).
    #[serde(skip_serializing_if = "Option::is_none")]
    twisted_route: Option<RouteOutput>,
    /// Fidelity between the two routes' induced gates (rotated profiles).
    #[serde(skip_serializing_if = "Option::is_none")]
    route_agreement_fidelity: Option<f64>,
}

fn run_evolve(config: &ExperimentConfig) -> Result<String> {
    let n = config.n.unwrap();
    let profile = config.profile()?;
    let schedule = config.schedule()?;
    let opts = IntegratorOptions {
        record_step_states: true,
        ..Default::default()
    };
    let net = recursion::net_gate(&profile);
    let target = acsqc_core::nalgebra::DMatrix::from_fn(2, 2, |r, c| net[(r, c)]);
    let scan_gaps = |plan: &acsqc_core::DraggingPlan| -> Result<Vec<f64>> {
        if n <= 9 {
            Ok(evolve::gap_scan(plan, config.samples, None)
                .map_err(|e| anyhow::anyhow!("{e}"))?
                .per_step_min)
        } else {
            Ok(Vec::new())
        }
    };

    let output = if profile.is_untwisted() {
        let plan = schedule::chain_plan(n, config.delta, &ChainStyle::Plain, schedule)
            .map_err(|e| anyhow::anyhow!("{e}"))?;
        let (in_frame, out_frame) =
            schedule::chain_frames(n).map_err(|e| anyhow::anyhow!("{e}"))?;
        let gate = evolve::induced_logical_unitary(&plan, &in_frame, &out_frame, &opts)
            .map_err(|e| anyhow::anyhow!("{e}"))?;
        let fidelity = evolve::process_fidelity(&gate.matrix, &target)
            .map_err(|e| anyhow::anyhow!("{e}"))?;
        let frames = plan
            .replay_symbolic(&in_frame)
            .map_err(|e| anyhow::anyhow!("{e}"))?;
        let report = &gate.reports[0];
        let mut per_step = Vec::new();
        for (frame, state) in frames.iter().zip(report.step_states.iter()) {
            let exps = frame
                .generators()
                .iter()
                .map(|g| state.expectation(g))
                .collect::<acsqc_core::Result<Vec<f64>>>()
                .map_err(|e| anyhow::anyhow!("{e}"))?;
            per_step.push(exps);
        }
        EvolveOutput {
            n,
            leakage: gate.leakage,
            fidelity_vs_predicted: fidelity,
            norm_drift: gate.norm_drift,
            substeps_per_step: gate.reports[0].substeps_per_step.clone(),
            min_gaps: scan_gaps(&plan)?,
            generator_expectations: Some(per_step),
            twisted_route: None,
            route_agreement_fidelity: None,
        }
    } else {
        // Rotated profile: run both equivalent routes and compare.
        let (in_frame, out_frame) =
            schedule::chain_frames_logical_only(n).map_err(|e| anyhow::anyhow!("{e}"))?;
        let rotated_plan = schedule::chain_plan(
            n,
            config.delta,
            &ChainStyle::RotatedFields(profile.clone()),
            schedule,
        )
        .map_err(|e| anyhow::anyhow!("{e}"))?;
        let twisted_plan = schedule::chain_plan(
            n,
            config.delta,
            &ChainStyle::Twisted(profile.clone()),
            schedule,
        )
        .map_err(|e| anyhow::anyhow!("{e}"))?;
        let rotated = evolve::induced_logical_unitary(&rotated_plan, &in_frame, &out_frame, &opts)
            .map_err(|e| anyhow::anyhow!("{e}"))?;
        let twisted = evolve::induced_logical_unitary(&twisted_plan, &in_frame, &out_frame, &opts)
            .map_err(|e| anyhow::anyhow!("{e}"))?;
        let agreement = evolve::process_fidelity(&rotated.matrix, &twisted.matrix)
            .map_err(|e| anyhow::anyhow!("{e}"))?;
        EvolveOutput {
            n,
            leakage: rotated.leakage,
            fidelity_vs_predicted: evolve::process_fidelity(&rotated.matrix, &target)
                .map_err(|e| anyhow::anyhow!("{e}"))?,
            norm_drift: rotated.norm_drift,
            substeps_per_step: rotated.reports[0].substeps_per_step.clone(),
            min_gaps: scan_gaps(&rotated_plan)?,
            generator_expectations: None,
            twisted_route: Some(RouteOutput {
                leakage: twisted.leakage,
                fidelity_vs_predicted: evolve::process_fidelity(&twisted.matrix, &target)
                    .map_err(|e| anyhow::anyhow!("{e}"))?,
                norm_drift: twisted.norm_drift,
                substeps_per_step: twisted.reports[0].substeps_per_step.clone(),
            }),
            route_agreement_fidelity: Some(agreement),
        }
    };
    json_report(config, output)
}

fn run_gap_scan(config: &ExperimentConfig) -> Result<(String, String)> {
    let n = config.n.unwrap();
    let profile = config.profile()?;
    let style = if profile.is_untwisted() {
        ChainStyle::Plain
    } else {
        ChainStyle::Twisted(profile)
    };
    let plan = schedule::chain_plan(n, config.delta, &style, config.schedule()?)
        .map_err(|e| anyhow::anyhow!("{e}"))?;
    let scan =
        evolve::gap_scan(&plan, config.samples, None).map_err(|e| anyhow::anyhow!("{e}"))?;
    let mut csv = String::from("step,s,gap\n");
    for p in &scan.points {
        writeln!(csv, "{},{:.16e},{:.16e}", p.step, p.s, p.gap)?;
    }
    let mut summary = String::new();
    for (step, min) in scan.per_step_min.iter().enumerate() {
        writeln!(summary, "step {step}: min gap {min:.12}")?;
    }
    writeln!(summary, "overall min gap {:.12}", scan.min_gap())?;
    Ok((csv, summary))
}

fn run_compile(config: &ExperimentConfig) -> Result<String> {
    let path = config.circuit.as_ref().unwrap();
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("reading circuit {}", path.display()))?;
    let ir = compiler::parse_circuit(&text).map_err(|e| anyhow::anyhow!("{e}"))?;
    let layout = compiler::compile_layout(&ir).map_err(|e| anyhow::anyhow!("{e}"))?;
    json_report(config, layout)
}

#[derive(Debug, Serialize)]
struct VerifyOutput {
    n_qubits: usize,
    fidelity: f64,
    leakage: f64,
    norm_drift: f64,
    min_gaps: Vec<f64>,
    input_hadamard_parities: Vec<u8>,
}

fn run_verify(config: &ExperimentConfig) -> Result<String> {
    let path = config.circuit.as_ref().unwrap();
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("reading circuit {}", path.display()))?;
    let opts = IntegratorOptions::default();
    let (_, layout, report) =
        compiler::verify_circuit(&text, config.delta, config.schedule()?, &opts)
            .map_err(|e| anyhow::anyhow!("{e}"))?;
    let output = VerifyOutput {
        n_qubits: report.n_qubits,
        fidelity: report.fidelity,
        leakage: report.leakage,
        norm_drift: report.norm_drift,
        min_gaps: report.min_gaps.clone(),
        input_hadamard_parities: layout
            .wires
            .iter()
            .map(|w| w.input_hadamard_parity)
            .collect(),
    };
    json_report(config, output)
}

/// Runs a parsed command line; returns the process exit code.
pub fn run(cli: Cli) -> Result<i32> {
    let started = std::time::Instant::now();
    let (config, report) = match &cli.mode {
        Mode::Symbolic(args) => {
            let config = merge(args, "symbolic")?;
            let report = run_symbolic(&config)?;
            (config, report)
        }
        Mode::Evolve(args) => {
            let config = merge(args, "evolve")?;
            let report = run_evolve(&config)?;
            (config, report)
        }
        Mode::GapScan(args) => {
            let config = merge(args, "gap-scan")?;
            let (csv, summary) = run_gap_scan(&config)?;
            eprint!("{summary}");
            (config, csv)
        }
        Mode::Compile(args) => {
            let config = merge(args, "compile")?;
            let report = run_compile(&config)?;
            (config, report)
        }
        Mode::Verify(args) => {
            let config = merge(args, "verify")?;
            let report = run_verify(&config)?;
            (config, report)
        }
    };
    write_report(&report, config.out.as_deref())?;
    eprintln!("completed in {:.1} ms", started.elapsed().as_secs_f64() * 1e3);
    Ok(0)
}
