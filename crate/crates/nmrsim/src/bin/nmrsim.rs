//! Command-line front end: run registered experiments, simulate ad-hoc
//! pulse programs, optimize pulses, and recompute spectra from stored
//! FIDs. Data goes to files; messages go to standard error.
//!
//! Exit codes: 0 success, 1 configuration error, 2 runtime failure.

use clap::{Args, Parser, Subcommand};
use serde_json::{Map, Value};
use std::path::PathBuf;
use std::process::ExitCode;

use nmrsim::operators::State;
use nmrsim::readout::AcquisitionConfig;
use nmrsim::sequence::{run_program, EnsembleSpec, PulseMode, PulseProgram};
use nmrsim::spin_system::SpinSystem;

#[derive(Parser)]
#[command(
    name = "nmrsim",
    about = "Spin-dynamics simulator for NMR quantum information processing",
    version
)]
struct Cli {
    /// Worker threads for internal parallelism (default: machine
    /// parallelism; NMRSIM_THREADS as fallback).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a registered experiment.
    Run(RunArgs),
    /// Run a pulse program on a spin system and acquire an FID and
    /// spectrum.
    Simulate(SimulateArgs),
    /// Search for a strongly modulating pulse implementing a target
    /// rotation.
    OptimizePulse(OptimizeArgs),
    /// Recompute a spectrum from a stored FID CSV.
    Spectrum(SpectrumArgs),
    /// List registered experiments and bundled spin-system presets.
    List,
}

#[derive(Args)]
struct RunArgs {
    /// Experiment name (see `list`).
    #[arg(long)]
    name: String,
    /// JSON config written by a previous run (supplies name/seed/params).
    #[arg(long)]
    config: Option<PathBuf>,
    /// Parameter overrides as key=json-value.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output directory.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct SimulateArgs {
    /// Spin-system JSON file.
    #[arg(long)]
    system: PathBuf,
    /// Pulse-program JSON file.
    #[arg(long)]
    program: PathBuf,
    /// Spin to observe.
    #[arg(long, default_value_t = 1)]
    observe: usize,
    #[arg(long, default_value_t = 1024)]
    n_points: usize,
    /// Dwell time in seconds.
    #[arg(long, default_value_t = 1e-3)]
    dwell: f64,
    /// Exponential line broadening in Hz.
    #[arg(long, default_value_t = 1.0)]
    lb: f64,
    /// Realize rotations as finite pulses at this amplitude (Hz) instead
    /// of ideal rotations.
    #[arg(long)]
    finite_amplitude: Option<f64>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct OptimizeArgs {
    /// Spin-system JSON file, or a preset name.
    #[arg(long)]
    system: String,
    /// Target rotation, e.g. `x90:1` (π/2 about x on spin 1) or `y180:2`.
    #[arg(long)]
    target: String,
    #[arg(long, default_value_t = 4)]
    segments: usize,
    #[arg(long, default_value_t = 5000.0)]
    max_amplitude: f64,
    #[arg(long, default_value_t = 8)]
    restarts: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// RF-inhomogeneity width (relative); 0 for a single member.
    #[arg(long, default_value_t = 0.0)]
    rf_sigma: f64,
    #[arg(long, default_value_t = 1)]
    rf_members: usize,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct SpectrumArgs {
    /// FID CSV with columns t_s, re, im.
    #[arg(long)]
    fid: PathBuf,
    /// Extra exponential line broadening in Hz.
    #[arg(long, default_value_t = 0.0)]
    lb: f64,
    #[arg(long)]
    out: PathBuf,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let threads = cli
        .threads
        .or_else(|| {
            std::env::var("NMRSIM_THREADS")
                .ok()
                .and_then(|v| v.parse().ok())
        })
        .unwrap_or(0);
    if threads > 0 {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
        {
            eprintln!("nmrsim: thread pool: {e}");
            return ExitCode::from(2);
        }
    }
    match dispatch(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Config(msg)) => {
            eprintln!("nmrsim: configuration error: {msg}");
            ExitCode::from(1)
        }
        Err(CliError::Runtime(msg)) => {
            eprintln!("nmrsim: {msg}");
            ExitCode::from(2)
        }
    }
}

enum CliError {
    Config(String),
    Runtime(String),
}

impl From<nmrsim::Error> for CliError {
    fn from(e: nmrsim::Error) -> Self {
        match e {
            nmrsim::Error::InvalidConfig(_)
            | nmrsim::Error::UnknownExperiment(_)
            | nmrsim::Error::Json(_) => CliError::Config(e.to_string()),
            other => CliError::Runtime(other.to_string()),
        }
    }
}

fn read_json_file(path: &PathBuf) -> Result<Value, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
}

fn dispatch(cmd: Command) -> Result<(), CliError> {
    match cmd {
        Command::List => {
            println!("experiments:");
            for (name, desc) in nmrsim::experiments::list() {
                println!("  {name:<12} {desc}");
            }
            println!("presets:");
            for name in nmrsim::presets::names() {
                println!("  {name}");
            }
            Ok(())
        }
        Command::Run(args) => run_experiment(args),
        Command::Simulate(args) => simulate(args),
        Command::OptimizePulse(args) => optimize(args),
        Command::Spectrum(args) => respectrum(args),
    }
}

fn run_experiment(args: RunArgs) -> Result<(), CliError> {
    let mut name = args.name.clone();
    let mut seed = args.seed;
    let mut overrides: Map<String, Value> = Map::new();
    if let Some(path) = &args.config {
        let cfg = read_json_file(path)?;
        let obj = cfg
            .as_object()
            .ok_or_else(|| CliError::Config(format!("{}: not a JSON object", path.display())))?;
        if let Some(n) = obj.get("name").and_then(Value::as_str) {
            name = n.to_string();
        }
        if let Some(s) = obj.get("seed").and_then(Value::as_u64) {
            seed = s;
        }
        if let Some(params) = obj.get("params").and_then(Value::as_object) {
            overrides.extend(params.clone());
        }
    }
    for kv in &args.set {
        let (k, v) = kv
            .split_once('=')
            .ok_or_else(|| CliError::Config(format!("override '{kv}' is not key=value")))?;
        let value: Value = serde_json::from_str(v)
            .map_err(|e| CliError::Config(format!("override '{k}': {e}")))?;
        overrides.insert(k.to_string(), value);
    }
    let metrics = nmrsim::experiments::run(&name, &overrides, seed, &args.out)?;
    eprintln!(
        "nmrsim: {name} done, metrics in {}",
        args.out.join("result.json").display()
    );
    let _ = metrics;
    Ok(())
}

fn simulate(args: SimulateArgs) -> Result<(), CliError> {
    let sys: SpinSystem = serde_json::from_value(read_json_file(&args.system)?)
        .map_err(|e| CliError::Config(format!("{}: {e}", args.system.display())))?;
    let prog: PulseProgram = serde_json::from_value(read_json_file(&args.program)?)
        .map_err(|e| CliError::Config(format!("{}: {e}", args.program.display())))?;
    let mode = match args.finite_amplitude {
        Some(a) => PulseMode::Finite { amplitude_hz: a },
        None => PulseMode::Ideal,
    };
    let rho0 = State::basis_state(sys.n_spins(), 0);
    let out = run_program(&prog, &sys, &rho0, mode)?;
    let cfg = AcquisitionConfig::new(args.observe, args.n_points, args.dwell)
        .with_line_broadening(args.lb);
    let fid = nmrsim::readout::acquire_fid(&out.state, &sys.internal_hamiltonian(), &cfg)?;
    let spec = nmrsim::readout::spectrum(&fid, &cfg)?;
    let fid_rows: Vec<Vec<f64>> = fid
        .iter()
        .enumerate()
        .map(|(j, v)| vec![j as f64 * args.dwell, v.re, v.im])
        .collect();
    nmrsim::io::write_csv(&args.out.join("fid.csv"), &["t_s", "re", "im"], &fid_rows)?;
    let spec_rows: Vec<Vec<f64>> = spec
        .frequencies_hz
        .iter()
        .zip(&spec.amplitudes)
        .map(|(f, a)| vec![*f, a.re, a.im])
        .collect();
    nmrsim::io::write_csv(
        &args.out.join("spectrum.csv"),
        &["freq_hz", "re", "im"],
        &spec_rows,
    )?;
    nmrsim::io::write_json(
        &args.out.join("acquisition.json"),
        &serde_json::json!({
            "observe_spin": args.observe,
            "n_points": args.n_points,
            "dwell_s": args.dwell,
            "line_broadening_hz": args.lb,
            "mode": match mode {
                PulseMode::Ideal => "ideal".to_string(),
                PulseMode::Finite { amplitude_hz } => format!("finite@{amplitude_hz}Hz"),
            },
        }),
    )?;
    eprintln!("nmrsim: wrote fid.csv and spectrum.csv to {}", args.out.display());
    Ok(())
}

fn parse_target(spec: &str, n_spins: usize) -> Result<nmrsim::operators::Operator, CliError> {
    let (rot, spin) = spec
        .split_once(':')
        .ok_or_else(|| CliError::Config(format!("target '{spec}' is not axis+angle:spin")))?;
    let spin: usize = spin
        .parse()
        .map_err(|_| CliError::Config(format!("bad spin in target '{spec}'")))?;
    let (axis, angle_deg) = rot.split_at(1);
    let angle: f64 = angle_deg
        .parse()
        .map_err(|_| CliError::Config(format!("bad angle in target '{spec}'")))?;
    let axis = match axis {
        "x" => [1.0, 0.0, 0.0],
        "y" => [0.0, 1.0, 0.0],
        _ => return Err(CliError::Config(format!("axis in '{spec}' must be x or y"))),
    };
    let r = nmrsim::control::RotationSpec::new(axis, angle.to_radians(), spin);
    nmrsim::control::rotation_propagator(&r, n_spins).map_err(CliError::from)
}

fn optimize(args: OptimizeArgs) -> Result<(), CliError> {
    let sys = if args.system.ends_with(".json") {
        serde_json::from_value(read_json_file(&PathBuf::from(&args.system))?)
            .map_err(|e| CliError::Config(format!("{}: {e}", args.system)))?
    } else {
        nmrsim::presets::by_name(&args.system)?
    };
    let target = parse_target(&args.target, sys.n_spins())?;
    let ensemble = if args.rf_members > 1 && args.rf_sigma > 0.0 {
        EnsembleSpec::rf_grid(1.0, args.rf_sigma, args.rf_members)?
    } else {
        EnsembleSpec::singleton()
    };
    let opts = nmrsim::control::SmpOptions {
        restarts: args.restarts,
        ..nmrsim::control::SmpOptions::new(args.segments, args.max_amplitude)
    };
    let res = nmrsim::control::smp_optimize(&target, &sys, &ensemble, &opts, args.seed)?;
    nmrsim::io::write_json(
        &args.out.join("pulse.json"),
        &serde_json::json!({
            "target": args.target,
            "fidelity": res.fidelity,
            "evaluations": res.evaluations,
            "restarts": res.restarts,
            "seed": args.seed,
            "segments": res.segments,
        }),
    )?;
    eprintln!(
        "nmrsim: best fidelity {:.6} with {} segments, pulse in {}",
        res.fidelity,
        args.segments,
        args.out.join("pulse.json").display()
    );
    Ok(())
}

fn respectrum(args: SpectrumArgs) -> Result<(), CliError> {
    let rows = nmrsim::io::read_csv_columns(&args.fid)?;
    if rows.iter().any(|r| r.len() < 3) || rows.len() < 2 {
        return Err(CliError::Config(format!(
            "{}: need columns t_s, re, im",
            args.fid.display()
        )));
    }
    let dwell = rows[1][0] - rows[0][0];
    if dwell <= 0.0 {
        return Err(CliError::Config("time column is not increasing".into()));
    }
    let lbw = args.lb;
    let fid: Vec<num_complex::Complex64> = rows
        .iter()
        .map(|r| {
            let apod = (-std::f64::consts::PI * lbw * r[0]).exp();
            num_complex::Complex64::new(r[1] * apod, r[2] * apod)
        })
        .collect();
    let cfg = AcquisitionConfig::new(1, fid.len(), dwell);
    let spec = nmrsim::readout::spectrum(&fid, &cfg)?;
    let spec_rows: Vec<Vec<f64>> = spec
        .frequencies_hz
        .iter()
        .zip(&spec.amplitudes)
        .map(|(f, a)| vec![*f, a.re, a.im])
        .collect();
    nmrsim::io::write_csv(
        &args.out.join("spectrum.csv"),
        &["freq_hz", "re", "im"],
        &spec_rows,
    )?;
    eprintln!("nmrsim: wrote spectrum.csv to {}", args.out.display());
    Ok(())
}
