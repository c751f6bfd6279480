//! Command-line front end: scenario generation, both solve directions, the
//! bracketed planner, and the round-trip self-check.
//!
//! Exit codes are stable: 0 success, 2 input or precondition error,
//! 3 non-convergence, 4 I/O error. `LOADPOWER_MAX_THREADS` caps intra-solve
//! parallelism (default: hardware parallelism).

use crate::mappings::{load_map, MappingError};
use crate::model::{LoadVector, ModelError, NetworkModel, PowerVector};
use crate::scenario::{
    self, load_generator_spec, load_scenario, save_results, save_scenario, GeneratorSpec,
    ResultBundle, Scenario, ScenarioError,
};
use crate::solver::{
    inf_norm, inf_norm_diff, plan_power_for_load_increase, solve_load, solve_power,
    ConvergenceCriterion, FixedPointReport, PlanStatus, PlannerConfig, PlannerError, SolveStatus,
    SolverConfig,
};
use clap::{Args, Parser, Subcommand};
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

pub const EXIT_OK: u8 = 0;
pub const EXIT_INPUT: u8 = 2;
pub const EXIT_NONCONVERGENCE: u8 = 3;
pub const EXIT_IO: u8 = 4;

/// Accepted relative round-trip error for the self-check command.
const ROUNDTRIP_MAX_REL_ERROR: f64 = 1e-6;

#[derive(Parser, Debug)]
#[command(
    name = "loadpower",
    version,
    about = "Coupled load/power solver for LTE-like downlink networks"
)]
struct Cli {
    /// Print the effective solver settings along with results.
    #[arg(long, global = true)]
    verbose: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Generate a random scenario file.
    Gen(GenArgs),
    /// Compute the load induced by a per-RB power assignment.
    Load(SolveArgs),
    /// Compute the per-RB power assignment inducing a target load.
    Power(SolveArgs),
    /// Plan powers for a load increase, with a certified error bound.
    Plan(PlanArgs),
    /// Self-check: solve power -> load -> power and report the error.
    Roundtrip(RoundtripArgs),
}

#[derive(Args, Debug)]
struct GenArgs {
    /// Generator spec file (JSON); excludes the individual generator flags.
    #[arg(long)]
    spec: Option<PathBuf>,
    #[arg(long)]
    stations: Option<usize>,
    #[arg(long)]
    users: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Side of the square deployment area, meters.
    #[arg(long)]
    area_side: Option<f64>,
    #[arg(long)]
    pathloss_exponent: Option<f64>,
    /// Linear gain at 1 m.
    #[arg(long)]
    reference_gain: Option<f64>,
    /// Lower end of the uniform per-user demand range, bits/s.
    #[arg(long)]
    demand_min: Option<f64>,
    /// Upper end of the uniform per-user demand range, bits/s.
    #[arg(long)]
    demand_max: Option<f64>,
    /// Bandwidth per resource block, Hz.
    #[arg(long)]
    rb_bandwidth: Option<f64>,
    #[arg(long)]
    num_rb: Option<u64>,
    /// Noise power per resource block, W.
    #[arg(long)]
    noise_power: Option<f64>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args, Debug)]
struct SolveArgs {
    scenario: PathBuf,
    /// Per-station powers, comma-separated W per RB (load command).
    #[arg(long)]
    power: Option<String>,
    /// File holding the power vector (load command).
    #[arg(long)]
    power_file: Option<PathBuf>,
    /// Per-station target loads, comma-separated (power command).
    #[arg(long)]
    load: Option<String>,
    /// File holding the target load vector (power command).
    #[arg(long)]
    load_file: Option<PathBuf>,
    /// Convergence tolerance (∞-norm of successive iterate differences).
    #[arg(long, default_value_t = 1e-10)]
    tol: f64,
    #[arg(long, default_value_t = 100_000)]
    max_iter: usize,
    /// Write a machine-readable result file here.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct PlanArgs {
    scenario: PathBuf,
    /// Load profile induced by the current powers, comma-separated.
    #[arg(long)]
    current_load: Option<String>,
    /// File holding the current load vector.
    #[arg(long)]
    current_load_file: Option<PathBuf>,
    /// Current per-station powers, comma-separated W per RB.
    #[arg(long)]
    current_power: Option<String>,
    /// File holding the current power vector.
    #[arg(long)]
    current_power_file: Option<PathBuf>,
    /// Desired load profile; must dominate the current load componentwise.
    #[arg(long)]
    target_load: Option<String>,
    /// File holding the target load vector.
    #[arg(long)]
    target_load_file: Option<PathBuf>,
    /// Certified error target for the returned power assignment.
    #[arg(long, default_value_t = 1e-9)]
    epsilon: f64,
    #[arg(long, default_value_t = 100_000)]
    max_iter: usize,
    /// Accepted relative residual of the (current load, current power) pair.
    #[arg(long, default_value_t = 1e-6)]
    consistency_tol: f64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct RoundtripArgs {
    scenario: PathBuf,
    /// Per-station powers, comma-separated W per RB.
    #[arg(long)]
    power: Option<String>,
    /// File holding the power vector.
    #[arg(long)]
    power_file: Option<PathBuf>,
    /// Tolerance for both solves of the round trip.
    #[arg(long, default_value_t = 1e-10)]
    tol: f64,
    /// Write a machine-readable result file here.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug)]
enum CliError {
    Input(String),
    NonConvergence(String),
    Io(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Input(_) => EXIT_INPUT,
            CliError::NonConvergence(_) => EXIT_NONCONVERGENCE,
            CliError::Io(_) => EXIT_IO,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Input(m) | CliError::NonConvergence(m) | CliError::Io(m) => m,
        }
    }
}

impl From<ScenarioError> for CliError {
    fn from(e: ScenarioError) -> Self {
        match e {
            ScenarioError::InvalidSpec(_) => CliError::Input(e.to_string()),
            _ => CliError::Io(e.to_string()),
        }
    }
}

impl From<MappingError> for CliError {
    fn from(e: MappingError) -> Self {
        CliError::Input(e.to_string())
    }
}

impl From<ModelError> for CliError {
    fn from(e: ModelError) -> Self {
        CliError::Input(e.to_string())
    }
}

impl From<PlannerError> for CliError {
    fn from(e: PlannerError) -> Self {
        CliError::Input(e.to_string())
    }
}

/// Parse, execute, and translate the outcome to a stable exit code.
pub fn run() -> u8 {
    let cli = Cli::parse();
    if let Err(e) = init_thread_pool() {
        eprintln!("error: {}", e.message());
        return e.code();
    }
    match execute(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {}", e.message());
            e.code()
        }
    }
}

fn init_thread_pool() -> Result<(), CliError> {
    match std::env::var("LOADPOWER_MAX_THREADS") {
        Ok(raw) => {
            let threads: usize = raw.parse().map_err(|_| {
                CliError::Input(format!("LOADPOWER_MAX_THREADS must be a positive integer, got \"{raw}\""))
            })?;
            if threads == 0 {
                return Err(CliError::Input(
                    "LOADPOWER_MAX_THREADS must be >= 1".to_string(),
                ));
            }
            rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build_global()
                .map_err(|e| CliError::Input(format!("failed to set thread cap: {e}")))
        }
        Err(std::env::VarError::NotPresent) => Ok(()),
        Err(e) => Err(CliError::Input(format!("LOADPOWER_MAX_THREADS: {e}"))),
    }
}

fn execute(cli: Cli) -> Result<u8, CliError> {
    match cli.command {
        Command::Gen(args) => cmd_gen(args),
        Command::Load(args) => cmd_load(args, cli.verbose),
        Command::Power(args) => cmd_power(args, cli.verbose),
        Command::Plan(args) => cmd_plan(args, cli.verbose),
        Command::Roundtrip(args) => cmd_roundtrip(args, cli.verbose),
    }
}

fn cmd_gen(args: GenArgs) -> Result<u8, CliError> {
    let flags_given = args.stations.is_some()
        || args.users.is_some()
        || args.seed.is_some()
        || args.area_side.is_some()
        || args.pathloss_exponent.is_some()
        || args.reference_gain.is_some()
        || args.demand_min.is_some()
        || args.demand_max.is_some()
        || args.rb_bandwidth.is_some()
        || args.num_rb.is_some()
        || args.noise_power.is_some();

    let spec = match &args.spec {
        Some(_) if flags_given => {
            return Err(CliError::Input(
                "ambiguous: both --spec and individual generator flags given".to_string(),
            ))
        }
        Some(path) => load_generator_spec(path)?,
        None => {
            let defaults = GeneratorSpec::default();
            GeneratorSpec {
                num_stations: args
                    .stations
                    .ok_or_else(|| CliError::Input("missing --stations (or --spec)".to_string()))?,
                num_users: args
                    .users
                    .ok_or_else(|| CliError::Input("missing --users (or --spec)".to_string()))?,
                area_side: args.area_side.unwrap_or(defaults.area_side),
                pathloss_exponent: args
                    .pathloss_exponent
                    .unwrap_or(defaults.pathloss_exponent),
                reference_gain: args.reference_gain.unwrap_or(defaults.reference_gain),
                demand_range: (
                    args.demand_min.unwrap_or(defaults.demand_range.0),
                    args.demand_max.unwrap_or(defaults.demand_range.1),
                ),
                rb_bandwidth: args.rb_bandwidth.unwrap_or(defaults.rb_bandwidth),
                num_rb: args.num_rb.unwrap_or(defaults.num_rb),
                noise_power: args.noise_power.unwrap_or(defaults.noise_power),
                rng_seed: args.seed.unwrap_or(defaults.rng_seed),
            }
        }
    };

    let model = scenario::generate(&spec)?;
    let stations = model.num_stations();
    let users = model.num_users();
    save_scenario(&Scenario::from_model(model), &args.out)?;
    println!(
        "wrote {} ({} stations, {} users, seed {})",
        args.out.display(),
        stations,
        users,
        spec.rng_seed
    );
    Ok(EXIT_OK)
}

fn cmd_load(args: SolveArgs, verbose: bool) -> Result<u8, CliError> {
    let model = load_valid_model(&args.scenario)?;
    let power_values = resolve_vector("power", &args.power, &args.power_file)?;
    if let Some(i) = power_values.iter().position(|&p| p == 0.0) {
        return Err(CliError::Input(format!(
            "zero serving power at station {}",
            i + 1
        )));
    }
    let config = solver_config(args.tol, args.max_iter)?;
    print_config(verbose, &config);

    let power = PowerVector::new(power_values);
    let report = solve_load(&model, &power, &config, None)?;
    let load = LoadVector::new(report.solution.clone());
    let total = model.total_power(&load, &power)?;

    println!("station  load                operational  total_power_w");
    for (i, (nu, tp)) in load.values().iter().zip(&total).enumerate() {
        println!(
            "{:>7}  {:<18.12}  {:<11}  {:.12e}",
            i + 1,
            nu,
            if *nu <= 1.0 { "yes" } else { "no" },
            tp
        );
    }
    print_solve_summary(&report);

    if let Some(out) = &args.out {
        let mut bundle = solve_bundle("load", &report, &config);
        bundle.load = Some(report.solution.clone());
        bundle.operational = Some(load.is_operational());
        bundle.total_power = Some(total);
        save_results(&bundle, out)?;
    }
    finish_solve(&report)
}

fn cmd_power(args: SolveArgs, verbose: bool) -> Result<u8, CliError> {
    let model = load_valid_model(&args.scenario)?;
    let target_values = resolve_vector("load", &args.load, &args.load_file)?;
    let config = solver_config(args.tol, args.max_iter)?;
    print_config(verbose, &config);

    let target = LoadVector::new(target_values);
    let report = solve_power(&model, &target, &config, None)?;
    let power = PowerVector::new(report.solution.clone());

    println!("station  power_w_per_rb");
    for (i, p) in power.values().iter().enumerate() {
        println!("{:>7}  {:.12e}", i + 1, p);
    }
    print_solve_summary(&report);

    if report.status == SolveStatus::Converged {
        // Feed the powers back through the load direction; a large deviation
        // means the returned assignment does not actually induce the target.
        let induced = load_map(&model, &power, &target)?;
        let deviation = inf_norm_diff(induced.output(), target.values());
        let scale = target
            .values()
            .iter()
            .zip(power.values())
            .map(|(nu, p)| nu / p)
            .fold(0.0f64, f64::max);
        let threshold = 10.0 * config.tolerance * scale.max(1.0);
        if deviation > threshold {
            eprintln!(
                "warning: induced load deviates from the target by {deviation:.3e} \
                 (threshold {threshold:.3e})"
            );
        }
    }

    if let Some(out) = &args.out {
        let mut bundle = solve_bundle("power", &report, &config);
        bundle.power = Some(report.solution.clone());
        save_results(&bundle, out)?;
    }
    finish_solve(&report)
}

fn cmd_plan(args: PlanArgs, verbose: bool) -> Result<u8, CliError> {
    let model = load_valid_model(&args.scenario)?;
    let current_load = LoadVector::new(resolve_vector(
        "current-load",
        &args.current_load,
        &args.current_load_file,
    )?);
    let current_power = PowerVector::new(resolve_vector(
        "current-power",
        &args.current_power,
        &args.current_power_file,
    )?);
    let target_load = LoadVector::new(resolve_vector(
        "target-load",
        &args.target_load,
        &args.target_load_file,
    )?);
    if !args.epsilon.is_finite() || args.epsilon <= 0.0 {
        return Err(CliError::Input("--epsilon must be > 0".to_string()));
    }
    if !args.consistency_tol.is_finite() || args.consistency_tol <= 0.0 {
        return Err(CliError::Input("--consistency-tol must be > 0".to_string()));
    }
    let config = PlannerConfig {
        epsilon: args.epsilon,
        max_iterations: Some(args.max_iter),
        consistency_tol: args.consistency_tol,
        record_trace: false,
    };
    if verbose {
        println!(
            "config: epsilon={:e} max_iterations={} consistency_tol={:e}",
            config.epsilon, args.max_iter, config.consistency_tol
        );
    }

    let report =
        plan_power_for_load_increase(&model, &current_load, &current_power, &target_load, &config)?;
    let estimate = &report.power_estimate;
    let before = model.total_power(&current_load, &current_power)?;
    let after = model.total_power(&target_load, estimate)?;
    let deltas: Vec<f64> = after.iter().zip(&before).map(|(a, b)| a - b).collect();

    println!("station  power_w_per_rb      energy_before_w     energy_after_w      delta_w");
    for i in 0..model.num_stations() {
        println!(
            "{:>7}  {:.12e}  {:.12e}  {:.12e}  {:+.6e}",
            i + 1,
            estimate.values()[i],
            before[i],
            after[i],
            deltas[i]
        );
    }
    println!(
        "certified error {:.6e} after {} iterations ({})",
        report.certified_error,
        report.iterations,
        report.status.as_str()
    );

    if let Some(out) = &args.out {
        let mut bundle =
            ResultBundle::new("plan", report.status.as_str(), report.iterations as u64);
        bundle.epsilon = Some(config.epsilon);
        bundle.max_iterations = Some(args.max_iter as u64);
        bundle.certified_error = Some(report.certified_error);
        bundle.power = Some(estimate.values().to_vec());
        bundle.energy_before = Some(before);
        bundle.energy_after = Some(after);
        bundle.energy_delta = Some(deltas);
        save_results(&bundle, out)?;
    }
    match report.status {
        PlanStatus::PrecisionReached => Ok(EXIT_OK),
        PlanStatus::MaxIterationsReached => {
            eprintln!("status: MaxIterationsReached");
            Ok(EXIT_NONCONVERGENCE)
        }
    }
}

fn cmd_roundtrip(args: RoundtripArgs, verbose: bool) -> Result<u8, CliError> {
    let model = load_valid_model(&args.scenario)?;
    let power_values = resolve_vector("power", &args.power, &args.power_file)?;
    let config = solver_config(args.tol, 100_000)?;
    print_config(verbose, &config);

    let power = PowerVector::new(power_values);
    let forward = solve_load(&model, &power, &config, None)?;
    if forward.status != SolveStatus::Converged {
        return Err(CliError::NonConvergence(format!(
            "load solve failed: {}",
            forward.status.as_str()
        )));
    }
    let induced = LoadVector::new(forward.solution.clone());
    let backward = solve_power(&model, &induced, &config, None)?;
    if backward.status != SolveStatus::Converged {
        return Err(CliError::NonConvergence(format!(
            "power solve failed: {}",
            backward.status.as_str()
        )));
    }
    let rel_error = inf_norm_diff(&backward.solution, power.values()) / inf_norm(power.values());
    println!("round-trip relative error {rel_error:.6e}");

    if let Some(out) = &args.out {
        let mut bundle = ResultBundle::new(
            "roundtrip",
            "Converged",
            (forward.iterations + backward.iterations) as u64,
        );
        bundle.tolerance = Some(config.tolerance);
        bundle.load = Some(forward.solution);
        bundle.power = Some(backward.solution);
        bundle.roundtrip_error = Some(rel_error);
        save_results(&bundle, out)?;
    }
    if rel_error <= ROUNDTRIP_MAX_REL_ERROR {
        Ok(EXIT_OK)
    } else {
        eprintln!("round-trip error {rel_error:.3e} exceeds {ROUNDTRIP_MAX_REL_ERROR:.0e}");
        Ok(EXIT_NONCONVERGENCE)
    }
}

fn load_valid_model(path: &Path) -> Result<NetworkModel, CliError> {
    let scenario = load_scenario(path)?;
    let validation = scenario.model.validate();
    if !validation.is_ok() {
        let mut msg = String::from("invalid scenario:");
        for v in validation.violations() {
            let _ = write!(msg, "\n  {v}");
        }
        return Err(CliError::Input(msg));
    }
    Ok(scenario.model)
}

fn solver_config(tol: f64, max_iter: usize) -> Result<SolverConfig, CliError> {
    if !tol.is_finite() || tol <= 0.0 {
        return Err(CliError::Input("--tol must be > 0".to_string()));
    }
    if max_iter == 0 {
        return Err(CliError::Input("--max-iter must be >= 1".to_string()));
    }
    Ok(SolverConfig {
        tolerance: tol,
        max_iterations: max_iter,
        ..SolverConfig::default()
    })
}

fn print_config(verbose: bool, config: &SolverConfig) {
    if verbose {
        let criterion = match config.criterion {
            ConvergenceCriterion::Absolute => "absolute",
            ConvergenceCriterion::Relative => "relative",
        };
        println!(
            "config: tolerance={:e} max_iterations={} divergence_cap={:e} criterion={criterion} threads={}",
            config.tolerance,
            config.max_iterations,
            config.divergence_cap,
            std::env::var("LOADPOWER_MAX_THREADS").unwrap_or_else(|_| "default".to_string())
        );
    }
}

fn print_solve_summary(report: &FixedPointReport) {
    println!(
        "residual {:.6e} after {} iterations ({})",
        report.residual,
        report.iterations,
        report.status.as_str()
    );
}

fn solve_bundle(command: &str, report: &FixedPointReport, config: &SolverConfig) -> ResultBundle {
    let mut bundle = ResultBundle::new(command, report.status.as_str(), report.iterations as u64);
    bundle.tolerance = Some(config.tolerance);
    bundle.max_iterations = Some(config.max_iterations as u64);
    bundle.divergence_cap = Some(config.divergence_cap);
    bundle.residual = Some(report.residual);
    bundle
}

fn finish_solve(report: &FixedPointReport) -> Result<u8, CliError> {
    match report.status {
        SolveStatus::Converged => Ok(EXIT_OK),
        status => {
            eprintln!("status: {}", status.as_str());
            Ok(EXIT_NONCONVERGENCE)
        }
    }
}

fn resolve_vector(
    name: &str,
    inline: &Option<String>,
    file: &Option<PathBuf>,
) -> Result<Vec<f64>, CliError> {
    match (inline, file) {
        (Some(_), Some(_)) => Err(CliError::Input(format!(
            "ambiguous: both --{name} and --{name}-file given"
        ))),
        (None, None) => Err(CliError::Input(format!(
            "missing --{name} or --{name}-file"
        ))),
        (Some(text), None) => parse_vector(name, text),
        (None, Some(path)) => {
            let text = std::fs::read_to_string(path).map_err(|e| {
                CliError::Io(format!("failed to read {}: {e}", path.display()))
            })?;
            parse_vector(name, &text)
        }
    }
}

fn parse_vector(name: &str, text: &str) -> Result<Vec<f64>, CliError> {
    let values: Result<Vec<f64>, _> = text
        .split(|c: char| c == ',' || c.is_whitespace())
        .filter(|s| !s.is_empty())
        .map(str::parse::<f64>)
        .collect();
    let values = values
        .map_err(|e| CliError::Input(format!("failed to parse --{name} vector: {e}")))?;
    if values.is_empty() {
        return Err(CliError::Input(format!("--{name} vector is empty")));
    }
    Ok(values)
}
