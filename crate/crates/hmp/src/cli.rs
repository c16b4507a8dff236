//! Command-line front end.
//!
//! Exit status: 0 on success, 1 when an input fails validation or has no
//! acceptable answer, 2 on usage errors and unreadable files. Machine output
//! goes to files given with `--out`; summaries go to standard output and
//! diagnostics to standard error.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use hmp_core::evaluation::DayLoad;
use hmp_core::{evaluate, Instance, MaintenanceLevel, OracleLimits, SaParams};

use crate::generator::{generate, GeneratorConfig};
use crate::instance_io::{parse_instance, serialize_instance};
use crate::parallel::{solve_exact_parallel, solve_parallel};
use crate::params::parse_params;
use crate::schedule_io::{parse_schedule, ScheduleReport};
use crate::Error;

#[derive(Debug, Parser)]
#[command(name = "hmp", version, about = "Fleet high-level maintenance planner")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Plan deliveries with simulated annealing.
    Solve(SolveArgs),
    /// Enumerate every schedule of a small instance for the exact optimum.
    Oracle(OracleArgs),
    /// Check an instance, and optionally a schedule against it.
    Validate(ValidateArgs),
    /// Write a random instance.
    Generate(GenerateArgs),
    /// Per-day occupancy series of a schedule as CSV.
    Report(ReportArgs),
    /// Print each train's delivery window.
    Windows(WindowsArgs),
}

#[derive(Debug, Args)]
struct SolveArgs {
    instance: PathBuf,
    /// Seed of the random number generator; overrides the parameter file.
    #[arg(long)]
    seed: Option<u64>,
    /// Annealing parameters (TOML).
    #[arg(long)]
    params: Option<PathBuf>,
    /// Schedule report (JSON).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Per-temperature trace of the best restart (CSV).
    #[arg(long)]
    trace: Option<PathBuf>,
    /// Independent searches; the best is kept.
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u32).range(1..))]
    restarts: u32,
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..))]
    threads: u64,
}

#[derive(Debug, Args)]
struct OracleArgs {
    instance: PathBuf,
    /// Refuse instances with more candidate schedules than this.
    #[arg(long, default_value_t = 10_000_000)]
    max_nodes: u128,
    /// Score every complete schedule instead of cutting violated branches.
    #[arg(long)]
    no_prune: bool,
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..))]
    threads: u64,
    /// Schedule report of the optimum (JSON).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct ValidateArgs {
    instance: PathBuf,
    /// Schedule report (JSON) to check against the instance.
    #[arg(long)]
    schedule: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct GenerateArgs {
    /// Generator configuration (TOML); preset defaults otherwise.
    #[arg(long, conflicts_with = "preset")]
    config: Option<PathBuf>,
    /// `fleet` (40 trains, one year) or `small` (6 trains, 40 days).
    #[arg(long, default_value = "fleet", value_parser = ["fleet", "small"])]
    preset: String,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    fleet_size: Option<usize>,
    #[arg(long)]
    horizon: Option<i64>,
    /// Instance file to write; standard output otherwise.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct ReportArgs {
    instance: PathBuf,
    schedule: PathBuf,
    /// CSV file to write; standard output otherwise.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct WindowsArgs {
    instance: PathBuf,
}

/// Failure of a subcommand, mapped to the exit status.
enum Failure {
    Usage(String),
    Invalid(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Invalid(e.to_string())
    }
}

impl From<hmp_core::Error> for Failure {
    fn from(e: hmp_core::Error) -> Self {
        Failure::Invalid(e.to_string())
    }
}

type Outcome = Result<(), Failure>;

/// Runs one invocation and returns the exit status.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                let _ = err.write_all(text.as_bytes());
                2
            } else {
                let _ = out.write_all(text.as_bytes());
                0
            };
        }
    };
    let result = match cli.command {
        Command::Solve(a) => solve_cmd(a, out),
        Command::Oracle(a) => oracle_cmd(a, out),
        Command::Validate(a) => validate_cmd(a, out),
        Command::Generate(a) => generate_cmd(a, out),
        Command::Report(a) => report_cmd(a, out),
        Command::Windows(a) => windows_cmd(a, out),
    };
    match result {
        Ok(()) => 0,
        Err(Failure::Usage(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            2
        }
        Err(Failure::Invalid(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            1
        }
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path)
        .map_err(|e| Failure::Usage(format!("cannot read {}: {e}", path.display())))
}

fn write_file(path: &Path, text: &str) -> Outcome {
    std::fs::write(path, text)
        .map_err(|e| Failure::Usage(format!("cannot write {}: {e}", path.display())))
}

fn emit(out: &mut dyn Write, text: &str) -> Outcome {
    out.write_all(text.as_bytes())
        .map_err(|e| Failure::Usage(format!("cannot write output: {e}")))
}

fn load_instance(path: &Path) -> Result<Instance, Failure> {
    let text = read(path)?;
    parse_instance(&text).map_err(|e| Failure::Invalid(format!("{}: {e}", path.display())))
}

fn model_line(instance: &Instance) -> String {
    let size = instance.model_size();
    format!(
        "model: {} trains, horizon {} days, {} decision variables, {} constraints\n",
        instance.fleet_size(),
        instance.horizon(),
        size.variables,
        size.constraints
    )
}

fn loss_note(loss: f64) -> &'static str {
    if loss < 0.0 {
        "note: total loss is negative; deliveries after mileage expiry outweigh early ones\n"
    } else {
        ""
    }
}

fn solve_cmd(a: SolveArgs, out: &mut dyn Write) -> Outcome {
    let instance = load_instance(&a.instance)?;
    let mut params = match &a.params {
        Some(p) => parse_params(&read(p)?)
            .map_err(|e| Failure::Invalid(format!("{}: {e}", p.display())))?,
        None => SaParams::default(),
    };
    if let Some(seed) = a.seed {
        params.seed = seed;
    }
    let result = solve_parallel(&instance, &params, a.restarts, a.threads as usize)?;
    let report = ScheduleReport::new(&instance, &result.best_schedule, &result.best_evaluation)?;

    let mut text = model_line(&instance);
    let _ = writeln!(
        text,
        "search: seed {}, {} restart(s), best from stream {}, {} temperatures, {} evaluations, stop: {}",
        params.seed,
        a.restarts,
        result.stream,
        result.trace.len(),
        result.evaluations,
        result.stop_reason.as_str()
    );
    let _ = writeln!(
        text,
        "energy: {} (initial temperature {:.6})",
        result.best_energy, result.initial_temperature
    );
    text.push_str(&report.to_table());
    text.push_str(loss_note(report.summary.mileage_loss_train_km));
    emit(out, &text)?;

    if let Some(path) = &a.out {
        write_file(path, &report.to_json())?;
    }
    if let Some(path) = &a.trace {
        let mut csv = String::from(
            "step,temperature,mean_energy,acceptance_rate,generated,accepted,best_energy\n",
        );
        for (i, s) in result.trace.iter().enumerate() {
            let _ = writeln!(
                csv,
                "{i},{},{},{},{},{},{}",
                s.temperature,
                s.mean_energy,
                s.acceptance_rate,
                s.generated,
                s.accepted,
                s.best_energy
            );
        }
        write_file(path, &csv)?;
    }
    Ok(())
}

fn oracle_cmd(a: OracleArgs, out: &mut dyn Write) -> Outcome {
    let instance = load_instance(&a.instance)?;
    let limits = OracleLimits {
        max_nodes: a.max_nodes,
        prune: !a.no_prune,
    };
    let r = solve_exact_parallel(&instance, &limits, a.threads as usize)?;
    let mut text = model_line(&instance);
    let _ = writeln!(
        text,
        "searched {} schedules, {} feasible, {} scored",
        r.searched_count, r.feasible_count, r.leaves_evaluated
    );
    let Some(optimum) = r.optimum else {
        text.push_str("no feasible schedule\n");
        emit(out, &text)?;
        return Err(Failure::Invalid(format!(
            "{}: instance is infeasible",
            a.instance.display()
        )));
    };
    let evaluation = evaluate(&instance, &optimum)?;
    let report = ScheduleReport::new(&instance, &optimum, &evaluation)?;
    text.push_str(&report.to_table());
    text.push_str(loss_note(report.summary.mileage_loss_train_km));
    emit(out, &text)?;
    if let Some(path) = &a.out {
        write_file(path, &report.to_json())?;
    }
    Ok(())
}

fn validate_cmd(a: ValidateArgs, out: &mut dyn Write) -> Outcome {
    let instance = load_instance(&a.instance)?;
    let mut text = format!("{}: ok\n", a.instance.display());
    text.push_str(&model_line(&instance));
    if let Some(path) = &a.schedule {
        let schedule = parse_schedule(&read(path)?, &instance)
            .map_err(|e| Failure::Invalid(format!("{}: {e}", path.display())))?;
        let e = evaluate(&instance, &schedule)?;
        if !e.feasible {
            emit(out, &text)?;
            return Err(Failure::Invalid(format!(
                "{}: schedule violates the limits (rate {:.6}, acceptance {}, capacity {})",
                path.display(),
                e.rate_total(),
                e.acceptance_total(),
                e.capacity_total()
            )));
        }
        let _ = writeln!(
            text,
            "{}: ok, feasible, total loss {:.1} train-km",
            path.display(),
            e.mileage_loss
        );
    }
    emit(out, &text)
}

fn generate_cmd(a: GenerateArgs, out: &mut dyn Write) -> Outcome {
    let mut config = match &a.config {
        Some(p) => {
            let text = read(p)?;
            toml::from_str::<GeneratorConfig>(&text).map_err(|e| {
                Failure::Invalid(format!("{}: {}", p.display(), Error::from_toml(&text, e)))
            })?
        }
        None if a.preset == "small" => GeneratorConfig::small(0),
        None => GeneratorConfig::default(),
    };
    if let Some(seed) = a.seed {
        config.seed = seed;
    }
    if let Some(n) = a.fleet_size {
        config.fleet_size = n;
    }
    if let Some(t) = a.horizon {
        config.horizon_day = t;
        config.expiry_day_range[1] = config.expiry_day_range[1].min(t);
    }
    let data = generate(&config)?;
    let text = serialize_instance(&data);
    match &a.out {
        Some(path) => write_file(path, &text),
        None => emit(out, &text),
    }
}

fn report_cmd(a: ReportArgs, out: &mut dyn Write) -> Outcome {
    let instance = load_instance(&a.instance)?;
    let schedule = parse_schedule(&read(&a.schedule)?, &instance)
        .map_err(|e| Failure::Invalid(format!("{}: {e}", a.schedule.display())))?;
    let load = DayLoad::from_schedule(&instance, &schedule);
    let n = instance.fleet_size() as f64;
    let mut csv = String::from(
        "day,in_maintenance,maintenance_rate,max_rate,deliveries,daily_acceptance,level_iii,level_iv,level_v,capacity_excess\n",
    );
    for day in 0..=instance.horizon() {
        let d = day as usize;
        let by = load.by_level[d];
        let _ = writeln!(
            csv,
            "{day},{},{},{},{},{},{},{},{},{}",
            load.in_maintenance[d],
            load.in_maintenance[d] as f64 / n,
            instance.rate_limit(day),
            load.deliveries[d],
            instance.daily_acceptance(),
            by[MaintenanceLevel::III.index()],
            by[MaintenanceLevel::IV.index()],
            by[MaintenanceLevel::V.index()],
            load.capacity_excess(&instance, day)
        );
    }
    match &a.out {
        Some(path) => write_file(path, &csv),
        None => emit(out, &csv),
    }
}

fn windows_cmd(a: WindowsArgs, out: &mut dyn Write) -> Outcome {
    let instance = load_instance(&a.instance)?;
    let id_w = instance
        .trains()
        .iter()
        .map(|t| t.id.len())
        .max()
        .unwrap_or(0);
    let mut text = String::new();
    for (t, w) in instance.trains().iter().zip(instance.windows()) {
        let _ = writeln!(
            text,
            "{:<id_w$}  {:<3}  expired {:>4}  {w}",
            t.id, t.level, t.expired_day
        );
    }
    emit(out, &text)
}
