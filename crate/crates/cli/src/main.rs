//! `epm`: check, solve and reduce finite-horizon games with imperfect
//! monitoring from JSON configuration documents.

mod commands;
mod config;
mod error;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use epm_core::scenarios::{Scenario, ScenarioParams};
use serde::Serialize;

use crate::commands::Finished;
use crate::config::{Mode, Overrides, Resolved};
use crate::error::CliError;
use crate::report::{write_atomic, Format, Report, Status, Table};

const SCHEMA: &str = include_str!("../schema/config.schema.json");

#[derive(Parser)]
#[command(name = "epm", version, about = "Exact analysis of finite-horizon games with imperfect monitoring")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    flags: Flags,
}

#[derive(Args)]
struct Flags {
    /// Game configuration document (JSON).
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Grid precision, as `p/q` or a decimal.
    #[arg(long, global = true, value_name = "Q")]
    epsilon: Option<String>,
    #[arg(long, global = true, value_enum)]
    mode: Option<Mode>,
    #[arg(long, global = true, value_name = "U64")]
    seed: Option<u64>,
    /// Largest normal-form matrix the brute-force oracle may build.
    #[arg(long = "cap-matrix", global = true, value_name = "N")]
    cap_matrix: Option<usize>,
    /// Write the report here (atomically) instead of standard output.
    #[arg(long, global = true, value_name = "PATH")]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Add wall-clock time to the report; makes output non-reproducible.
    #[arg(long, global = true)]
    timing: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Perfect recall, eventual perfect monitoring and observation stages.
    Check,
    /// Exact value by the sequence form, cross-checked by brute force.
    Value,
    /// Auxiliary-game value and the sandwich of inequalities around it.
    Reduce,
    /// Monte Carlo coupling experiment against the exact bound.
    #[command(alias = "simulate")]
    Couple {
        #[arg(long)]
        samples: Option<usize>,
    },
    /// Run the fixtures of a stay/leave scenario.
    Example(ExampleArgs),
    /// Print the JSON schema of configuration documents.
    Schema,
}

#[derive(Args)]
struct ExampleArgs {
    /// example1, example2 or example3.
    scenario: String,
    /// Run a single fixture.
    #[arg(long)]
    fixture: Option<String>,
    #[arg(long)]
    delay: Option<usize>,
    #[arg(long)]
    horizon: Option<usize>,
    #[arg(long = "leave-by")]
    leave_by: Option<usize>,
    /// Random strategies per battery.
    #[arg(long)]
    battery: Option<usize>,
}

fn resolve(flags: &Flags, samples: Option<usize>) -> Result<Resolved, CliError> {
    let path = flags
        .config
        .as_ref()
        .ok_or_else(|| CliError::Config("this command needs --config PATH".into()))?;
    let overrides = Overrides {
        mode: flags.mode,
        epsilon: flags.epsilon.clone(),
        seed: flags.seed,
        cap_matrix: flags.cap_matrix,
        samples,
    };
    config::load(path)?.resolve(&overrides)
}

fn emit<C: Serialize, R: Serialize + Table>(
    command: &'static str,
    config: C,
    done: Finished<R>,
    flags: &Flags,
    start: Instant,
) -> Result<u8, CliError> {
    let status = done.status();
    let report = Report {
        command,
        status,
        config,
        result: done.result,
        diagnostics: done.diagnostics,
        elapsed_ms: flags.timing.then(|| start.elapsed().as_millis() as u64),
    };
    let text = report.render(flags.format)?;
    match &flags.out {
        Some(path) => write_atomic(path, &text)?,
        None => print!("{text}"),
    }
    Ok(match status {
        Status::Ok => 0,
        Status::AssertionFailed => 1,
    })
}

fn run(cli: Cli) -> Result<u8, CliError> {
    let start = Instant::now();
    let flags = &cli.flags;
    match cli.command {
        Command::Check => {
            let cfg = resolve(flags, None)?;
            emit("check", &cfg.document, commands::check(&cfg)?, flags, start)
        }
        Command::Value => {
            let cfg = resolve(flags, None)?;
            emit("value", &cfg.document, commands::value(&cfg)?, flags, start)
        }
        Command::Reduce => {
            let cfg = resolve(flags, None)?;
            emit("reduce", &cfg.document, commands::reduce(&cfg)?, flags, start)
        }
        Command::Couple { samples } => {
            let cfg = resolve(flags, samples)?;
            emit("couple", &cfg.document, commands::couple(&cfg)?, flags, start)
        }
        Command::Example(args) => {
            let scenario: Scenario = args.scenario.parse()?;
            let defaults = ScenarioParams::default();
            let params = ScenarioParams {
                delay: args.delay.unwrap_or(defaults.delay),
                horizon: args.horizon,
                leave_by: args.leave_by,
                battery: args.battery.unwrap_or(defaults.battery),
                seed: flags.seed.unwrap_or(defaults.seed),
            };
            let (config, done) = commands::example(scenario, &params, args.fixture.as_deref())?;
            emit("example", config, done, flags, start)
        }
        Command::Schema => {
            match &flags.out {
                Some(path) => write_atomic(path, SCHEMA)?,
                None => print!("{SCHEMA}"),
            }
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
