use clap::{Args, Parser, Subcommand, ValueEnum};
use std::path::PathBuf;
use std::process::ExitCode;

use privcache::commands::{cmd_analyze, cmd_bounds, cmd_simulate, cmd_verify};
use privcache::report::Provenance;
use privcache::scenario::{LoadedScenario, ModeSpec, load_scenario, parse_demand_list};
use privcache::{CliError, CliResult};

/// Cache-aided private variable-length coding: bound reports, exact
/// zero-leakage verification, and seeded simulation.
#[derive(Parser)]
#[command(name = "privcache", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate every length bound per demand and the worst case over demands
    Bounds(CommonArgs),
    /// Exhaustively verify losslessness and exact zero leakage
    Verify(CommonArgs),
    /// Seeded Monte Carlo simulation of the encoder and decoder
    Simulate(CommonArgs),
    /// Full pipeline report: coupling, verification, and bounds
    Analyze(CommonArgs),
}

#[derive(Args)]
struct CommonArgs {
    /// Scenario description (JSON)
    scenario: PathBuf,

    /// Restrict to specific 1-based demand vectors, e.g. --demands 1,2
    /// (repeat the flag for several vectors)
    #[arg(long)]
    demands: Vec<String>,

    /// Seed override for sampling commands
    #[arg(long)]
    seed: Option<u64>,

    /// Mode override: "exact" or "mc:<samples>"
    #[arg(long)]
    mode: Option<String>,

    /// Report format
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,

    /// Test-only: skip the pad on the private symbol so the leakage check
    /// has something to catch
    #[arg(long = "no-otp")]
    no_otp: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Csv,
}

fn apply_overrides(loaded: &mut LoadedScenario, args: &CommonArgs) -> CliResult<()> {
    if !args.demands.is_empty() {
        let mut vectors = Vec::new();
        for spec in &args.demands {
            let v: Result<Vec<usize>, _> =
                spec.split(',').map(|s| s.trim().parse::<usize>()).collect();
            vectors.push(v.map_err(|_| {
                CliError::Validation(format!("--demands {spec:?} is not a comma-separated vector"))
            })?);
        }
        loaded.demands = parse_demand_list(&loaded.scenario, &vectors)?;
    }
    match args.mode.as_deref() {
        None => {}
        Some("exact") => loaded.mode = ModeSpec::Exact,
        Some(m) => {
            let samples = m
                .strip_prefix("mc:")
                .and_then(|n| n.parse::<u64>().ok())
                .ok_or_else(|| {
                    CliError::Validation(format!(
                        "--mode {m:?} is neither \"exact\" nor \"mc:<samples>\""
                    ))
                })?;
            let seed = args.seed.or(match loaded.mode {
                ModeSpec::Montecarlo { seed, .. } => Some(seed),
                ModeSpec::Exact => None,
            });
            let seed = seed.ok_or_else(|| {
                CliError::Validation("sampling mode needs --seed or a configured seed".into())
            })?;
            loaded.mode = ModeSpec::Montecarlo { samples, seed };
        }
    }
    if let (Some(seed), ModeSpec::Montecarlo { samples, .. }) = (args.seed, loaded.mode) {
        loaded.mode = ModeSpec::Montecarlo { samples, seed };
    }
    Ok(())
}

fn run(cli: Cli) -> CliResult<(String, bool)> {
    let (name, args) = match &cli.command {
        Command::Bounds(a) => ("bounds", a),
        Command::Verify(a) => ("verify", a),
        Command::Simulate(a) => ("simulate", a),
        Command::Analyze(a) => ("analyze", a),
    };
    let mut loaded = load_scenario(&args.scenario)?;
    apply_overrides(&mut loaded, args)?;
    let seed = match loaded.mode {
        ModeSpec::Montecarlo { seed, .. } => Some(seed),
        ModeSpec::Exact => args.seed,
    };
    let provenance = Provenance::new(name, &loaded.config_bytes, seed);
    let (report, failed) = match &cli.command {
        Command::Bounds(_) => (cmd_bounds(&loaded, provenance)?, false),
        Command::Verify(_) => cmd_verify(&loaded, provenance, !args.no_otp)?,
        Command::Simulate(_) => cmd_simulate(&loaded, provenance)?,
        Command::Analyze(_) => cmd_analyze(&loaded, provenance, !args.no_otp)?,
    };
    let rendered = match args.format {
        Format::Json => report.to_json(),
        Format::Csv => report.to_csv(),
    };
    Ok((rendered, failed))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok((rendered, failed)) => {
            print!("{rendered}");
            if failed {
                eprintln!("verification failed: see the report above");
                ExitCode::from(3)
            } else {
                ExitCode::SUCCESS
            }
        }
        Err(e) => {
            eprintln!("{e}");
            ExitCode::from(e.exit_code())
        }
    }
}
