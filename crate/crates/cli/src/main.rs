use std::fs::File;
use std::io::{self, BufReader, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use feelsim_core::scenario::SweepParam;
use feelsim_core::{
    recall_probability, recall_probability_enum, run_scenario, scenario, sweep, CueSpec, Error,
    Grid, NoiseModel, ScenarioConfig, SeedScheme,
};

/// Analytic and enumerated probabilities must agree to this bound.
const ORACLE_TOLERANCE: f64 = 1e-12;

const EXIT_FAILURE: u8 = 1;
const EXIT_VALIDATION: u8 = 2;
const EXIT_ORACLE_MISMATCH: u8 = 3;

#[derive(Parser)]
#[command(
    name = "feelsim",
    version,
    about = "Feeling-of-knowing and emotional background simulator"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one scenario and write its JSON Lines event log.
    Run {
        /// Builtin scenario name or path to a TOML config.
        #[arg(long)]
        config: String,
        /// Overrides the config's seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Output file; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Single-attempt recall probability of a memory cell.
    Prob {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        p: f64,
        #[arg(long, default_value_t = 0.0)]
        theta: f64,
        #[arg(long, default_value = "flip")]
        model: String,
        /// Also enumerate all damage patterns and check agreement.
        #[arg(long = "enum")]
        enumerate: bool,
    },
    /// Sweep parameters over a grid and write a CSV table.
    Sweep {
        #[arg(long)]
        config: String,
        /// TOML file of `parameter = [values]` lines.
        #[arg(long)]
        grid: PathBuf,
        #[arg(long, default_value_t = 100)]
        runs: usize,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Reuse the same run seeds at every grid point.
        #[arg(long)]
        paired: bool,
    },
    /// Summarize a JSON Lines event log.
    Summarize {
        #[arg(long)]
        log: PathBuf,
    },
    /// List builtin scenarios and sweepable parameters.
    List,
}

fn output(path: Option<&PathBuf>) -> Result<Box<dyn Write>, Error> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

enum Failure {
    Error(Error),
    OracleMismatch(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Error(e)
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Error(e.into())
    }
}

fn execute(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Run { config, seed, out } => {
            let mut cfg = ScenarioConfig::load(&config)?;
            if let Some(seed) = seed {
                cfg.seed = seed;
            }
            let log = run_scenario(&cfg)?;
            let mut w = output(out.as_ref())?;
            log.write_jsonl(&mut w)?;
            w.flush()?;
        }
        Command::Prob {
            n,
            p,
            theta,
            model,
            enumerate,
        } => {
            let model: NoiseModel = model.parse()?;
            let spec = CueSpec::new(model, p)?;
            let analytic = recall_probability(n, spec, theta)?;
            println!("analytic   {analytic:.12}");
            if enumerate {
                let oracle = recall_probability_enum(n, spec, theta)?;
                let diff = (analytic - oracle).abs();
                println!("enumerated {oracle:.12}");
                println!("abs_diff   {diff:.3e}");
                if diff.is_nan() || diff > ORACLE_TOLERANCE {
                    return Err(Failure::OracleMismatch(format!(
                        "analytic and enumerated probabilities differ by {diff:e}"
                    )));
                }
            }
        }
        Command::Sweep {
            config,
            grid,
            runs,
            out,
            paired,
        } => {
            let cfg = ScenarioConfig::load(&config)?;
            let grid = Grid::from_toml_str(&std::fs::read_to_string(&grid)?)?;
            let scheme = if paired {
                SeedScheme::Paired
            } else {
                SeedScheme::PerPoint
            };
            let table = sweep(&cfg, &grid, runs, scheme)?;
            let mut w = output(out.as_ref())?;
            table.write_csv(&mut w)?;
            w.flush()?;
        }
        Command::Summarize { log } => {
            let summary = scenario::summarize_jsonl(BufReader::new(File::open(&log)?))?;
            let json =
                serde_json::to_string_pretty(&summary.report()).expect("summary reports serialize");
            println!("{json}");
        }
        Command::List => {
            println!("builtin scenarios: {}", scenario::builtin::NAMES.join(", "));
            println!("sweep parameters:  {}", SweepParam::NAMES.join(", "));
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match execute(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::OracleMismatch(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_ORACLE_MISMATCH)
        }
        Err(Failure::Error(e)) => {
            eprintln!("error: {e}");
            if e.is_validation() {
                ExitCode::from(EXIT_VALIDATION)
            } else {
                ExitCode::from(EXIT_FAILURE)
            }
        }
    }
}
