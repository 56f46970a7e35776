use std::fs::File;
use std::io::{self, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use hbt_cli::commands::{cmd_analyze, cmd_predict, cmd_simulate, cmd_sweep};
use hbt_cli::config::parse_real;
use hbt_cli::{CliError, CliResult, RunConfig};
use hbt_core::correlate::CorrelationKind;

#[derive(Debug, Parser)]
#[command(
    name = "hbt",
    version,
    about = "Geometric-phase intensity interferometry simulator"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Run configuration file (`section.key = value` lines)
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Output file; standard output when omitted
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Worker threads for sweeps
    #[arg(long, global = true, default_value_t = 1)]
    workers: usize,

    /// Overrides sim.seed
    #[arg(long, global = true)]
    seed: Option<u64>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Simulate one polariser setting and write the detector traces
    Simulate,
    /// Sweep the relative polariser angle and the delay
    Sweep,
    /// Estimate correlations from a recorded detector trace file
    Analyze {
        trace: PathBuf,
        /// Comma-separated delays in seconds
        #[arg(long, default_value = "0")]
        taus: String,
        /// Comma-separated subset of cross,self3,self4
        #[arg(long, default_value = "cross,self3,self4")]
        kinds: String,
    },
    /// Print closed-form predictions and the term audit
    Predict {
        /// Polariser 3 angle (radians, or with a `deg` suffix)
        #[arg(long, allow_hyphen_values = true)]
        phi3: Option<String>,
        #[arg(long, allow_hyphen_values = true)]
        phi4: Option<String>,
        #[arg(long = "phi-d", allow_hyphen_values = true)]
        phi_d: Option<String>,
    },
}

fn load_config(path: Option<&Path>, seed: Option<u64>) -> CliResult<RunConfig> {
    let mut config = match path {
        Some(p) => RunConfig::parse(&std::fs::read_to_string(p)?)?,
        None => RunConfig::default(),
    };
    if let Some(seed) = seed {
        config.sim.seed = seed;
    }
    Ok(config)
}

fn parse_list<T>(text: &str, item: impl Fn(&str) -> CliResult<T>) -> CliResult<Vec<T>> {
    text.split(',')
        .filter(|s| !s.trim().is_empty())
        .map(item)
        .collect()
}

fn with_output(
    path: Option<&Path>,
    f: impl FnOnce(&mut dyn Write) -> CliResult<()>,
) -> CliResult<()> {
    match path {
        Some(p) => {
            let mut w = BufWriter::new(File::create(p)?);
            f(&mut w)?;
            w.flush()?;
        }
        None => {
            let stdout = io::stdout();
            let mut w = stdout.lock();
            f(&mut w)?;
            w.flush()?;
        }
    }
    Ok(())
}

fn run(cli: Cli) -> CliResult<()> {
    let config = load_config(cli.config.as_deref(), cli.seed)?;
    let out = cli.out.as_deref();
    match cli.command {
        Command::Simulate => with_output(out, |w| cmd_simulate(&config, w)),
        Command::Sweep => with_output(out, |w| cmd_sweep(&config, cli.workers, w)),
        Command::Analyze { trace, taus, kinds } => {
            let taus = parse_list(&taus, |s| Ok(parse_real("--taus", s, false)?))?;
            let kinds = parse_list(&kinds, |s| {
                s.parse::<CorrelationKind>()
                    .map_err(|e| CliError::Usage(e.to_string()))
            })?;
            let input = BufReader::new(File::open(&trace)?);
            with_output(out, |w| cmd_analyze(input, &taus, &kinds, w))
        }
        Command::Predict { phi3, phi4, phi_d } => {
            let angle = |flag: &str, v: Option<String>, default: f64| -> CliResult<f64> {
                match v {
                    Some(s) => Ok(parse_real(flag, &s, true)?),
                    None => Ok(default),
                }
            };
            let phi3 = angle("--phi3", phi3, config.bench.phi3)?;
            let phi4 = angle("--phi4", phi4, config.bench.phi4)?;
            let phi_d = angle("--phi-d", phi_d, config.bench.phi_d)?;
            with_output(out, |w| cmd_predict(phi3, phi4, phi_d, w))
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("hbt: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
