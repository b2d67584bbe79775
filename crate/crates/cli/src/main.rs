//! `conjcomb`: runs the verification experiments and writes JSON or CSV reports.
//!
//! Exit status: 0 when every check passes, 1 on a check failure or bad input
//! data, 2 on a usage error.

mod commands;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser, Debug)]
#[command(
    name = "conjcomb",
    version,
    about = "Unitary conjugation, antisymmetrizers and related checks"
)]
struct Cli {
    #[command(flatten)]
    run: RunConfig,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct RunConfig {
    /// Local dimension d.
    #[arg(long, global = true, default_value_t = 2)]
    pub dim: usize,
    #[arg(long, global = true, default_value_t = 100)]
    pub trials: usize,
    #[arg(long, global = true, env = "CONJCOMB_SEED", default_value_t = 0)]
    pub seed: u64,
    #[arg(long, global = true, default_value_t = 1e-10)]
    pub tolerance: f64,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Pairing {
    Adjacent,
    Interleaved,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Haar-sampled check that the antisymmetrizer circuit maps U to U*.
    VerifyConjugation {
        /// Number of uses of U.
        #[arg(long, default_value_t = 1)]
        n: usize,
    },
    /// Evaluates concurrence measures on a batch of states, one JSON object
    /// `{dims, re, im}` per line.
    Concurrence {
        #[arg(long)]
        input: PathBuf,
        /// Comma-separated: concurrence, cg, cg-alt[:N], g-concurrence,
        /// monotone[:k], f[:n:m], rungta. `all` selects concurrence, cg,
        /// g-concurrence, monotone:2 and rungta.
        #[arg(long, default_value = "all")]
        measures: String,
    },
    /// Clone-amplification simulation and the fidelity-bound crossing.
    Nogo {
        #[arg(long)]
        epsilon: f64,
        #[arg(long, default_value_t = 1)]
        m: usize,
        #[arg(long, default_value_t = 2)]
        l: usize,
    },
    /// Schur-component ranks behind the single-use impossibility.
    TwirlWitness {
        /// Also compare a Monte-Carlo twirl with the exact one (dim <= 4).
        #[arg(long)]
        mc_samples: Option<usize>,
        #[arg(long, value_enum, default_value_t = Pairing::Adjacent)]
        pairing: Pairing,
    },
    /// Dumps A_n, or the indexed variant when --indices is given.
    AntisymDump {
        #[arg(long, default_value_t = 1)]
        n: usize,
        #[arg(long)]
        m: Option<usize>,
        /// Comma-separated increasing indices.
        #[arg(long, value_delimiter = ',')]
        indices: Option<Vec<usize>>,
    },
}

/// How a subcommand ended when it did not pass.
#[derive(Debug)]
pub enum Failure {
    Usage(String),
    Check(String),
    Runtime(anyhow::Error),
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        use conjcomb_core::Error as E;
        match e.downcast_ref::<E>() {
            Some(
                E::OutOfRange(_) | E::InvalidDimension(_) | E::InvalidWedge(_) | E::TooLarge(_),
            ) => Failure::Usage(e.to_string()),
            _ => Failure::Runtime(e),
        }
    }
}

impl From<conjcomb_core::Error> for Failure {
    fn from(e: conjcomb_core::Error) -> Self {
        anyhow::Error::from(e).into()
    }
}

fn validate(cfg: &RunConfig) -> Result<(), Failure> {
    if cfg.trials < 1 {
        return Err(Failure::Usage("--trials must be at least 1".into()));
    }
    if !(cfg.tolerance > 0.0 && cfg.tolerance.is_finite()) {
        return Err(Failure::Usage("--tolerance must be positive".into()));
    }
    if cfg.threads == Some(0) {
        return Err(Failure::Usage("--threads must be at least 1".into()));
    }
    Ok(())
}

fn run(cli: Cli) -> Result<(), Failure> {
    let cfg = cli.run;
    validate(&cfg)?;
    if let Some(t) = cfg.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build_global()
            .map_err(|e| Failure::Runtime(e.into()))?;
    }
    match cli.command {
        Command::VerifyConjugation { n } => commands::verify_conjugation(&cfg, n),
        Command::Concurrence { input, measures } => commands::concurrence(&cfg, &input, &measures),
        Command::Nogo { epsilon, m, l } => commands::nogo(&cfg, epsilon, m, l),
        Command::TwirlWitness {
            mc_samples,
            pairing,
        } => commands::twirl_witness(&cfg, mc_samples, pairing),
        Command::AntisymDump { n, m, indices } => commands::antisym_dump(&cfg, n, m, indices),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Check(msg)) => {
            eprintln!("check failed: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Runtime(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
