mod commands;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use hilbert_bodies::identities::Suite;
use hilbert_bodies::{BodyError, OutputFormat, RunConfig};

use commands::code;

#[derive(Parser)]
#[command(name = "hilbert-bodies", version, about = "Section volumes, finite Hilbert transforms and ellipsoid tests for convex bodies")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check a body file: parameters, convexity, gauge sanity.
    Validate {
        body: PathBuf,
        #[arg(long, default_value_t = 42)]
        seed: u64,
    },
    /// Tabulate A(ξ, t) at the Chebyshev nodes of the support interval.
    Section {
        body: PathBuf,
        /// Direction as comma-separated reals; normalized before use.
        #[arg(long, allow_hyphen_values = true)]
        dir: String,
        #[command(flatten)]
        config: ConfigArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the closed-form identity suites.
    Identities {
        #[arg(long, value_enum, default_value_t = SuiteArg::All)]
        suite: SuiteArg,
        #[command(flatten)]
        config: ConfigArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Test the three polynomiality conditions over many directions.
    ///
    /// Exit status: 0 ellipsoid compatible, 1 not, 4 conditions disagree,
    /// 5 Monte Carlo noise too high.
    Classify {
        body: PathBuf,
        #[command(flatten)]
        config: ConfigArgs,
        /// Path prefix; writes PREFIX.json (full verdict) and PREFIX.csv.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// One row per direction with residuals and exponents, for plotting.
    Sweep {
        body: PathBuf,
        #[command(flatten)]
        config: ConfigArgs,
        #[arg(long, alias = "plot-data")]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct ConfigArgs {
    #[arg(long, default_value_t = 128)]
    nodes: usize,
    #[arg(long, default_value_t = 16)]
    max_degree: usize,
    #[arg(long, default_value_t = 1e-6)]
    threshold: f64,
    /// Monte Carlo samples per section value.
    #[arg(long, default_value_t = 1_000_000)]
    samples: u64,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    #[arg(long, default_value_t = 32)]
    directions: usize,
    #[arg(long, value_enum, default_value_t = FormatArg::Csv)]
    format: FormatArg,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum SuiteArg {
    Arch,
    Intertwine,
    Inversion,
    Recurrence,
    All,
}

impl SuiteArg {
    fn suites(self) -> Vec<Suite> {
        match self {
            SuiteArg::Arch => vec![Suite::Arch],
            SuiteArg::Intertwine => vec![Suite::Intertwine],
            SuiteArg::Inversion => vec![Suite::Inversion],
            SuiteArg::Recurrence => vec![Suite::Recurrence],
            SuiteArg::All => Suite::ALL.to_vec(),
        }
    }
}

impl ConfigArgs {
    fn config(&self) -> RunConfig {
        RunConfig {
            node_count: self.nodes,
            n_max_degree: self.max_degree,
            residual_threshold: self.threshold,
            mc_samples: self.samples,
            seed: self.seed,
            direction_count: self.directions,
            format: match self.format {
                FormatArg::Csv => OutputFormat::Csv,
                FormatArg::Json => OutputFormat::Json,
            },
        }
    }
}

fn body_error_code(e: &BodyError) -> u8 {
    match e {
        BodyError::Json(_) | BodyError::Io(_) => code::MALFORMED,
        _ => code::INVALID,
    }
}

fn error_code(err: &anyhow::Error) -> u8 {
    if let Some(e) = err.downcast_ref::<BodyError>() {
        return body_error_code(e);
    }
    match err.downcast_ref::<hilbert_bodies::Error>() {
        Some(hilbert_bodies::Error::Body(e)) => body_error_code(e),
        Some(e) if e.is_noise_floor() => code::NOISE_FLOOR,
        _ => code::INVALID,
    }
}

fn limit_threads() {
    let Ok(raw) = std::env::var("HILBERT_BODIES_THREADS") else { return };
    match raw.trim().parse::<usize>() {
        Ok(n) if n > 0 => {
            // Fails only if a pool already exists, which cannot happen this early.
            let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
        }
        _ => eprintln!("ignoring HILBERT_BODIES_THREADS={raw:?}: expected a positive integer"),
    }
}

fn run(cli: Cli) -> anyhow::Result<u8> {
    match cli.command {
        Command::Validate { body, seed } => commands::validate(&body, seed),
        Command::Section { body, dir, config, out } => commands::section(&body, &dir, &config.config(), out.as_deref()),
        Command::Identities { suite, config, out } => {
            let cfg = config.config();
            commands::identities(&suite.suites(), cfg.seed, &cfg, out.as_deref())
        }
        Command::Classify { body, config, out } => commands::classify(&body, &config.config(), out.as_deref()),
        Command::Sweep { body, config, out } => commands::sweep(&body, &config.config(), out.as_deref()),
    }
}

fn main() -> ExitCode {
    limit_threads();
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(error_code(&err))
        }
    }
}
