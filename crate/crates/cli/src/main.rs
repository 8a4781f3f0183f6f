//! `floorsum`: command-line access to exact evaluation, range enumeration,
//! classification, density approximation and the verification suite.

mod render;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use floorsum::density::{self, DensityConfig};
use floorsum::par::Exec;
use floorsum::ratcore::RatError;
use floorsum::{classify, enumerate_range, eval_detail, range, verify, Rat};
use thiserror::Error;

use render::Renderer;

#[derive(Debug, Error)]
enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Domain(String),
    #[error("verification failed: {0}")]
    Verification(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

type CliResult<T> = Result<T, CliError>;

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Verification(_) => 2,
            CliError::Domain(_) | CliError::Io(_) | CliError::Csv(_) => 3,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Default)]
pub enum Format {
    #[default]
    Text,
    Json,
    Csv,
}

/// Exact analysis of f_n(x) = [nx] - (sum of [kx]/k over k = 1..n).
#[derive(Debug, Parser)]
#[command(name = "floorsum", version)]
struct Cli {
    #[command(flatten)]
    config: Config,
    #[command(subcommand)]
    command: Command,
}

/// Options shared by every subcommand. All numbers are exact; there is no
/// floating-point configuration.
#[derive(Debug, Clone, Args)]
pub struct Config {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    /// Also render this many correctly rounded decimal digits next to each
    /// exact value.
    #[arg(long, global = true, value_name = "K")]
    pub decimal: Option<usize>,
    /// Worker threads (default: all cores).
    #[arg(long, global = true, env = "FLOORSUM_JOBS", value_name = "N")]
    pub jobs: Option<usize>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Evaluate f_n(x) with x_n, d, r and the jump [dx] - d[x].
    Eval {
        #[arg(long)]
        n: u64,
        /// p/q, integer, or finite decimal.
        #[arg(long, allow_hyphen_values = true)]
        x: String,
    },
    /// Enumerate the value set S_n with witness intervals.
    Range {
        #[arg(long)]
        n: u64,
    },
    /// Classify f_n(x) relative to lambda = 1 - log 2.
    Classify {
        #[arg(long)]
        n: u64,
        #[arg(long, allow_hyphen_values = true)]
        x: String,
    },
    /// Find f_n(1/t) close to a target u.
    Approx {
        #[arg(long, allow_hyphen_values = true)]
        u: String,
        /// Use this t directly (error < 1/t).
        #[arg(long, conflicts_with = "eps", required_unless_present = "eps")]
        t: Option<u64>,
        /// Pick t so that the error is below eps.
        #[arg(long)]
        eps: Option<String>,
        /// Largest order evaluated exactly during the search.
        #[arg(long, default_value_t = DensityConfig::default().max_n)]
        max_n: u64,
    },
    /// Run the verification suite and write a JSON certificate.
    Verify {
        #[arg(long, default_value_t = 40)]
        max_n: u64,
        /// Comma-separated check names (default: all).
        #[arg(long, value_delimiter = ',')]
        check: Vec<String>,
        /// Certificate path.
        #[arg(long, default_value = "floorsum-certificate.json")]
        out: PathBuf,
    },
    /// Time naive per-gap evaluation against the delta walk.
    Bench {
        /// Comma-separated orders.
        #[arg(long, value_delimiter = ',', required = true)]
        n: Vec<u64>,
        /// Disable data parallelism for both methods.
        #[arg(long)]
        sequential: bool,
    },
}

fn parse_rat(name: &str, s: &str) -> Result<Rat, CliError> {
    s.parse::<Rat>().map_err(|e| match e {
        RatError::ZeroDenominator => CliError::Domain(format!("--{name} {s}: zero denominator")),
        other => CliError::Usage(format!("--{name}: {other}")),
    })
}

fn positive(name: &str, n: u64) -> Result<u64, CliError> {
    if n == 0 {
        return Err(CliError::Usage(format!("--{name} must be at least 1")));
    }
    Ok(n)
}

fn run(cli: Cli) -> CliResult<()> {
    if let Some(jobs) = cli.config.jobs {
        if jobs == 0 {
            return Err(CliError::Usage("--jobs must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build_global()
            .map_err(|e| CliError::Usage(e.to_string()))?;
    }
    let out = Renderer::new(&cli.config);
    match cli.command {
        Command::Eval { n, x } => {
            let x = parse_rat("x", &x)?;
            let detail =
                eval_detail(positive("n", n)?, &x).map_err(|e| CliError::Domain(e.to_string()))?;
            out.eval(&detail)
        }
        Command::Range { n } => {
            let report =
                enumerate_range(positive("n", n)?).map_err(|e| CliError::Domain(e.to_string()))?;
            out.range(&report)
        }
        Command::Classify { n, x } => {
            let x = parse_rat("x", &x)?;
            let c = classify(positive("n", n)?, &x).map_err(|e| CliError::Domain(e.to_string()))?;
            out.classify(&c)
        }
        Command::Approx { u, t, eps, max_n } => {
            let u = parse_rat("u", &u)?;
            let config = DensityConfig { max_n };
            let result = match (t, eps) {
                (Some(t), _) => density::approximate_with(&u, t, &config),
                (None, Some(eps)) => density::refine_with(&u, &parse_rat("eps", &eps)?, &config),
                (None, None) => unreachable!("clap requires one of --t, --eps"),
            }
            .map_err(|e| CliError::Domain(e.to_string()))?;
            out.approx(&result)
        }
        Command::Verify {
            max_n,
            check,
            out: path,
        } => {
            let names: Vec<&str> = check.iter().map(String::as_str).collect();
            let results =
                verify::run_checks(max_n, &names).map_err(|e| CliError::Usage(e.to_string()))?;
            std::fs::write(
                &path,
                serde_json::to_string_pretty(&results).expect("serializable"),
            )?;
            out.verify(&results, &path)?;
            let failed: Vec<&str> = results
                .iter()
                .filter(|r| !r.passed())
                .map(|r| r.name.as_str())
                .collect();
            if failed.is_empty() {
                Ok(())
            } else {
                Err(CliError::Verification(failed.join(", ")))
            }
        }
        Command::Bench { n, sequential } => {
            let exec = if sequential {
                Exec::Sequential
            } else {
                Exec::Parallel
            };
            let mut rows = Vec::with_capacity(n.len());
            for order in n {
                let timing = range::time_methods(positive("n", order)?, exec)
                    .map_err(|e| CliError::Domain(e.to_string()))?;
                rows.push(timing);
            }
            out.bench(&rows)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("floorsum: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
