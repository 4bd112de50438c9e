//! `nscap`: spectral densities, capacities, return probabilities, growth and
//! capacity-calculus checks from the command line.
//!
//! Exit status: 0 on success, 1 if a check is violated, 2 on unreadable
//! input, 3 on a computation error.

mod cache;
mod format;
mod job;
mod summary;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use cache::{Cache, ENV_VAR};
use job::{read_spec, GridParams, JobError, JobSpec, Suite, Target};

#[derive(Parser)]
#[command(name = "nscap", version, about = "Novikov-Shubin invariants and capacities")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct Common {
    /// Output file (default: stdout).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Artifact cache directory; overrides NSCAP_CACHE_DIR.
    #[arg(long, global = true)]
    cache_dir: Option<PathBuf>,
    /// Neither read nor write the cache.
    #[arg(long, global = true)]
    no_cache: bool,
    /// Quadrature nodes per torus axis.
    #[arg(long, global = true)]
    nodes: Option<usize>,
    #[arg(long, global = true, default_value_t = 1e-4)]
    lambda_min: f64,
    #[arg(long, global = true, default_value_t = 1.0)]
    lambda_max: f64,
    #[arg(long, global = true, default_value_t = 64)]
    points_per_decade: usize,
}

#[derive(Subcommand)]
enum Command {
    /// Spectral density function of an operator, as CSV "lambda,F".
    Density {
        /// Operator spec file.
        #[arg(long)]
        op: PathBuf,
    },
    /// Capacity of the cokernel of an operator.
    Capacity {
        #[arg(long)]
        op: PathBuf,
    },
    /// Return probabilities of the walk on a group, as CSV "k,p".
    Walk {
        /// Group spec file.
        #[arg(long)]
        group: PathBuf,
        #[arg(long, default_value_t = 1024)]
        steps: usize,
        /// Uniform on the generators only, without the identity.
        #[arg(long)]
        non_lazy: bool,
    },
    /// Ball sizes of a group, as CSV "k,b".
    Growth {
        #[arg(long)]
        group: PathBuf,
        #[arg(long, default_value_t = 16)]
        radius: usize,
    },
    /// Capacity c_p of the Koszul complex of Z^n.
    Complex {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        p: usize,
        /// Write the differentials as operator spec files d1.json, d2.json, ...
        #[arg(long)]
        export_dir: Option<PathBuf>,
    },
    /// Capacity-calculus checks: JSON lines on stdout, a table on stderr.
    Check {
        #[arg(long, value_enum, default_value_t = SuiteArg::All)]
        suite: SuiteArg,
        /// Instances in the generative suite.
        #[arg(long, default_value_t = 64)]
        count: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum SuiteArg {
    Curated,
    Generative,
    All,
}

fn build(cli: Cli) -> Result<JobSpec, JobError> {
    let c = cli.common;
    let grid = GridParams {
        lambda_min: c.lambda_min,
        lambda_max: c.lambda_max,
        points_per_decade: c.points_per_decade,
    };
    let nodes = c.nodes;
    let target = match cli.command {
        Command::Density { op } => Target::Density { op: read_spec(&op)?, nodes, grid },
        Command::Capacity { op } => Target::Capacity { op: read_spec(&op)?, nodes, grid },
        Command::Walk { group, steps, non_lazy } => Target::Walk {
            group: read_spec(&group)?,
            steps,
            lazy: !non_lazy,
        },
        Command::Growth { group, radius } => Target::Growth { group: read_spec(&group)?, radius },
        Command::Complex { n, p, export_dir } => Target::Complex { n, p, nodes, grid, export_dir },
        Command::Check { suite, count, seed } => Target::Check {
            suite: match suite {
                SuiteArg::Curated => Suite::Curated,
                SuiteArg::Generative => Suite::Generative,
                SuiteArg::All => Suite::All,
            },
            count,
            seed,
            nodes,
            grid,
        },
    };
    let cache = if c.no_cache {
        Cache::disabled()
    } else {
        Cache::new(c.cache_dir.or_else(|| std::env::var_os(ENV_VAR).map(PathBuf::from)))
    };
    Ok(JobSpec { target, out: c.out, cache })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match build(cli).and_then(|spec| job::run(&spec)) {
        Ok(status) => ExitCode::from(status as u8),
        Err(JobError::Parse(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(JobError::Compute(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(3)
        }
    }
}
