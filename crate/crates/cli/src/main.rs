//! `edgelab` command-line runner.
//!
//! Exit status: 0 success, 2 bad configuration or violated precondition,
//! 3 a randomized search gave up, 4 an exact verification failed.

mod ops;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

#[derive(Debug, Parser)]
#[command(name = "edgelab", version, about = "Sign-condition edge-labelings: label, count, bound and construct")]
pub struct Cli {
    #[command(subcommand)]
    pub cmd: Command,
    /// Built-in family, e.g. DISKS, POSET_DIM(2), BOXES(3).
    #[arg(long, global = true)]
    pub family: Option<String>,
    /// Family description file (JSON).
    #[arg(long, global = true)]
    pub spec: Option<PathBuf>,
    /// Number of vertices; `count` also accepts a comma-separated sweep.
    #[arg(long, global = true, value_delimiter = ',')]
    pub n: Vec<usize>,
    #[arg(long, global = true)]
    pub m: Option<usize>,
    #[arg(long, global = true)]
    pub trials: Option<usize>,
    /// Seed for every randomized step; required by randomized subcommands.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Sampling box, `lo:hi` for all coordinates or a comma-separated list.
    #[arg(long = "box", global = true)]
    pub bbox: Option<String>,
    /// Worker threads (default: all cores). Never changes results.
    #[arg(long, global = true)]
    pub workers: Option<usize>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Directory receiving one subdirectory per run.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Table,
    Csv,
}

#[derive(Debug, Clone, Subcommand, Serialize)]
#[serde(rename_all = "kebab-case", tag = "operation")]
pub enum Command {
    /// Label a configuration given with --points, or a random one.
    Label {
        /// Points separated by `;`, coordinates by `,`, e.g. "0,0,1;3/2,0,1".
        #[arg(long)]
        points: Option<String>,
    },
    /// Count distinct labelings over random configurations.
    Count {
        /// Keep only configurations with every predicate nonzero.
        #[arg(long)]
        strong: bool,
        /// Sampled coordinates are multiples of (hi - lo) / 2^bits.
        #[arg(long, default_value_t = 16)]
        bits: u32,
    },
    /// Warren-type upper bound on the number of labelings.
    Bound {
        #[arg(long)]
        d: Option<usize>,
        #[arg(long)]
        k: Option<usize>,
        #[arg(long)]
        degree: Option<usize>,
    },
    /// Constructive lower bound m^(d(n - dm)).
    Lower {
        #[arg(long)]
        d: Option<usize>,
    },
    /// Build the grid and emit m^(d(n - dm)) distinct labelings.
    Construct {
        /// Spanning seed written by `wallpair`; otherwise the family's hint
        /// or a search is used.
        #[arg(long)]
        seed_file: Option<PathBuf>,
        /// Include every labeling in the payload.
        #[arg(long)]
        emit_labelings: bool,
        #[arg(long, default_value_t = 2000)]
        budget: usize,
    },
    /// Find and certify a spanning seed of general wall pairs.
    Wallpair {
        #[arg(long, default_value_t = 2000)]
        budget: usize,
        /// Ignore the family's built-in seed hint and search.
        #[arg(long)]
        no_hint: bool,
    },
    /// Validate a family and compare it with the geometric oracle.
    VerifyFamily {
        /// Also write the family description to this file.
        #[arg(long)]
        export: Option<PathBuf>,
    },
    /// Look for separating points between random pairs of distinct points.
    SepCheck {
        #[arg(long, default_value_t = 1000)]
        budget: usize,
    },
}

#[derive(Debug)]
pub enum RunError {
    Config(String),
    Exhausted(String),
    Invariant(String),
}

impl RunError {
    fn code(&self) -> u8 {
        match self {
            RunError::Config(_) => 2,
            RunError::Exhausted(_) => 3,
            RunError::Invariant(_) => 4,
        }
    }
}

impl std::fmt::Display for RunError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            RunError::Config(m) => write!(f, "configuration error: {m}"),
            RunError::Exhausted(m) => write!(f, "search exhausted: {m}"),
            RunError::Invariant(m) => write!(f, "verification failed: {m}"),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(w) = cli.workers {
        if w == 0 {
            eprintln!("edgelab: configuration error: --workers must be positive");
            return ExitCode::from(2);
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(w).build_global() {
            eprintln!("edgelab: cannot start worker pool: {e}");
            return ExitCode::from(4);
        }
    }
    match output::run(&cli) {
        Ok(text) => {
            print!("{text}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("edgelab: {e}");
            ExitCode::from(e.code())
        }
    }
}
