//! `trimis`: reproducible experiments for the maximal hard-core model.

mod commands;
mod output;

use clap::{Parser, Subcommand, ValueEnum};
use std::path::PathBuf;
use std::process::ExitCode;

use output::Failure;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Parser, Debug)]
#[command(name = "trimis", version, about = "Maximal hard-core model on the triangular lattice")]
pub struct Cli {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value = "csv")]
    pub format: Format,

    /// Write results here instead of standard output.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    /// Seed for randomized audits.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,

    /// Cap on worker threads (default: all cores).
    #[arg(long, global = true, env = "TRIMIS_THREADS")]
    pub threads: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Lattice {
    Triangular,
    Z2,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum CountKind {
    Maximal,
    Independent,
    Z2,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum PgsMode {
    Sparse,
    Dense,
    All,
    /// Exhaustive and random density audit over torus MISs.
    Audit,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Lower bound log2|M|/((n+1)(m+1)) on the entropy, with the hard-hexagon upper bound.
    Capacity {
        #[arg(long, default_value_t = 10)]
        n: usize,
        #[arg(long, default_value_t = 132)]
        m: usize,
        #[arg(long, value_enum, default_value = "triangular")]
        lattice: Lattice,
        /// Report sweep progress on standard error.
        #[arg(long)]
        progress: bool,
    },
    /// Exact counts on a rhombus.
    Count {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        m: usize,
        #[arg(long, value_enum, default_value = "maximal")]
        kind: CountKind,
        /// Also list every shorter length 1..m (maximal only).
        #[arg(long)]
        prefixes: bool,
    },
    /// Conditional event probabilities over a list of activities.
    GibbsSweep {
        /// Box {-half..half}².
        #[arg(long, default_value_t = 3)]
        half: usize,
        #[arg(long, default_value_t = 1)]
        m: usize,
        #[arg(long, value_delimiter = ',', default_value = "red,green,blue")]
        boundary: Vec<String>,
        /// Activities: integers or p/q parse exactly, anything else as floats.
        #[arg(long, value_delimiter = ',', default_value = "1,4,16,64,256,1024,4096")]
        lambda: Vec<String>,
    },
    /// Contour laws over all admissible configurations of a box, plus random fixtures.
    ContourAudit {
        #[arg(long, default_value_t = 5)]
        n: usize,
        #[arg(long, default_value = "blue")]
        boundary: String,
        /// Number of random fixtures.
        #[arg(long, default_value_t = 0)]
        random: usize,
        #[arg(long, value_delimiter = ',', default_value = "8,9,10,11,12")]
        sizes: Vec<usize>,
    },
    /// Local contour-continuation patterns and optional contour-graph counts.
    PatternCount {
        /// Count contour graphs of sizes 1..=L.
        #[arg(long, default_value_t = 0)]
        graphs: usize,
    },
    /// Periodic ground states, or the density audit with `--mode audit`.
    Pgs {
        #[arg(long, value_enum, default_value = "all")]
        mode: PgsMode,
        /// Smallest and largest torus side of the exhaustive audit.
        #[arg(long, default_value_t = 2)]
        min_side: usize,
        #[arg(long, default_value_t = 6)]
        max_side: usize,
        /// Random MISs on larger tori in the audit.
        #[arg(long, default_value_t = 10_000)]
        random: u64,
    },
    /// Linear Peierls bound for perturbed sparse ground states on T_{7k,7k}.
    PeierlsAudit {
        #[arg(long, default_value_t = 3)]
        k: usize,
        /// Skip the exhaustive single-site sweep.
        #[arg(long)]
        no_single: bool,
        #[arg(long, default_value_t = 1000)]
        random: u64,
        #[arg(long, default_value_t = 3)]
        flips: usize,
    },
    /// Defective-triangle area bound and triangulation laws.
    DelaunayAudit {
        /// Circumradius bounds: decimals, p/q, or sqrt(p/q).
        #[arg(long, value_delimiter = ',', default_value = "sqrt(7/3),1.578")]
        rho: Vec<String>,
        /// Random torus MISs to triangulate per side.
        #[arg(long, default_value_t = 0)]
        triangulations: usize,
        #[arg(long, value_delimiter = ',', default_value = "7,14,21")]
        sides: Vec<usize>,
    },
    /// Encode a bit string into a tiled maximal configuration.
    Encode {
        #[arg(long, default_value_t = 10)]
        n: usize,
        #[arg(long, default_value_t = 132)]
        m: usize,
        /// Input file (default: standard input).
        #[arg(long)]
        input: Option<PathBuf>,
        /// Read raw bytes (MSB first) instead of a text of 0/1 characters.
        #[arg(long)]
        bytes: bool,
        /// Blocks per row of the window (default: near-square layout).
        #[arg(long)]
        t1: Option<usize>,
    },
    /// Decode a tiled configuration written by `encode`.
    Decode {
        #[arg(long)]
        input: Option<PathBuf>,
        /// Write raw bytes instead of 0/1 characters.
        #[arg(long)]
        bytes: bool,
    },
    /// Closed form and partial sums of the contour series.
    SeriesBound {
        #[arg(long, default_value_t = 22_781_250.0)]
        lambda: f64,
        #[arg(long, value_delimiter = ',', default_value = "1,2,4,8,16,32")]
        m: Vec<u64>,
        #[arg(long, default_value_t = 1.0)]
        c: f64,
        /// Target for the least admissible m.
        #[arg(long, default_value_t = 1.0 / 3.0)]
        target: f64,
        /// Terms beyond 4m summed directly.
        #[arg(long, default_value_t = 4000)]
        terms: u64,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(t) = cli.threads {
        if t == 0 {
            return output::report_failure(&Failure::usage("--threads must be positive"), cli.format);
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(t).build_global() {
            return output::report_failure(&Failure::usage(format!("thread pool: {e}")), cli.format);
        }
    }
    match commands::run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => output::report_failure(&f, cli.format),
    }
}
