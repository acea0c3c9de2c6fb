use std::ops::RangeInclusive;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};

use crate::CliError;

#[derive(Parser, Debug)]
#[command(name = "kohn", version, about = "Kohn-Laplacian spectra of lens spaces and spherical quotients")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Write results here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,

    /// Worker threads; defaults to available parallelism.
    #[arg(long, global = true, env = "KOHN_WORKERS")]
    pub workers: Option<usize>,

    /// Degree cutoff for spectra and bounded comparisons.
    #[arg(long, global = true)]
    pub cutoff: Option<usize>,

    /// Reuse valid per-cell checkpoints.
    #[arg(long, global = true)]
    pub resume: bool,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Table of dim H_{p,q} of invariant harmonic polynomials.
    Dims {
        /// `L(k; s1,...,sn)` or `GammaI(m,n,r;k,l)`.
        group: String,
        pmax: usize,
        qmax: usize,
    },
    /// All CR isospectral families at fixed n over a range of k.
    Search {
        n: usize,
        /// `a..b` (inclusive) or a single k.
        k_range: String,
        /// Checkpoint directory; defaults to `<out>.checkpoints` when `--out` is set.
        #[arg(long)]
        checkpoint_dir: Option<PathBuf>,
    },
    /// Compare two quotients.
    CheckPair {
        a: String,
        b: String,
        #[arg(long, value_enum, default_value = "all")]
        mode: Mode,
    },
    /// The explicit constructions.
    Family {
        #[command(subcommand)]
        kind: FamilyKind,
    },
    /// Formal Berger spectrum up to `--cutoff` (default 10).
    Berger { group: String },
}

#[derive(Subcommand, Debug, Clone)]
pub enum FamilyKind {
    /// G(k-3, k) for an odd prime k.
    Gerson { k: u64 },
    /// L± = L(r²; θ^{±a_1}, ..., θ^{±a_n}).
    Pair {
        r: u64,
        #[arg(required = true, num_args = 1..)]
        a: Vec<u64>,
    },
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
    Jsonl,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    Cr,
    Riem,
    #[value(name = "kohn-F")]
    KohnF,
    Berger,
    All,
}

/// A validated invocation.
#[derive(Debug)]
pub struct RunConfig {
    pub command: Command,
    pub out: Option<PathBuf>,
    pub format: Option<Format>,
    pub workers: usize,
    pub cutoff: Option<usize>,
    pub resume: bool,
}

pub fn parse_k_range(src: &str) -> Result<RangeInclusive<u64>, CliError> {
    let bad = || CliError::Usage(format!("bad k range `{src}`; expected `a..b` or a single integer"));
    let (lo, hi) = match src.split_once("..") {
        Some((a, b)) => (a.trim().parse().map_err(|_| bad())?, b.trim().parse().map_err(|_| bad())?),
        None => {
            let k = src.trim().parse().map_err(|_| bad())?;
            (k, k)
        }
    };
    if lo < 2 || lo > hi {
        return Err(CliError::Usage(format!("k range `{src}` must be nonempty with k >= 2")));
    }
    Ok(lo..=hi)
}

impl RunConfig {
    pub fn from_cli(cli: Cli) -> Result<Self, CliError> {
        let workers = match cli.workers {
            Some(0) => return Err(CliError::Usage("--workers must be at least 1".into())),
            Some(w) => w,
            None => std::thread::available_parallelism().map_or(1, |n| n.get()),
        };
        if let Command::Search { n, k_range, .. } = &cli.command {
            if *n < 2 {
                return Err(CliError::Usage("search needs n >= 2".into()));
            }
            parse_k_range(k_range)?;
        }
        Ok(RunConfig {
            command: cli.command,
            out: cli.out,
            format: cli.format,
            workers,
            cutoff: cli.cutoff,
            resume: cli.resume,
        })
    }
}
