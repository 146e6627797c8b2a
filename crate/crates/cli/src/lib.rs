//! Command-line front end for the qkt workbench.
//!
//! Exit codes: 0 accept, 1 malformed input, 2 reject, 3 obstruction.

mod commands;
pub mod output;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

pub use commands::{cmd_check, cmd_probe, cmd_profile, ProbeConfig};

pub const EXIT_ACCEPT: i32 = 0;
pub const EXIT_MALFORMED: i32 = 1;
pub const EXIT_REJECT: i32 = 2;
pub const EXIT_OBSTRUCTION: i32 = 3;

/// Result of one invocation: exit code plus captured output.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

impl Outcome {
    pub fn ok(stdout: String) -> Self {
        Self { code: EXIT_ACCEPT, stdout, stderr: String::new() }
    }

    pub fn with_code(code: i32, stdout: String) -> Self {
        Self { code, stdout, stderr: String::new() }
    }

    pub fn malformed(err: &anyhow::Error) -> Self {
        Self { code: EXIT_MALFORMED, stdout: String::new(), stderr: format!("error: {err:#}\n") }
    }
}

#[derive(Debug, Parser)]
#[command(name = "qkt", version, about = "Quantitative K-theory workbench over finite coarse spaces")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Seed for randomized generators; recorded in every report.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Worker threads for grid sweeps and probes.
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SpaceKind {
    Path,
    Cycle,
    TwoPoint,
    Random,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Criterion {
    Edge,
    Component,
}

#[derive(Debug, Clone, Args)]
pub struct Budget {
    /// Control parameter eps, a decimal string in (0, 1/4).
    #[arg(long)]
    pub eps: String,
    /// Propagation bound r.
    #[arg(long = "r")]
    pub r: String,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Validate a matrix as an eps-r-projection (or unitary).
    Check {
        matrix: PathBuf,
        #[command(flatten)]
        budget: Budget,
        /// Check ||u*u - 1||, ||uu* - 1|| instead of ||p^2 - p||.
        #[arg(long)]
        unitary: bool,
    },
    /// Spectral rounding of a quasi-projection.
    Kappa0 {
        matrix: PathBuf,
        #[command(flatten)]
        budget: Budget,
    },
    /// Rotation homotopy from diag(u, u*) to diag(uu*, 1).
    Rotate {
        matrix: PathBuf,
        #[command(flatten)]
        budget: Budget,
        #[arg(long, default_value_t = 64)]
        steps: usize,
        /// Replace samples by their content hashes in the certificate.
        #[arg(long)]
        hash_samples: bool,
    },
    /// Search a homotopy between two quasi-projections of equal rounded rank.
    Connect {
        source: PathBuf,
        target: PathBuf,
        /// Target eps' of the certificate.
        #[command(flatten)]
        budget: Budget,
        /// eps at which the endpoints are validated (defaults to --eps).
        #[arg(long)]
        input_eps: Option<String>,
        /// Sample count of the rotation leg.
        #[arg(long)]
        steps: Option<usize>,
        #[arg(long)]
        no_truncate: bool,
        #[arg(long)]
        hash_samples: bool,
    },
    /// Persistence profile of a degree-0 class over an (eps', r') grid.
    Profile {
        class: PathBuf,
        #[arg(long)]
        grid_eps: String,
        #[arg(long)]
        grid_r: String,
        /// Identifier written into the report (defaults to the input hash).
        #[arg(long)]
        id: Option<String>,
    },
    /// Quantitative injectivity probe on a space.
    ProbeQi {
        space: PathBuf,
        #[arg(long)]
        d: String,
        #[arg(long = "r")]
        r: String,
        #[arg(long)]
        eps: String,
        #[arg(long)]
        grid_d: String,
        #[arg(long, value_enum, default_value_t = Criterion::Edge)]
        criterion: Criterion,
    },
    /// Quantitative surjectivity probe for a target quasi-projection.
    ProbeQs {
        target: PathBuf,
        /// eps' and r' at which the target is validated.
        #[arg(long)]
        input_eps: String,
        #[arg(long)]
        input_r: String,
        #[arg(long)]
        eps: String,
        #[arg(long)]
        grid_d: String,
        #[arg(long)]
        grid_r: String,
    },
    /// Generate a space.v1 file.
    GenSpace {
        #[arg(long, value_enum)]
        kind: SpaceKind,
        #[arg(long, default_value_t = 4)]
        n: usize,
        /// Distance of the two-point space.
        #[arg(long)]
        rho: Option<String>,
        /// Largest edge weight of random spaces.
        #[arg(long, default_value_t = 3)]
        max_weight: u32,
    },
    /// Simplices of the Rips complex at scale s.
    Rips {
        space: PathBuf,
        #[arg(long)]
        s: String,
        #[arg(long)]
        max_dim: Option<usize>,
        /// Emit the barycenters as a samples.v1 file instead.
        #[arg(long)]
        barycenters: bool,
    },
    /// Mishchenko projection P_X at sample points.
    Px {
        samples: PathBuf,
        /// Optional action.v1 file for the equivariance check.
        #[arg(long)]
        action: Option<PathBuf>,
    },
    /// The projection p_{Gamma,d} in the regular representation.
    GroupProj {
        /// `cyclic:N` or `s3`.
        #[arg(long)]
        group: String,
        #[arg(long)]
        d: String,
        /// Comma-separated generator indices (defaults to the standard set).
        #[arg(long)]
        gens: Option<String>,
    },
    /// Roe-algebra projection Q_{s,Sigma} at sample points.
    RoeProj {
        samples: PathBuf,
        /// Unit fiber vector, comma-separated `re` or `re:im` entries.
        #[arg(long)]
        xi: String,
    },
}

/// Parses arguments and runs one command.
pub fn run_args<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    match Cli::try_parse_from(args) {
        Ok(cli) => run(cli),
        Err(e) => {
            let text = e.render().to_string();
            match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => Outcome::ok(text),
                _ => Outcome { code: EXIT_MALFORMED, stdout: String::new(), stderr: text },
            }
        }
    }
}

pub fn run(cli: Cli) -> Outcome {
    let go = || commands::dispatch(&cli);
    let outcome = match cli.jobs {
        Some(n) => match rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build() {
            Ok(pool) => pool.install(go),
            Err(e) => Outcome::malformed(&anyhow::anyhow!(e)),
        },
        None => go(),
    };
    match &cli.out {
        Some(path) if !outcome.stdout.is_empty() => match std::fs::write(path, &outcome.stdout) {
            Ok(()) => Outcome { stdout: String::new(), ..outcome },
            Err(e) => Outcome::malformed(&anyhow::anyhow!("cannot write {}: {e}", path.display())),
        },
        _ => outcome,
    }
}
