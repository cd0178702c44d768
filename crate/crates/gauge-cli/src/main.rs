//! `gauge`: numerical toolkit for heat-kernel lattice gauge measures
//! as projective limits — grid evaluation, verification suites, MCMC
//! sampling, stratum classification, and distribution-space norms.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use gauge_cli::commands;
use gauge_cli::config::RunConfig;

#[derive(Parser)]
#[command(name = "gauge", version, about = "Lattice gauge measures: kernels, consistency checks, strata")]
struct Cli {
    /// JSON run configuration (unknown keys rejected)
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// RNG seed (overrides the config file)
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// output directory
    #[arg(long, global = true, default_value = ".")]
    out: PathBuf,

    /// reduced sample sizes at loosened significance 1e-3
    #[arg(long, global = true)]
    quick: bool,

    /// structure group (overrides the config file)
    #[arg(long, global = true, value_parser = ["u1", "su2", "su3"])]
    group: Option<String>,

    /// inverse-coupling beta (overrides the config file)
    #[arg(long, global = true)]
    beta: Option<f64>,

    /// refinement level k (overrides the config file)
    #[arg(long, global = true)]
    level: Option<u32>,

    /// lattice extent in coarse cells per axis
    #[arg(long, global = true)]
    extent: Option<u32>,

    /// spacetime dimension
    #[arg(long, global = true, value_parser = clap::value_parser!(u8).range(2..=4))]
    dim: Option<u8>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate the heat-kernel density over a (coordinates, beta) grid
    KernelGrid,
    /// Run the full verification suite; exit nonzero on any failure
    Verify,
    /// Sample the interaction measure by MCMC (sweeps=0: initial
    /// configuration only)
    Sample,
    /// Kinematical projective-consistency test between two levels
    CoarsenTest,
    /// Check the semigroup property K_beta * K_beta = K_{2 beta}
    VerifyConvolution,
    /// Classify the stratum of a holonomy set read from JSON
    Classify {
        /// JSON file: {"group": "su2", "elements": [[...], ...]}
        input: Option<PathBuf>,
        /// classify the built-in table-row examples instead
        #[arg(long)]
        examples: bool,
    },
    /// Norms and metric distances of distribution-space test functions
    Norms {
        /// JSON file with coefficient lists
        input: PathBuf,
    },
    /// Kernel profiles along curves inside each stratum
    ProfileStrata,
}

fn run(cli: &Cli) -> Result<i32, String> {
    let mut cfg = RunConfig::load(cli.config.as_deref())?;
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    if let Some(group) = &cli.group {
        cfg.group = group.clone();
    }
    if let Some(beta) = cli.beta {
        cfg.beta = beta;
    }
    if let Some(level) = cli.level {
        cfg.level = level;
    }
    if let Some(extent) = cli.extent {
        cfg.extent = extent;
    }
    if let Some(dim) = cli.dim {
        cfg.dim = dim;
    }
    if cli.quick {
        cfg.quick = true;
    }
    cfg.kind()?; // fail fast on a bad group name
    match &cli.command {
        Command::KernelGrid => commands::cmd_kernel_grid(&cfg, &cli.out),
        Command::Verify => commands::cmd_verify(&cfg, &cli.out),
        Command::Sample => commands::cmd_sample(&cfg, &cli.out),
        Command::CoarsenTest => commands::cmd_coarsen_test(&cfg, &cli.out),
        Command::VerifyConvolution => commands::cmd_verify_convolution(&cfg, &cli.out),
        Command::Classify { input, examples } => {
            commands::cmd_classify(&cfg, &cli.out, input.as_deref(), *examples)
        }
        Command::Norms { input } => commands::cmd_norms(&cfg, &cli.out, input),
        Command::ProfileStrata => commands::cmd_profile_strata(&cfg, &cli.out),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(0) => ExitCode::SUCCESS,
        Ok(_) => ExitCode::FAILURE,
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::FAILURE
        }
    }
}
