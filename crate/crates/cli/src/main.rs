//! `seqmeas` — verify, sweep, and demo the entanglement generated by
//! sequential coherent measurements.

use clap::{Args, Parser, Subcommand};
use seqmeas_cli::config::{parse_dims, parse_grid, RunConfig};
use seqmeas_cli::demo::{cmd_demo, DemoName};
use seqmeas_cli::sweep::{cmd_sweep, Axis};
use seqmeas_cli::verify::cmd_verify;
use seqmeas_cli::{CliError, EXIT_BOUND_FAILED, EXIT_OK, EXIT_USAGE};
use std::path::PathBuf;

#[derive(Parser)]
#[command(
    name = "seqmeas",
    version,
    about = "Verification laboratory for entanglement generated by sequential coherent measurements",
    long_about = "Simulates chains of coherent measurements exactly, evaluates the \
                  entropic quantities they generate, and certifies every bound and \
                  identity the library implements. Runs are deterministic in the seed: \
                  the same configuration always produces byte-identical output."
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args)]
struct CommonArgs {
    /// Master seed; every instance derives its own seed from it.
    #[arg(long, default_value_t = 42)]
    seed: u64,

    /// Comma-separated system dimensions to cover (each in 2..=8).
    #[arg(long, default_value = "2,3")]
    dims: String,

    /// Instances per (family, dimension) pair.
    #[arg(long, default_value_t = 100)]
    trials: usize,

    /// Output file (JSON lines for verify, CSV for sweep); stdout when
    /// omitted.
    #[arg(long)]
    out: Option<PathBuf>,

    /// Worker threads claiming instances; the output does not depend on
    /// this.
    #[arg(long, default_value_t = 1)]
    workers: usize,

    /// Tolerance override, repeatable: key=value with key one of
    /// atol_exact, atol_sdp, slack_tol, slack_tol_sdp.
    #[arg(long = "tolerance", value_name = "KEY=VALUE")]
    tolerance: Vec<String>,

    /// Verify one scenario file (JSON) instead of the random campaign.
    #[arg(long)]
    scenario: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run the full regression campaign (or one scenario file) and write
    /// one JSON record per verified bound.
    Verify {
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Render the verified quantities as CSV curves along one axis.
    Sweep {
        #[command(flatten)]
        common: CommonArgs,

        /// Which parameter to vary.
        #[arg(long, value_enum)]
        axis: Axis,

        /// Comma-separated grid for the theta or device-mixing axis
        /// (defaults: 9 angles over [0, π/4]; 11 mixing values over [0, 1]).
        #[arg(long)]
        grid: Option<String>,
    },
    /// Print a narrated walkthrough of one headline effect.
    Demo {
        /// Which walkthrough to print.
        #[arg(value_enum)]
        name: DemoName,

        /// Tolerance override, repeatable: key=value.
        #[arg(long = "tolerance", value_name = "KEY=VALUE")]
        tolerance: Vec<String>,
    },
}

fn build_config(common: &CommonArgs) -> Result<RunConfig, CliError> {
    let dims = parse_dims(&common.dims).map_err(CliError::Usage)?;
    let mut cfg = RunConfig {
        seed: common.seed,
        dims,
        trials: common.trials,
        scenario_path: common.scenario.clone(),
        out_path: common.out.clone(),
        workers: common.workers,
        ..RunConfig::default()
    };
    for spec in &common.tolerance {
        cfg.set_tolerance(spec)?;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn run(cli: Cli) -> Result<bool, CliError> {
    match cli.cmd {
        Cmd::Verify { common } => {
            let cfg = build_config(&common)?;
            cmd_verify(&cfg)
        }
        Cmd::Sweep { common, axis, grid } => {
            let cfg = build_config(&common)?;
            let grid = match grid {
                Some(text) => Some(parse_grid(&text).map_err(CliError::Usage)?),
                None => None,
            };
            cmd_sweep(&cfg, axis, grid)
        }
        Cmd::Demo { name, tolerance } => {
            let mut cfg = RunConfig::default();
            for spec in &tolerance {
                cfg.set_tolerance(spec)?;
            }
            cmd_demo(name, &cfg.tolerances)
        }
    }
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        // Clap prints help/version (exit 0) and usage errors (exit 2)
        // itself.
        Err(e) => e.exit(),
    };
    let code = match run(cli) {
        Ok(true) => EXIT_OK,
        Ok(false) => EXIT_BOUND_FAILED,
        Err(e) => {
            eprintln!("{}", e);
            EXIT_USAGE
        }
    };
    std::process::exit(code);
}
