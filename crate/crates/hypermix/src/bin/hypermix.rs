//! Batch experiment runner: one thin subcommand per capability, all of
//! the substance living in the library. Reports and CSV tables land in
//! the output directory; reruns with the same config and seed are
//! byte-identical (timestamps go to `*.meta.json` sidecars).

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use hypermix::report::{self, ArithMode, RunContext};
use hypermix::Error;

#[derive(Parser)]
#[command(
    name = "hypermix",
    version,
    about = "Desk-scale experiments on mixing exponential operator groups"
)]
struct Cli {
    /// JSON config file for the chosen subcommand; defaults are used
    /// when omitted.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Overrides the seed from the config.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Output directory for reports and CSV tables.
    #[arg(long, global = true, default_value = "hypermix-out")]
    out: PathBuf,

    /// Arithmetic backend where the experiment supports both.
    #[arg(long, global = true, default_value = "float")]
    arith: ArithMode,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Single-block steering: residual decay and exact invertibility.
    Steer,
    /// Multi-parameter steering on a tensor tuple of shifts.
    TensorSteer,
    /// Build and audit the sequence-space operator group.
    GroupBuild,
    /// Empirical mixing certificates with negative controls.
    MixCert,
    /// Projective orbit coverage of 3x3 generators.
    OrbitCoverage,
    /// Symbol-criterion gallery and domain facts.
    Gallery,
    /// Discretized L_p dilation and translation demos.
    LpDemo,
}

fn run(cli: Cli) -> hypermix::Result<PathBuf> {
    let ctx = {
        let mut ctx = RunContext::new(&cli.out).with_arith(cli.arith);
        if let Some(seed) = cli.seed {
            ctx = ctx.with_seed(seed);
        }
        ctx
    };
    macro_rules! dispatch {
        ($cfg_ty:ty, $runner:path, $name:literal) => {{
            let cfg: $cfg_ty = match &cli.config {
                Some(path) => report::load_config(path, $name)?,
                None => Default::default(),
            };
            $runner(&cfg, &ctx)
        }};
    }
    match cli.command {
        Command::Steer => dispatch!(report::SteerConfig, report::run_steer, "steer"),
        Command::TensorSteer => dispatch!(
            report::TensorSteerConfig,
            report::run_tensor_steer,
            "tensor-steer"
        ),
        Command::GroupBuild => dispatch!(
            report::GroupBuildConfig,
            report::run_group_build,
            "group-build"
        ),
        Command::MixCert => dispatch!(report::MixCertConfig, report::run_mix_cert, "mix-cert"),
        Command::OrbitCoverage => dispatch!(
            report::OrbitCoverageConfig,
            report::run_orbit_coverage,
            "orbit-coverage"
        ),
        Command::Gallery => dispatch!(report::GalleryConfig, report::run_gallery, "gallery"),
        Command::LpDemo => dispatch!(report::LpDemoConfig, report::run_lp_demo, "lp-demo"),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(path) => {
            println!("report written to {}", path.display());
            ExitCode::from(0)
        }
        Err(Error::Inconclusive) => {
            eprintln!("inconclusive: {}", Error::Inconclusive);
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
