use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use riemreach_cli::{run_gvs, run_reach, run_validate, Overrides, RunError, Scenario};

/// Guaranteed reachable sets on Riemannian manifolds.
#[derive(Parser)]
#[command(name = "riemreach", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate the guaranteed velocity set around x0.
    Gvs(Common),
    /// Sample the guaranteed reachable set.
    Reach(Common),
    /// Sample surrogate and true systems and check containment.
    Validate(Common),
}

#[derive(Args)]
struct Common {
    /// Scenario file.
    #[arg(long)]
    config: PathBuf,
    /// Output directory, created if missing.
    #[arg(long, default_value = "out")]
    out: PathBuf,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    dt: Option<f64>,
    #[arg(long)]
    horizon: Option<f64>,
    #[arg(long)]
    trajectories: Option<usize>,
    /// Worker threads; 0 uses every core.
    #[arg(long)]
    workers: Option<usize>,
}

impl Common {
    fn overrides(&self) -> Overrides {
        Overrides {
            seed: self.seed,
            dt: self.dt,
            horizon: self.horizon,
            trajectories: self.trajectories,
            workers: self.workers,
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (args, run): (&Common, fn(&Scenario, &std::path::Path) -> Result<_, RunError>) = match &cli.command {
        Command::Gvs(a) => (a, run_gvs),
        Command::Reach(a) => (a, run_reach),
        Command::Validate(a) => (a, run_validate),
    };
    let result = Scenario::load(&args.config, &args.overrides())
        .map_err(RunError::from)
        .and_then(|sc| run(&sc, &args.out));
    match result {
        Ok(summary) => {
            let violations = summary.violations();
            eprintln!(
                "{}: alpha(x0) = {:.6}, wrote {} in {:.2}s",
                summary.command,
                summary.alpha_at_x0,
                args.out.display(),
                summary.wall_time_s
            );
            if violations > 0 {
                eprintln!("containment violations: {violations}");
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
