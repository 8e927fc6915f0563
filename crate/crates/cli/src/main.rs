use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use malab_cli::{read_manifest, render_summary, run, CliError, ExperimentConfig, RunOptions};

#[derive(Parser)]
#[command(name = "malab", version, about = "Complex Monge-Ampere experiments on flat tori")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve det(I + phi_{ij}) = e^F.
    Solve(RunArgs),
    /// Mollification sweep over radii and seeds.
    Mollify(RunArgs),
    /// Dini integrals, radius schedule and iteration sums.
    Moduli(RunArgs),
    /// Gradient norm ladder across Weierstrass refinements.
    Ladder(RunArgs),
    /// Bochner identity and pointwise differential inequality.
    Ineq(RunArgs),
    /// Skoda integrals and the companion equation.
    Skoda(RunArgs),
    /// Closed-form singular solution checks.
    Pogorelov(RunArgs),
    /// Run any config, or summarize a finished run with --out alone.
    Report(ReportArgs),
}

#[derive(Args)]
struct RunArgs {
    #[arg(long)]
    config: PathBuf,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    threads: Option<usize>,
    /// Overrides the config seed.
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args)]
struct ReportArgs {
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    threads: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
}

fn execute(args: RunArgs, expected: Option<&str>) -> Result<(), CliError> {
    let cfg = ExperimentConfig::load(&args.config)?;
    if let Some(kind) = expected {
        if cfg.experiment.name() != kind {
            return Err(CliError::Config {
                key: Some("experiment.kind".into()),
                message: format!(
                    "config declares `{}` but the subcommand runs `{kind}`",
                    cfg.experiment.name()
                ),
            });
        }
    }
    let opts = RunOptions {
        out: args.out,
        threads: args.threads,
        seed: args.seed,
    };
    let res = run(cfg, &opts)?;
    print!("{}", render_summary(&res.manifest, &res.out_dir));
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Solve(a) => execute(a, Some("solve")),
        Command::Mollify(a) => execute(a, Some("mollify_sweep")),
        Command::Moduli(a) => execute(a, Some("moduli_check")),
        Command::Ladder(a) => execute(a, Some("gradient_ladder")),
        Command::Ineq(a) => execute(a, Some("diff_ineq")),
        Command::Skoda(a) => execute(a, Some("skoda_companion")),
        Command::Pogorelov(a) => execute(a, Some("pogorelov")),
        Command::Report(a) => match (a.config, a.out) {
            (Some(config), out) => execute(
                RunArgs {
                    config,
                    out,
                    threads: a.threads,
                    seed: a.seed,
                },
                None,
            ),
            (None, Some(dir)) => read_manifest(&dir).map(|m| print!("{}", render_summary(&m, &dir))),
            (None, None) => Err(CliError::Config {
                key: Some("--config".into()),
                message: "report needs --config or --out".into(),
            }),
        },
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{}", e.to_json());
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
