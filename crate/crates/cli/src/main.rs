use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use tikmann::rates::CertStatus;
use tikmann_cli::experiment::EXIT_CONFIG;
use tikmann_cli::{run_experiment, run_suite, ExperimentConfig, ExperimentError, Overrides};

#[derive(Parser)]
#[command(
    name = "tikmann",
    version,
    about = "Run Tikhonov-Mann experiments and certify their rates"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Number of iteration steps.
    #[arg(long, global = true)]
    horizon: Option<u64>,
    /// Largest k for the rate tables and certification.
    #[arg(long, global = true)]
    kmax: Option<u64>,
    /// Seed for the sampled property checks.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Run a single experiment config.
    Run { config: PathBuf },
    /// Run every *.json config in a directory.
    Suite { dir: PathBuf },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let overrides = Overrides {
        horizon: cli.horizon,
        k_max: cli.kmax,
        seed: cli.seed,
        output_dir: None,
    };
    let code = match cli.command {
        Command::Run { config } => {
            let result = ExperimentConfig::load(&config)
                .map_err(ExperimentError::from)
                .and_then(|mut c| {
                    overrides.apply(&mut c);
                    if let Some(out) = &cli.out {
                        c.output_dir = out.clone();
                    }
                    let outcome = run_experiment(&c)?;
                    Ok((c.output_dir, outcome))
                });
            match result {
                Ok((dir, o)) => {
                    for c in o.checks.iter().filter(|c| !c.passed) {
                        eprintln!("check failed: {} {}", c.name, c.detail);
                    }
                    println!(
                        "M={} horizon={}: {} pass, {} fail, {} inconclusive; artifacts in {}",
                        o.m,
                        o.horizon,
                        o.count(CertStatus::Pass),
                        o.count(CertStatus::Fail),
                        o.count(CertStatus::Inconclusive),
                        dir.display()
                    );
                    o.exit_code()
                }
                Err(e) => {
                    eprintln!("error: {e}");
                    e.exit_code()
                }
            }
        }
        Command::Suite { dir } => {
            let out = cli.out.clone().unwrap_or_else(|| dir.join("results"));
            match run_suite(&dir, &overrides, &out) {
                Ok(s) => {
                    for r in &s.rows {
                        println!("{:<32} {:<5} {}", r.config, r.status(), r.message);
                    }
                    s.exit_code()
                }
                Err(e) => {
                    eprintln!("error: {e}");
                    EXIT_CONFIG
                }
            }
        }
    };
    ExitCode::from(code)
}
