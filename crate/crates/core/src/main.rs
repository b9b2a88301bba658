use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use paraek::runner::{parse_config, run_suite, Suite};

/// Paradifferential calculus checks and a local solver for the
/// Euler–Korteweg system on the torus. Thread count follows
/// `RAYON_NUM_THREADS`.
#[derive(Parser)]
#[command(name = "paraek", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Io {
    /// TOML run configuration.
    #[arg(long)]
    config: PathBuf,
    /// Output directory; overrides `output` in the configuration.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Paraproducts, localization, quantization, composition,
    /// diagonalization and paralinearization.
    VerifyCalculus(Io),
    /// Uniformity in ε of the mollified flows and the modified energy.
    StudyEnergy(Io),
    /// The iterative scheme against the reference solver.
    Solve(Io),
    /// Galerkin rate and continuity of the flow map.
    StudyConvergence(Io),
    /// Time reversibility through the involution S.
    CheckReversibility(Io),
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (suite, io) = match cli.command {
        Command::VerifyCalculus(io) => (Suite::Calculus, io),
        Command::StudyEnergy(io) => (Suite::Energy, io),
        Command::Solve(io) => (Suite::Scheme, io),
        Command::StudyConvergence(io) => (Suite::Convergence, io),
        Command::CheckReversibility(io) => (Suite::Reversibility, io),
    };
    let cfg = match parse_config(&io.config) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("{}: {e}", io.config.display());
            return ExitCode::from(2);
        }
    };
    let out = io
        .out
        .or_else(|| cfg.output.clone())
        .unwrap_or_else(|| PathBuf::from("out"));
    match run_suite(&cfg, suite, &out) {
        Ok(o) => {
            for r in &o.reports {
                let status = if r.passed() { "PASS" } else { "FAIL" };
                println!("{status} c{:02} {}", r.id, r.title);
                for m in &r.metrics {
                    println!("    {} = {:e} (limit {:e})", m.name, m.value, m.limit);
                }
            }
            if o.passed() {
                ExitCode::SUCCESS
            } else {
                eprintln!("failing metrics: {}", o.failures().join(", "));
                ExitCode::FAILURE
            }
        }
        Err(e) => {
            eprintln!("suite {} aborted: {e}", suite.name());
            ExitCode::FAILURE
        }
    }
}
