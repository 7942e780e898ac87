use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};
use psi_hilfer_cli::{execute, Command, OutputFormat, RunConfig, EXIT_CONFIG};

#[derive(Debug, Clone, Copy, ValueEnum)]
enum CommandArg {
    Solve,
    Certify,
    Bound,
    Depend,
    Verify,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

/// Solve and analyze psi-Hilfer fractional integrodifferential problems.
#[derive(Debug, Parser)]
#[command(name = "psi-hilfer", version)]
struct Cli {
    #[arg(value_enum)]
    command: CommandArg,

    /// Problem file (.json or .toml)
    #[arg(long)]
    problem: PathBuf,

    /// Perturbed problem file, required by `depend`
    #[arg(long)]
    perturbed: Option<PathBuf>,

    /// Grid intervals
    #[arg(long, default_value_t = 512)]
    n: usize,

    /// Picard stopping tolerance in the weighted norm
    #[arg(long, default_value_t = 1e-10)]
    tol: f64,

    #[arg(long, default_value_t = 200)]
    max_iter: usize,

    #[arg(long, value_enum, default_value = "csv")]
    format: FormatArg,

    /// Output file; standard output when omitted
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_CONFIG } else { 0 };
            let _ = e.print();
            return ExitCode::from(code as u8);
        }
    };
    let command = match cli.command {
        CommandArg::Solve => Command::Solve,
        CommandArg::Certify => Command::Certify,
        CommandArg::Bound => Command::Bound,
        CommandArg::Depend => Command::Depend,
        CommandArg::Verify => Command::Verify,
    };
    let config = RunConfig {
        command,
        problem_path: cli.problem,
        perturbed_path: cli.perturbed,
        n: cli.n,
        tol: cli.tol,
        max_iter: cli.max_iter,
        output: cli.out,
        format: match cli.format {
            FormatArg::Csv => OutputFormat::Csv,
            FormatArg::Json => OutputFormat::Json,
        },
    };
    ExitCode::from(execute(&config) as u8)
}
