use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use momentcone::{ExecPolicy, SolverConfig};
use momentcone_cli::report::to_json;
use momentcone_cli::run::EXIT_ERROR;
use momentcone_cli::{load_instance, run, CliError, Command, RunOptions};

#[derive(Parser)]
#[command(name = "momentcone", version, about = "Interior membership tests for truncated moment cones")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Decide whether the moments lie in the interior of the cone.
    Check {
        instance: PathBuf,
        #[command(flatten)]
        flags: Flags,
    },
    /// Solve, then write the maximum-entropy density model to OUT.
    Reconstruct {
        instance: PathBuf,
        out: PathBuf,
        #[command(flatten)]
        flags: Flags,
    },
    /// Barrier value f*(y) and its gradient p*.
    Barrier {
        instance: PathBuf,
        #[command(flatten)]
        flags: Flags,
    },
}

#[derive(Args)]
struct Flags {
    /// Gauss points per axis (box), per angle (sphere) or Monte Carlo samples.
    #[arg(long, env = "MOMENTCONE_QUAD_ORDER")]
    quad_order: Option<usize>,
    /// Relative gradient tolerance.
    #[arg(long, default_value_t = 1e-8)]
    tol: f64,
    #[arg(long, default_value_t = 200)]
    max_iters: usize,
    /// Include the iteration trace in the report.
    #[arg(long)]
    trace: bool,
    /// Evaluate quadrature sums on all cores (results are identical).
    #[arg(long)]
    parallel: bool,
    /// Tolerance for the moment check on the independent, finer rule.
    #[arg(long, default_value_t = 1e-6)]
    verify_tol: f64,
    /// Seed for Monte Carlo sphere rules.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Write the report here instead of stdout.
    #[arg(long, short)]
    output: Option<PathBuf>,
}

impl Flags {
    fn options(&self) -> RunOptions {
        RunOptions {
            quad_order: self.quad_order,
            solver: SolverConfig {
                grad_tol: self.tol,
                max_iters: self.max_iters,
                ..SolverConfig::default()
            },
            policy: if self.parallel { ExecPolicy::Parallel } else { ExecPolicy::Sequential },
            trace: self.trace,
            verify_tol: self.verify_tol,
            seed: self.seed,
            ..RunOptions::default()
        }
    }
}

fn write(path: &Path, text: &str) -> Result<(), CliError> {
    std::fs::write(path, text).map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display())))
}

fn execute(cmd: Cmd) -> Result<i32, CliError> {
    let (command, instance, out, flags) = match cmd {
        Cmd::Check { instance, flags } => (Command::Check, instance, None, flags),
        Cmd::Reconstruct { instance, out, flags } => (Command::Reconstruct, instance, Some(out), flags),
        Cmd::Barrier { instance, flags } => (Command::Barrier, instance, None, flags),
    };
    let inst = load_instance(&instance)?;
    let outcome = run(command, &inst, &flags.options())?;
    if let (Some(out), Some(model)) = (&out, &outcome.model) {
        write(out, &to_json(model))?;
    }
    let text = to_json(&outcome.report);
    match &flags.output {
        Some(p) => write(p, &text)?,
        None => print!("{text}"),
    }
    if outcome.exit_code != 0 {
        eprintln!("{}", outcome.report.message);
    }
    Ok(outcome.exit_code)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli.command) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_ERROR as u8)
        }
    }
}
