//! Command-line front end: scenario files in, reports and CSV time series
//! out.

mod commands;
mod scenario;
mod selftest;

pub use commands::{EXIT_CONFIG, EXIT_NEGATIVE, EXIT_OK};
pub use scenario::{parse_scenarios, Scenario};

use clap::{Parser, Subcommand};
use std::path::{Path, PathBuf};

use commands::OutputContext;

#[derive(Parser)]
#[command(
    name = "spinlie",
    about = "Integrability analysis and exact propagators for driven spin Hamiltonians",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Directory for output artifacts
    #[arg(long, global = true, default_value = ".")]
    out: PathBuf,

    /// Override the residual tolerance (check/solve/fsys) or the fidelity
    /// tolerance (compare)
    #[arg(long, global = true)]
    tolerance: Option<f64>,

    /// Override the number of grid steps
    #[arg(long, global = true)]
    steps: Option<usize>,

    /// Override gamma (radians), replacing "auto"
    #[arg(long, global = true, allow_hyphen_values = true)]
    gamma: Option<f64>,
}

#[derive(Subcommand)]
enum Command {
    /// Decide integrability of the scenario field
    Check { file: PathBuf },
    /// Emit the exact propagation as CSV (integrable scenarios only)
    Solve { file: PathBuf },
    /// Run the numerical reference schemes and their cross-metrics
    Oracle { file: PathBuf },
    /// Compare the exact propagator against the numerical schemes
    Compare { file: PathBuf },
    /// Solve the transformation system and emit the coordinate trajectory
    Fsys { file: PathBuf },
    /// Run the built-in invariant suite
    Selftest,
}

fn scenario_stem(file: &Path) -> String {
    file.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "scenario".into())
}

fn run_scenarios(
    file: &Path,
    out_dir: &Path,
    steps: Option<usize>,
    gamma: Option<f64>,
    tolerance: Option<f64>,
    tolerance_is_fidelity: bool,
    runner: impl Fn(&Scenario, &OutputContext) -> i32,
) -> i32 {
    let text = match std::fs::read_to_string(file) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("cannot read {}: {e}", file.display());
            return EXIT_CONFIG;
        }
    };
    let mut scenarios = match parse_scenarios(&text) {
        Ok(s) => s,
        Err(e) => {
            eprintln!("{e}");
            return EXIT_CONFIG;
        }
    };
    let batch = scenarios.len() > 1;
    let stem = scenario_stem(file);
    let mut worst = EXIT_OK;
    for (i, scenario) in scenarios.iter_mut().enumerate() {
        if let Err(e) =
            commands::apply_overrides(scenario, steps, gamma, tolerance, tolerance_is_fidelity)
        {
            eprintln!("{e}");
            return EXIT_CONFIG;
        }
        let ctx = OutputContext {
            dir: out_dir.to_path_buf(),
            stem: if batch {
                format!("{stem}_{i}")
            } else {
                stem.clone()
            },
        };
        if batch {
            println!("--- scenario {i} ---");
        }
        worst = worst.max(runner(scenario, &ctx));
    }
    worst
}

/// Parses the command line from the process arguments and runs it.
pub fn run() -> i32 {
    run_from(std::env::args_os())
}

/// Testable entry point.
pub fn run_from<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            // clap handles --help/--version as "errors" with success status
            let code = if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    match &cli.command {
        Command::Check { file } => run_scenarios(
            file,
            &cli.out,
            cli.steps,
            cli.gamma,
            cli.tolerance,
            false,
            commands::cmd_check,
        ),
        Command::Solve { file } => run_scenarios(
            file,
            &cli.out,
            cli.steps,
            cli.gamma,
            cli.tolerance,
            false,
            commands::cmd_solve,
        ),
        Command::Oracle { file } => run_scenarios(
            file,
            &cli.out,
            cli.steps,
            cli.gamma,
            cli.tolerance,
            false,
            commands::cmd_oracle,
        ),
        Command::Compare { file } => run_scenarios(
            file,
            &cli.out,
            cli.steps,
            cli.gamma,
            cli.tolerance,
            true,
            commands::cmd_compare,
        ),
        Command::Fsys { file } => run_scenarios(
            file,
            &cli.out,
            cli.steps,
            cli.gamma,
            cli.tolerance,
            false,
            commands::cmd_fsys,
        ),
        Command::Selftest => selftest::run_checks(&selftest::all_checks()),
    }
}
