use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};

use quantumness_cli::output::write_atomic;
use quantumness_cli::spec::{parse_grid, parse_list};
use quantumness_cli::{execute, rerun, CliError, CommandSpec, Outcome, Result};
use quantumness_core::solvers::{ExploreOptions, QuantumnessOptions, SolverConfig};

#[derive(Parser, Debug)]
#[command(name = "quantumness", version, about = "Accessible fidelity and quantumness of pure-state ensembles")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct SolverFlags {
    /// Random restarts of the seesaw
    #[arg(long, default_value_t = SolverConfig::default().restarts)]
    restarts: usize,
    /// POVM outcomes for random starts (default d^2)
    #[arg(long)]
    outcomes: Option<usize>,
    /// Convergence tolerance on the objective increase
    #[arg(long, default_value_t = SolverConfig::default().convergence_tol)]
    tol: f64,
    #[arg(long, default_value_t = SolverConfig::default().max_iterations)]
    max_iter: usize,
    /// Outcomes with tr(rho E_b) below this are pruned
    #[arg(long, default_value_t = SolverConfig::default().prune_tol)]
    prune_tol: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

impl SolverFlags {
    fn config(&self) -> SolverConfig {
        SolverConfig {
            outcomes: self.outcomes,
            restarts: self.restarts,
            max_iterations: self.max_iter,
            convergence_tol: self.tol,
            prune_tol: self.prune_tol,
            seed: self.seed,
        }
    }
}

#[derive(Args, Debug)]
struct OutputFlags {
    /// Write the primary output here (atomically) instead of stdout
    #[arg(long)]
    out: Option<PathBuf>,
    /// For sweeps: also write the JSON report here
    #[arg(long)]
    report: Option<PathBuf>,
    /// Record wall time in the report (breaks bit-identical re-runs)
    #[arg(long)]
    timing: bool,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Check an ensemble file against its invariants
    Validate {
        path: String,
        #[command(flatten)]
        output: OutputFlags,
    },
    /// Accessible fidelity of an ensemble file
    Accfid {
        path: String,
        #[command(flatten)]
        solver: SolverFlags,
        /// Cross-check against the qubit brute-force oracle at this grid resolution
        #[arg(long)]
        resolution: Option<f64>,
        #[command(flatten)]
        output: OutputFlags,
    },
    /// Quantumness of the states in a file (probs are ignored)
    Quantumness {
        path: String,
        #[command(flatten)]
        solver: SolverFlags,
        #[arg(long, default_value_t = QuantumnessOptions::default().outer_iterations)]
        outer_iterations: usize,
        #[arg(long, default_value_t = QuantumnessOptions::default().step_scale)]
        step_scale: f64,
        #[arg(long, default_value_t = QuantumnessOptions::default().polish_evals)]
        polish_evals: usize,
        #[command(flatten)]
        output: OutputFlags,
    },
    /// CSV over the two-state family with equal priors
    SweepTwoState {
        /// start:step:end or a comma list
        #[arg(long, default_value = "0:0.1:1")]
        x_grid: String,
        #[command(flatten)]
        solver: SolverFlags,
        #[command(flatten)]
        output: OutputFlags,
    },
    /// CSV over symmetric qubit constellations
    SweepSymmetric {
        #[arg(long, default_value = "2,6,12,30,100")]
        ns: String,
        #[command(flatten)]
        solver: SolverFlags,
        #[command(flatten)]
        output: OutputFlags,
    },
    /// Numeric cloning optimum against the closed form
    CloneVerify {
        #[arg(long, default_value = "0:0.05:1")]
        x_grid: String,
        /// Grid step for the closed-form argmin
        #[arg(long, default_value_t = 1e-4)]
        argmin_step: f64,
        #[command(flatten)]
        solver: SolverFlags,
        #[command(flatten)]
        output: OutputFlags,
    },
    /// Heuristic search for low-quantumness sets (upper bound only)
    ExploreQd {
        #[arg(long)]
        dim: usize,
        #[arg(long, default_value = "1,2,3,4")]
        sizes: String,
        #[arg(long, default_value_t = ExploreOptions::default().draws)]
        draws: usize,
        #[arg(long, default_value_t = ExploreOptions::default().hill_sweeps)]
        hill_sweeps: usize,
        #[arg(long, default_value_t = ExploreOptions::default().quantumness.outer_iterations)]
        outer_iterations: usize,
        #[command(flatten)]
        solver: SolverFlags,
        #[command(flatten)]
        output: OutputFlags,
    },
    /// Re-run the command echoed in a report and compare digests
    Rerun {
        #[arg(value_name = "REPORT")]
        report_path: PathBuf,
        #[command(flatten)]
        output: OutputFlags,
    },
}

fn emit(outcome: &Outcome, output: &OutputFlags) -> Result<()> {
    let json = outcome.report.to_json();
    let primary = outcome.csv.as_deref().unwrap_or(&json);
    match &output.out {
        Some(path) => write_atomic(path, primary)?,
        None => print!("{primary}"),
    }
    if let (Some(path), Some(_)) = (&output.report, &outcome.csv) {
        write_atomic(path, &json)?;
    }
    for w in &outcome.report.warnings {
        eprintln!("warning: {w}");
    }
    for b in &outcome.report.breaches {
        eprintln!("invariant breach: {b}");
    }
    if !outcome.report.converged {
        eprintln!("warning: solver did not converge");
    }
    Ok(())
}

fn run(cli: Cli) -> Result<i32> {
    let start = Instant::now();
    let (spec, output) = match cli.command {
        Command::Validate { path, output } => (CommandSpec::Validate { path }, output),
        Command::Accfid {
            path,
            solver,
            resolution,
            output,
        } => (
            CommandSpec::Accfid {
                path,
                config: solver.config(),
                resolution,
            },
            output,
        ),
        Command::Quantumness {
            path,
            solver,
            outer_iterations,
            step_scale,
            polish_evals,
            output,
        } => (
            CommandSpec::Quantumness {
                path,
                config: solver.config(),
                outer: QuantumnessOptions {
                    outer_iterations,
                    step_scale,
                    polish_evals,
                },
            },
            output,
        ),
        Command::SweepTwoState { x_grid, solver, output } => {
            let xs = parse_grid(&x_grid)?;
            (
                CommandSpec::SweepTwoState {
                    xs,
                    config: solver.config(),
                },
                output,
            )
        }
        Command::SweepSymmetric { ns, solver, output } => (
            CommandSpec::SweepSymmetric {
                ns: parse_list(&ns)?,
                config: solver.config(),
            },
            output,
        ),
        Command::CloneVerify {
            x_grid,
            argmin_step,
            solver,
            output,
        } => (
            CommandSpec::CloneVerify {
                xs: parse_grid(&x_grid)?,
                config: solver.config(),
                argmin_step,
            },
            output,
        ),
        Command::ExploreQd {
            dim,
            sizes,
            draws,
            hill_sweeps,
            outer_iterations,
            solver,
            output,
        } => {
            let defaults = ExploreOptions::default();
            let options = ExploreOptions {
                draws,
                hill_sweeps,
                quantumness: QuantumnessOptions {
                    outer_iterations,
                    ..defaults.quantumness.clone()
                },
                ..defaults
            };
            (
                CommandSpec::ExploreQd {
                    dim,
                    sizes: parse_list(&sizes)?,
                    config: solver.config(),
                    options,
                },
                output,
            )
        }
        Command::Rerun { report_path, output } => {
            let text = std::fs::read_to_string(&report_path).map_err(|source| CliError::Io {
                path: report_path.display().to_string(),
                source,
            })?;
            let (outcome, same) = rerun(&text)?;
            emit(&outcome, &output)?;
            if same {
                eprintln!("rerun: report digest matches ({})", outcome.report.digest());
                return Ok(outcome.exit_code());
            }
            eprintln!("rerun: report digest differs from the original");
            return Ok(3);
        }
    };
    let mut outcome = execute(&spec)?;
    if output.timing {
        outcome.report.wall_time_ms = Some(start.elapsed().as_secs_f64() * 1e3);
    }
    emit(&outcome, &output)?;
    Ok(outcome.exit_code())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => ExitCode::from(code as u8),
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.exit_code() as u8)
        }
    }
}
