use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use simulift_cli::{
    run_lift, run_search, run_solve, run_verify, ProblemFile, SolveFlags, EXIT_INPUT_ERROR,
};

/// Relative centers, pointwise lifts and their verification suites.
#[derive(Parser)]
#[command(name = "simulift", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve one relative m-center problem (single-atom file) or the
    /// atomwise best approximation of a single function.
    Solve {
        /// Problem file (JSON)
        file: PathBuf,
        /// Override the center exponent m from the file
        #[arg(long)]
        m: Option<f64>,
        /// Certificate-residual tolerance
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
        /// Total iteration budget, split across multi-starts
        #[arg(long = "max-iter", default_value_t = 50_000)]
        max_iter: usize,
        /// Seed echoed into the report digest
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Compute the pointwise lift, solve the joint problem directly and
    /// report whether the lift is optimal.
    Lift {
        /// Problem file (JSON)
        file: PathBuf,
        /// Override the center exponent m from the file
        #[arg(long)]
        m: Option<f64>,
        /// Certificate-residual tolerance
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
        /// Total iteration budget, split across multi-starts
        #[arg(long = "max-iter", default_value_t = 50_000)]
        max_iter: usize,
        /// Seed echoed into the report digest
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Run a verification suite and print one pass/fail line per property.
    Verify {
        /// Suite name: example33, lifting, hilbert, norms, hull, or all
        #[arg(long)]
        suite: String,
        /// Instance count for the randomized suites (suite default if omitted)
        #[arg(long)]
        instances: Option<usize>,
        #[arg(long, default_value_t = 7)]
        seed: u64,
    },
    /// Counterexample tooling.
    Counterexample {
        #[command(subcommand)]
        action: CounterexampleAction,
    },
}

#[derive(Subcommand)]
enum CounterexampleAction {
    /// Search for a three-point set whose 2-center set avoids its convex
    /// hull, and freeze the first find as a fixture.
    Search {
        /// Integrability exponent p (p = 2 is rejected)
        #[arg(long)]
        p: f64,
        /// Number of unit-weight atoms
        #[arg(long)]
        atoms: usize,
        /// Fiber dimension
        #[arg(long)]
        dim: usize,
        /// Candidate budget
        #[arg(long, default_value_t = 100_000)]
        budget: usize,
        #[arg(long, default_value_t = 7)]
        seed: u64,
        /// Fixture output path
        #[arg(long)]
        out: PathBuf,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let code = match cli.command {
        Command::Solve {
            file,
            m,
            tol,
            max_iter,
            seed,
        } => run_report(&file, m, tol, max_iter, seed, run_solve),
        Command::Lift {
            file,
            m,
            tol,
            max_iter,
            seed,
        } => run_report(&file, m, tol, max_iter, seed, run_lift),
        Command::Verify {
            suite,
            instances,
            seed,
        } => {
            let (output, code) = run_verify(&suite, instances, seed);
            if code == EXIT_INPUT_ERROR {
                eprint!("{output}");
            } else {
                print!("{output}");
            }
            code
        }
        Command::Counterexample {
            action:
                CounterexampleAction::Search {
                    p,
                    atoms,
                    dim,
                    budget,
                    seed,
                    out,
                },
        } => match run_search(p, atoms, dim, budget, seed, &out) {
            Ok((output, code)) => {
                print!("{output}");
                code
            }
            Err(e) => {
                eprintln!("error: {e}");
                EXIT_INPUT_ERROR
            }
        },
    };
    ExitCode::from(code as u8)
}

type Runner =
    fn(&ProblemFile, &SolveFlags) -> Result<(simulift_cli::ReportFile, i32), simulift_cli::CliError>;

fn run_report(
    file: &std::path::Path,
    m: Option<f64>,
    tol: f64,
    max_iter: usize,
    seed: u64,
    runner: Runner,
) -> i32 {
    let problem = match ProblemFile::load(file) {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_INPUT_ERROR;
        }
    };
    let flags = SolveFlags {
        m,
        tolerance: tol,
        max_iterations: max_iter,
        seed,
    };
    match runner(&problem, &flags) {
        Ok((report, code)) => {
            println!(
                "{}",
                serde_json::to_string_pretty(&report).expect("report serializes")
            );
            code
        }
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_INPUT_ERROR
        }
    }
}
