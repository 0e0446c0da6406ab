use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use camat::io::read_cam;
use camat::iterative::PhaseReference;
use camat_cli::experiments::{
    run_gmres_experiment, run_power_experiment, write_eigenvalues, write_poisson_eigs, EigenListing, GmresConfig,
    PowerConfig, System,
};
use camat_cli::CliError;
use clap::{Args, Parser, Subcommand, ValueEnum};

/// Circulant-algebra experiments: power method and GMRES on the periodic
/// Poisson problem, and eigenvalues of matrices over K_k.
#[derive(Debug, Parser)]
#[command(name = "camat", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Format {
    Csv,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Phase {
    Largest,
    First,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Listing {
    Canonical,
    Real,
    All,
}

#[derive(Debug, Args)]
struct Common {
    /// Poisson grid size N (k = N, matrix size N - 1).
    #[arg(long, env = "CAMAT_N", default_value_t = 50)]
    n: usize,
    /// Read the operator from a CAM file instead of building the Poisson matrix.
    #[arg(long, env = "CAMAT_MATRIX")]
    matrix: Option<PathBuf>,
    /// Output file; standard output when absent.
    #[arg(long, env = "CAMAT_OUT")]
    out: Option<PathBuf>,
    #[arg(long, env = "CAMAT_FORMAT", value_enum, default_value_t = Format::Csv)]
    format: Format,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Power method from a seeded random start vector.
    Power {
        #[command(flatten)]
        common: Common,
        #[arg(long, env = "CAMAT_TOL", default_value_t = 1e-10)]
        tol: f64,
        #[arg(long, env = "CAMAT_MAXITER", default_value_t = 100_000)]
        maxiter: usize,
        #[arg(long, env = "CAMAT_SEED", default_value_t = 0)]
        seed: u64,
        /// Entry whose angle is divided out in the convergence test.
        #[arg(long, env = "CAMAT_PHASE", value_enum, default_value_t = Phase::Largest)]
        phase: Phase,
    },
    /// GMRES without restarts on A u = f.
    Gmres {
        #[command(flatten)]
        common: Common,
        /// Relative residual target.
        #[arg(long, env = "CAMAT_TOL", default_value_t = 1e-10)]
        tol: f64,
        /// Maximum Krylov dimension (default: matrix size).
        #[arg(long, env = "CAMAT_MAXITER")]
        maxiter: Option<usize>,
        /// Right-hand side seed when --matrix is given.
        #[arg(long, env = "CAMAT_SEED", default_value_t = 0)]
        seed: u64,
        /// Solve with the identity in place of A (debugging aid).
        #[arg(long, env = "CAMAT_IDENTITY")]
        identity: bool,
    },
    /// Eigenvalues of a matrix, as scalar literals.
    Eig {
        #[command(flatten)]
        common: Common,
        #[arg(long, env = "CAMAT_LISTING", value_enum, default_value_t = Listing::Canonical)]
        listing: Listing,
    },
    /// Closed-form canonical eigenvalues of the Poisson operator.
    PoissonEigs {
        #[command(flatten)]
        common: Common,
    },
}

fn system(common: &Common) -> Result<System, CliError> {
    match &common.matrix {
        Some(path) => Ok(System::Matrix(read_cam(BufReader::new(File::open(path)?))?)),
        None => Ok(System::Poisson(common.n)),
    }
}

fn output(common: &Common) -> Result<Box<dyn Write>, CliError> {
    let Format::Csv = common.format;
    Ok(match &common.out {
        Some(path) => Box::new(BufWriter::new(File::create(path)?)),
        None => Box::new(BufWriter::new(std::io::stdout().lock())),
    })
}

fn run(cli: Cli) -> Result<i32, CliError> {
    match cli.command {
        Command::Power { common, tol, maxiter, seed, phase } => {
            let phase = match phase {
                Phase::Largest => PhaseReference::LargestEntry,
                Phase::First => PhaseReference::FirstEntry,
            };
            let cfg = PowerConfig { system: system(&common)?, tol, maxiter, seed, phase };
            let report = run_power_experiment(&cfg, output(&common)?)?;
            if !report.converged {
                eprintln!("camat: power method did not converge in {} iterations", report.iterations);
                return Ok(2);
            }
        }
        Command::Gmres { common, tol, maxiter, seed, identity } => {
            let cfg = GmresConfig { system: system(&common)?, identity, tmax: maxiter, rtol: tol, seed };
            let report = run_gmres_experiment(&cfg, output(&common)?)?;
            if !report.converged {
                eprintln!("camat: GMRES did not converge in {} iterations", report.iterations);
                return Ok(2);
            }
        }
        Command::Eig { common, listing } => {
            let a = match system(&common)? {
                System::Matrix(a) => a,
                System::Poisson(n) => camat::poisson::build_poisson(n)?.a,
            };
            let listing = match listing {
                Listing::Canonical => EigenListing::Canonical,
                Listing::Real => EigenListing::Real,
                Listing::All => EigenListing::All,
            };
            write_eigenvalues(&a, listing, output(&common)?)?;
        }
        Command::PoissonEigs { common } => write_poisson_eigs(common.n, output(&common)?)?,
    }
    Ok(0)
}

fn main() -> ExitCode {
    // clap's own usage errors exit with 2, which here means "no convergence"
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if e.use_stderr() => {
            let _ = e.print();
            return ExitCode::from(1);
        }
        Err(e) => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("camat: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
