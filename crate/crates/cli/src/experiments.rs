//! The two convergence studies and the eigenvalue listings.
//!
//! Every writer emits a header row, one row per iteration or eigenvalue,
//! and trailing `#` summary lines. Floats use 17 significant digits so a
//! run can be compared byte for byte.

use std::io::Write;

use camat::eigen::{canonical_eig, enumerate_eigenvalues};
use camat::io::{format_f64, format_scalar};
use camat::iterative::{gmres, power_method, random_vector, GmresOptions, PhaseReference, PowerOptions};
use camat::poisson::{build_poisson, fit_tail_rate, poisson_canonical_eigs, poisson_rates};
use camat::{CircMatrix, CircScalar, CircVector};

use crate::CliError;

/// Curves at or below this are roundoff and are left out of rate fits.
const FIT_FLOOR: f64 = 1e-14;
/// Ratio between consecutive residuals that counts as a sudden drop.
pub const DROP_FACTOR: f64 = 1e4;

/// Poisson grid size or a user matrix.
#[derive(Debug, Clone)]
pub enum System {
    Poisson(usize),
    Matrix(CircMatrix),
}

#[derive(Debug, Clone)]
pub struct PowerConfig {
    pub system: System,
    pub tol: f64,
    pub maxiter: usize,
    pub seed: u64,
    pub phase: PhaseReference,
}

#[derive(Debug, Clone)]
pub struct PowerReport {
    pub iterations: usize,
    pub converged: bool,
    pub eigenvalue: CircScalar,
    pub fitted_rate: Option<f64>,
    pub predicted_rate: f64,
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map_or_else(|| "nan".to_string(), format_f64)
}

/// Dominant eigenvalue per slice and the slowest `|λ̂₂/λ̂₁|` ratio.
fn dominant(system: &System, a: &CircMatrix) -> Result<(Vec<camat::Complex64>, f64), CliError> {
    match system {
        System::Poisson(n) => {
            let l1 = poisson_canonical_eigs(*n)?.swap_remove(0);
            Ok((l1.coeffs().to_vec(), poisson_rates(*n)?.1))
        }
        System::Matrix(_) => {
            let set = canonical_eig(a)?;
            let l1 = set.lambdas[0].coeffs().to_vec();
            let rate = match set.lambdas.get(1) {
                Some(l2) => l2.coeffs().iter().zip(&l1).map(|(b, a)| b.norm() / a.norm()).fold(0.0, f64::max),
                None => 0.0,
            };
            Ok((l1, rate))
        }
    }
}

fn operator(system: &System) -> Result<(CircMatrix, Option<CircVector>), CliError> {
    match system {
        System::Poisson(n) => {
            let p = build_poisson(*n)?;
            Ok((p.a, Some(p.f)))
        }
        System::Matrix(a) => {
            if a.rows() != a.cols() {
                return Err(CliError::Usage(format!("matrix must be square, got {}x{}", a.rows(), a.cols())));
            }
            Ok((a.clone(), None))
        }
    }
}

/// Power method from a seeded random start. Columns: `iteration`,
/// `eigvec_change_max`, then `eigval_err_<j>` = `|μ̂_j − λ̂₁,j|` per slice.
///
/// The CSV is complete even when the iteration does not converge; the
/// caller decides what that means for the exit status.
pub fn run_power_experiment(cfg: &PowerConfig, out: impl Write) -> Result<PowerReport, CliError> {
    let (a, _) = operator(&cfg.system)?;
    let (lambda1, predicted_rate) = dominant(&cfg.system, &a)?;
    let k = a.k();
    let x0 = random_vector(a.rows(), k, cfg.seed);
    let opts = PowerOptions { tol: cfg.tol, maxiter: cfg.maxiter, phase: cfg.phase, ..Default::default() };
    let r = power_method(&a, &x0, &opts)?;

    let mut w = csv::Writer::from_writer(out);
    let mut header = vec!["iteration".to_string(), "eigvec_change_max".to_string()];
    header.extend((0..k).map(|j| format!("eigval_err_{j}")));
    w.write_record(&header)?;
    for (rec, mu) in r.history.iter().zip(&r.eigenvalue_history) {
        let mut row = vec![rec.iteration.to_string(), format_f64(rec.max_metric)];
        row.extend(mu.coeffs().iter().zip(&lambda1).map(|(m, l)| format_f64((m - l).norm())));
        w.write_record(&row)?;
    }
    let metric: Vec<f64> = r.history.iter().map(|h| h.max_metric).collect();
    let fitted_rate = fit_tail_rate(&metric, FIT_FLOOR);
    let mut out = w.into_inner().map_err(|e| e.into_error())?;
    writeln!(
        out,
        "# converged={} iterations={} fitted_rate={} predicted_rate={}",
        r.converged,
        r.iterations,
        fmt_opt(fitted_rate),
        format_f64(predicted_rate)
    )?;
    writeln!(out, "# eigenvalue={}", format_scalar(&r.eigenvalue))?;
    out.flush()?;
    Ok(PowerReport {
        iterations: r.iterations,
        converged: r.converged,
        eigenvalue: r.eigenvalue,
        fitted_rate,
        predicted_rate,
    })
}

#[derive(Debug, Clone)]
pub struct GmresConfig {
    pub system: System,
    /// Replace the operator by the identity (keeps `b`).
    pub identity: bool,
    pub tmax: Option<usize>,
    pub rtol: f64,
    /// Right-hand side seed for user matrices.
    pub seed: u64,
}

#[derive(Debug, Clone)]
pub struct GmresReport {
    pub iterations: usize,
    pub converged: bool,
    pub drop_iteration: Option<usize>,
}

/// GMRES without restarts. Columns: `iteration`, `residual_max`, then
/// `sol_err_<j>` = `‖û_j − û_j^(t)‖` against a direct per-slice solve.
pub fn run_gmres_experiment(cfg: &GmresConfig, out: impl Write) -> Result<GmresReport, CliError> {
    let (a, f) = operator(&cfg.system)?;
    let k = a.k();
    let b = f.unwrap_or_else(|| random_vector(a.rows(), k, cfg.seed));
    let a = if cfg.identity { CircMatrix::identity(a.rows(), k) } else { a };
    let exact = a.solve(&b)?;
    let opts = GmresOptions { tmax: cfg.tmax.unwrap_or(a.rows()), rtol: cfg.rtol, keep_iterates: true };
    let r = gmres(&a, &b, &opts)?;

    let mut w = csv::Writer::from_writer(out);
    let mut header = vec!["iteration".to_string(), "residual_max".to_string()];
    header.extend((0..k).map(|j| format!("sol_err_{j}")));
    w.write_record(&header)?;
    for (rec, u) in r.history.iter().zip(&r.iterates) {
        let mut row = vec![rec.iteration.to_string(), format_f64(rec.max_residual)];
        row.extend((0..k).map(|j| format_f64((exact.slice(j) - u.slice(j)).norm())));
        w.write_record(&row)?;
    }
    let drop_iteration = r.drop_iteration(DROP_FACTOR);
    let mut out = w.into_inner().map_err(|e| e.into_error())?;
    writeln!(
        out,
        "# converged={} iterations={} drop_iteration={}",
        r.converged,
        r.iterations,
        drop_iteration.map_or_else(|| "none".to_string(), |d| d.to_string())
    )?;
    out.flush()?;
    Ok(GmresReport { iterations: r.iterations, converged: r.converged, drop_iteration })
}

/// Which eigenvalues `eig` lists.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EigenListing {
    Canonical,
    Real,
    All,
}

fn write_scalars(rows: &[CircScalar], out: impl Write, trailer: &[String]) -> Result<(), CliError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["index", "lambda"])?;
    for (i, l) in rows.iter().enumerate() {
        w.write_record([(i + 1).to_string(), format_scalar(l)])?;
    }
    let mut out = w.into_inner().map_err(|e| e.into_error())?;
    for line in trailer {
        writeln!(out, "# {line}")?;
    }
    out.flush()?;
    Ok(())
}

/// Eigenvalues of a matrix, one scalar literal per row.
pub fn write_eigenvalues(a: &CircMatrix, listing: EigenListing, out: impl Write) -> Result<usize, CliError> {
    let (values, trailer) = match listing {
        EigenListing::Canonical => {
            let set = canonical_eig(a)?;
            let notes = set.warnings.iter().map(|w| format!("warning={w:?}")).collect();
            (set.lambdas, notes)
        }
        EigenListing::Real => (enumerate_eigenvalues(a, true)?, Vec::new()),
        EigenListing::All => (enumerate_eigenvalues(a, false)?, Vec::new()),
    };
    write_scalars(&values, out, &trailer)?;
    Ok(values.len())
}

/// Closed-form canonical eigenvalues of the Poisson operator and its
/// extreme slice rates.
pub fn write_poisson_eigs(n: usize, out: impl Write) -> Result<(), CliError> {
    let eigs = poisson_canonical_eigs(n)?;
    let (fastest, slowest) = poisson_rates(n)?;
    write_scalars(&eigs, out, &[format!("fastest_rate={} slowest_rate={}", format_f64(fastest), format_f64(slowest))])
}
