//! The periodic Poisson test problem.
//!
//! Five-point Laplacian on an `N × N` grid, Dirichlet in `x` and periodic in
//! `y`. Grouping unknowns by `x` gives an `(N−1) × (N−1)` tridiagonal matrix
//! over `K_N` whose Fourier slices are `tridiag(−1, 4 + δ_j, −1)` with
//! `δ_j = −2cos(2πj/N)`.

use std::f64::consts::PI;

use crate::error::{CircError, Result};
use crate::linalg::{CircMatrix, CircVector};
use crate::scalar::CircScalar;

#[derive(Debug, Clone)]
pub struct PoissonSystem {
    pub n: usize,
    pub a: CircMatrix,
    pub f: CircVector,
    /// `(row, tube, value)`, 0-based.
    pub spike: (usize, usize, f64),
}

fn check_grid(n: usize) -> Result<()> {
    if n < 3 {
        return Err(CircError::DimensionMismatch(format!("Poisson grid needs N >= 3, got {n}")));
    }
    Ok(())
}

/// `(4, −1, 0, …, 0, −1)` on the diagonal, `(−1, 0, …, 0)` beside it, and a
/// right-hand side with a single `1/N²` at row `N/2`, tube 2 (1-based).
pub fn build_poisson(n: usize) -> Result<PoissonSystem> {
    check_grid(n)?;
    let mut diag = vec![0.0; n];
    diag[0] = 4.0;
    diag[1] = -1.0;
    diag[n - 1] = -1.0;
    let mut off = vec![0.0; n];
    off[0] = -1.0;
    let diag = CircScalar::from_real(&diag)?;
    let off = CircScalar::from_real(&off)?;
    let m = n - 1;
    let mut entries = Vec::new();
    for i in 0..m {
        entries.push((i, i, diag.clone()));
        if i + 1 < m {
            entries.push((i, i + 1, off.clone()));
            entries.push((i + 1, i, off.clone()));
        }
    }
    let a = CircMatrix::from_triplets(m, m, n, entries)?;
    let spike = (n / 2 - 1, 1, 1.0 / (n * n) as f64);
    let mut params = vec![0.0; m * n];
    params[spike.0 * n + spike.1] = spike.2;
    let f = CircMatrix::from_real_params(m, 1, n, &params)?;
    Ok(PoissonSystem { n, a, f, spike })
}

/// `δ_j = −2cos(2πj/N)` for 0-based slice `j`.
pub fn delta(n: usize, j: usize) -> f64 {
    -2.0 * (2.0 * PI * j as f64 / n as f64).cos()
}

/// Closed-form canonical eigenvalues `(4 + 2cos(iπ/N), −1, 0, …, 0, −1)`,
/// `i = 1..N−1`, already in descending magnitude.
pub fn poisson_canonical_eigs(n: usize) -> Result<Vec<CircScalar>> {
    check_grid(n)?;
    (1..n)
        .map(|i| {
            let mut p = vec![0.0; n];
            p[0] = 4.0 + 2.0 * (i as f64 * PI / n as f64).cos();
            p[1] = -1.0;
            p[n - 1] = -1.0;
            CircScalar::from_real(&p)
        })
        .collect()
}

/// Power-method convergence ratio `λ₂/λ₁` of slice `j`.
pub fn slice_rate(n: usize, j: usize) -> f64 {
    let nf = n as f64;
    let d = delta(n, j);
    (4.0 + d + 2.0 * (2.0 * PI / nf).cos()) / (4.0 + d + 2.0 * (PI / nf).cos())
}

/// `(fastest, slowest)` slice ratios over all slices.
pub fn poisson_rates(n: usize) -> Result<(f64, f64)> {
    check_grid(n)?;
    let rates: Vec<f64> = (0..n).map(|j| slice_rate(n, j)).collect();
    let fastest = rates.iter().copied().fold(f64::INFINITY, f64::min);
    let slowest = rates.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    Ok((fastest, slowest))
}

/// Geometric rate from an ordinary least-squares fit of `ln(values)` over
/// the final `min(50, len/2)` points. Entries at or below `floor` are cut
/// off first, so a curve that has hit roundoff is not fitted there.
pub fn fit_tail_rate(values: &[f64], floor: f64) -> Option<f64> {
    let usable = values.iter().position(|&v| v.is_nan() || v <= floor).unwrap_or(values.len());
    let values = &values[..usable];
    let count = 50.min(values.len() / 2);
    if count < 2 {
        return None;
    }
    let tail = &values[values.len() - count..];
    let xs: Vec<f64> = (0..count).map(|i| i as f64).collect();
    let ys: Vec<f64> = tail.iter().map(|v| v.ln()).collect();
    let mx = xs.iter().sum::<f64>() / count as f64;
    let my = ys.iter().sum::<f64>() / count as f64;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    Some((sxy / sxx).exp())
}
