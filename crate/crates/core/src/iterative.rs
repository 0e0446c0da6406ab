//! The power method, the Arnoldi process and GMRES over `K_k`.
//!
//! All three are written with the algebra's own operations. In Fourier
//! space each one is `k` independent runs of the ordinary method, one per
//! slice, which is why a slice can converge or break down on its own.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{CircError, Result};
use crate::exec;
use crate::linalg::{CircMatrix, CircVector};
use crate::scalar::{AnglePolicy, CircScalar, SpectralFn};
use crate::spectral::FourierBlocks;

/// Relative size of `ĥ_{j+1,j}` that counts as an Arnoldi breakdown.
pub const BREAKDOWN_TOL: f64 = 1e-12;

/// Which entry's angle the power-method convergence test divides out.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PhaseReference {
    /// `angle(x_1)`, the first entry of each iterate. Fails to settle when
    /// the dominant eigenvector has a vanishing first component in a slice.
    FirstEntry,
    /// Per slice, the component of largest modulus in the newer iterate;
    /// both iterates are rotated by their own value at that component.
    #[default]
    LargestEntry,
}

/// What the power method does when `‖A∘x‖` is a zero divisor.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum BreakdownPolicy {
    #[default]
    Error,
    /// Normalize the nonzero slices and leave the zero slices at zero.
    RenormalizeNonzero,
}

#[derive(Debug, Clone)]
pub struct PowerOptions {
    pub tol: f64,
    pub maxiter: usize,
    pub phase: PhaseReference,
    pub breakdown: BreakdownPolicy,
}

impl Default for PowerOptions {
    fn default() -> Self {
        Self { tol: 1e-10, maxiter: 10_000, phase: PhaseReference::default(), breakdown: BreakdownPolicy::default() }
    }
}

/// Per-iteration change of the angle-normalized iterate.
#[derive(Debug, Clone, PartialEq)]
pub struct PowerRecord {
    pub iteration: usize,
    /// Fourier coefficients of `‖angle(x_p^(i))⁻¹∘x^(i) − angle(x_p^(i-1))⁻¹∘x^(i-1)‖`.
    pub per_slice: Vec<f64>,
    pub max_metric: f64,
}

#[derive(Debug, Clone)]
pub struct PowerResult {
    pub eigenvector: CircVector,
    /// Rayleigh quotient of the final iterate.
    pub eigenvalue: CircScalar,
    pub history: Vec<PowerRecord>,
    /// Rayleigh quotient `x^(i-1)* ∘ A ∘ x^(i-1)` seen at iteration `i`.
    pub eigenvalue_history: Vec<CircScalar>,
    pub converged: bool,
    pub iterations: usize,
}

impl PowerResult {
    /// `Err(NoConvergence)` when the tolerance was not reached.
    pub fn require_converged(self) -> Result<Self> {
        if self.converged {
            Ok(self)
        } else {
            Err(CircError::NoConvergence { iterations: self.iterations })
        }
    }
}

fn check_square_system(a: &CircMatrix, x: &CircVector) -> Result<()> {
    if a.rows() != a.cols() || x.rows() != a.rows() || x.cols() != 1 || x.k() != a.k() {
        return Err(CircError::DimensionMismatch(format!(
            "{}x{} operator with {}x{} vector",
            a.rows(),
            a.cols(),
            x.rows(),
            x.cols()
        )));
    }
    Ok(())
}

/// `α⁻¹` with zero coefficients left at zero, or an error listing them.
fn normalizer(alpha: &CircScalar, policy: BreakdownPolicy) -> Result<CircScalar> {
    match alpha.inverse() {
        Ok(inv) => Ok(inv),
        Err(e) if policy == BreakdownPolicy::Error => Err(e),
        Err(_) => {
            let bad = alpha.zero_divisor_slices();
            let coeffs = alpha
                .coeffs()
                .iter()
                .enumerate()
                .map(|(j, c)| if bad.contains(&j) { Complex64::new(0.0, 0.0) } else { c.inv() })
                .collect();
            Ok(CircScalar::from_coeffs(coeffs, alpha.is_real()))
        }
    }
}

/// `angle(γ_new)⁻¹ ∘ x_new − angle(γ_old)⁻¹ ∘ x_old` for the chosen phase
/// reference. An orthogonal circulant's inverse is its conjugate.
fn phase_difference(new: &CircVector, old: &CircVector, phase: PhaseReference) -> Result<CircVector> {
    let k = new.k();
    let (g_new, g_old) = match phase {
        PhaseReference::FirstEntry => {
            let lenient = SpectralFn::Angle(AnglePolicy::Lenient);
            (new.get(0, 0).spectral_map(lenient)?, old.get(0, 0).spectral_map(lenient)?)
        }
        PhaseReference::LargestEntry => {
            let pivots: Vec<usize> = (0..k)
                .map(|j| {
                    let s = new.slice(j);
                    (0..s.nrows()).max_by(|&a, &b| s[(a, 0)].norm().total_cmp(&s[(b, 0)].norm())).unwrap_or(0)
                })
                .collect();
            let pick = |v: &CircVector| {
                let coeffs = (0..k).map(|j| v.slice(j)[(pivots[j], 0)]).collect();
                CircScalar::from_coeffs(coeffs, false).spectral_map(SpectralFn::Angle(AnglePolicy::Lenient))
            };
            (pick(new)?, pick(old)?)
        }
    };
    new.scale(&g_new.conj())?.sub(&old.scale(&g_old.conj())?)
}

/// Real vector with every time-domain parameter uniform in `[−1, 1]`,
/// reproducible from `seed`.
pub fn random_vector(n: usize, k: usize, seed: u64) -> CircVector {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let params: Vec<f64> = (0..n * k).map(|_| rng.gen_range(-1.0..=1.0)).collect();
    CircMatrix::from_real_params(n, 1, k, &params).expect("n*k parameters")
}

/// `⟨A∘x, x⟩ ∘ ⟨x, x⟩⁻¹`.
pub fn rayleigh_quotient(a: &CircMatrix, x: &CircVector) -> Result<CircScalar> {
    check_square_system(a, x)?;
    let ax = a.matmul(x)?;
    let num = ax.inner_product(x)?;
    let den = x.inner_product(x)?.inverse()?;
    Ok(&num * &den)
}

/// The power method: `x ← A∘x ∘ ‖A∘x‖⁻¹` until the angle-normalized change
/// is below `tol` in every Fourier coefficient.
///
/// Running out of iterations is not an error here: the result comes back
/// with `converged == false` and the full history.
pub fn power_method(a: &CircMatrix, x0: &CircVector, opts: &PowerOptions) -> Result<PowerResult> {
    check_square_system(a, x0)?;
    let mut x = x0.scale(&normalizer(&x0.norm(), opts.breakdown)?)?;
    let mut history = Vec::new();
    let mut eigenvalue_history = Vec::new();
    let mut converged = false;
    let mut iterations = 0;
    for it in 1..=opts.maxiter {
        iterations = it;
        let y = a.matmul(&x)?;
        eigenvalue_history.push(y.inner_product(&x)?);
        let alpha = y.norm();
        let next = y.scale(&normalizer(&alpha, opts.breakdown)?)?;
        let rho = phase_difference(&next, &x, opts.phase)?.norm();
        let per_slice: Vec<f64> = rho.coeffs().iter().map(|c| c.re).collect();
        let max_metric = per_slice.iter().copied().fold(0.0, f64::max);
        history.push(PowerRecord { iteration: it, per_slice, max_metric });
        x = next;
        if max_metric < opts.tol {
            converged = true;
            break;
        }
    }
    let eigenvalue = a.matmul(&x)?.inner_product(&x)?;
    Ok(PowerResult { eigenvector: x, eigenvalue, history, eigenvalue_history, converged, iterations })
}

/// A (possibly truncated) Arnoldi factorization `A∘Q_t = Q_{t+1}∘H_{t+1,t}`.
#[derive(Debug, Clone)]
pub struct ArnoldiFactorization {
    /// `n × (steps + 1)` basis.
    pub q: CircMatrix,
    /// `(steps + 1) × steps` upper Hessenberg.
    pub h: CircMatrix,
    /// Whether each slice is still expanding its Krylov space.
    pub slice_active: Vec<bool>,
    /// Krylov dimension reached by each slice (its breakdown step, or
    /// `steps` while active).
    pub slice_steps: Vec<usize>,
    pub steps: usize,
    /// `‖b‖`.
    pub beta: CircScalar,
}

/// Incremental Arnoldi process; [`arnoldi`] and [`gmres`] drive it.
#[derive(Debug, Clone)]
pub struct ArnoldiProcess<'a> {
    a: &'a CircMatrix,
    basis: Vec<CircVector>,
    /// `columns[j][i]` is `H_{i+1, j+1}`, `i ≤ j + 1`.
    columns: Vec<Vec<CircScalar>>,
    active: Vec<bool>,
    slice_steps: Vec<usize>,
    scale: Vec<f64>,
    beta: CircScalar,
}

impl<'a> ArnoldiProcess<'a> {
    pub fn new(a: &'a CircMatrix, b: &CircVector) -> Result<Self> {
        check_square_system(a, b)?;
        let beta = b.norm();
        let k = a.k();
        let active: Vec<bool> = beta.coeffs().iter().map(|c| c.re > 0.0).collect();
        if !active.iter().any(|&x| x) {
            return Err(CircError::ZeroVector);
        }
        let q1 = b.scale(&normalizer(&beta, BreakdownPolicy::RenormalizeNonzero)?)?;
        Ok(Self { a, basis: vec![q1], columns: Vec::new(), active, slice_steps: vec![0; k], scale: vec![0.0; k], beta })
    }

    pub fn steps(&self) -> usize {
        self.columns.len()
    }

    pub fn any_active(&self) -> bool {
        self.active.iter().any(|&x| x)
    }

    pub fn slice_active(&self) -> &[bool] {
        &self.active
    }

    pub fn slice_steps(&self) -> &[usize] {
        &self.slice_steps
    }

    pub fn beta(&self) -> &CircScalar {
        &self.beta
    }

    /// One modified Gram–Schmidt step. Returns `false` once every slice has
    /// broken down, after which nothing more is done.
    pub fn step(&mut self) -> Result<bool> {
        if !self.any_active() {
            return Ok(false);
        }
        let j = self.columns.len();
        let mut z = self.a.matmul(&self.basis[j])?;
        let mut column = Vec::with_capacity(j + 2);
        for q in &self.basis {
            let h = z.inner_product(q)?;
            z = z.sub(&q.scale(&h)?)?;
            column.push(h);
        }
        let h_next = z.norm();
        let k = self.a.k();
        for (slice, scale) in self.scale.iter_mut().enumerate() {
            *scale = column.iter().chain([&h_next]).map(|h| h.coeffs()[slice].norm()).fold(*scale, f64::max);
        }
        let mut coeffs = h_next.coeffs().to_vec();
        let mut inv = vec![Complex64::new(0.0, 0.0); k];
        for s in 0..k {
            if !self.active[s] {
                coeffs[s] = Complex64::new(0.0, 0.0);
                continue;
            }
            self.slice_steps[s] = j + 1;
            if coeffs[s].norm() <= BREAKDOWN_TOL * self.scale[s] {
                self.active[s] = false;
                coeffs[s] = Complex64::new(0.0, 0.0);
            } else {
                inv[s] = coeffs[s].inv();
            }
        }
        let h_next = CircScalar::from_coeffs(coeffs, h_next.is_real());
        let q_next = z.scale(&CircScalar::from_coeffs(inv, h_next.is_real()))?;
        column.push(h_next);
        self.columns.push(column);
        self.basis.push(q_next);
        Ok(true)
    }

    /// Basis slices `Q̂_j` (`n × (steps + 1)`) for slice `slice`.
    fn basis_slice(&self, slice: usize, cols: usize) -> DMatrix<Complex64> {
        let n = self.a.rows();
        DMatrix::from_fn(n, cols, |r, c| self.basis[c].slice(slice)[(r, 0)])
    }

    /// `Ĥ_j`, `(rows) × (cols)` leading block for slice `slice`.
    fn hessenberg_slice(&self, slice: usize, rows: usize, cols: usize) -> DMatrix<Complex64> {
        DMatrix::from_fn(rows, cols, |r, c| {
            self.columns[c].get(r).map_or(Complex64::new(0.0, 0.0), |h| h.coeffs()[slice])
        })
    }

    pub fn factorization(&self) -> ArnoldiFactorization {
        let t = self.steps();
        let k = self.a.k();
        let real = self.basis.iter().all(CircMatrix::is_real);
        let q = CircMatrix::from_blocks(
            FourierBlocks::from_fn(self.a.rows(), t + 1, k, |s| self.basis_slice(s, t + 1)),
            real,
        );
        let h =
            CircMatrix::from_blocks(FourierBlocks::from_fn(t + 1, t, k, |s| self.hessenberg_slice(s, t + 1, t)), real);
        ArnoldiFactorization {
            q,
            h,
            slice_active: self.active.clone(),
            slice_steps: self.slice_steps.clone(),
            steps: t,
            beta: self.beta.clone(),
        }
    }
}

/// `t` steps of the Arnoldi process started from `b`.
///
/// A slice whose `ĥ_{j+1,j}` falls below the breakdown tolerance is frozen:
/// its later basis columns and Hessenberg entries are zero. If every slice
/// breaks down before step `t`, the factorization is shorter.
pub fn arnoldi(a: &CircMatrix, b: &CircVector, t: usize) -> Result<ArnoldiFactorization> {
    if t > a.rows() {
        return Err(CircError::DimensionMismatch(format!("{t} Arnoldi steps for n = {}", a.rows())));
    }
    let mut process = ArnoldiProcess::new(a, b)?;
    for _ in 0..t {
        if !process.step()? {
            break;
        }
    }
    Ok(process.factorization())
}

#[derive(Debug, Clone)]
pub struct GmresOptions {
    pub tmax: usize,
    pub rtol: f64,
    /// Keep `u^(t)` for every iteration in [`GmresResult::iterates`].
    pub keep_iterates: bool,
}

impl Default for GmresOptions {
    fn default() -> Self {
        Self { tmax: 100, rtol: 1e-10, keep_iterates: false }
    }
}

/// Residuals after `iteration` Arnoldi steps.
#[derive(Debug, Clone, PartialEq)]
pub struct GmresRecord {
    pub iteration: usize,
    /// `‖β̂_j e_1 − Ĥ_j ŷ_j‖ / |β̂_j|` per slice (0 for a zero slice of `b`).
    pub per_slice: Vec<f64>,
    pub max_residual: f64,
}

#[derive(Debug, Clone)]
pub struct GmresResult {
    pub solution: CircVector,
    pub history: Vec<GmresRecord>,
    pub iterates: Vec<CircVector>,
    pub converged: bool,
    pub iterations: usize,
}

impl GmresResult {
    /// First iteration whose max residual is at least `factor` times
    /// smaller than the one before it (the initial relative residual is 1).
    pub fn drop_iteration(&self, factor: f64) -> Option<usize> {
        let mut prev = 1.0;
        for rec in &self.history {
            if prev >= factor * rec.max_residual {
                return Some(rec.iteration);
            }
            prev = rec.max_residual;
        }
        None
    }
}

/// Per-slice Hessenberg least squares `min ‖Ĥ y − β̂ e_1‖` by QR.
fn hessenberg_lsq(h: DMatrix<Complex64>, beta: f64) -> (nalgebra::DVector<Complex64>, f64) {
    let d = h.ncols();
    let mut rhs = nalgebra::DVector::zeros(h.nrows());
    rhs[0] = Complex64::new(beta, 0.0);
    if d == 0 {
        return (nalgebra::DVector::zeros(0), beta);
    }
    let qr = h.clone().qr();
    let qtb = qr.q().adjoint() * &rhs;
    let y = qr
        .r()
        .solve_upper_triangular(&qtb)
        .unwrap_or_else(|| h.clone().svd(true, true).solve(&rhs, 1e-14).expect("svd solve"));
    let resid = (&h * &y - rhs).norm();
    (y, resid)
}

/// GMRES without restarts: after each Arnoldi step, solve the Hessenberg
/// least-squares problem slice by slice and assemble `u = Q_t ∘ y`.
pub fn gmres(a: &CircMatrix, b: &CircVector, opts: &GmresOptions) -> Result<GmresResult> {
    let mut process = ArnoldiProcess::new(a, b)?;
    let k = a.k();
    let n = a.rows();
    let mut history = Vec::new();
    let mut iterates = Vec::new();
    let mut solution = CircMatrix::zeros(n, 1, k);
    let mut converged = false;
    let mut iterations = 0;
    while iterations < opts.tmax && process.step()? {
        iterations += 1;
        let beta: Vec<f64> = process.beta().coeffs().iter().map(|c| c.re).collect();
        let per = exec::map_range(k, |s| {
            let d = process.slice_steps()[s];
            let h = process.hessenberg_slice(s, d + 1, d);
            let (y, resid) = hessenberg_lsq(h, beta[s]);
            let u = DMatrix::from_column_slice(n, 1, (process.basis_slice(s, d) * y).as_slice());
            let rel = if beta[s] > 0.0 { resid / beta[s] } else { 0.0 };
            (u, rel)
        });
        let per_slice: Vec<f64> = per.iter().map(|p| p.1).collect();
        let max_residual = per_slice.iter().copied().fold(0.0, f64::max);
        let blocks = FourierBlocks::new(per.into_iter().map(|p| p.0).collect())?;
        solution = CircMatrix::from_blocks(blocks, a.is_real() && b.is_real());
        if opts.keep_iterates {
            iterates.push(solution.clone());
        }
        history.push(GmresRecord { iteration: iterations, per_slice, max_residual });
        if max_residual < opts.rtol || !process.any_active() {
            converged = max_residual < opts.rtol;
            break;
        }
    }
    Ok(GmresResult { solution, history, iterates, converged, iterations })
}
