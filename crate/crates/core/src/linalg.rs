//! Matrices and vectors over `K_k`.
//!
//! A [`CircMatrix`] keeps its Fourier slices; every product, inner product,
//! solve and determinant is one dense complex kernel per slice.

use std::fmt;
use std::sync::OnceLock;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{CircError, Result};
use crate::exec;
use crate::scalar::CircScalar;
use crate::spectral::FourierBlocks;

/// Reciprocal condition number below which a slice solve is refused.
pub const COND_LIMIT: f64 = 1e-13;
/// Largest `n` accepted by [`CircMatrix::determinant`].
pub const DET_MAX_N: usize = 8;
/// Relative singular-value cutoff for slice ranks.
pub const RANK_TOL: f64 = 1e-12;

/// An `m × n` matrix over `K_k`. Entry access is 0-based `(row, col)`.
#[derive(Clone)]
pub struct CircMatrix {
    blocks: FourierBlocks,
    real: bool,
    params: OnceLock<Vec<Complex64>>,
}

/// A column (`n × 1`) matrix.
pub type CircVector = CircMatrix;

fn mismatch(what: impl Into<String>) -> CircError {
    CircError::DimensionMismatch(what.into())
}

impl CircMatrix {
    pub fn from_blocks(blocks: FourierBlocks, real: bool) -> Self {
        Self { blocks, real, params: OnceLock::new() }
    }

    /// Builds from row-major entries.
    pub fn from_scalars(rows: usize, cols: usize, entries: Vec<CircScalar>) -> Result<Self> {
        if entries.len() != rows * cols {
            return Err(mismatch(format!("{} entries for a {rows}x{cols} matrix", entries.len())));
        }
        let k = entries.first().ok_or(CircError::Empty)?.k();
        if entries.iter().any(|e| e.k() != k) {
            return Err(mismatch("entries have different k"));
        }
        let real = entries.iter().all(CircScalar::is_real);
        let blocks = FourierBlocks::from_fn(rows, cols, k, |j| {
            DMatrix::from_fn(rows, cols, |r, c| entries[r * cols + c].coeffs()[j])
        });
        // keep the entries' own parameters so tcirc stays exact
        let params: Vec<Complex64> = entries.iter().flat_map(|e| e.params().iter().copied()).collect();
        Ok(Self { blocks, real, params: OnceLock::from(params) })
    }

    /// A column vector of the given entries.
    pub fn from_column(entries: Vec<CircScalar>) -> Result<Self> {
        let n = entries.len();
        Self::from_scalars(n, 1, entries)
    }

    /// Builds from row-major real tubes: `params[(r * cols + c) * k + i]`.
    pub fn from_real_params(rows: usize, cols: usize, k: usize, params: &[f64]) -> Result<Self> {
        if params.len() != rows * cols * k {
            return Err(mismatch(format!("{} parameters for {rows}x{cols}x{k}", params.len())));
        }
        let p: Vec<Complex64> = params.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        let blocks = FourierBlocks::from_tubes(rows, cols, k, &p);
        Ok(Self { blocks, real: true, params: OnceLock::from(p) })
    }

    /// Builds from row-major complex tubes; not flagged real.
    pub fn from_complex_params(rows: usize, cols: usize, k: usize, params: &[Complex64]) -> Result<Self> {
        if params.len() != rows * cols * k {
            return Err(mismatch(format!("{} parameters for {rows}x{cols}x{k}", params.len())));
        }
        let blocks = FourierBlocks::from_tubes(rows, cols, k, params);
        Ok(Self { blocks, real: false, params: OnceLock::from(params.to_vec()) })
    }

    /// Sparse construction: entries not listed are zero. Later duplicates
    /// overwrite earlier ones.
    pub fn from_triplets(
        rows: usize,
        cols: usize,
        k: usize,
        triplets: impl IntoIterator<Item = (usize, usize, CircScalar)>,
    ) -> Result<Self> {
        let mut entries = vec![CircScalar::zero(k); rows * cols];
        for (r, c, s) in triplets {
            if r >= rows || c >= cols {
                return Err(mismatch(format!("entry ({r},{c}) outside {rows}x{cols}")));
            }
            if s.k() != k {
                return Err(mismatch(format!("entry ({r},{c}) has k={}, expected {k}", s.k())));
            }
            entries[r * cols + c] = s;
        }
        Self::from_scalars(rows, cols, entries)
    }

    pub fn zeros(rows: usize, cols: usize, k: usize) -> Self {
        Self::from_blocks(FourierBlocks::zeros(rows, cols, k), true)
    }

    pub fn identity(n: usize, k: usize) -> Self {
        Self::from_blocks(FourierBlocks::from_fn(n, n, k, |_| DMatrix::identity(n, n)), true)
    }

    pub fn diag(entries: &[CircScalar]) -> Result<Self> {
        let n = entries.len();
        let k = entries.first().ok_or(CircError::Empty)?.k();
        Self::from_triplets(n, n, k, entries.iter().cloned().enumerate().map(|(i, s)| (i, i, s)))
    }

    /// Column `j` of the identity: `1̲` at position `j`.
    pub fn unit_vector(n: usize, j: usize, k: usize) -> Self {
        let blocks = FourierBlocks::from_fn(n, 1, k, |_| {
            let mut v = DMatrix::zeros(n, 1);
            v[(j, 0)] = Complex64::new(1.0, 0.0);
            v
        });
        Self::from_blocks(blocks, true)
    }

    pub fn rows(&self) -> usize {
        self.blocks.rows()
    }

    pub fn cols(&self) -> usize {
        self.blocks.cols()
    }

    pub fn k(&self) -> usize {
        self.blocks.k()
    }

    pub fn is_real(&self) -> bool {
        self.real
    }

    pub fn blocks(&self) -> &FourierBlocks {
        &self.blocks
    }

    pub fn into_blocks(self) -> FourierBlocks {
        self.blocks
    }

    pub fn slice(&self, j: usize) -> &DMatrix<Complex64> {
        self.blocks.slice(j)
    }

    /// Row-major tubes of time-domain parameters.
    pub fn params(&self) -> &[Complex64] {
        self.params.get_or_init(|| {
            let mut p = self.blocks.to_tubes();
            if self.real {
                p.iter_mut().for_each(|z| z.im = 0.0);
            }
            p
        })
    }

    pub fn get(&self, r: usize, c: usize) -> CircScalar {
        CircScalar::from_coeffs(self.blocks.tube_coeffs(r, c), self.real)
    }

    pub fn column(&self, c: usize) -> CircVector {
        let blocks = self.blocks.map_slices(|_, s| s.columns(c, 1).into_owned());
        Self::from_blocks(blocks, self.real)
    }

    /// The leading `cols` columns.
    pub fn leading_columns(&self, cols: usize) -> CircMatrix {
        let blocks = self.blocks.map_slices(|_, s| s.columns(0, cols).into_owned());
        Self::from_blocks(blocks, self.real)
    }

    /// Concatenates matrices with equal row counts side by side.
    pub fn hstack(parts: &[CircMatrix]) -> Result<Self> {
        let first = parts.first().ok_or(CircError::Empty)?;
        let (rows, k) = (first.rows(), first.k());
        if parts.iter().any(|p| p.rows() != rows || p.k() != k) {
            return Err(mismatch("hstack parts disagree on rows or k"));
        }
        let cols = parts.iter().map(CircMatrix::cols).sum();
        let blocks = FourierBlocks::from_fn(rows, cols, k, |j| {
            let mut out = DMatrix::zeros(rows, cols);
            let mut at = 0;
            for p in parts {
                out.columns_mut(at, p.cols()).copy_from(p.slice(j));
                at += p.cols();
            }
            out
        });
        Ok(Self::from_blocks(blocks, parts.iter().all(CircMatrix::is_real)))
    }

    /// The dense `mk × nk` block-circulant matrix `tcirc(A)`.
    pub fn to_tcirc(&self) -> DMatrix<Complex64> {
        let (m, n, k) = (self.rows(), self.cols(), self.k());
        let p = self.params();
        DMatrix::from_fn(m * k, n * k, |row, col| {
            let (r, i) = (row / k, row % k);
            let (c, l) = (col / k, col % k);
            p[(r * n + c) * k + (i + k - l) % k]
        })
    }

    fn same_shape(&self, other: &Self) -> Result<()> {
        if self.rows() == other.rows() && self.cols() == other.cols() && self.k() == other.k() {
            Ok(())
        } else {
            Err(mismatch(format!(
                "{}x{}x{} vs {}x{}x{}",
                self.rows(),
                self.cols(),
                self.k(),
                other.rows(),
                other.cols(),
                other.k()
            )))
        }
    }

    fn zip_slices(
        &self,
        other: &Self,
        f: impl Fn(&DMatrix<Complex64>, &DMatrix<Complex64>) -> DMatrix<Complex64> + Sync + Send,
    ) -> Self {
        let blocks = self.blocks.map_slices(|j, a| f(a, other.slice(j)));
        Self::from_blocks(blocks, self.real && other.real)
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.same_shape(other)?;
        Ok(self.zip_slices(other, |a, b| a + b))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.same_shape(other)?;
        Ok(self.zip_slices(other, |a, b| a - b))
    }

    /// `A ∘ B`, computed as `Â_j B̂_j` for every slice.
    pub fn matmul(&self, other: &Self) -> Result<Self> {
        if self.cols() != other.rows() || self.k() != other.k() {
            return Err(mismatch(format!(
                "cannot multiply {}x{} (k={}) by {}x{} (k={})",
                self.rows(),
                self.cols(),
                self.k(),
                other.rows(),
                other.cols(),
                other.k()
            )));
        }
        Ok(self.zip_slices(other, |a, b| a * b))
    }

    /// `α ∘ A`.
    pub fn scale(&self, alpha: &CircScalar) -> Result<Self> {
        if alpha.k() != self.k() {
            return Err(mismatch("scalar and matrix disagree on k"));
        }
        let blocks = self.blocks.map_slices(|j, a| a * alpha.coeffs()[j]);
        Ok(Self::from_blocks(blocks, self.real && alpha.is_real()))
    }

    /// Entry-wise conjugate of the transpose; slice-wise `Â_j^*`.
    pub fn conj_transpose(&self) -> Self {
        Self::from_blocks(self.blocks.map_slices(|_, a| a.adjoint()), self.real)
    }

    /// `⟨x, y⟩`, coefficient `j` equal to `ŷ_j^* x̂_j`.
    pub fn inner_product(&self, y: &CircVector) -> Result<CircScalar> {
        self.same_shape(y)?;
        if self.cols() != 1 {
            return Err(mismatch("inner product needs column vectors"));
        }
        let coeffs = (0..self.k()).map(|j| y.slice(j).dotc(self.slice(j))).collect();
        Ok(CircScalar::from_coeffs(coeffs, self.real && y.real))
    }

    /// `‖x‖ = ⟨x, x⟩^{1/2}`; every coefficient is a nonnegative real.
    pub fn norm(&self) -> CircScalar {
        let coeffs = self.blocks.slices().iter().map(|s| Complex64::new(s.norm(), 0.0)).collect();
        CircScalar::from_coeffs(coeffs, self.real)
    }

    /// Slice-wise determinant. Limited to `n ≤ DET_MAX_N`.
    pub fn determinant(&self) -> Result<CircScalar> {
        self.determinant_with_limit(DET_MAX_N)
    }

    pub fn determinant_with_limit(&self, max_n: usize) -> Result<CircScalar> {
        if self.rows() != self.cols() {
            return Err(mismatch(format!("determinant of a {}x{} matrix", self.rows(), self.cols())));
        }
        if self.rows() > max_n {
            return Err(mismatch(format!("determinant limited to n <= {max_n}, got {}", self.rows())));
        }
        let coeffs = exec::map_range(self.k(), |j| self.slice(j).clone().lu().determinant());
        Ok(CircScalar::from_coeffs(coeffs, self.real))
    }

    /// Solves `A ∘ X = B` slice by slice. `B` may have several columns.
    pub fn solve(&self, b: &CircMatrix) -> Result<CircMatrix> {
        let n = self.rows();
        if self.cols() != n || b.rows() != n || b.k() != self.k() {
            return Err(mismatch("solve needs a square system with matching right-hand side"));
        }
        let solved = exec::map_range(self.k(), |j| {
            let a = self.slice(j);
            let lu = a.clone().lu();
            let inv = lu.try_inverse()?;
            let rcond = 1.0 / (one_norm(a) * one_norm(&inv));
            if !rcond.is_finite() || rcond < COND_LIMIT {
                return None;
            }
            Some(lu.solve(b.slice(j)).unwrap_or_else(|| &inv * b.slice(j)))
        });
        let singular: Vec<usize> = solved.iter().enumerate().filter(|(_, s)| s.is_none()).map(|(j, _)| j).collect();
        if !singular.is_empty() {
            return Err(CircError::SingularSlice { slices: singular });
        }
        let blocks = FourierBlocks::new(solved.into_iter().map(Option::unwrap).collect())?;
        Ok(Self::from_blocks(blocks, self.real && b.real))
    }

    /// `A⁻¹`, through [`solve`](Self::solve) against the identity.
    pub fn inverse(&self) -> Result<CircMatrix> {
        self.solve(&Self::identity(self.rows(), self.k()))
    }

    /// Numerical rank of each slice.
    pub fn slice_ranks(&self) -> Vec<usize> {
        exec::map_range(self.k(), |j| {
            let s = self.slice(j);
            if s.is_empty() {
                return 0;
            }
            let sv = s.clone().singular_values();
            let top = sv.max();
            if top == 0.0 {
                0
            } else {
                sv.iter().filter(|&&v| v > RANK_TOL * top).count()
            }
        })
    }

    /// Whether the columns span `K_k^m`: every slice has full row rank.
    pub fn spans(&self) -> bool {
        let m = self.rows();
        self.slice_ranks().into_iter().all(|r| r == m)
    }

    /// Whether the columns form a basis: square with invertible slices.
    pub fn is_basis(&self) -> bool {
        self.rows() == self.cols() && self.spans()
    }

    /// Max over slices of the Frobenius distance between slices.
    pub fn slice_distance(&self, other: &Self) -> f64 {
        (0..self.k()).map(|j| (self.slice(j) - other.slice(j)).norm()).fold(0.0, f64::max)
    }
}

fn one_norm(a: &DMatrix<Complex64>) -> f64 {
    a.column_iter().map(|c| c.iter().map(|z| z.norm()).sum::<f64>()).fold(0.0, f64::max)
}

impl fmt::Debug for CircMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "CircMatrix {}x{} over K_{}:", self.rows(), self.cols(), self.k())?;
        for r in 0..self.rows() {
            for c in 0..self.cols() {
                writeln!(f, "  ({r},{c}) {:?}", self.get(r, c))?;
            }
        }
        Ok(())
    }
}
