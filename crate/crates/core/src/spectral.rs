//! The Circulant Fourier Transform.
//!
//! `cft` diagonalizes every circulant entry of an `m × n` matrix over `K_k`
//! and gathers coefficient `j` of all entries into the dense slice `Â_j`.
//! The stride permutation in the block-diagonal picture is just this
//! slice-major layout; it is never formed.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::dft;
use crate::error::{CircError, Result};
use crate::exec;
use crate::linalg::CircMatrix;

/// Default tolerance for [`FourierBlocks::project_real`].
pub const PROJ_TOL: f64 = 1e-10;

/// `k` dense complex `m × n` slices, `Â_1 .. Â_k`.
#[derive(Clone, Debug, PartialEq)]
pub struct FourierBlocks {
    rows: usize,
    cols: usize,
    slices: Vec<DMatrix<Complex64>>,
}

impl FourierBlocks {
    pub fn new(slices: Vec<DMatrix<Complex64>>) -> Result<Self> {
        let first = slices.first().ok_or(CircError::Empty)?;
        let (rows, cols) = first.shape();
        if let Some(j) = slices.iter().position(|s| s.shape() != (rows, cols)) {
            return Err(CircError::DimensionMismatch(format!(
                "slice {j} is {:?}, expected {:?}",
                slices[j].shape(),
                (rows, cols)
            )));
        }
        Ok(Self { rows, cols, slices })
    }

    pub fn zeros(rows: usize, cols: usize, k: usize) -> Self {
        assert!(k > 0);
        Self { rows, cols, slices: vec![DMatrix::zeros(rows, cols); k] }
    }

    /// Builds the slices by evaluating `f(j)` for every slice index.
    pub fn from_fn(rows: usize, cols: usize, k: usize, f: impl Fn(usize) -> DMatrix<Complex64> + Sync + Send) -> Self {
        let slices = exec::map_range(k, f);
        debug_assert!(slices.iter().all(|s| s.shape() == (rows, cols)));
        Self { rows, cols, slices }
    }

    /// Transforms row-major tubes: `params[(r * cols + c) * k + i]` is
    /// parameter `i` of entry `(r, c)`.
    pub fn from_tubes(rows: usize, cols: usize, k: usize, params: &[Complex64]) -> Self {
        assert_eq!(params.len(), rows * cols * k);
        let tubes = exec::map_range(rows * cols, |e| dft::forward(&params[e * k..(e + 1) * k]));
        let slices = (0..k).map(|j| DMatrix::from_fn(rows, cols, |r, c| tubes[r * cols + c][j])).collect();
        Self { rows, cols, slices }
    }

    /// Inverse of [`from_tubes`](Self::from_tubes).
    pub fn to_tubes(&self) -> Vec<Complex64> {
        let k = self.k();
        let tubes = exec::map_range(self.rows * self.cols, |e| {
            let (r, c) = (e / self.cols, e % self.cols);
            let coeffs: Vec<Complex64> = self.slices.iter().map(|s| s[(r, c)]).collect();
            dft::inverse(&coeffs)
        });
        let mut out = Vec::with_capacity(self.rows * self.cols * k);
        tubes.into_iter().for_each(|t| out.extend(t));
        out
    }

    pub fn k(&self) -> usize {
        self.slices.len()
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn slice(&self, j: usize) -> &DMatrix<Complex64> {
        &self.slices[j]
    }

    pub fn slices(&self) -> &[DMatrix<Complex64>] {
        &self.slices
    }

    pub fn into_slices(self) -> Vec<DMatrix<Complex64>> {
        self.slices
    }

    /// Coefficients of entry `(r, c)` across slices.
    pub fn tube_coeffs(&self, r: usize, c: usize) -> Vec<Complex64> {
        self.slices.iter().map(|s| s[(r, c)]).collect()
    }

    pub fn map_slices(&self, f: impl Fn(usize, &DMatrix<Complex64>) -> DMatrix<Complex64> + Sync + Send) -> Self {
        let slices = exec::map_range(self.k(), |j| f(j, &self.slices[j]));
        let (rows, cols) = slices[0].shape();
        Self { rows, cols, slices }
    }

    /// Largest modulus over all slice entries.
    pub fn max_abs(&self) -> f64 {
        self.slices.iter().flat_map(|s| s.iter()).map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// `max |Â_j - conj(Â_{k-j+2})|` over slices and entries.
    pub fn symmetry_deviation(&self) -> f64 {
        let k = self.k();
        (0..k)
            .map(|j| {
                let partner = &self.slices[dft::mirror(j, k)];
                self.slices[j].iter().zip(partner.iter()).map(|(a, b)| (a - b.conj()).norm()).fold(0.0, f64::max)
            })
            .fold(0.0, f64::max)
    }

    /// True when the slices are the transform of a real matrix, to
    /// `tol · max(1, max |entry|)`.
    pub fn is_real_spectrum(&self, tol: f64) -> bool {
        self.symmetry_deviation() <= tol * self.max_abs().max(1.0)
    }

    /// Snaps nearly conjugate-symmetric slices to exact symmetry.
    ///
    /// Fails when the absolute deviation exceeds `proj_tol`.
    pub fn project_real(&self, proj_tol: f64) -> Result<Self> {
        let deviation = self.symmetry_deviation();
        if deviation > proj_tol {
            return Err(CircError::SymmetryViolation { deviation, tol: proj_tol });
        }
        let k = self.k();
        let slices = (0..k)
            .map(|j| {
                let partner = &self.slices[dft::mirror(j, k)];
                self.slices[j].zip_map(partner, |a, b| (a + b.conj()) * 0.5)
            })
            .collect();
        Ok(Self { rows: self.rows, cols: self.cols, slices })
    }
}

/// Forward transform of a matrix over `K_k`.
pub fn cft(a: &CircMatrix) -> FourierBlocks {
    a.blocks().clone()
}

/// Inverse transform. The result is flagged real when the slices are
/// conjugate-symmetric to 1e-12 relative.
pub fn icft(blocks: FourierBlocks) -> CircMatrix {
    let real = blocks.is_real_spectrum(1e-12);
    CircMatrix::from_blocks(blocks, real)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::CircScalar;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn scalar_blocks(coeffs: Vec<Complex64>) -> FourierBlocks {
        FourierBlocks::new(coeffs.into_iter().map(|z| DMatrix::from_element(1, 1, z)).collect()).unwrap()
    }

    #[test]
    fn icft_of_example_diagonal() {
        let a = icft(scalar_blocks(vec![c(6.0, 0.0), c(2.0, 0.0), c(2.0, 0.0)]));
        assert!(a.is_real());
        let p = a.get(0, 0).real_params().unwrap();
        for (x, e) in p.iter().zip([10.0 / 3.0, 4.0 / 3.0, 4.0 / 3.0]) {
            assert!((x - e).abs() < 1e-15);
        }
    }

    #[test]
    fn zero_slices_give_zero_matrix() {
        let z = icft(FourierBlocks::zeros(2, 3, 4));
        assert!(z.params().iter().all(|p| p.norm() == 0.0));
    }

    #[test]
    fn real_spectrum_predicate() {
        let r3 = 3f64.sqrt();
        assert!(scalar_blocks(vec![c(6.0, 0.0), c(0.0, -r3), c(0.0, r3)]).is_real_spectrum(1e-12));
        assert!(scalar_blocks(vec![c(5.0, 0.0), c(2.0, 0.0), c(2.0, 0.0)]).is_real_spectrum(1e-12));
        assert!(!scalar_blocks(vec![c(6.0, 0.0), c(0.0, -r3), c(2.0, 0.0)]).is_real_spectrum(1e-12));
    }

    #[test]
    fn projection() {
        let r3 = 3f64.sqrt();
        let sym = scalar_blocks(vec![c(6.0, 0.0), c(0.0, -r3), c(0.0, r3)]);
        assert_eq!(sym.project_real(PROJ_TOL).unwrap(), sym);

        let nearly = scalar_blocks(vec![c(6.0, 0.0), c(0.0, -r3 + 1e-14), c(0.0, r3)]);
        let p = nearly.project_real(PROJ_TOL).unwrap();
        assert_eq!(p.symmetry_deviation(), 0.0);
        assert_eq!(p.slice(1)[(0, 0)], p.slice(2)[(0, 0)].conj());

        let bad = scalar_blocks(vec![c(6.0, 0.0), c(0.0, -r3), c(2.0, 0.0)]);
        assert!(matches!(bad.project_real(1e-12), Err(CircError::SymmetryViolation { .. })));
    }

    #[test]
    fn identity_scalar_slices() {
        let one = CircMatrix::from_scalars(1, 1, vec![CircScalar::one(4)]).unwrap();
        for s in cft(&one).slices() {
            assert_eq!(s[(0, 0)], c(1.0, 0.0));
        }
    }

    #[test]
    fn tube_roundtrip() {
        let params: Vec<Complex64> = (0..2 * 3 * 5).map(|i| c((i as f64).sin(), (i as f64 * 0.3).cos())).collect();
        let b = FourierBlocks::from_tubes(2, 3, 5, &params);
        for (x, y) in b.to_tubes().iter().zip(&params) {
            assert!((x - y).norm() < 1e-14);
        }
    }

    #[test]
    fn mismatched_slices_rejected() {
        let r = FourierBlocks::new(vec![DMatrix::zeros(2, 2), DMatrix::zeros(2, 3)]);
        assert!(matches!(r, Err(CircError::DimensionMismatch(_))));
    }
}
