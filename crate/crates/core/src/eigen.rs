//! Eigenpairs over `K_k`.
//!
//! Every eigenpair decouples into one eigenpair per Fourier slice. Taking
//! the `i`-th largest-magnitude eigenvalue of every slice and transforming
//! back gives the canonical `λ_i`; any other eigenvalue is some other
//! combination of slice eigenvalues (see [`enumerate_eigenvalues`]).

use nalgebra::{DMatrix, Schur};
use num_complex::Complex64;

use crate::dft;
use crate::error::{CircError, Result};
use crate::exec;
use crate::linalg::{CircMatrix, CircVector};
use crate::scalar::CircScalar;
use crate::spectral::FourierBlocks;

/// Magnitudes closer than this (relative) are treated as tied.
pub const TIE_TOL: f64 = 1e-12;
/// Eigenvector-matrix condition number above which a slice is defective.
pub const DEFECT_COND: f64 = 1e12;
/// Default cap on the number of enumerated combinations.
pub const ENUMERATION_CAP: usize = 100_000;
/// Imaginary residue (relative) below which an eigenvalue of a real slice
/// is taken to be real.
const REAL_SNAP_TOL: f64 = 1e-10;

/// Eigendecomposition of one dense slice, sorted by descending magnitude.
#[derive(Debug, Clone)]
pub struct SliceEig {
    pub values: Vec<Complex64>,
    /// Unit columns, first significant component real and positive.
    pub vectors: DMatrix<Complex64>,
    /// Positions `i` where `|values[i]|` ties `|values[i + 1]|`.
    pub ties: Vec<usize>,
    /// 2-norm condition number of `vectors`.
    pub condition: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum EigenWarning {
    /// Slice `slice` has tied magnitudes at positions `index`, `index + 1`;
    /// the canonical set may not be unique.
    Tie { slice: usize, index: usize },
}

#[derive(Debug, Clone)]
pub struct CanonicalEigenSet {
    pub lambdas: Vec<CircScalar>,
    pub vectors: Vec<CircVector>,
    pub warnings: Vec<EigenWarning>,
    eigvecs: CircMatrix,
}

impl CanonicalEigenSet {
    /// `X`, the eigenvectors as columns.
    pub fn eigenvector_matrix(&self) -> &CircMatrix {
        &self.eigvecs
    }

    /// `Λ`, the eigenvalues on the diagonal.
    pub fn eigenvalue_matrix(&self) -> CircMatrix {
        CircMatrix::diag(&self.lambdas).expect("nonempty eigenvalue list")
    }

    /// `X ∘ Λ ∘ X⁻¹`.
    pub fn reconstruct(&self) -> Result<CircMatrix> {
        let x = &self.eigvecs;
        x.matmul(&self.eigenvalue_matrix())?.matmul(&x.inverse()?)
    }

    pub fn is_unique(&self) -> bool {
        self.warnings.is_empty()
    }
}

/// Both residuals of a candidate eigenpair. They are not equivalent in
/// `K_k`: the vector equation has solutions whose `λ` fails the determinant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EigenResidual {
    /// `magnitude(det(A - λ∘I))`.
    pub det_residual: f64,
    /// `magnitude(‖A∘x - λ∘x‖)`.
    pub vec_residual: f64,
}

/// Orders indices by descending magnitude; within a magnitude tie, by
/// descending real part, then descending imaginary part.
fn sorted_order(values: &[Complex64]) -> (Vec<usize>, Vec<usize>) {
    let mut idx: Vec<usize> = (0..values.len()).collect();
    idx.sort_by(|&a, &b| values[b].norm().total_cmp(&values[a].norm()));
    let scale = values.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let tol = TIE_TOL * scale;
    let mut out = Vec::with_capacity(idx.len());
    let mut ties = Vec::new();
    let mut start = 0;
    while start < idx.len() {
        let head = values[idx[start]].norm();
        let mut end = start + 1;
        while end < idx.len() && head - values[idx[end]].norm() <= tol {
            end += 1;
        }
        let mut group = idx[start..end].to_vec();
        // conjugate pairs have real parts equal only to roundoff
        group.sort_by(|&a, &b| {
            let dr = values[b].re - values[a].re;
            if dr.abs() > tol {
                dr.total_cmp(&0.0)
            } else {
                values[b].im.total_cmp(&values[a].im)
            }
        });
        ties.extend(start..end - 1);
        out.extend(group);
        start = end;
    }
    (out, ties)
}

/// Rotates `v` so its first significant component is real and positive.
fn fix_phase(v: &mut nalgebra::DVectorViewMut<'_, Complex64>) {
    let top = v.iter().map(|z| z.norm()).fold(0.0, f64::max);
    if let Some(p) = v.iter().find(|z| z.norm() > 1e-10 * top).copied() {
        let rot = p.conj() / p.norm();
        v.iter_mut().for_each(|z| *z *= rot);
    }
}

fn condition_number(v: &DMatrix<Complex64>) -> f64 {
    if v.is_empty() {
        return 1.0;
    }
    let sv = v.clone().singular_values();
    let (hi, lo) = (sv.max(), sv.min());
    if lo == 0.0 {
        f64::INFINITY
    } else {
        hi / lo
    }
}

/// Eigenvectors of an upper-triangular `t` by back substitution.
fn triangular_eigenvectors(t: &DMatrix<Complex64>) -> DMatrix<Complex64> {
    let n = t.nrows();
    let tnorm = t.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let smin = (f64::EPSILON * tnorm).max(f64::MIN_POSITIVE);
    let mut y = DMatrix::zeros(n, n);
    for i in 0..n {
        let lambda = t[(i, i)];
        y[(i, i)] = Complex64::new(1.0, 0.0);
        for l in (0..i).rev() {
            let mut acc = Complex64::new(0.0, 0.0);
            for p in l + 1..=i {
                acc += t[(l, p)] * y[(p, i)];
            }
            let mut d = t[(l, l)] - lambda;
            if d.norm() < smin {
                d = Complex64::new(smin, 0.0);
            }
            y[(l, i)] = -acc / d;
        }
        // rescale to keep later substitutions bounded
        let big = y.column(i).iter().map(|z| z.norm()).fold(0.0, f64::max);
        if big > 1e100 {
            y.column_mut(i).iter_mut().for_each(|z| *z /= big);
        }
    }
    y
}

/// Eigendecomposition of a dense complex matrix with eigenvalues sorted by
/// descending magnitude, unit eigenvectors, and phase fixed so that the
/// first significant component is real and positive.
pub fn slice_sorted_eig(m: &DMatrix<Complex64>) -> Result<SliceEig> {
    slice_sorted_eig_at(m, 0)
}

fn slice_sorted_eig_at(m: &DMatrix<Complex64>, slice: usize) -> Result<SliceEig> {
    if !m.is_square() {
        return Err(CircError::DimensionMismatch(format!("eigenvalues of a {:?} matrix", m.shape())));
    }
    let n = m.nrows();
    let (values, raw) = if n == 0 {
        (Vec::new(), DMatrix::zeros(0, 0))
    } else {
        let schur =
            Schur::try_new(m.clone(), f64::EPSILON, 100 * n.max(10)).ok_or(CircError::EigenFailure { slice })?;
        let (q, t) = schur.unpack();
        let values: Vec<Complex64> = (0..n).map(|i| t[(i, i)]).collect();
        (values, q * triangular_eigenvectors(&t))
    };
    let (order, ties) = sorted_order(&values);
    let mut vectors = DMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        let col = raw.column(src);
        let nrm = col.norm();
        vectors.column_mut(dst).copy_from(&(col / Complex64::new(nrm, 0.0)));
        fix_phase(&mut vectors.column_mut(dst));
    }
    let values: Vec<Complex64> = order.iter().map(|&i| values[i]).collect();
    let condition = condition_number(&vectors);
    Ok(SliceEig { values, vectors, ties, condition })
}

/// Makes the eigenpairs of a real slice real when their imaginary residue
/// is roundoff.
fn snap_real(eig: &mut SliceEig) {
    let scale = eig.values.iter().map(|z| z.norm()).fold(1.0, f64::max);
    for (i, v) in eig.values.iter_mut().enumerate() {
        if v.im.abs() <= REAL_SNAP_TOL * scale {
            v.im = 0.0;
            let mut col = eig.vectors.column_mut(i);
            col.iter_mut().for_each(|z| z.im = 0.0);
            let nrm = col.norm();
            col.iter_mut().for_each(|z| *z /= nrm);
        }
    }
}

/// Sorted eigendecompositions of every slice of `a`.
///
/// For a real `a` only slices `1 ..= ⌊k/2⌋ + 1` are decomposed; the rest are
/// conjugates of their mirror slice, which keeps the canonical set real.
pub fn slice_eigs(a: &CircMatrix) -> Result<Vec<SliceEig>> {
    if a.rows() != a.cols() {
        return Err(CircError::DimensionMismatch(format!("eigenvalues of a {}x{} matrix", a.rows(), a.cols())));
    }
    let k = a.k();
    if !a.is_real() {
        return exec::try_map_range(k, |j| slice_sorted_eig_at(a.slice(j), j));
    }
    let half = k / 2 + 1;
    let mut head = exec::try_map_range(half.min(k), |j| {
        let mut e = slice_sorted_eig_at(a.slice(j), j)?;
        if dft::mirror(j, k) == j {
            snap_real(&mut e);
        }
        Ok(e)
    })?;
    for j in head.len()..k {
        let src = &head[dft::mirror(j, k)];
        head.push(SliceEig {
            values: src.values.iter().map(|z| z.conj()).collect(),
            vectors: src.vectors.map(|z| z.conj()),
            ties: src.ties.clone(),
            condition: src.condition,
        });
    }
    Ok(head)
}

/// The canonical eigenvalues and eigenvectors of `a`.
pub fn canonical_eig(a: &CircMatrix) -> Result<CanonicalEigenSet> {
    let eigs = slice_eigs(a)?;
    let (n, k) = (a.rows(), a.k());
    for (j, e) in eigs.iter().enumerate() {
        if e.condition.is_nan() || e.condition > DEFECT_COND {
            return Err(CircError::DefectiveSlice { slice: j, condition: e.condition });
        }
    }
    let warnings = eigs
        .iter()
        .enumerate()
        .flat_map(|(slice, e)| e.ties.iter().map(move |&index| EigenWarning::Tie { slice, index }))
        .collect();
    let lambdas = (0..n)
        .map(|i| CircScalar::from_coeffs_detect(eigs.iter().map(|e| e.values[i]).collect(), REAL_SNAP_TOL))
        .collect();
    let blocks = FourierBlocks::new(eigs.into_iter().map(|e| e.vectors).collect())?;
    debug_assert_eq!(blocks.k(), k);
    let real = a.is_real() && blocks.is_real_spectrum(REAL_SNAP_TOL);
    let eigvecs = CircMatrix::from_blocks(blocks, real);
    let vectors = (0..n).map(|i| eigvecs.column(i)).collect();
    Ok(CanonicalEigenSet { lambdas, vectors, warnings, eigvecs })
}

/// Distinct slice eigenvalues (to `TIE_TOL` relative), in sorted order.
fn distinct(values: &[Complex64]) -> Vec<Complex64> {
    let scale = values.iter().map(|z| z.norm()).fold(1.0, f64::max);
    let mut out: Vec<Complex64> = Vec::new();
    for &v in values {
        if out.iter().all(|u| (u - v).norm() > TIE_TOL * scale) {
            out.push(v);
        }
    }
    out
}

/// Every eigenvalue of `a`: all combinations of one distinct eigenvalue per
/// slice. With `real_only`, only combinations with a real inverse transform.
pub fn enumerate_eigenvalues(a: &CircMatrix, real_only: bool) -> Result<Vec<CircScalar>> {
    enumerate_eigenvalues_capped(a, real_only, ENUMERATION_CAP)
}

pub fn enumerate_eigenvalues_capped(a: &CircMatrix, real_only: bool, cap: usize) -> Result<Vec<CircScalar>> {
    let eigs = slice_eigs(a)?;
    let k = a.k();
    let choices: Vec<Vec<Complex64>> = eigs.iter().map(|e| distinct(&e.values)).collect();
    // for a real matrix the real combinations are fixed by slices 1..=k/2+1
    let free = if real_only && a.is_real() { k / 2 + 1 } else { k };
    let count: f64 = choices[..free].iter().map(|c| c.len() as f64).product();
    if count > cap as f64 {
        return Err(CircError::CapExceeded { count, cap });
    }
    let mut out = Vec::with_capacity(count as usize);
    let mut pick = vec![0usize; free];
    loop {
        let mut coeffs = vec![Complex64::new(0.0, 0.0); k];
        for j in 0..free {
            coeffs[j] = choices[j][pick[j]];
        }
        for j in free..k {
            coeffs[j] = coeffs[dft::mirror(j, k)].conj();
        }
        let lambda = CircScalar::from_coeffs_detect(coeffs, REAL_SNAP_TOL);
        let accept = !real_only || lambda.is_real();
        if accept {
            out.push(lambda);
        }
        // odometer, slice 0 most significant
        let mut j = free;
        loop {
            if j == 0 {
                return Ok(out);
            }
            j -= 1;
            pick[j] += 1;
            if pick[j] < choices[j].len() {
                break;
            }
            pick[j] = 0;
        }
    }
}

/// Determinant and eigenvector residuals of `(λ, x)`.
pub fn verify_eigenpair(a: &CircMatrix, lambda: &CircScalar, x: &CircVector) -> Result<EigenResidual> {
    let n = a.rows();
    if a.cols() != n || x.rows() != n || x.cols() != 1 || lambda.k() != a.k() || x.k() != a.k() {
        return Err(CircError::DimensionMismatch("eigenpair dimensions".into()));
    }
    if x.norm().magnitude() == 0.0 {
        return Err(CircError::ZeroVector);
    }
    let shifted = a.sub(&CircMatrix::identity(n, a.k()).scale(lambda)?)?;
    let det_residual = shifted.determinant_with_limit(usize::MAX)?.magnitude();
    let r = a.matmul(x)?.sub(&x.scale(lambda)?)?;
    Ok(EigenResidual { det_residual, vec_residual: r.norm().magnitude() })
}
