//! The ring `K_k` of circulant scalars.
//!
//! A scalar is the first column `(α_1, .., α_k)` of a `k × k` circulant
//! matrix. Its Fourier coefficients `α̂_j` are that matrix's eigenvalues, and
//! every ring operation is element-wise on them, so the coefficients are the
//! stored form. Time-domain parameters are recomputed on first read.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::OnceLock;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::dft;
use crate::error::{CircError, Result};

/// Relative threshold below which a Fourier coefficient counts as zero.
pub const ZERO_DIVISOR_TOL: f64 = 1e-12;
/// Relative threshold for "this coefficient is real" in the ordering.
pub const REAL_TOL: f64 = 1e-12;

/// What `angle` does with a vanishing coefficient.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum AnglePolicy {
    /// Report a zero divisor.
    #[default]
    Strict,
    /// Map the coefficient's angle to 1, like `sign(0) = 1`.
    Lenient,
}

/// Coefficient-wise functions of a scalar.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpectralFn {
    Abs,
    Angle(AnglePolicy),
    Conj,
    Sqrt,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    LessEq,
    GreaterEq,
    Equal,
    Incomparable,
}

/// Result of comparing two real-spectrum scalars coefficient by coefficient.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OrderingOutcome {
    pub relation: Relation,
    /// The relation holds with strict inequality in every coefficient.
    pub strict: bool,
}

impl OrderingOutcome {
    pub fn is_le(&self) -> bool {
        matches!(self.relation, Relation::LessEq | Relation::Equal)
    }

    pub fn is_ge(&self) -> bool {
        matches!(self.relation, Relation::GreaterEq | Relation::Equal)
    }
}

#[derive(Clone)]
pub struct CircScalar {
    coeffs: Vec<Complex64>,
    real: bool,
    params: OnceLock<Vec<Complex64>>,
}

/// `max_j |c_j - conj(c_{k-j})|`, zero exactly when `c` is the spectrum of a
/// real scalar.
pub fn symmetry_deviation(coeffs: &[Complex64]) -> f64 {
    let k = coeffs.len();
    (0..k).map(|j| (coeffs[j] - coeffs[dft::mirror(j, k)].conj()).norm()).fold(0.0, f64::max)
}

impl CircScalar {
    /// Builds a scalar from real time-domain parameters.
    pub fn from_real(params: &[f64]) -> Result<Self> {
        if params.is_empty() {
            return Err(CircError::Empty);
        }
        let p: Vec<Complex64> = params.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        let coeffs = dft::forward(&p);
        Ok(Self { coeffs, real: true, params: OnceLock::from(p) })
    }

    /// Builds a scalar from complex time-domain parameters. The result is
    /// not flagged real even if every imaginary part is zero.
    pub fn from_complex(params: &[Complex64]) -> Result<Self> {
        if params.is_empty() {
            return Err(CircError::Empty);
        }
        let coeffs = dft::forward(params);
        Ok(Self { coeffs, real: false, params: OnceLock::from(params.to_vec()) })
    }

    /// Builds a scalar from its Fourier coefficients.
    ///
    /// `real` asserts the coefficients are conjugate-symmetric; the time
    /// domain then drops the roundoff imaginary parts on read.
    pub fn from_coeffs(coeffs: Vec<Complex64>, real: bool) -> Self {
        assert!(!coeffs.is_empty(), "a scalar needs at least one coefficient");
        Self { coeffs, real, params: OnceLock::new() }
    }

    /// Like [`from_coeffs`](Self::from_coeffs) but decides the real flag by
    /// checking conjugate symmetry to `tol · max(1, magnitude)`.
    pub fn from_coeffs_detect(coeffs: Vec<Complex64>, tol: f64) -> Self {
        let scale = coeffs.iter().map(|c| c.norm()).fold(1.0, f64::max);
        let real = symmetry_deviation(&coeffs) <= tol * scale;
        Self::from_coeffs(coeffs, real)
    }

    pub fn zero(k: usize) -> Self {
        Self::from_coeffs(vec![Complex64::new(0.0, 0.0); k], true)
    }

    /// The multiplicative identity `(1, 0, .., 0)`.
    pub fn one(k: usize) -> Self {
        Self::constant(k, 1.0)
    }

    /// `c · 1̲`: every Fourier coefficient equals `c`.
    pub fn constant(k: usize, c: f64) -> Self {
        Self::from_coeffs(vec![Complex64::new(c, 0.0); k], true)
    }

    pub fn k(&self) -> usize {
        self.coeffs.len()
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn is_real(&self) -> bool {
        self.real
    }

    /// Time-domain parameters `tvec(α)`.
    pub fn params(&self) -> &[Complex64] {
        self.params.get_or_init(|| {
            let mut p = dft::inverse(&self.coeffs);
            if self.real {
                p.iter_mut().for_each(|z| z.im = 0.0);
            }
            p
        })
    }

    /// Real parts of the parameters, if the scalar is flagged real.
    pub fn real_params(&self) -> Option<Vec<f64>> {
        self.real.then(|| self.params().iter().map(|z| z.re).collect())
    }

    /// The dense `k × k` circulant matrix whose first column is `tvec(α)`.
    pub fn to_circ_matrix(&self) -> DMatrix<Complex64> {
        let p = self.params();
        let k = p.len();
        DMatrix::from_fn(k, k, |r, c| p[(r + k - c) % k])
    }

    /// Spectral norm of the circulant matrix: `max_j |α̂_j|`.
    pub fn magnitude(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    fn zero_threshold(&self) -> f64 {
        ZERO_DIVISOR_TOL * self.magnitude().max(1.0)
    }

    /// Slices whose coefficient is numerically zero.
    pub fn zero_divisor_slices(&self) -> Vec<usize> {
        let tol = self.zero_threshold();
        (0..self.k()).filter(|&j| self.coeffs[j].norm() <= tol).collect()
    }

    pub fn is_invertible(&self) -> bool {
        self.zero_divisor_slices().is_empty()
    }

    fn check_k(&self, other: &Self) -> Result<()> {
        if self.k() == other.k() {
            Ok(())
        } else {
            Err(CircError::DimensionMismatch(format!("scalar lengths {} and {}", self.k(), other.k())))
        }
    }

    fn zip_with(&self, other: &Self, f: impl Fn(Complex64, Complex64) -> Complex64) -> Self {
        let coeffs = self.coeffs.iter().zip(&other.coeffs).map(|(&a, &b)| f(a, b)).collect();
        Self::from_coeffs(coeffs, self.real && other.real)
    }

    fn map(&self, real: bool, f: impl Fn(Complex64) -> Complex64) -> Self {
        Self::from_coeffs(self.coeffs.iter().map(|&a| f(a)).collect(), real)
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self> {
        self.check_k(other)?;
        Ok(self.zip_with(other, |a, b| a + b))
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self> {
        self.check_k(other)?;
        Ok(self.zip_with(other, |a, b| a - b))
    }

    pub fn checked_mul(&self, other: &Self) -> Result<Self> {
        self.check_k(other)?;
        Ok(self.zip_with(other, |a, b| a * b))
    }

    pub fn scale(&self, s: f64) -> Self {
        self.map(self.real, |a| a * s)
    }

    /// Multiplicative inverse. Fails with the vanishing coefficients listed.
    pub fn inverse(&self) -> Result<Self> {
        let bad = self.zero_divisor_slices();
        if !bad.is_empty() {
            return Err(CircError::ZeroDivisor { slices: bad });
        }
        Ok(self.map(self.real, |a| a.inv()))
    }

    pub fn spectral_map(&self, f: SpectralFn) -> Result<Self> {
        match f {
            SpectralFn::Abs => Ok(self.map(self.real, |a| Complex64::new(a.norm(), 0.0))),
            SpectralFn::Conj => Ok(self.map(self.real, |a| a.conj())),
            SpectralFn::Sqrt => {
                let out = self.map(false, |a| a.sqrt());
                let real = self.real && symmetry_deviation(&out.coeffs) <= REAL_TOL * out.magnitude().max(1.0);
                Ok(Self::from_coeffs(out.coeffs, real))
            }
            SpectralFn::Angle(policy) => {
                let bad = self.zero_divisor_slices();
                if !bad.is_empty() && policy == AnglePolicy::Strict {
                    return Err(CircError::ZeroDivisor { slices: bad });
                }
                let tol = self.zero_threshold();
                Ok(self.map(self.real, |a| {
                    let r = a.norm();
                    if r <= tol {
                        Complex64::new(1.0, 0.0)
                    } else {
                        a / r
                    }
                }))
            }
        }
    }

    pub fn abs(&self) -> Self {
        self.spectral_map(SpectralFn::Abs).expect("abs is total")
    }

    pub fn conj(&self) -> Self {
        self.spectral_map(SpectralFn::Conj).expect("conj is total")
    }

    pub fn sqrt(&self) -> Self {
        self.spectral_map(SpectralFn::Sqrt).expect("sqrt is total")
    }

    /// The orthogonal-circulant phase `α̂_j / |α̂_j|`.
    pub fn angle(&self) -> Result<Self> {
        self.spectral_map(SpectralFn::Angle(AnglePolicy::Strict))
    }

    /// Element-wise ordering of the Fourier coefficients. Both spectra must
    /// be real.
    pub fn partial_order(&self, other: &Self) -> Result<OrderingOutcome> {
        self.check_k(other)?;
        for s in [self, other] {
            let tol = REAL_TOL * s.magnitude().max(1.0);
            if let Some(index) = s.coeffs.iter().position(|c| c.im.abs() > tol) {
                return Err(CircError::NonRealSpectrum { index });
            }
        }
        let pairs = || self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| (a.re, b.re));
        let le = pairs().all(|(a, b)| a <= b);
        let ge = pairs().all(|(a, b)| a >= b);
        let outcome = match (le, ge) {
            (true, true) => OrderingOutcome { relation: Relation::Equal, strict: false },
            (true, false) => OrderingOutcome { relation: Relation::LessEq, strict: pairs().all(|(a, b)| a < b) },
            (false, true) => OrderingOutcome { relation: Relation::GreaterEq, strict: pairs().all(|(a, b)| a > b) },
            (false, false) => OrderingOutcome { relation: Relation::Incomparable, strict: false },
        };
        Ok(outcome)
    }

    /// Max coefficient distance to `other`; 0 for identical scalars.
    pub fn distance(&self, other: &Self) -> f64 {
        self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    }
}

impl PartialEq for CircScalar {
    fn eq(&self, other: &Self) -> bool {
        self.coeffs == other.coeffs
    }
}

impl fmt::Debug for CircScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.real_params() {
            Some(p) => write!(f, "CircScalar{:?}", p),
            None => write!(f, "CircScalar{:?}", self.params()),
        }
    }
}

impl fmt::Display for CircScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&crate::io::format_scalar(self))
    }
}

macro_rules! binop {
    ($trait:ident, $method:ident, $checked:ident) => {
        impl $trait<&CircScalar> for &CircScalar {
            type Output = CircScalar;

            /// Panics if the scalars have different `k`.
            fn $method(self, rhs: &CircScalar) -> CircScalar {
                self.$checked(rhs).expect("scalar lengths differ")
            }
        }

        impl $trait<CircScalar> for CircScalar {
            type Output = CircScalar;

            fn $method(self, rhs: CircScalar) -> CircScalar {
                (&self).$method(&rhs)
            }
        }
    };
}

binop!(Add, add, checked_add);
binop!(Sub, sub, checked_sub);
binop!(Mul, mul, checked_mul);

impl Neg for &CircScalar {
    type Output = CircScalar;

    fn neg(self) -> CircScalar {
        self.scale(-1.0)
    }
}
