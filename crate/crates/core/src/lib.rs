//! Linear algebra over the ring of circulant scalars `K_k`.
//!
//! A scalar of `K_k` is a `k × k` circulant matrix, stored through its `k`
//! Fourier coefficients. Matrices over `K_k` decouple under the Circulant
//! Fourier Transform into `k` independent dense complex slices, and every
//! operation here (products, inner products, solves, eigenpairs, power and
//! Arnoldi iterations) is carried out slice by slice.
//!
//! ```
//! use camat::{CircMatrix, CircScalar};
//!
//! let s = |p: &[f64]| CircScalar::from_real(p).unwrap();
//! let a = CircMatrix::diag(&[s(&[2.0, 3.0, 1.0]), s(&[3.0, 1.0, 1.0])]).unwrap();
//! let eig = camat::eigen::canonical_eig(&a).unwrap();
//! let l1 = eig.lambdas[0].real_params().unwrap();
//! assert!((l1[0] - 10.0 / 3.0).abs() < 1e-12);
//! ```

pub mod dft;
pub mod eigen;
pub mod error;
pub mod exec;
pub mod io;
pub mod iterative;
pub mod linalg;
pub mod poisson;
pub mod scalar;
pub mod spectral;

pub use error::{CircError, Result};
pub use linalg::{CircMatrix, CircVector};
pub use num_complex::Complex64;
pub use scalar::CircScalar;
pub use spectral::{cft, icft, FourierBlocks};
