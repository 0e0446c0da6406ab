//! Tube transforms: the DFT along the `k` parameters of a scalar.
//!
//! Forward: `α̂_j = Σ_i α_i ω^{-(i-1)(j-1)}`, `ω = e^{2πi/k}` (unnormalized).
//! Inverse carries the `1/k`.

use std::cell::RefCell;
use std::collections::HashMap;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

/// Planner plus plans keyed by `(len, inverse)`.
type PlanCache = (FftPlanner<f64>, HashMap<(usize, bool), Arc<dyn Fft<f64>>>);

thread_local! {
    static PLANS: RefCell<PlanCache> =
        RefCell::new((FftPlanner::new(), HashMap::new()));
}

fn plan(len: usize, inverse: bool) -> Arc<dyn Fft<f64>> {
    PLANS.with(|cell| {
        let (planner, cache) = &mut *cell.borrow_mut();
        cache
            .entry((len, inverse))
            .or_insert_with(|| if inverse { planner.plan_fft_inverse(len) } else { planner.plan_fft_forward(len) })
            .clone()
    })
}

pub fn forward_in_place(buf: &mut [Complex64]) {
    if buf.len() > 1 {
        plan(buf.len(), false).process(buf);
    }
}

pub fn inverse_in_place(buf: &mut [Complex64]) {
    let k = buf.len();
    if k > 1 {
        plan(k, true).process(buf);
        let s = 1.0 / k as f64;
        buf.iter_mut().for_each(|z| *z *= s);
    }
}

pub fn forward(params: &[Complex64]) -> Vec<Complex64> {
    let mut buf = params.to_vec();
    forward_in_place(&mut buf);
    buf
}

pub fn inverse(coeffs: &[Complex64]) -> Vec<Complex64> {
    let mut buf = coeffs.to_vec();
    inverse_in_place(&mut buf);
    buf
}

/// Index of the conjugate partner of coefficient `j` (0-based): `(k - j) mod k`.
#[inline]
pub fn mirror(j: usize, k: usize) -> usize {
    (k - j) % k
}
