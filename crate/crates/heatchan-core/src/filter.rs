//! The Gaussian LTV filter: spectral-form and kernel-form application.
//!
//! In the dilated Hermite basis the filter is diagonal with singular values
//! `rho^(k+1/2)`; in the time domain it is the Gaussian-envelope,
//! Gaussian-kernel integral operator. Both forms are implemented and the
//! eigenfunction property ties them together in the tests.

use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::params::FilterParams;

/// Apply the filter in the Hermite domain: `b_k = rho^(k+1/2) * a_k`.
pub fn apply_spectral(params: &FilterParams, coeffs: &[f64]) -> Vec<f64> {
    coeffs
        .iter()
        .enumerate()
        .map(|(k, a)| (-(k as f64 + 0.5) * params.delta()).exp() * a)
        .collect()
}

/// Integral kernel of the filter at `(t, t_prime)`.
///
/// `k(t, t') = exp(-t^2/(2 alpha^2)) * beta/sqrt(2 pi cosh delta)
///             * exp(-(beta^2/2) (t/cosh delta - t')^2)`
pub fn kernel(params: &FilterParams, t: f64, t_prime: f64) -> f64 {
    let cosh_d = params.delta().cosh();
    let envelope = (-t * t / (2.0 * params.alpha() * params.alpha())).exp();
    let shift = t / cosh_d - t_prime;
    let beta = params.beta();
    envelope * beta / (2.0 * std::f64::consts::PI * cosh_d).sqrt()
        * (-0.5 * beta * beta * shift * shift).exp()
}

/// Apply the filter in the time domain by trapezoid quadrature of the kernel
/// integral over `grid`; `samples` holds the input on the same grid.
///
/// The Gaussian kernel column decays on the scale `1/beta`, so source points
/// farther than `14/beta` from the kernel center contribute below 1e-42 and
/// are skipped.
pub fn apply_kernel(params: &FilterParams, samples: &[f64], grid: &Grid) -> Result<Vec<f64>> {
    if samples.len() != grid.len() {
        return Err(Error::usage(format!(
            "sample count {} does not match grid length {}",
            samples.len(),
            grid.len()
        )));
    }
    let beta = params.beta();
    if grid.spacing() > 1.0 / (4.0 * beta) {
        return Err(Error::accuracy(format!(
            "grid spacing {} too coarse for beta = {beta}; need at most 1/(4 beta) = {}",
            grid.spacing(),
            1.0 / (4.0 * beta)
        )));
    }
    let cosh_d = params.delta().cosh();
    let front = beta / (2.0 * std::f64::consts::PI * cosh_d).sqrt();
    let alpha2 = params.alpha() * params.alpha();
    let h = grid.spacing();
    let n = grid.len();
    let reach = (14.0 / (beta * h)).ceil() as usize;
    let mut out = vec![0.0; n];
    for (i, o) in out.iter_mut().enumerate() {
        let t = grid.point(i);
        let center = t / cosh_d;
        // index window covering |t_j - center| <= 14/beta
        let c_idx = (center + grid.half_width()) / h;
        let j_lo = (c_idx as isize - reach as isize).max(0) as usize;
        let j_hi = ((c_idx as usize).saturating_add(reach + 1)).min(n);
        let mut acc = 0.0;
        for (j, sample) in samples.iter().enumerate().take(j_hi).skip(j_lo) {
            let d = center - grid.point(j);
            let w = if j == 0 || j == n - 1 { 0.5 } else { 1.0 };
            acc += w * (-0.5 * beta * beta * d * d).exp() * sample;
        }
        *o = (-t * t / (2.0 * alpha2)).exp() * front * acc * h;
    }
    Ok(out)
}
