//! Eigenvalue spectrum of the squared-modulus operator and its traces.
//!
//! The eigenvalues are the geometric sequence `lambda_k = rho^(2k+1)`, so all
//! truncation tails and power traces have closed forms:
//! `sum_k lambda_k^n = rho^n / (1 - rho^(2n)) = 1 / (2 sinh(n delta))`.

use crate::error::{Error, Result};
use crate::params::FilterParams;

/// Finite prefix of the eigenvalue sequence with a certified geometric tail.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumTruncation {
    params: FilterParams,
    tail_eps: f64,
    eigenvalues: Vec<f64>,
    tail_bound: f64,
}

impl SpectrumTruncation {
    /// Truncate at the smallest length whose exact geometric tail
    /// `rho^(2K+1)/(1-rho^2)` does not exceed `tail_eps`.
    pub fn new(params: FilterParams, tail_eps: f64) -> Result<Self> {
        if tail_eps <= 0.0 || tail_eps.is_nan() {
            return Err(Error::domain(format!("tail_eps must be positive, got {tail_eps}")));
        }
        let len = truncation_length(&params, tail_eps);
        let eigenvalues: Vec<f64> = (0..len).map(|k| params.eigenvalue(k)).collect();
        Ok(SpectrumTruncation {
            params,
            tail_eps,
            eigenvalues,
            tail_bound: geometric_tail(&params, len),
        })
    }

    /// Truncate so the tail is below `rel_eps` of the full trace
    /// (`rel_eps = 1e-12` is the library default).
    pub fn with_relative_tail(params: FilterParams, rel_eps: f64) -> Result<Self> {
        SpectrumTruncation::new(params, rel_eps * exact_power_trace(&params, 1))
    }

    pub fn params(&self) -> &FilterParams {
        &self.params
    }

    pub fn tail_eps(&self) -> f64 {
        self.tail_eps
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    /// Exact sum of the eigenvalues beyond the truncation.
    pub fn tail_bound(&self) -> f64 {
        self.tail_bound
    }

    /// Compensated sum of the retained eigenvalues.
    pub fn partial_trace(&self) -> f64 {
        kahan_sum(self.eigenvalues.iter().copied())
    }
}

/// Smallest `K` with `rho^(2K+1)/(1-rho^2) <= tail_eps`.
fn truncation_length(params: &FilterParams, tail_eps: f64) -> usize {
    if geometric_tail(params, 0) <= tail_eps {
        return 0;
    }
    // rho^(2K+1) <= tail_eps*(1-rho^2)  <=>  K >= (ln(eps')/ln(rho) - 1)/2
    let rho = params.rho();
    let target = tail_eps * (1.0 - rho * rho);
    let k_est = ((target.ln() / rho.ln() - 1.0) / 2.0).ceil().max(0.0) as usize;
    // float estimate can be off by one either way
    let mut k = k_est;
    while k > 0 && geometric_tail(params, k - 1) <= tail_eps {
        k -= 1;
    }
    while geometric_tail(params, k) > tail_eps {
        k += 1;
    }
    k
}

/// Exact tail `sum_{k>=len} lambda_k = rho^(2*len+1)/(1-rho^2)`.
pub fn geometric_tail(params: &FilterParams, len: usize) -> f64 {
    let rho = params.rho();
    params.eigenvalue(len) / (1.0 - rho * rho)
}

/// Closed-form power trace `sum_k lambda_k^n = 1/(2 sinh(n delta))`.
pub fn exact_power_trace(params: &FilterParams, n: u32) -> f64 {
    assert!(n >= 1, "power trace defined for n >= 1");
    0.5 / (n as f64 * params.delta()).sinh()
}

/// Kahan-compensated sum; keeps long geometric sums at a few ulps of error.
pub(crate) fn kahan_sum(values: impl Iterator<Item = f64>) -> f64 {
    let mut sum = 0.0;
    let mut c = 0.0;
    for v in values {
        let y = v - c;
        let t = sum + y;
        c = (t - sum) - y;
        sum = t;
    }
    sum
}
