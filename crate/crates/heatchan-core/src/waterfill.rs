//! Exact discrete waterfilling: channel capacity over the noise-variance
//! ladder and rate-distortion over the source-variance ladder.
//!
//! Subchannel k has noise variance `nu_k^2 = theta^2 / lambda_k` (capacity
//! problem) or source variance `sigma_k^2 = sigma^2 * lambda_k`
//! (rate-distortion problem), with `lambda_k = rho^(2k+1)`. Both ladders are
//! geometric, so budget equations can be evaluated against the untruncated
//! series: the post-truncation remainder is an exact geometric tail.

use serde::Serialize;

use crate::bisect::bisect_increasing;
use crate::error::{Error, Result};
use crate::params::FilterParams;
use crate::spectrum::{exact_power_trace, kahan_sum};

/// Solved waterfilling instance.
///
/// For capacity: `level` is the water level sigma^2, `allocations` the
/// per-subchannel powers `sigma^2 - nu_k^2` over the K active subchannels,
/// `value` the capacity in nats and `budget_check` the reconstructed input
/// energy S. For rate-distortion: `level` is the water table theta^2,
/// `allocations` the per-subchannel distortions `min(theta^2, sigma_k^2)`,
/// `value` the rate in nats and `budget_check` the reconstructed distortion D
/// including the geometric tail.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WaterfillSolution {
    pub level: f64,
    pub active_count: usize,
    pub allocations: Vec<f64>,
    pub value: f64,
    pub budget_check: f64,
}

/// Capacity of the discretized channel with input energy budget `s_budget`
/// and noise PSD `theta2`, by the incremental water-level sweep.
///
/// For K = 1, 2, ... the candidate level is
/// `sigma^2(K) = (S + sum_{k<K} nu_k^2) / K`; the unique K with
/// `nu_{K-1}^2 < sigma^2(K) <= nu_K^2` is accepted. `s_budget = 0` returns
/// the trivial solution C = 0, K = 0.
pub fn capacity_waterfill(
    params: &FilterParams,
    s_budget: f64,
    theta2: f64,
    tail_eps: f64,
) -> Result<WaterfillSolution> {
    if s_budget < 0.0 || !s_budget.is_finite() {
        return Err(Error::domain(format!("input energy must be nonnegative, got {s_budget}")));
    }
    if theta2 <= 0.0 || theta2.is_nan() {
        return Err(Error::domain(format!("noise PSD must be positive, got {theta2}")));
    }
    if tail_eps <= 0.0 || tail_eps.is_nan() {
        return Err(Error::domain(format!("tail_eps must be positive, got {tail_eps}")));
    }
    let nu2 = |k: usize| theta2 / params.eigenvalue(k);
    if s_budget == 0.0 {
        return Ok(WaterfillSolution {
            level: nu2(0),
            active_count: 0,
            allocations: Vec::new(),
            value: 0.0,
            budget_check: 0.0,
        });
    }

    // noise variances grow geometrically, so the sweep always terminates
    let mut noise_sum = 0.0;
    let mut k = 0usize;
    let level = loop {
        noise_sum += nu2(k);
        k += 1;
        let candidate = (s_budget + noise_sum) / k as f64;
        if nu2(k - 1) < candidate && candidate <= nu2(k) {
            break candidate;
        }
        if k > 100_000_000 {
            return Err(Error::accuracy("water-level sweep failed to terminate"));
        }
    };

    let allocations: Vec<f64> = (0..k).map(|j| level - nu2(j)).collect();
    let value = kahan_sum((0..k).map(|j| 0.5 * (level / nu2(j)).ln()));
    let budget_check = kahan_sum(allocations.iter().copied());
    Ok(WaterfillSolution {
        level,
        active_count: k,
        allocations,
        value,
        budget_check,
    })
}

/// Total source energy `E = sigma^2 * sum_k lambda_k`.
pub fn source_energy(params: &FilterParams, sigma2: f64) -> f64 {
    sigma2 * exact_power_trace(params, 1)
}

/// Distortion produced by water table `t2`, against the untruncated series:
/// `sum_k min(t2, sigma_k^2) = K(t2) * t2 + exact geometric tail`.
fn distortion_at(params: &FilterParams, sigma2: f64, t2: f64) -> f64 {
    let k = active_sources(params, sigma2, t2);
    let rho = params.rho();
    let tail = sigma2 * params.eigenvalue(k) / (1.0 - rho * rho);
    k as f64 * t2 + tail
}

/// `K(t2) = #{k : sigma_k^2 > t2}`, equivalently `max{k : sigma_{k-1}^2 > t2}`.
fn active_sources(params: &FilterParams, sigma2: f64, t2: f64) -> usize {
    let sig2 = |k: usize| sigma2 * params.eigenvalue(k);
    if sig2(0) <= t2 {
        return 0;
    }
    // sigma_k^2 > t2  <=>  k < (ln(sigma^2/t2)/delta - 1)/2
    let q = ((sigma2 / t2).ln() / params.delta() - 1.0) / 2.0;
    let mut k = (q.floor() + 1.0).max(1.0) as usize;
    while k > 0 && sig2(k - 1) <= t2 {
        k -= 1;
    }
    while sig2(k) > t2 {
        k += 1;
    }
    k
}

/// Rate-distortion of the coefficient source at distortion `distortion`,
/// source PSD `sigma2`, by reverse waterfilling: bisection for the water
/// table on `(0, sigma_0^2]`, then `R = sum_{k<K} ln(sigma_k^2/theta^2)/2`.
pub fn rd_reverse_waterfill(
    params: &FilterParams,
    distortion: f64,
    sigma2: f64,
    tail_eps: f64,
) -> Result<WaterfillSolution> {
    if sigma2 <= 0.0 || sigma2.is_nan() {
        return Err(Error::domain(format!("source PSD must be positive, got {sigma2}")));
    }
    if tail_eps <= 0.0 || tail_eps.is_nan() {
        return Err(Error::domain(format!("tail_eps must be positive, got {tail_eps}")));
    }
    if distortion <= 0.0 || distortion.is_nan() {
        return Err(Error::domain(format!("distortion must be positive, got {distortion}")));
    }
    let energy = source_energy(params, sigma2);
    if distortion > energy {
        return Err(Error::domain(format!(
            "distortion exceeds source energy: D = {distortion} > E = {energy}"
        )));
    }

    let sig2_0 = sigma2 * params.eigenvalue(0);
    // a distortion within an ulp of E means the zero-rate point
    let level = if distortion >= energy * (1.0 - 1e-15) {
        sig2_0
    } else {
        bisect_increasing(
            |t2| distortion_at(params, sigma2, t2),
            0.0,
            sig2_0,
            distortion,
            1e-12,
        )?
    };

    let k = active_sources(params, sigma2, level);
    let rho = params.rho();
    // report at least the truncation-mandated subchannels, and all active ones
    let shown = k.max(truncated_len(params, sigma2, tail_eps));
    let allocations: Vec<f64> =
        (0..shown).map(|j| level.min(sigma2 * params.eigenvalue(j))).collect();
    let tail = sigma2 * params.eigenvalue(shown) / (1.0 - rho * rho);
    let value = kahan_sum((0..k).map(|j| 0.5 * (sigma2 * params.eigenvalue(j) / level).ln()));
    Ok(WaterfillSolution {
        level,
        active_count: k,
        allocations: allocations.clone(),
        value,
        budget_check: kahan_sum(allocations.into_iter()) + tail,
    })
}

/// Subchannels needed before the source-variance tail drops below `tail_eps`.
fn truncated_len(params: &FilterParams, sigma2: f64, tail_eps: f64) -> usize {
    let rho2 = params.rho() * params.rho();
    let mut k = 0usize;
    while sigma2 * params.eigenvalue(k) / (1.0 - rho2) > tail_eps && k < 1_000_000 {
        k += 1;
    }
    k
}

/// Asymptotic input-energy relation at water level `sigma2` over noise floor
/// `theta2`: `(ab/2) * theta^2 * (x ln x - x + 1)` with `x = sigma2/theta2`.
pub fn closed_form_s(params: &FilterParams, sigma2: f64, theta2: f64) -> Result<f64> {
    let admissible = sigma2 > theta2 && theta2 > 0.0;
    if !admissible {
        return Err(Error::domain(format!(
            "need sigma2 > theta2 > 0, got sigma2 = {sigma2}, theta2 = {theta2}"
        )));
    }
    let x = sigma2 / theta2;
    Ok(0.5 * params.dof() * theta2 * (x * x.ln() - x + 1.0))
}

/// Asymptotic distortion relation at water table `theta2` under source PSD
/// `sigma2`: `(ab/2) * sigma^2 * (x - x ln x)` with `x = theta2/sigma2`.
pub fn closed_form_d(params: &FilterParams, sigma2: f64, theta2: f64) -> Result<f64> {
    let admissible = sigma2 > theta2 && theta2 > 0.0;
    if !admissible {
        return Err(Error::domain(format!(
            "need sigma2 > theta2 > 0, got sigma2 = {sigma2}, theta2 = {theta2}"
        )));
    }
    let x = theta2 / sigma2;
    Ok(0.5 * params.dof() * sigma2 * (x - x * x.ln()))
}
