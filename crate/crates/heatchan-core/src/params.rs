//! Filter parameter bundle and the couplings between its members.
//!
//! The filter is parameterized by a time scale `alpha` and a frequency scale
//! `beta` with `alpha * beta > 1`. Everything else is derived: the dilation
//! `gamma = sqrt(alpha/beta)`, the semigroup parameter
//! `delta = arccoth(alpha*beta)` and the eigenvalue base `rho = exp(-delta)`.

use serde::Serialize;

use crate::error::{Error, Result};

/// Parameters of the Gaussian LTV filter.
///
/// Constructed through [`FilterParams::derive`] (from `alpha`, `beta`) or
/// [`FilterParams::from_gamma_delta`]; the couplings
/// `gamma^2 = alpha/beta`, `coth(delta) = alpha*beta`, `rho = exp(-delta)`
/// hold for every constructed value.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FilterParams {
    alpha: f64,
    beta: f64,
    gamma: f64,
    delta: f64,
    rho: f64,
}

impl FilterParams {
    /// Derive the full parameter bundle from the time scale `alpha` and the
    /// frequency scale `beta`.
    ///
    /// Fails when `alpha*beta <= 1` (the uncertainty bound) or when either
    /// input is not a positive finite number.
    pub fn derive(alpha: f64, beta: f64) -> Result<Self> {
        if alpha <= 0.0 || !alpha.is_finite() {
            return Err(Error::domain(format!("alpha must be positive, got {alpha}")));
        }
        if beta <= 0.0 || !beta.is_finite() {
            return Err(Error::domain(format!("beta must be positive, got {beta}")));
        }
        let ab = alpha * beta;
        if ab <= 1.0 || ab.is_nan() {
            return Err(Error::domain(format!(
                "uncertainty bound violated: alpha*beta = {ab} must exceed 1"
            )));
        }
        let delta = arccoth(ab);
        Ok(FilterParams {
            alpha,
            beta,
            gamma: (alpha / beta).sqrt(),
            delta,
            rho: (-delta).exp(),
        })
    }

    /// Derive the bundle from the time-frequency product `ab = alpha*beta`
    /// and the aspect ratio `alpha/beta`.
    pub fn from_dof(ab: f64, aspect: f64) -> Result<Self> {
        if aspect <= 0.0 || !aspect.is_finite() {
            return Err(Error::domain(format!("aspect ratio must be positive, got {aspect}")));
        }
        if ab <= 1.0 || !ab.is_finite() {
            return Err(Error::domain(format!(
                "uncertainty bound violated: alpha*beta = {ab} must exceed 1"
            )));
        }
        FilterParams::derive((ab * aspect).sqrt(), (ab / aspect).sqrt())
    }

    /// Construct from the dilation `gamma` and the semigroup parameter
    /// `delta > 0`, the natural coordinates of the filter family.
    pub fn from_gamma_delta(gamma: f64, delta: f64) -> Result<Self> {
        if gamma <= 0.0 || !gamma.is_finite() {
            return Err(Error::domain(format!("gamma must be positive, got {gamma}")));
        }
        if delta <= 0.0 || !delta.is_finite() {
            return Err(Error::domain(format!("delta must be positive, got {delta}")));
        }
        let coth = 1.0 / delta.tanh();
        Ok(FilterParams {
            alpha: gamma * coth.sqrt(),
            beta: coth.sqrt() / gamma,
            gamma,
            delta,
            rho: (-delta).exp(),
        })
    }

    /// Same dilation, semigroup parameter scaled by `factor` (e.g. `2.0`
    /// yields the parameters of the squared-modulus operator).
    pub fn scale_delta(&self, factor: f64) -> Result<Self> {
        FilterParams::from_gamma_delta(self.gamma, factor * self.delta)
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }

    /// Time-frequency product `alpha*beta` (the degrees of freedom).
    pub fn dof(&self) -> f64 {
        self.alpha * self.beta
    }

    /// `k`-th eigenvalue of the squared-modulus operator, `rho^(2k+1)`.
    pub fn eigenvalue(&self, k: usize) -> f64 {
        // rho^(2k+1) via exp keeps full relative accuracy for large k.
        (-(2.0 * k as f64 + 1.0) * self.delta).exp()
    }

    /// Weyl symbol of the squared-modulus operator at phase-space point
    /// `(x, xi)`: `exp(-x^2/alpha^2 - xi^2/beta^2) / cosh(delta)`.
    pub fn weyl_symbol(&self, x: f64, xi: f64) -> f64 {
        let r2 = (x / self.alpha).powi(2) + (xi / self.beta).powi(2);
        (-r2).exp() / self.delta.cosh()
    }
}

/// `arccoth(x) = ln((x+1)/(x-1)) / 2` for `x > 1`, evaluated through `ln_1p`
/// so large arguments keep full relative accuracy.
fn arccoth(x: f64) -> f64 {
    0.5 * (2.0 / (x - 1.0)).ln_1p()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel_err(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
    }

    #[test]
    fn derive_small_dof() {
        // alpha=1, beta=2: delta = ln(3)/2, rho = 3^(-1/2), gamma = 2^(-1/2)
        let p = FilterParams::derive(1.0, 2.0).unwrap();
        assert!(rel_err(p.delta(), 0.549_306_144_334_054_8) < 1e-15);
        assert!(rel_err(p.rho(), 0.577_350_269_189_625_8) < 1e-15);
        assert!(rel_err(p.gamma(), 0.707_106_781_186_547_5) < 1e-15);
    }

    #[test]
    fn derive_large_dof() {
        // alpha*beta = 50: delta = arccoth(50), asymptotically ~ 1/50
        let p = FilterParams::derive(5.0, 10.0).unwrap();
        assert!(rel_err(p.delta(), 0.020_002_667_306_849_58) < 1e-14);
    }

    #[test]
    fn uncertainty_boundary_rejected() {
        let err = FilterParams::derive(1.0, 1.0).unwrap_err();
        assert!(matches!(err, Error::Domain(_)));
        assert!(err.to_string().contains("uncertainty bound violated"));
        assert!(FilterParams::derive(-1.0, 2.0).is_err());
        assert!(FilterParams::derive(2.0, 0.0).is_err());
        assert!(FilterParams::derive(f64::NAN, 2.0).is_err());
    }

    #[test]
    fn couplings_hold() {
        for &(a, b) in &[(1.0, 2.0), (5.0, 10.0), (7.07, 7.08), (0.011, 100.0), (3000.0, 3.0)] {
            let p = FilterParams::derive(a, b).unwrap();
            let ab = a * b;
            assert!((1.0 / p.delta().tanh() / ab - 1.0).abs() < 1e-14, "coth coupling at ab={ab}");
            assert!((p.rho() - (-p.delta()).exp()).abs() <= f64::EPSILON * p.rho());
            assert!(rel_err(p.gamma() * p.gamma(), a / b) < 1e-14);
        }
    }

    #[test]
    fn from_dof_matches_derive() {
        let p = FilterParams::from_dof(50.0, 1.0).unwrap();
        let q = FilterParams::derive(50f64.sqrt(), 50f64.sqrt()).unwrap();
        assert_eq!(p, q);
        let p = FilterParams::from_dof(8.0, 0.5).unwrap();
        assert!(rel_err(p.dof(), 8.0) < 1e-15);
        assert!(rel_err(p.alpha() / p.beta(), 0.5) < 1e-15);
    }

    #[test]
    fn gamma_delta_roundtrip() {
        let p = FilterParams::derive(1.5, 4.0).unwrap();
        let q = FilterParams::from_gamma_delta(p.gamma(), p.delta()).unwrap();
        assert!(rel_err(q.alpha(), p.alpha()) < 1e-14);
        assert!(rel_err(q.beta(), p.beta()) < 1e-14);
    }

    #[test]
    fn weyl_symbol_center_and_decay() {
        let p = FilterParams::derive(1.0, 2.0).unwrap();
        // 1/cosh(ln(3)/2) = sqrt(3)/2
        assert!(rel_err(p.weyl_symbol(0.0, 0.0), 0.866_025_403_784_438_6) < 1e-15);
        assert!(p.weyl_symbol(40.0, 0.0) < 1e-300);
        assert!(p.weyl_symbol(1.0, 1.0) > 0.0);
    }
}
