//! Waterfilling in the time-frequency plane.
//!
//! The capacity-side integrals run against the noise profile
//! `N(t,w) = (theta^2/2pi) cosh(delta) exp(t^2/alpha^2 + w^2/beta^2)` and the
//! rate-distortion side against the Wigner-Ville spectrum
//! `Phi(t,w) = (sigma^2/2pi) (1/cosh delta) exp(-t^2/alpha^2 - w^2/beta^2)`.
//! Both are radial in the scaled coordinates `(t/alpha, w/beta)`, so each
//! integral has a one-line closed form; an adaptive 2D quadrature route is
//! kept alongside as an independent cross-check. The LTI baseline
//! ([`gallager_lti`]) is the `alpha -> infinity` limit with noise profile
//! `N_1(w) = (theta^2/2pi) exp(w^2/beta^2)`.

use std::f64::consts::PI;

use serde::Serialize;

use crate::bisect::bisect_increasing;
use crate::error::{Error, Result};
use crate::params::FilterParams;
use crate::quad::{adaptive_1d, adaptive_2d};

/// Relative slack around the activation threshold below which an integral is
/// taken to be exactly degenerate (0 or the full energy).
const THRESHOLD_SLACK: f64 = 1e-15;

/// How a [`TfIntegral`] value was produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    RadialClosedForm,
    Quadrature2d,
}

/// One evaluated waterfilling integral.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TfIntegral {
    /// The waterfilling parameter (nu for the capacity pair, lambda for the
    /// rate-distortion pair).
    pub parameter: f64,
    /// Integral value: C or R in nats, S or D in energy units.
    pub value: f64,
    pub method: Method,
    /// Radius^2 of the active ellipse in scaled coordinates; 0 when the
    /// active region is empty.
    pub ellipse_r2: f64,
}

/// Effective noise profile `N(t, w)`; grows off the origin, reciprocal to
/// the Weyl symbol: `N * sigma_A = theta^2 / 2pi`.
pub fn noise_profile(params: &FilterParams, theta2: f64, t: f64, omega: f64) -> f64 {
    let r2 = (t / params.alpha()).powi(2) + (omega / params.beta()).powi(2);
    theta2 / (2.0 * PI) * params.delta().cosh() * r2.exp()
}

/// Gallager's LTI noise profile `N_1(w)`, the `alpha -> infinity` limit of
/// [`noise_profile`].
pub fn n1_profile(beta: f64, theta2: f64, omega: f64) -> f64 {
    theta2 / (2.0 * PI) * (omega / beta).powi(2).exp()
}

/// Wigner-Ville spectrum `Phi(t, w)` of the filtered-white-noise source with
/// PSD `sigma2`; proportional to the Weyl symbol.
pub fn wvs(params: &FilterParams, sigma2: f64, t: f64, omega: f64) -> f64 {
    sigma2 / (2.0 * PI) * params.weyl_symbol(t, omega)
}

/// Central (minimum) value of the noise profile.
fn noise_floor(params: &FilterParams, theta2: f64) -> f64 {
    theta2 * params.delta().cosh() / (2.0 * PI)
}

/// Central (peak) value of the Wigner-Ville spectrum.
pub fn wvs_peak(params: &FilterParams, sigma2: f64) -> f64 {
    sigma2 / (2.0 * PI * params.delta().cosh())
}

// ---------------------------------------------------------------------------
// Capacity side: integrals against N(t, w), parameterized by nu
// ---------------------------------------------------------------------------

/// Capacity integral `(1/2pi) iint ln(1 + (nu - N)+/N)/2 dt dw`.
///
/// Closed form: with `c = N(0,0)` and `r2 = ln(nu/c)` when `nu > c`,
/// the value is `ab * r2^2 / 8` nats.
pub fn capacity_integral(params: &FilterParams, theta2: f64, nu: f64) -> TfIntegral {
    let c = noise_floor(params, theta2);
    let r2 = active_radius2(nu, c);
    TfIntegral {
        parameter: nu,
        value: params.dof() * r2 * r2 / 8.0,
        method: Method::RadialClosedForm,
        ellipse_r2: r2,
    }
}

/// Input-energy integral `iint (nu - N)+ dt dw`.
///
/// Closed form: `pi * ab * (nu ln(nu/c) - nu + c)` for `nu > c`, else 0.
pub fn power_integral(params: &FilterParams, theta2: f64, nu: f64) -> TfIntegral {
    let c = noise_floor(params, theta2);
    let r2 = active_radius2(nu, c);
    let value = if r2 == 0.0 { 0.0 } else { PI * params.dof() * (nu * r2 - nu + c) };
    TfIntegral {
        parameter: nu,
        value,
        method: Method::RadialClosedForm,
        ellipse_r2: r2,
    }
}

/// `ln(level/floor)` when the level clears the floor by more than the
/// threshold slack, else 0.
fn active_radius2(level: f64, floor: f64) -> f64 {
    if level <= floor * (1.0 + THRESHOLD_SLACK) {
        0.0
    } else {
        (level / floor).ln()
    }
}

/// Capacity integral by adaptive 2D quadrature over the active ellipse's
/// bounding box (independent of the closed form).
pub fn capacity_integral_quad(params: &FilterParams, theta2: f64, nu: f64) -> TfIntegral {
    let c = noise_floor(params, theta2);
    let r2 = active_radius2(nu, c);
    let value = if r2 == 0.0 {
        0.0
    } else {
        let jac = params.dof() / (2.0 * PI);
        // N in scaled coordinates: c * exp(u^2 + v^2)
        let f = move |u: f64, v: f64| {
            let n = c * (u * u + v * v).exp();
            0.5 * (1.0 + (nu - n).max(0.0) / n).ln()
        };
        jac * quad_over_box(&f, r2.sqrt(), 1e-9)
    };
    TfIntegral {
        parameter: nu,
        value,
        method: Method::Quadrature2d,
        ellipse_r2: r2,
    }
}

/// Input-energy integral by adaptive 2D quadrature.
pub fn power_integral_quad(params: &FilterParams, theta2: f64, nu: f64) -> TfIntegral {
    let c = noise_floor(params, theta2);
    let r2 = active_radius2(nu, c);
    let value = if r2 == 0.0 {
        0.0
    } else {
        let f = move |u: f64, v: f64| (nu - c * (u * u + v * v).exp()).max(0.0);
        params.dof() * quad_over_box(&f, r2.sqrt(), 1e-9)
    };
    TfIntegral {
        parameter: nu,
        value,
        method: Method::Quadrature2d,
        ellipse_r2: r2,
    }
}

/// Solve `power_integral(nu) = s_target` for nu by bisection above the noise
/// floor; the map is continuous and strictly increasing there.
pub fn solve_nu(params: &FilterParams, theta2: f64, s_target: f64) -> Result<f64> {
    if theta2 <= 0.0 || theta2.is_nan() {
        return Err(Error::domain(format!("noise PSD must be positive, got {theta2}")));
    }
    if s_target <= 0.0 || !s_target.is_finite() {
        return Err(Error::domain(format!("input energy must be positive, got {s_target}")));
    }
    let c = noise_floor(params, theta2);
    let power = |nu: f64| power_integral(params, theta2, nu).value;
    let mut exponent: f64 = 64.0;
    let mut hi = c * exponent.exp();
    while power(hi) < s_target {
        exponent *= 2.0;
        if exponent > 512.0 {
            return Err(Error::domain(format!(
                "input energy {s_target} cannot be bracketed by nu <= c*exp(512)"
            )));
        }
        hi = c * exponent.exp();
    }
    bisect_increasing(power, c, hi, s_target, 1e-12)
}

// ---------------------------------------------------------------------------
// Rate-distortion side: integrals against Phi(t, w), parameterized by lambda
// ---------------------------------------------------------------------------

/// Rate integral `(1/2pi) iint max(0, ln(Phi/lambda)/2) dt dw`.
///
/// Closed form: with `p = Phi(0,0)` and `r2 = ln(p/lambda)` when
/// `lambda < p`, the value is `ab * r2^2 / 8` nats.
pub fn rate_integral(params: &FilterParams, sigma2: f64, lambda: f64) -> TfIntegral {
    let p = wvs_peak(params, sigma2);
    let r2 = active_radius2_below(lambda, p);
    TfIntegral {
        parameter: lambda,
        value: params.dof() * r2 * r2 / 8.0,
        method: Method::RadialClosedForm,
        ellipse_r2: r2,
    }
}

/// Distortion integral `iint min(lambda, Phi) dt dw`.
///
/// Closed form: `pi * ab * lambda * (1 + ln(p/lambda))` for `lambda < p`,
/// saturating at the source energy `E = pi * ab * p` for `lambda >= p`.
pub fn distortion_integral(params: &FilterParams, sigma2: f64, lambda: f64) -> TfIntegral {
    let p = wvs_peak(params, sigma2);
    let r2 = active_radius2_below(lambda, p);
    let value = if r2 == 0.0 {
        PI * params.dof() * p
    } else {
        PI * params.dof() * lambda * (1.0 + r2)
    };
    TfIntegral {
        parameter: lambda,
        value,
        method: Method::RadialClosedForm,
        ellipse_r2: r2,
    }
}

/// `ln(peak/level)` when the level sits below the peak by more than the
/// threshold slack, else 0.
fn active_radius2_below(level: f64, peak: f64) -> f64 {
    if level >= peak * (1.0 - THRESHOLD_SLACK) {
        0.0
    } else {
        (peak / level).ln()
    }
}

/// Rate integral by adaptive 2D quadrature.
pub fn rate_integral_quad(params: &FilterParams, sigma2: f64, lambda: f64) -> TfIntegral {
    let p_peak = wvs_peak(params, sigma2);
    let r2 = active_radius2_below(lambda, p_peak);
    let value = if r2 == 0.0 {
        0.0
    } else {
        let jac = params.dof() / (2.0 * PI);
        // Phi in scaled coordinates: peak * exp(-(u^2 + v^2))
        let f = move |u: f64, v: f64| {
            let phi = p_peak * (-(u * u + v * v)).exp();
            (0.5 * (phi / lambda).ln()).max(0.0)
        };
        jac * quad_over_box(&f, r2.sqrt(), 1e-9)
    };
    TfIntegral {
        parameter: lambda,
        value,
        method: Method::Quadrature2d,
        ellipse_r2: r2,
    }
}

/// Distortion integral by adaptive 2D quadrature, through the complement:
/// `iint min(lambda, Phi) = iint Phi - iint (Phi - lambda)+`.
///
/// The whole-mass integrand is smooth and the excess integrand vanishes at
/// its crease, so both converge fast; integrating `min` directly would pin a
/// nonvanishing gradient jump on the crease. The box extends sqrt(34) scaled
/// units past the active ellipse, leaving under `1e-13` of the mass outside.
pub fn distortion_integral_quad(params: &FilterParams, sigma2: f64, lambda: f64) -> TfIntegral {
    let p_peak = wvs_peak(params, sigma2);
    let r2 = active_radius2_below(lambda, p_peak);
    let phi = move |u: f64, v: f64| p_peak * (-(u * u + v * v)).exp();
    let whole = quad_over_box(&phi, (r2 + 34.0).sqrt(), 1e-12);
    let excess = if r2 == 0.0 {
        0.0
    } else {
        quad_over_box(&move |u: f64, v: f64| (phi(u, v) - lambda).max(0.0), r2.sqrt(), 1e-9)
    };
    TfIntegral {
        parameter: lambda,
        value: params.dof() * (whole - excess),
        method: Method::Quadrature2d,
        ellipse_r2: r2,
    }
}

/// Solve `distortion_integral(lambda) = d_target` for lambda on `(0, peak]`;
/// `d_target` equal to the source energy maps to `lambda = Phi(0,0)` exactly.
pub fn solve_lambda(params: &FilterParams, sigma2: f64, d_target: f64) -> Result<f64> {
    if sigma2 <= 0.0 || sigma2.is_nan() {
        return Err(Error::domain(format!("source PSD must be positive, got {sigma2}")));
    }
    let peak = wvs_peak(params, sigma2);
    let energy = PI * params.dof() * peak;
    if d_target <= 0.0 || d_target.is_nan() {
        return Err(Error::domain(format!("distortion must be positive, got {d_target}")));
    }
    if d_target > energy {
        return Err(Error::domain(format!(
            "distortion exceeds source energy: D = {d_target} > E = {energy}"
        )));
    }
    if d_target >= energy * (1.0 - THRESHOLD_SLACK) {
        return Ok(peak);
    }
    bisect_increasing(
        |lambda| distortion_integral(params, sigma2, lambda).value,
        0.0,
        peak,
        d_target,
        1e-12,
    )
}

// ---------------------------------------------------------------------------
// Gallager LTI baseline
// ---------------------------------------------------------------------------

/// Capacity (bits/second) and average power (watts) of the LTI Gaussian
/// filter channel at water level `nu`, by adaptive quadrature over the
/// active band `|w| <= beta * sqrt(ln(2 pi nu / theta^2))`.
pub fn gallager_lti(beta: f64, theta2: f64, nu: f64) -> (f64, f64) {
    let c1 = theta2 / (2.0 * PI);
    if nu <= c1 * (1.0 + THRESHOLD_SLACK) {
        return (0.0, 0.0);
    }
    let band = beta * (nu / c1).ln().sqrt();
    let cap_integrand = |w: f64| {
        let n1 = n1_profile(beta, theta2, w);
        0.5 * (1.0 + (nu - n1).max(0.0) / n1).ln() / std::f64::consts::LN_2
    };
    let pow_integrand = |w: f64| (nu - n1_profile(beta, theta2, w)).max(0.0);
    let tol = 1e-13 * nu * band;
    let capacity = adaptive_1d(&cap_integrand, -band, band, tol) / (2.0 * PI);
    let power = adaptive_1d(&pow_integrand, -band, band, tol);
    (capacity, power)
}

// ---------------------------------------------------------------------------
// Evaluable surfaces (for grid export)
// ---------------------------------------------------------------------------

/// Which time-frequency surface to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SurfaceKind {
    WeylSymbol,
    NoiseProfile,
    Wvs,
}

/// An evaluable time-frequency density; radial in scaled coordinates.
///
/// `scale` is theta^2 for the noise profile, sigma^2 for the WVS, and unused
/// by the Weyl symbol.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TfSurface {
    pub kind: SurfaceKind,
    pub params: FilterParams,
    pub scale: f64,
}

impl TfSurface {
    pub fn new(kind: SurfaceKind, params: FilterParams, scale: f64) -> Result<Self> {
        if scale <= 0.0 || !scale.is_finite() {
            return Err(Error::domain(format!("surface scale must be positive, got {scale}")));
        }
        Ok(TfSurface { kind, params, scale })
    }

    pub fn eval(&self, t: f64, omega: f64) -> f64 {
        match self.kind {
            SurfaceKind::WeylSymbol => self.params.weyl_symbol(t, omega),
            SurfaceKind::NoiseProfile => noise_profile(&self.params, self.scale, t, omega),
            SurfaceKind::Wvs => wvs(&self.params, self.scale, t, omega),
        }
    }
}

/// Adaptive quadrature over the square `[-reach, reach]^2` in scaled
/// coordinates, with the tolerance anchored to a coarse whole-box estimate.
///
/// All integrands here are even in each scaled coordinate, so one quadrant
/// is integrated and scaled by 4.
fn quad_over_box<F: Fn(f64, f64) -> f64>(f: &F, reach: f64, rel_tol: f64) -> f64 {
    let rough = adaptive_2d(f, 0.0, reach, 0.0, reach, f64::INFINITY).abs();
    let tol = 0.25 * rel_tol * rough.max(f64::MIN_POSITIVE);
    4.0 * adaptive_2d(f, 0.0, reach, 0.0, reach, tol)
}
