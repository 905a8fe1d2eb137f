//! Dilated orthonormal Hermite functions, the eigenbasis of the filter.
//!
//! Convention: `psi_0(x) = pi^(-1/4) exp(-x^2/2)` and the L2-normalized
//! three-term recurrence
//! `psi_{k+1}(x) = x sqrt(2/(k+1)) psi_k(x) - sqrt(k/(k+1)) psi_{k-1}(x)`.
//! The dilated family is `(D_gamma H_k)(t) = gamma^(-1/2) psi_k(t/gamma)`.
//!
//! Far outside the classically allowed region the recurrence mantissas span
//! many hundreds of binary orders of magnitude, so evaluation carries an
//! explicit power-of-two exponent alongside the mantissa pair. Values whose
//! true magnitude is below the subnormal range come back as an honest zero.

use crate::error::{Error, Result};

/// `pi^(-1/4)`, the peak of the zeroth orthonormal Hermite function.
const PI_POW_NEG_QUARTER: f64 = 0.751_125_544_464_942_5;

/// Rescale threshold for the tracked-mantissa recurrence (2^500).
const RESCALE_LIMIT: f64 = 3.273_390_607_896_142e150;
const RESCALE_SHIFT: i64 = 500;

/// Dilated Hermite basis `{(D_gamma H_k)(t); k = 0..=max_order}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HermiteBasis {
    gamma: f64,
    max_order: usize,
}

impl HermiteBasis {
    pub fn new(gamma: f64, max_order: usize) -> Result<Self> {
        if gamma <= 0.0 || !gamma.is_finite() {
            return Err(Error::domain(format!("gamma must be positive, got {gamma}")));
        }
        Ok(HermiteBasis { gamma, max_order })
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn max_order(&self) -> usize {
        self.max_order
    }

    /// Evaluate `(D_gamma H_k)(t)`.
    pub fn eval(&self, k: usize, t: f64) -> Result<f64> {
        if k > self.max_order {
            return Err(Error::usage(format!(
                "order {k} exceeds basis max_order {}",
                self.max_order
            )));
        }
        let scale = 1.0 / self.gamma.sqrt();
        Ok(scale * hermite_function(k, t / self.gamma))
    }

    /// Evaluate all orders `0..=max_order` at `t` in one recurrence pass.
    pub fn eval_all(&self, t: f64) -> Vec<f64> {
        let mut out = vec![0.0; self.max_order + 1];
        self.eval_all_into(t, &mut out);
        out
    }

    /// As [`eval_all`](Self::eval_all), writing into a caller-owned buffer of
    /// length `max_order + 1`.
    pub fn eval_all_into(&self, t: f64, out: &mut [f64]) {
        assert_eq!(out.len(), self.max_order + 1, "output buffer length mismatch");
        let scale = 1.0 / self.gamma.sqrt();
        hermite_sequence(self.max_order, t / self.gamma, out);
        for v in out.iter_mut() {
            *v *= scale;
        }
    }
}

/// Orthonormal Hermite function `psi_k(x)`.
pub fn hermite_function(k: usize, x: f64) -> f64 {
    let mut state = RecurrenceState::start(x);
    for j in 0..k {
        state.advance(j, x);
    }
    state.current()
}

/// Fill `out[k] = psi_k(x)` for `k = 0..out.len()-1` (`max_order = out.len()-1`).
fn hermite_sequence(max_order: usize, x: f64, out: &mut [f64]) {
    let mut state = RecurrenceState::start(x);
    out[0] = state.current();
    for k in 0..max_order {
        state.advance(k, x);
        out[k + 1] = state.current();
    }
}

/// Recurrence pair `(psi_{k-1}, psi_k)` as mantissas sharing one binary
/// exponent.
struct RecurrenceState {
    prev: f64,
    cur: f64,
    exp2: i64,
}

impl RecurrenceState {
    fn start(x: f64) -> Self {
        // psi_0 = pi^(-1/4) * exp(-x^2/2); keep the Gaussian in the exponent
        // so it never underflows before the polynomial growth can offset it.
        let e_real = -0.5 * x * x * std::f64::consts::LOG2_E;
        let e_floor = e_real.floor();
        RecurrenceState {
            prev: 0.0,
            cur: PI_POW_NEG_QUARTER * (e_real - e_floor).exp2(),
            exp2: e_floor as i64,
        }
    }

    fn advance(&mut self, k: usize, x: f64) {
        let kf = k as f64;
        let next = x * (2.0 / (kf + 1.0)).sqrt() * self.cur - (kf / (kf + 1.0)).sqrt() * self.prev;
        self.prev = self.cur;
        self.cur = next;
        let mag = self.cur.abs().max(self.prev.abs());
        if mag > RESCALE_LIMIT {
            self.prev /= RESCALE_LIMIT;
            self.cur /= RESCALE_LIMIT;
            self.exp2 += RESCALE_SHIFT;
        } else if mag > 0.0 && mag < 1.0 / RESCALE_LIMIT {
            self.prev *= RESCALE_LIMIT;
            self.cur *= RESCALE_LIMIT;
            self.exp2 -= RESCALE_SHIFT;
        }
    }

    fn current(&self) -> f64 {
        ldexp(self.cur, self.exp2)
    }
}

/// `m * 2^e` with clamping: exponents far below the subnormal range give 0.
fn ldexp(m: f64, e: i64) -> f64 {
    if m == 0.0 || e == 0 {
        return m;
    }
    if e < -2200 {
        return if m.is_sign_negative() { -0.0 } else { 0.0 };
    }
    if e > 2200 {
        return f64::INFINITY * m.signum();
    }
    // Apply in half-steps so each powi stays within the normal f64 range.
    let half = (e / 2) as i32;
    let rest = (e - half as i64) as i32;
    m * 2f64.powi(half) * 2f64.powi(rest)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::Grid;

    fn rel_err(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
    }

    #[test]
    fn zeroth_at_origin() {
        let basis = HermiteBasis::new(1.0, 4).unwrap();
        assert!(rel_err(basis.eval(0, 0.0).unwrap(), PI_POW_NEG_QUARTER) < 1e-15);
    }

    #[test]
    fn odd_orders_vanish_at_origin() {
        let basis = HermiteBasis::new(1.0, 9).unwrap();
        for k in (1..=9).step_by(2) {
            assert_eq!(basis.eval(k, 0.0).unwrap(), 0.0);
        }
    }

    #[test]
    fn dilation_rule() {
        // gamma = 2: (D_2 H_0)(0) = 2^(-1/2) * pi^(-1/4)
        let basis = HermiteBasis::new(2.0, 0).unwrap();
        assert!(rel_err(basis.eval(0, 0.0).unwrap(), 0.531_125_966_013_598_5) < 1e-15);
        // generic point: (D_g H_k)(t) = g^(-1/2) psi_k(t/g)
        let g = 0.37;
        let basis = HermiteBasis::new(g, 6).unwrap();
        let t = 0.81;
        let expect = hermite_function(5, t / g) / g.sqrt();
        assert!(rel_err(basis.eval(5, t).unwrap(), expect) < 1e-15);
    }

    #[test]
    fn order_beyond_basis_is_usage_error() {
        let basis = HermiteBasis::new(1.0, 3).unwrap();
        assert!(matches!(basis.eval(4, 0.0), Err(Error::Usage(_))));
    }

    #[test]
    fn eval_all_matches_eval() {
        let basis = HermiteBasis::new(0.7, 30).unwrap();
        for &t in &[-3.3, 0.0, 0.4, 11.0] {
            let all = basis.eval_all(t);
            for k in (0..=30).step_by(7) {
                assert_eq!(all[k], basis.eval(k, t).unwrap());
            }
        }
    }

    #[test]
    fn stable_far_outside_turning_point() {
        // |x| = 40, k up to 200: values must be finite; deep in the tunneling
        // region they are small but representable, not overflowed garbage.
        for k in [0, 1, 50, 120, 200] {
            let v = hermite_function(k, 40.0);
            assert!(v.is_finite(), "psi_{k}(40) not finite: {v}");
        }
        // spot check scale: psi_200(20.5) is just outside the turning point
        // sqrt(401) ~ 20.02 and must be well above the underflow floor.
        assert!(hermite_function(200, 20.5).abs() > 1e-30);
        // far tail decays monotonically with x
        let a = hermite_function(200, 30.0).abs();
        let b = hermite_function(200, 35.0).abs();
        assert!(a > b && b >= 0.0);
    }

    #[test]
    fn unit_norm_by_quadrature() {
        // trapezoid rule on a Gaussian-decaying integrand converges fast
        let grid = Grid::new(12.0, 1.0 / 64.0).unwrap();
        let sq_sum: f64 = grid.points().map(|t| hermite_function(0, t).powi(2)).sum();
        assert!(rel_err(sq_sum * grid.spacing(), 1.0) < 1e-12);
    }

    #[test]
    fn small_gram_is_identity() {
        let basis = HermiteBasis::new(0.9, 12).unwrap();
        let grid = Grid::new(8.0 * 0.9 * 5.0, 0.9 / 16.0).unwrap();
        let rows: Vec<Vec<f64>> = grid.points().map(|t| basis.eval_all(t)).collect();
        for j in 0..=12 {
            for k in j..=12 {
                let ip: f64 =
                    rows.iter().map(|r| r[j] * r[k]).sum::<f64>() * grid.spacing();
                let expect = if j == k { 1.0 } else { 0.0 };
                assert!(
                    (ip - expect).abs() < 1e-8,
                    "gram({j},{k}) = {ip}, expected {expect}"
                );
            }
        }
    }
}
