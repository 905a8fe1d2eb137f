//! Uniform, origin-symmetric sample grids.

use crate::error::{Error, Result};
use crate::params::FilterParams;

/// Uniform time grid, symmetric about zero and always containing `t = 0`.
///
/// Points are `t_i = (i - n_half) * spacing` for `i = 0..=2*n_half` with
/// `n_half = ceil(half_width / spacing)`, so the realized half-width is the
/// requested one rounded up to a whole number of steps.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    spacing: f64,
    n_half: usize,
}

impl Grid {
    pub fn new(half_width: f64, spacing: f64) -> Result<Self> {
        if spacing <= 0.0 || !spacing.is_finite() {
            return Err(Error::usage(format!("grid spacing must be positive, got {spacing}")));
        }
        if half_width < spacing || !half_width.is_finite() {
            return Err(Error::usage(format!(
                "grid half-width {half_width} must be at least one spacing {spacing}"
            )));
        }
        let n_half = (half_width / spacing).ceil() as usize;
        Ok(Grid { spacing, n_half })
    }

    /// Default grid for kernel-form filtering of signals spanned by Hermite
    /// orders up to `max_order`: half-width `max(8*alpha,
    /// 8*gamma*sqrt(2*max_order+1))`, spacing `min(1/(8*beta), gamma/8)`.
    pub fn for_filter(params: &FilterParams, max_order: usize) -> Self {
        let gamma = params.gamma();
        let reach = 8.0 * gamma * (2.0 * max_order as f64 + 1.0).sqrt();
        let half_width = (8.0 * params.alpha()).max(reach);
        let spacing = (1.0 / (8.0 * params.beta())).min(gamma / 8.0);
        Grid::new(half_width, spacing).expect("derived grid is valid")
    }

    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    pub fn half_width(&self) -> f64 {
        self.n_half as f64 * self.spacing
    }

    pub fn len(&self) -> usize {
        2 * self.n_half + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn point(&self, i: usize) -> f64 {
        (i as f64 - self.n_half as f64) * self.spacing
    }

    pub fn points(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.len()).map(move |i| self.point(i))
    }

    /// Trapezoid integral of sampled values over the grid.
    pub fn trapezoid(&self, values: &[f64]) -> f64 {
        assert_eq!(values.len(), self.len(), "sample count mismatch");
        let inner: f64 = values[1..values.len() - 1].iter().sum();
        (inner + 0.5 * (values[0] + values[values.len() - 1])) * self.spacing
    }
}
