//! Seeded Monte Carlo validation of the channel discretization and of the
//! Karhunen-Loève source model.
//!
//! Continuous white noise with two-sided PSD `theta^2` is realized as the
//! standard grid surrogate: iid samples of variance `theta^2 / spacing`, so
//! that matched-filter projections onto the orthonormal basis have the
//! limiting covariance `theta^2 * I` up to the Gram-matrix quadrature error.
//!
//! Reproducibility: trial `i` draws from a ChaCha12 generator keyed by the
//! config seed on stream `i + 1`; within a trial, draws are ordered by grid
//! point (noise surrogate) or by mode index (KL coefficients). Accumulation
//! order is fixed, so identical configs give bit-identical results. The
//! noise PSD enters moments as an exact final scaling, never inside the
//! draws.

use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::hermite::HermiteBasis;
use crate::params::FilterParams;
use crate::spectrum::kahan_sum;

/// Configuration for one simulation run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimConfig {
    pub params: FilterParams,
    /// `theta^2` (channel noise) or `sigma^2` (source), in energy units.
    pub noise_psd: f64,
    pub n_trials: usize,
    pub seed: u64,
    pub grid: Grid,
    /// Highest Hermite mode simulated.
    pub max_mode: usize,
}

impl SimConfig {
    /// Config with the default grid: half-width
    /// `8 gamma sqrt(2 max_mode + 1)`, spacing `gamma/8`.
    pub fn new(
        params: FilterParams,
        noise_psd: f64,
        n_trials: usize,
        seed: u64,
        max_mode: usize,
    ) -> Result<Self> {
        let gamma = params.gamma();
        let grid = Grid::new(
            8.0 * gamma * (2.0 * max_mode as f64 + 1.0).sqrt(),
            gamma / 8.0,
        )?;
        let cfg = SimConfig { params, noise_psd, n_trials, seed, grid, max_mode };
        cfg.validate()?;
        Ok(cfg)
    }

    /// Check the grid resolves and contains the highest simulated mode.
    pub fn validate(&self) -> Result<()> {
        if self.noise_psd < 0.0 || !self.noise_psd.is_finite() {
            return Err(Error::usage(format!(
                "noise PSD must be nonnegative, got {}",
                self.noise_psd
            )));
        }
        if self.n_trials == 0 {
            return Err(Error::usage("n_trials must be positive".to_string()));
        }
        let gamma = self.params.gamma();
        if self.grid.spacing() > gamma / 8.0 {
            return Err(Error::usage(format!(
                "grid spacing {} exceeds gamma/8 = {}",
                self.grid.spacing(),
                gamma / 8.0
            )));
        }
        let needed = 8.0 * gamma * (2.0 * self.max_mode as f64 + 1.0).sqrt();
        if self.grid.half_width() < needed * (1.0 - 1e-12) {
            return Err(Error::usage(format!(
                "grid half-width {} does not cover mode {}: need {needed}",
                self.grid.half_width(),
                self.max_mode
            )));
        }
        Ok(())
    }
}

/// Empirical first and second moments of the per-mode observations.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EmpiricalMoments {
    pub mean: Vec<f64>,
    /// Sample covariance, symmetric, `(max_mode+1)^2` entries.
    pub covariance: Vec<Vec<f64>>,
    /// Standard error estimate per covariance entry (Gaussian theory).
    pub stderr: Vec<Vec<f64>>,
    pub n_trials: usize,
}

/// Matched-filter detection noise: project grid white noise onto the basis
/// and report the moments of `n_k = <n, D_gamma H_k>`.
///
/// Expected: `Var(n_k) = theta^2`, zero cross-covariance.
pub fn simulate_matched_filter_noise(cfg: &SimConfig) -> Result<EmpiricalMoments> {
    let unit = unit_projection_moments(cfg)?;
    Ok(unit.scaled(cfg.noise_psd, |_| 1.0, cfg.n_trials))
}

/// Effective per-subchannel noise after the inverse-gain estimate map
/// `z_k = rho^(-k-1/2) n_k`.
///
/// Expected: `Var(z_k) = theta^2 rho^(-2k-1) = theta^2 / lambda_k`,
/// independent across modes.
pub fn simulate_effective_noise(cfg: &SimConfig) -> Result<EmpiricalMoments> {
    let unit = unit_projection_moments(cfg)?;
    let delta = cfg.params.delta();
    Ok(unit.scaled(cfg.noise_psd, |k| ((k as f64 + 0.5) * delta).exp(), cfg.n_trials))
}

/// Unit-PSD projection moments: raw sums of `u_k = sqrt(dt) sum_i z_i psi_k(t_i)`.
struct UnitMoments {
    mean_sum: Vec<f64>,
    cross_sum: Vec<Vec<f64>>,
}

impl UnitMoments {
    /// Finalize into [`EmpiricalMoments`], scaling mode `j` by
    /// `sqrt(psd) * gain(j)`; the PSD multiplies covariance entries exactly.
    fn scaled(
        &self,
        psd: f64,
        gain: impl Fn(usize) -> f64,
        n_trials: usize,
    ) -> EmpiricalMoments {
        let modes = self.mean_sum.len();
        let n = n_trials as f64;
        let denom = (n_trials - 1).max(1) as f64;
        let mean: Vec<f64> = self
            .mean_sum
            .iter()
            .enumerate()
            .map(|(j, sum)| psd.sqrt() * gain(j) * sum / n)
            .collect();
        // cross_sum holds the upper triangle; the formula is symmetric in
        // (j, k), so both orientations get bit-identical entries
        let entry = |j: usize, k: usize| {
            let raw = (self.cross_sum[j.min(k)][j.max(k)]
                - self.mean_sum[j] * self.mean_sum[k] / n)
                / denom;
            psd * (gain(j) * gain(k) * raw)
        };
        let covariance: Vec<Vec<f64>> =
            (0..modes).map(|j| (0..modes).map(|k| entry(j, k)).collect()).collect();
        let stderr: Vec<Vec<f64>> = (0..modes)
            .map(|j| {
                (0..modes)
                    .map(|k| {
                        if j == k {
                            covariance[j][j] * (2.0 / denom).sqrt()
                        } else {
                            (covariance[j][j] * covariance[k][k] / denom).sqrt()
                        }
                    })
                    .collect()
            })
            .collect();
        EmpiricalMoments { mean, covariance, stderr, n_trials }
    }
}

fn unit_projection_moments(cfg: &SimConfig) -> Result<UnitMoments> {
    cfg.validate()?;
    let modes = cfg.max_mode + 1;
    let mode_rows = basis_rows(cfg)?;
    let sqrt_dt = cfg.grid.spacing().sqrt();
    let n_points = cfg.grid.len();

    let mut mean_sum = vec![0.0; modes];
    let mut cross_sum = vec![vec![0.0; modes]; modes];
    let mut z = vec![0.0; n_points];
    let mut u = vec![0.0; modes];
    for trial in 0..cfg.n_trials {
        let mut rng = trial_rng(cfg.seed, trial);
        for zi in z.iter_mut() {
            *zi = StandardNormal.sample(&mut rng);
        }
        for (k, row) in mode_rows.iter().enumerate() {
            u[k] = sqrt_dt * dot(row, &z);
        }
        for j in 0..modes {
            mean_sum[j] += u[j];
            for k in j..modes {
                cross_sum[j][k] += u[j] * u[k];
            }
        }
    }
    Ok(UnitMoments { mean_sum, cross_sum })
}

/// Sampled KL-source realizations plus their mean quadrature energy.
#[derive(Debug, Clone, PartialEq)]
pub struct KlSourceSim {
    pub realizations: Vec<Vec<f64>>,
    pub empirical_energy: f64,
}

/// Synthesize the source `X(t) = sum_k X_k (D_gamma H_k)(t)` with
/// independent `X_k ~ N(0, sigma^2 lambda_k)`, `k <= max_mode`.
///
/// The empirical energy is the trial average of the trapezoid integral of
/// `X^2`; it targets the truncated energy `sigma^2 sum_{k<=max_mode} lambda_k`.
pub fn simulate_kl_source(cfg: &SimConfig) -> Result<KlSourceSim> {
    cfg.validate()?;
    let modes = cfg.max_mode + 1;
    let mode_rows = basis_rows(cfg)?;
    let amplitudes: Vec<f64> = (0..modes)
        .map(|k| (cfg.noise_psd * cfg.params.eigenvalue(k)).sqrt())
        .collect();

    let mut realizations = Vec::with_capacity(cfg.n_trials);
    let mut energy_sum = 0.0;
    let mut coeffs = vec![0.0; modes];
    for trial in 0..cfg.n_trials {
        let mut rng = trial_rng(cfg.seed, trial);
        for (k, c) in coeffs.iter_mut().enumerate() {
            let z: f64 = StandardNormal.sample(&mut rng);
            *c = amplitudes[k] * z;
        }
        let mut x = vec![0.0; cfg.grid.len()];
        for (k, row) in mode_rows.iter().enumerate() {
            let c = coeffs[k];
            for (xi, &psi) in x.iter_mut().zip(row) {
                *xi += c * psi;
            }
        }
        let sq: Vec<f64> = x.iter().map(|v| v * v).collect();
        energy_sum += cfg.grid.trapezoid(&sq);
        realizations.push(x);
    }
    Ok(KlSourceSim {
        realizations,
        empirical_energy: energy_sum / cfg.n_trials as f64,
    })
}

/// Autocorrelation `r(t1, t2) = sigma^2 sum_k lambda_k psi_k(t1) psi_k(t2)`
/// over modes `k <= max_mode`.
///
/// Requires the eigenvalue tail beyond `max_mode` to sit below `1e-12` of
/// `lambda_0`; the sum then matches the closed-form kernel of the filter at
/// `2 delta` to the same level.
pub fn autocorrelation(
    params: &FilterParams,
    sigma2: f64,
    t1: f64,
    t2: f64,
    max_mode: usize,
) -> Result<f64> {
    check_mode_tail(params, max_mode)?;
    let basis = HermiteBasis::new(params.gamma(), max_mode)?;
    let left = basis.eval_all(t1);
    let right = basis.eval_all(t2);
    Ok(sigma2
        * kahan_sum(
            (0..=max_mode).map(|k| params.eigenvalue(k) * left[k] * right[k]),
        ))
}

/// Empirical Wigner-Ville spectrum: numerical Fourier transform over the lag
/// variable of `r(t + tau/2, t - tau/2)`.
///
/// Returns the cosine part; the sine part (zero in exact arithmetic since
/// the autocorrelation is symmetric) is available from
/// [`estimate_wvs_parts`] as a residual check.
pub fn estimate_wvs(
    params: &FilterParams,
    sigma2: f64,
    t: f64,
    omega: f64,
    max_mode: usize,
) -> Result<f64> {
    estimate_wvs_parts(params, sigma2, t, omega, max_mode).map(|(cos, _)| cos)
}

/// `(cosine part, sine residual)` of the lag transform.
pub fn estimate_wvs_parts(
    params: &FilterParams,
    sigma2: f64,
    t: f64,
    omega: f64,
    max_mode: usize,
) -> Result<(f64, f64)> {
    check_mode_tail(params, max_mode)?;
    let gamma = params.gamma();
    let mode_reach = gamma * ((2.0 * max_mode as f64 + 1.0).sqrt() + 8.0);
    let half_lag = 2.0 * (mode_reach + t.abs());
    let osc = (omega.abs() + 1.0 / gamma).max(1e-12);
    let spacing = (gamma / (4.0 * (2.0 * max_mode as f64 + 1.0).sqrt()))
        .min(std::f64::consts::PI / (8.0 * osc));
    if half_lag / spacing > 2e6 {
        return Err(Error::accuracy(format!(
            "lag grid needs {} points; evaluation point too far out",
            (2.0 * half_lag / spacing) as u64
        )));
    }
    let lag_grid = Grid::new(half_lag, spacing)?;

    let basis = HermiteBasis::new(gamma, max_mode)?;
    let mut left = vec![0.0; max_mode + 1];
    let mut right = vec![0.0; max_mode + 1];
    let lam: Vec<f64> = (0..=max_mode).map(|k| params.eigenvalue(k)).collect();
    let r_at = |tau: f64, l: &mut [f64], r: &mut [f64]| {
        basis.eval_all_into(t + 0.5 * tau, l);
        basis.eval_all_into(t - 0.5 * tau, r);
        sigma2 * kahan_sum((0..=max_mode).map(|k| lam[k] * l[k] * r[k]))
    };

    // the correlation must have decayed at the lag boundary
    let scale = r_at(0.0, &mut left, &mut right)
        .abs()
        .max(sigma2 * params.eigenvalue(0) / gamma);
    let edge = r_at(2.0 * lag_grid.half_width(), &mut left, &mut right).abs();
    if edge > 1e-10 * scale {
        return Err(Error::accuracy(format!(
            "insufficient lag-grid span: boundary correlation {edge} vs scale {scale}"
        )));
    }

    let mut cos_vals = vec![0.0; lag_grid.len()];
    let mut sin_vals = vec![0.0; lag_grid.len()];
    for (i, tau) in lag_grid.points().enumerate() {
        let r = r_at(tau, &mut left, &mut right);
        let phase = omega * tau;
        cos_vals[i] = phase.cos() * r;
        sin_vals[i] = phase.sin() * r;
    }
    let norm = 1.0 / (2.0 * std::f64::consts::PI);
    Ok((
        norm * lag_grid.trapezoid(&cos_vals),
        norm * lag_grid.trapezoid(&sin_vals),
    ))
}

fn check_mode_tail(params: &FilterParams, max_mode: usize) -> Result<()> {
    let rho = params.rho();
    let tail = params.eigenvalue(max_mode + 1) / (1.0 - rho * rho);
    if tail > 1e-12 * params.eigenvalue(0) {
        return Err(Error::domain(format!(
            "max_mode {max_mode} leaves eigenvalue tail {tail:.3e}; increase it"
        )));
    }
    Ok(())
}

/// `mode_rows[k][i] = (D_gamma H_k)(t_i)` over the config grid.
fn basis_rows(cfg: &SimConfig) -> Result<Vec<Vec<f64>>> {
    let modes = cfg.max_mode + 1;
    let basis = HermiteBasis::new(cfg.params.gamma(), cfg.max_mode)?;
    let mut rows = vec![vec![0.0; cfg.grid.len()]; modes];
    let mut buf = vec![0.0; modes];
    for (i, point) in cfg.grid.points().enumerate() {
        basis.eval_all_into(point, &mut buf);
        for (k, row) in rows.iter_mut().enumerate() {
            row[i] = buf[k];
        }
    }
    Ok(rows)
}

/// Generator for one trial: config seed keys the cipher, stream `trial + 1`
/// splits trials.
fn trial_rng(seed: u64, trial: usize) -> ChaCha12Rng {
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    rng.set_stream(trial as u64 + 1);
    rng
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel_err(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
    }

    fn ab2() -> FilterParams {
        FilterParams::derive(1.0, 2.0).unwrap()
    }

    fn cfg(noise_psd: f64, n_trials: usize, seed: u64, max_mode: usize) -> SimConfig {
        SimConfig::new(ab2(), noise_psd, n_trials, seed, max_mode).unwrap()
    }

    #[test]
    fn matched_filter_variances_near_psd() {
        let moments = simulate_matched_filter_noise(&cfg(1.0, 4000, 11, 5)).unwrap();
        for k in 0..=5 {
            let var = moments.covariance[k][k];
            let se = moments.stderr[k][k];
            assert!(
                (var - 1.0).abs() < 3.0 * se,
                "mode {k}: var {var}, stderr {se}"
            );
        }
        for j in 0..=5 {
            for k in (j + 1)..=5 {
                assert!(
                    moments.covariance[j][k].abs() < 3.0 * moments.stderr[j][k],
                    "off-diagonal ({j},{k})"
                );
            }
        }
    }

    #[test]
    fn zero_psd_gives_zero_moments() {
        let moments = simulate_matched_filter_noise(&cfg(0.0, 50, 3, 3)).unwrap();
        assert!(moments.mean.iter().all(|&m| m == 0.0));
        assert!(moments.covariance.iter().flatten().all(|&c| c == 0.0));
    }

    #[test]
    fn doubling_psd_doubles_covariance_exactly() {
        let base = simulate_matched_filter_noise(&cfg(0.7, 300, 5, 4)).unwrap();
        let doubled = simulate_matched_filter_noise(&cfg(1.4, 300, 5, 4)).unwrap();
        for (row_b, row_d) in base.covariance.iter().zip(&doubled.covariance) {
            for (b, d) in row_b.iter().zip(row_d) {
                assert_eq!(2.0 * b, *d);
            }
        }
    }

    #[test]
    fn effective_noise_variances() {
        // Var(z_k) = theta^2 / lambda_k: sqrt(3) and 3 sqrt(3) at ab=2
        let moments = simulate_effective_noise(&cfg(1.0, 4000, 17, 3)).unwrap();
        let expected = [
            1.732_050_807_568_877_3,
            5.196_152_422_706_632,
            15.588_457_268_119_896,
            46.765_371_804_359_69,
        ];
        for (k, &want) in expected.iter().enumerate() {
            let var = moments.covariance[k][k];
            let se = moments.stderr[k][k];
            assert!((var - want).abs() < 3.0 * se, "mode {k}: {var} vs {want}");
        }
    }

    #[test]
    fn effective_variance_ratio_is_geometric() {
        let p = ab2();
        let moments = simulate_effective_noise(&cfg(1.0, 3000, 23, 4)).unwrap();
        let rho_m2 = (2.0 * p.delta()).exp();
        for k in 0..4 {
            let ratio = moments.covariance[k + 1][k + 1] / moments.covariance[k][k];
            // propagated 3-sigma bound on the ratio of two sample variances
            let band = 3.0 * ratio * (2.0 * 2.0 / 2999.0f64).sqrt();
            assert!(
                (ratio - rho_m2).abs() < band,
                "k={k}: ratio {ratio} vs {rho_m2}"
            );
        }
    }

    #[test]
    fn variance_law_slope() {
        // log Var(z_k) is affine in k with slope -2 ln rho = 2 delta
        let p = ab2();
        let moments = simulate_effective_noise(&cfg(1.0, 5000, 29, 5)).unwrap();
        let logs: Vec<f64> = (0..=5).map(|k| moments.covariance[k][k].ln()).collect();
        let m = logs.len() as f64;
        let k_mean = (m - 1.0) / 2.0;
        let v_mean = logs.iter().sum::<f64>() / m;
        let slope: f64 = logs
            .iter()
            .enumerate()
            .map(|(k, v)| (k as f64 - k_mean) * (v - v_mean))
            .sum::<f64>()
            / logs
                .iter()
                .enumerate()
                .map(|(k, _)| (k as f64 - k_mean).powi(2))
                .sum::<f64>();
        // each log-variance has sd ~ sqrt(2/(n-1)); slope of an LS fit over m
        // equally spaced points scales that by sqrt(12/(m (m^2-1)))
        let se = (2.0 / 4999.0f64).sqrt() * (12.0 / (m * (m * m - 1.0))).sqrt();
        assert!(
            (slope - 2.0 * p.delta()).abs() < 3.0 * se,
            "slope {slope} vs {}",
            2.0 * p.delta()
        );
    }

    #[test]
    fn seeded_runs_are_bit_identical() {
        let a = simulate_matched_filter_noise(&cfg(0.9, 200, 77, 4)).unwrap();
        let b = simulate_matched_filter_noise(&cfg(0.9, 200, 77, 4)).unwrap();
        assert_eq!(a, b);
        let c = simulate_matched_filter_noise(&cfg(0.9, 200, 78, 4)).unwrap();
        assert_ne!(a.covariance, c.covariance);
    }

    #[test]
    fn whiteness_across_seeds() {
        // off-diagonals within 3 stderr of zero in at least 99% of entries
        let mut within = 0usize;
        let mut total = 0usize;
        for seed in 0..20u64 {
            let m = simulate_matched_filter_noise(&cfg(1.0, 1500, seed, 4)).unwrap();
            for j in 0..=4 {
                for k in (j + 1)..=4 {
                    total += 1;
                    if m.covariance[j][k].abs() <= 3.0 * m.stderr[j][k] {
                        within += 1;
                    }
                }
            }
        }
        assert!(
            within as f64 >= 0.99 * total as f64,
            "{within}/{total} entries within 3 stderr"
        );
    }

    #[test]
    fn kl_energy_matches_truncated_trace() {
        let p = ab2();
        let c = cfg(1.0, 4000, 41, 8);
        let sim = simulate_kl_source(&c).unwrap();
        let truncated: f64 = (0..=8).map(|k| p.eigenvalue(k)).sum();
        // 3-sigma band: Var(energy) = 2 sum lambda_k^2 per trial
        let var: f64 = 2.0 * (0..=8).map(|k| p.eigenvalue(k).powi(2)).sum::<f64>();
        let band = 3.0 * (var / 4000.0).sqrt();
        assert!(
            (sim.empirical_energy - truncated).abs() < band,
            "energy {} vs {truncated} (band {band})",
            sim.empirical_energy
        );
        // and the truncated trace is within the geometric tail of E
        let energy = crate::waterfill::source_energy(&p, 1.0);
        assert!(energy - truncated > 0.0 && energy - truncated < 1e-3);
    }

    #[test]
    fn zero_source_psd_gives_zero_realizations() {
        let sim = simulate_kl_source(&cfg(0.0, 10, 1, 4)).unwrap();
        assert!(sim.realizations.iter().flatten().all(|&x| x == 0.0));
        assert_eq!(sim.empirical_energy, 0.0);
    }

    #[test]
    fn synthesis_energy_obeys_parseval() {
        // quadrature energy of each realization = sum of squared coefficients
        let c = cfg(1.3, 20, 9, 6);
        let sim = simulate_kl_source(&c).unwrap();
        let p = ab2();
        let amplitudes: Vec<f64> =
            (0..=6).map(|k| (1.3 * p.eigenvalue(k)).sqrt()).collect();
        for (trial, x) in sim.realizations.iter().enumerate() {
            let mut rng = trial_rng(9, trial);
            let coeff_sq: f64 = amplitudes
                .iter()
                .map(|a| {
                    let z: f64 = StandardNormal.sample(&mut rng);
                    (a * z).powi(2)
                })
                .sum();
            let sq: Vec<f64> = x.iter().map(|v| v * v).collect();
            let quad_energy = c.grid.trapezoid(&sq);
            assert!(rel_err(quad_energy, coeff_sq) < 1e-8, "trial {trial}");
        }
    }

    #[test]
    fn autocorrelation_symmetry_and_kernel_oracle() {
        let p = ab2();
        let r12 = autocorrelation(&p, 1.0, 0.4, -0.7, 50).unwrap();
        let r21 = autocorrelation(&p, 1.0, -0.7, 0.4, 50).unwrap();
        assert!((r12 - r21).abs() < 1e-12 * r12.abs().max(1.0));
        // closed form: r(t1,t2) = sigma^2 * kernel at doubled delta
        let doubled = p.scale_delta(2.0).unwrap();
        for &(t1, t2) in &[(0.0, 0.0), (0.5, 0.2), (-1.0, 1.2)] {
            let direct = autocorrelation(&p, 2.0, t1, t2, 60).unwrap();
            let via_kernel = 2.0 * crate::filter::kernel(&doubled, t1, t2);
            assert!(rel_err(direct, via_kernel) < 1e-10, "({t1},{t2})");
        }
        assert!(autocorrelation(&p, 1.0, 0.0, 0.0, 3).is_err());
    }

    #[test]
    fn autocorrelation_diagonal_integrates_to_energy() {
        let p = ab2();
        let grid = Grid::new(10.0, 0.02).unwrap();
        let diag: Vec<f64> = grid
            .points()
            .map(|t| autocorrelation(&p, 1.0, t, t, 60).unwrap())
            .collect();
        let total = grid.trapezoid(&diag);
        let energy = crate::waterfill::source_energy(&p, 1.0);
        assert!(rel_err(total, energy) < 1e-9, "{total} vs {energy}");
    }

    #[test]
    fn wvs_estimate_matches_closed_form() {
        let p = ab2();
        let sigma2 = 1.0;
        let (value, residual) = estimate_wvs_parts(&p, sigma2, 0.0, 0.0, 40).unwrap();
        let closed = crate::tf_plane::wvs(&p, sigma2, 0.0, 0.0);
        assert!((value - closed).abs() < 1e-6, "{value} vs {closed}");
        assert!(residual.abs() < 1e-10);
        for &(t, w) in &[(0.5, 1.0), (-0.8, -2.0), (1.1, 0.3)] {
            let est = estimate_wvs(&p, sigma2, t, w, 40).unwrap();
            let want = crate::tf_plane::wvs(&p, sigma2, t, w);
            assert!((est - want).abs() < 1e-6, "({t},{w}): {est} vs {want}");
        }
    }

    #[test]
    fn wvs_estimate_integrates_to_energy() {
        // Riemann sum of the estimated surface over a box covering the
        // concentration ellipse (alpha = 1, beta = 2: 4 time units by 8
        // frequency units leaves only an e^-16 Gaussian tail outside)
        let p = ab2();
        let step = 0.25;
        let (reach_t, reach_w) = (4.0f64, 8.0f64);
        let nt = (2.0 * reach_t / step).round() as usize + 1;
        let nw = (2.0 * reach_w / step).round() as usize + 1;
        let mut total = 0.0;
        for i in 0..nt {
            let t = -reach_t + step * i as f64;
            for j in 0..nw {
                let w = -reach_w + step * j as f64;
                total += estimate_wvs(&p, 1.0, t, w, 30).unwrap();
            }
        }
        total *= step * step;
        let energy = crate::waterfill::source_energy(&p, 1.0);
        assert!(rel_err(total, energy) < 1e-4, "{total} vs {energy}");
    }

    #[test]
    fn config_validation() {
        let p = ab2();
        let gamma = p.gamma();
        // spacing too coarse
        let bad = SimConfig {
            params: p,
            noise_psd: 1.0,
            n_trials: 10,
            seed: 0,
            grid: Grid::new(30.0, gamma).unwrap(),
            max_mode: 3,
        };
        assert!(matches!(bad.validate(), Err(Error::Usage(_))));
        // span too short for the mode count
        let bad = SimConfig {
            params: p,
            noise_psd: 1.0,
            n_trials: 10,
            seed: 0,
            grid: Grid::new(2.0, gamma / 8.0).unwrap(),
            max_mode: 30,
        };
        assert!(matches!(bad.validate(), Err(Error::Usage(_))));
        assert!(SimConfig::new(p, 1.0, 0, 0, 3).is_err());
    }
}
