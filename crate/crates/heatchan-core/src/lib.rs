//! Numerical toolkit for the heat channel: a Gaussian linear time-varying
//! filter with additive white Gaussian noise, and the nonstationary Gaussian
//! source obtained by driving the same filter with white noise.
//!
//! The crate computes two quantities two independent ways each:
//!
//! * **Channel capacity** — exactly, by waterfilling on the noise variances of
//!   the discretized (Hermite-diagonalized) channel, and approximately, by a
//!   waterfilling integral over the time-frequency plane
//!   ([`waterfill::capacity_waterfill`] vs. [`tf_plane::capacity_integral`]).
//! * **Rate-distortion** — exactly, by reverse waterfilling on the
//!   Karhunen-Loève coefficient variances, and approximately, by a reverse
//!   waterfilling integral against the Wigner-Ville spectrum
//!   ([`waterfill::rd_reverse_waterfill`] vs. [`tf_plane::rate_integral`]).
//!
//! The bridge between the discrete and the integral forms is a Szegő-type
//! trace asymptotic for the filter's squared modulus; [`szego`] verifies it
//! numerically, and [`sim`] validates the channel discretization and the
//! source model by seeded Monte Carlo.
//!
//! All rates are in nats unless stated otherwise. Everything is plain `f64`;
//! all operations are pure functions of their inputs and safe to call
//! concurrently.

pub mod bisect;
pub mod error;
pub mod filter;
pub mod grid;
pub mod hermite;
pub mod params;
pub mod quad;
pub mod sim;
pub mod spectrum;
pub mod szego;
pub mod tf_plane;
pub mod waterfill;

pub use error::{Error, Result};
pub use filter::{apply_kernel, apply_spectral, kernel};
pub use grid::Grid;
pub use hermite::HermiteBasis;
pub use params::FilterParams;
pub use sim::{EmpiricalMoments, KlSourceSim, SimConfig};
pub use spectrum::SpectrumTruncation;
pub use szego::{SzegoReport, TestFunctionSpec};
pub use tf_plane::{SurfaceKind, TfIntegral, TfSurface};
pub use waterfill::WaterfillSolution;
