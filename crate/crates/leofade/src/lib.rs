//! State-coupled fading and outage model for LEO satellite-to-ground optical
//! downlinks.
//!
//! The crate models a single optical downlink at a fixed elevation angle:
//!
//! * [`linkbudget`] — deterministic large-scale gain: optical system gain,
//!   slant-range free-space loss, and atmospheric extinction.
//! * [`turbulence`] — Hufnagel–Valley refractive-index profile split into
//!   free-atmosphere and boundary-layer components, the scintillation and
//!   angle-of-arrival kernels, and quadrature of the second-order statistics.
//! * [`fading`] — per-state fading marginals (unit-mean Gamma scintillation,
//!   power-law angular loss), the discrete atmospheric-state mixture, and a
//!   reproducible sampler.
//! * [`outage`] — closed-form per-state outage probability, an independent
//!   quadrature oracle for it, the state-mixture average, and the
//!   unconditional-independence baseline.
//! * [`montecarlo`] — end-to-end Monte Carlo estimation with binomial
//!   confidence intervals.
//! * [`experiments`] — configuration, threshold calibration, and the CSV
//!   experiment drivers behind the CLI.
//!
//! Supporting numerics live in [`quad`] (adaptive Gauss–Kronrod integration)
//! and [`specfun`] (incomplete gamma functions, including the extension to
//! negative shape arguments the closed form requires).
//!
//! Angles are radians and lengths are meters everywhere inside the library;
//! degrees appear only at the CLI/config boundary.

pub mod error;
pub mod experiments;
pub mod fading;
pub mod linkbudget;
pub mod montecarlo;
pub mod outage;
pub mod quad;
pub mod specfun;
pub mod turbulence;

pub use error::{Error, Result};
