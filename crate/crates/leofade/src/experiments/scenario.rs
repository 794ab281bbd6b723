//! Scenario evaluation: everything the experiment drivers share.
//!
//! A [`Scenario`] wraps a validated configuration and answers the questions
//! the drivers keep asking — the statistics matrix at an elevation, the
//! per-state fading parameters of a case, the baseline outage under the
//! configured independence mode, and the calibrated detection threshold.
//!
//! The statistics matrix is the expensive part (two adaptive profile
//! integrals per elevation), so evaluated matrices are memoized per
//! elevation; everything downstream of the matrix is closed-form.

use crate::error::{Error, Result};
use crate::fading::{fading_params, state_stats, FadingParams, StateModel};
use crate::linkbudget::{self, normalized_threshold};
use crate::outage::{outage_coupled, outage_independent_baseline, outage_mixture_baseline, OutageQuery};
use crate::turbulence::{stats_matrix, KernelContext, SecondOrderStats, StatsMatrix};
use std::cell::RefCell;
use std::collections::BTreeMap;

use super::config::{BaselineMode, ScenarioConfig};

/// Result of a threshold calibration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CalibrationResult {
    /// Normalized threshold ν* at the reference elevation.
    pub nu_ref: f64,
    /// Detection threshold in watts, P_th = ν* · P_t · h_c(ε_ref). This is
    /// the elevation-independent quantity: re-normalizing it at any other
    /// elevation gives the ν used there.
    pub p_th: f64,
    /// Baseline outage actually achieved at ν* (diagnostic).
    pub achieved: f64,
}

/// A configured scenario with memoized per-elevation statistics.
pub struct Scenario {
    /// The validated configuration this scenario evaluates.
    pub config: ScenarioConfig,
    // Matrices keyed by the elevation's bit pattern; elevations arrive from
    // a finite grid, so exact-bit keying is appropriate.
    matrices: RefCell<BTreeMap<u64, StatsMatrix>>,
}

impl Scenario {
    /// Wrap a validated configuration.
    pub fn new(config: ScenarioConfig) -> Self {
        Scenario {
            config,
            matrices: RefCell::new(BTreeMap::new()),
        }
    }

    /// The per-component statistics matrix at an elevation (memoized).
    pub fn stats_matrix_at(&self, elevation: f64) -> Result<StatsMatrix> {
        let key = elevation.to_bits();
        if let Some(m) = self.matrices.borrow().get(&key) {
            return Ok(*m);
        }
        let ctx = KernelContext::new(&self.config.link, elevation)?;
        let matrix = stats_matrix(&self.config.profile, &ctx, &self.config.quad)?;
        self.matrices.borrow_mut().insert(key, matrix);
        Ok(matrix)
    }

    /// Evaluate and memoize the statistics matrices of many elevations in
    /// parallel. The experiment drivers call this up front with their whole
    /// grid — the profile integrals are the only expensive part of a run
    /// and are independent across elevations.
    pub fn precompute_matrices(&self, elevations: &[f64]) -> Result<()> {
        use rayon::prelude::*;
        let missing: Vec<f64> = {
            let cache = self.matrices.borrow();
            let mut seen = std::collections::BTreeSet::new();
            elevations
                .iter()
                .copied()
                .filter(|e| !cache.contains_key(&e.to_bits()) && seen.insert(e.to_bits()))
                .collect()
        };
        let (link, profile, quad) = (&self.config.link, &self.config.profile, &self.config.quad);
        let computed = missing
            .par_iter()
            .map(|&e| {
                let ctx = KernelContext::new(link, e)?;
                Ok((e.to_bits(), stats_matrix(profile, &ctx, quad)?))
            })
            .collect::<Result<Vec<_>>>()?;
        self.matrices.borrow_mut().extend(computed);
        Ok(())
    }

    /// Unscaled (χ = (1,1)) statistics at an elevation: the baseline model.
    pub fn baseline_stats(&self, elevation: f64) -> Result<SecondOrderStats> {
        Ok(self.stats_matrix_at(elevation)?.apply([1.0, 1.0]))
    }

    /// Per-state fading parameters of a case at an elevation.
    pub fn case_params(
        &self,
        states: &StateModel,
        elevation: f64,
        eta_tt: f64,
    ) -> Result<Vec<FadingParams>> {
        let matrix = self.stats_matrix_at(elevation)?;
        states
            .scales
            .iter()
            .map(|&scale| fading_params(&state_stats(&matrix, scale), &self.config.link, eta_tt))
            .collect()
    }

    /// State-averaged second-order statistics of a case at an elevation,
    /// z̄ = Σ_s π_s · M(ε) · χ_s.
    pub fn case_average_stats(&self, states: &StateModel, elevation: f64) -> Result<SecondOrderStats> {
        let matrix = self.stats_matrix_at(elevation)?;
        let mut avg = SecondOrderStats::default();
        for (pi, &scale) in states.probs.iter().zip(&states.scales) {
            let z = state_stats(&matrix, scale);
            avg.sigma_a2 += pi * z.sigma_a2;
            avg.beta_rms2 += pi * z.beta_rms2;
        }
        Ok(avg)
    }

    /// Coupled mixture outage of a case at an elevation.
    pub fn coupled_outage(&self, states: &StateModel, elevation: f64, eta_tt: f64, nu: f64) -> Result<f64> {
        let params = self.case_params(states, elevation, eta_tt)?;
        outage_coupled(&OutageQuery {
            nu,
            params,
            probs: states.probs.clone(),
        })
    }

    /// Baseline outage at an elevation under the configured independence
    /// mode.
    pub fn baseline_outage(&self, elevation: f64, eta_tt: f64, nu: f64) -> Result<f64> {
        match self.config.calibration.baseline_mode {
            BaselineMode::SingleState => {
                let stats = self.baseline_stats(elevation)?;
                outage_independent_baseline(&stats, &self.config.link, eta_tt, nu)
            }
            BaselineMode::Mixture => {
                let states = self.config.case("nominal")?;
                let params = self.case_params(states, elevation, eta_tt)?;
                outage_mixture_baseline(&OutageQuery {
                    nu,
                    params,
                    probs: states.probs.clone(),
                })
            }
        }
    }

    /// Normalized threshold at an elevation for a fixed detector threshold.
    pub fn nu_at(&self, p_th: f64, elevation: f64) -> Result<f64> {
        normalized_threshold(&self.config.link, p_th, elevation)
    }

    /// Mean received power P_t · h_c at an elevation (watts); the channel
    /// gain already includes the extinction term.
    pub fn mean_power(&self, elevation: f64) -> Result<f64> {
        let cfg = &self.config.link;
        Ok(cfg.tx_power * linkbudget::large_scale_gain(cfg, elevation)?)
    }

    /// Calibrate the detection threshold: find ν* such that the baseline
    /// outage at the reference elevation equals the target, by bisection on
    /// ln ν to a relative outage error of 1e-12.
    ///
    /// The baseline outage is continuous and strictly increasing in ν, so a
    /// sign change brackets the root; failure to bracket within the sane
    /// range ν ∈ [1e-30, 1e6] means the target is unreachable for this
    /// configuration and is reported as a configuration error.
    pub fn calibrate(&self) -> Result<CalibrationResult> {
        let cal = self.config.calibration;
        let eta = cal.eta_tt_ref;
        let target = cal.target_outage;
        let eps = cal.ref_elevation;
        let outage_at = |nu: f64| self.baseline_outage(eps, eta, nu);

        // Bracket the target between two normalized thresholds.
        let mut lo = 1e-2;
        let mut f_lo = outage_at(lo)?;
        let mut expansions = 0;
        while f_lo >= target {
            lo *= 0.1;
            f_lo = outage_at(lo)?;
            expansions += 1;
            if expansions > 28 {
                return Err(Error::Config(format!(
                    "calibration cannot bracket target {target:.3e} from below: \
                     outage at nu = {lo:.3e} is still {f_lo:.3e}"
                )));
            }
        }
        let mut hi = 1.0;
        let mut f_hi = outage_at(hi)?;
        expansions = 0;
        while f_hi <= target {
            hi *= 10.0;
            f_hi = outage_at(hi)?;
            expansions += 1;
            if expansions > 6 {
                return Err(Error::Config(format!(
                    "calibration cannot bracket target {target:.3e} from above: \
                     outage at nu = {hi:.3e} is only {f_hi:.3e}"
                )));
            }
        }

        // Bisect on ln ν. The interval shrinks by 2^-k, far below f64
        // resolution within the iteration cap; the exit test is on the
        // quantity that matters, the relative outage error.
        let mut ln_lo = lo.ln();
        let mut ln_hi = hi.ln();
        let mut nu = (0.5 * (ln_lo + ln_hi)).exp();
        let mut achieved = outage_at(nu)?;
        for _ in 0..200 {
            if ((achieved - target) / target).abs() <= 1e-12 {
                break;
            }
            if achieved < target {
                ln_lo = nu.ln();
            } else {
                ln_hi = nu.ln();
            }
            nu = (0.5 * (ln_lo + ln_hi)).exp();
            achieved = outage_at(nu)?;
        }
        let rel = ((achieved - target) / target).abs();
        if rel > 1e-12 {
            return Err(Error::Numeric(format!(
                "calibration bisection stalled at relative error {rel:.3e} (nu = {nu:.17e})"
            )));
        }

        let p_th = nu * self.mean_power(eps)?;
        Ok(CalibrationResult {
            nu_ref: nu,
            p_th,
            achieved,
        })
    }
}

/// Calibrate the detection threshold for a configuration and return it in
/// watts. Convenience wrapper around [`Scenario::calibrate`] for callers
/// that only need the power level.
pub fn calibrate_threshold(config: &ScenarioConfig) -> Result<f64> {
    Ok(Scenario::new(config.clone()).calibrate()?.p_th)
}
