//! Deterministic large-scale channel gain for an optical LEO downlink.
//!
//! Everything in this module is a pure function of the link geometry and the
//! optical system: transmit/receive aperture gains, free-space path loss over
//! the spherical-Earth slant range, and atmospheric extinction modeled as a
//! zenith optical depth stretched by the cosecant of the elevation. The
//! random fading factors (scintillation and pointing) live in [`crate::fading`];
//! this module supplies the deterministic gain they multiply and the
//! normalized detection threshold used by the outage analysis.
//!
//! Angles are radians everywhere inside the library. Degrees are accepted
//! only at the CLI/configuration boundary and converted on entry.

use crate::error::{Error, Result};

/// Deterministic system and geometry parameters for one optical downlink.
///
/// Lengths are meters, angles radians, powers watts. The fields mirror the
/// usual link-budget symbols: Earth radius, satellite and ground-station
/// altitudes, carrier wavelength, transmit power, aperture diameters,
/// optics efficiencies, visibility and the Kruse scattering exponent, the
/// boundary-layer scale height for extinction, molecular absorption
/// transmittance, the minimum service elevation, receiver field of view,
/// and the pointing-jitter standard deviation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkConfig {
    /// Earth radius (m).
    pub earth_radius: f64,
    /// Satellite orbit altitude above the reference sphere (m).
    pub sat_altitude: f64,
    /// Optical ground station altitude above the reference sphere (m).
    pub ogs_altitude: f64,
    /// Carrier wavelength (m).
    pub wavelength: f64,
    /// Transmit optical power (W).
    pub tx_power: f64,
    /// Transmit aperture diameter (m).
    pub tx_aperture: f64,
    /// Receive aperture diameter (m).
    pub rx_aperture: f64,
    /// Transmitter optics efficiency, in (0, 1].
    pub tx_efficiency: f64,
    /// Receiver optics efficiency, in (0, 1].
    pub rx_efficiency: f64,
    /// Meteorological visibility (m).
    pub visibility: f64,
    /// Kruse size exponent q(V) for the scattering model (dimensionless).
    pub kruse_exponent: f64,
    /// Scale height of the scattering boundary layer (m).
    pub bl_scale_height: f64,
    /// Zenith molecular-absorption transmittance, in (0, 1].
    pub abs_transmittance: f64,
    /// Minimum service elevation (rad).
    pub min_elevation: f64,
    /// Receiver full field-of-view angle (rad).
    pub fov_angle: f64,
    /// Residual pointing-jitter standard deviation per axis (rad).
    pub jitter_std: f64,
}

impl LinkConfig {
    /// Check the structural invariants: positive lengths, efficiencies and
    /// transmittance in (0, 1], satellite above the ground station, and a
    /// minimum elevation inside (0, π/2].
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("earth_radius", self.earth_radius),
            ("sat_altitude", self.sat_altitude),
            ("wavelength", self.wavelength),
            ("tx_power", self.tx_power),
            ("tx_aperture", self.tx_aperture),
            ("rx_aperture", self.rx_aperture),
            ("visibility", self.visibility),
            ("bl_scale_height", self.bl_scale_height),
            ("fov_angle", self.fov_angle),
            ("jitter_std", self.jitter_std),
        ];
        for (name, value) in positive {
            if !(value > 0.0) || !value.is_finite() {
                return Err(Error::Config(format!("{name} must be positive and finite, got {value}")));
            }
        }
        if !(self.ogs_altitude >= 0.0) {
            return Err(Error::Config(format!(
                "ogs_altitude must be non-negative, got {}",
                self.ogs_altitude
            )));
        }
        if self.sat_altitude <= self.ogs_altitude {
            return Err(Error::Config(format!(
                "sat_altitude ({}) must exceed ogs_altitude ({})",
                self.sat_altitude, self.ogs_altitude
            )));
        }
        let unit_interval = [
            ("tx_efficiency", self.tx_efficiency),
            ("rx_efficiency", self.rx_efficiency),
            ("abs_transmittance", self.abs_transmittance),
        ];
        for (name, value) in unit_interval {
            if !(value > 0.0 && value <= 1.0) {
                return Err(Error::Config(format!("{name} must lie in (0, 1], got {value}")));
            }
        }
        if !(self.min_elevation > 0.0 && self.min_elevation <= std::f64::consts::FRAC_PI_2) {
            return Err(Error::Config(format!(
                "min_elevation must lie in (0, pi/2], got {}",
                self.min_elevation
            )));
        }
        if !self.kruse_exponent.is_finite() {
            return Err(Error::Config(format!(
                "kruse_exponent must be finite, got {}",
                self.kruse_exponent
            )));
        }
        Ok(())
    }
}

/// Reject elevations outside the physically meaningful (0, π/2] range.
fn check_elevation(elevation: f64) -> Result<()> {
    if !(elevation > 0.0 && elevation <= std::f64::consts::FRAC_PI_2) {
        return Err(Error::Domain(format!(
            "elevation must lie in (0, pi/2] radians, got {elevation}"
        )));
    }
    Ok(())
}

/// Line-of-sight distance from ground station to satellite (m) from
/// spherical-Earth geometry:
///
/// R(ε) = sqrt((R_E + h_s)² − (R_E + h_0)² cos²ε) − (R_E + h_0) sin ε.
///
/// Strictly decreasing in elevation; at zenith it collapses to h_s − h_0.
///
/// # Example
/// ```
/// # use leofade::linkbudget::{LinkConfig, slant_range};
/// # let cfg = leofade::linkbudget::tests_support::table_config();
/// let zenith = slant_range(&cfg, std::f64::consts::FRAC_PI_2).unwrap();
/// assert!((zenith - (cfg.sat_altitude - cfg.ogs_altitude)).abs() < 1e-6);
/// ```
pub fn slant_range(cfg: &LinkConfig, elevation: f64) -> Result<f64> {
    check_elevation(elevation)?;
    let r_sat = cfg.earth_radius + cfg.sat_altitude;
    let r_ogs = cfg.earth_radius + cfg.ogs_altitude;
    let cos_e = elevation.cos();
    let range = (r_sat * r_sat - r_ogs * r_ogs * cos_e * cos_e).sqrt() - r_ogs * elevation.sin();
    Ok(range)
}

/// Total zenith optical depth: molecular absorption plus Kruse scattering,
///
/// τ_0 = −ln T_abs + (3.912 / V) · (λ_0 / 550 nm)^(−q) · H_BL,
///
/// with visibility and scale height in the same unit (meters here).
pub fn zenith_optical_depth(cfg: &LinkConfig) -> f64 {
    let kruse = (3.912 / cfg.visibility)
        * (cfg.wavelength / 550e-9).powf(-cfg.kruse_exponent)
        * cfg.bl_scale_height;
    -cfg.abs_transmittance.ln() + kruse
}

/// Atmospheric transmittance along the slant path, exp(−τ_0 · csc ε).
pub fn atmospheric_transmittance(cfg: &LinkConfig, elevation: f64) -> Result<f64> {
    check_elevation(elevation)?;
    Ok((-zenith_optical_depth(cfg) / elevation.sin()).exp())
}

/// Deterministic large-scale channel gain,
///
/// h_c = η_T η_R (πD_T/λ_0)² (πD_R/λ_0)² (λ_0 / 4πR)² · exp(−τ_0 csc ε):
///
/// aperture gains, free-space loss over the slant range, and extinction.
pub fn large_scale_gain(cfg: &LinkConfig, elevation: f64) -> Result<f64> {
    let range = slant_range(cfg, elevation)?;
    let tx_gain = (std::f64::consts::PI * cfg.tx_aperture / cfg.wavelength).powi(2);
    let rx_gain = (std::f64::consts::PI * cfg.rx_aperture / cfg.wavelength).powi(2);
    let free_space = (cfg.wavelength / (4.0 * std::f64::consts::PI * range)).powi(2);
    let h_atm = atmospheric_transmittance(cfg, elevation)?;
    Ok(cfg.tx_efficiency * cfg.rx_efficiency * tx_gain * rx_gain * free_space * h_atm)
}

/// Normalized detection threshold ν = P_th / (P_t · h_c(ε)).
///
/// Outage is the event that the product of the random fading factors falls
/// below ν, so all the deterministic parts of the link collapse into this
/// single number per elevation.
pub fn normalized_threshold(cfg: &LinkConfig, p_th: f64, elevation: f64) -> Result<f64> {
    if !(p_th > 0.0) || !p_th.is_finite() {
        return Err(Error::Domain(format!("threshold power must be positive, got {p_th}")));
    }
    Ok(p_th / (cfg.tx_power * large_scale_gain(cfg, elevation)?))
}

/// Construction helpers shared by unit tests and doc examples.
#[doc(hidden)]
pub mod tests_support {
    use super::LinkConfig;

    /// The reference configuration used throughout the tests: a 550 km
    /// orbit, 1550 nm carrier, 10/30 cm apertures, 15 km visibility.
    pub fn table_config() -> LinkConfig {
        LinkConfig {
            earth_radius: 6371e3,
            sat_altitude: 550e3,
            ogs_altitude: 20.0,
            wavelength: 1550e-9,
            tx_power: 2.0,
            tx_aperture: 0.10,
            rx_aperture: 0.30,
            tx_efficiency: 0.8,
            rx_efficiency: 0.8,
            visibility: 15e3,
            kruse_exponent: 1.3,
            bl_scale_height: 2e3,
            abs_transmittance: (-0.05f64).exp(),
            min_elevation: 20f64.to_radians(),
            fov_angle: 20e-6,
            jitter_std: 2e-6,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::tests_support::table_config;
    use super::*;

    fn assert_rel(actual: f64, expected: f64, tol: f64) {
        let rel = (actual - expected).abs() / expected.abs();
        assert!(rel < tol, "actual {actual:.17e}, expected {expected:.17e}, rel {rel:.3e}");
    }

    #[test]
    fn reference_config_is_valid() {
        table_config().validate().unwrap();
    }

    #[test]
    fn slant_range_collapses_to_altitude_difference_at_zenith() {
        let cfg = table_config();
        let r = slant_range(&cfg, std::f64::consts::FRAC_PI_2).unwrap();
        assert_rel(r, cfg.sat_altitude - cfg.ogs_altitude, 1e-12);
    }

    #[test]
    fn slant_range_matches_reference_evaluation() {
        // Frozen from a 40-digit evaluation of the spherical-geometry formula.
        let cfg = table_config();
        let r = slant_range(&cfg, 25f64.to_radians()).unwrap();
        assert_rel(r, 1.123_241_120_326_474e6, 1e-12);
    }

    #[test]
    fn slant_range_horizon_limit_with_sea_level_station() {
        let mut cfg = table_config();
        cfg.ogs_altitude = 0.0;
        // At grazing elevation the sine term vanishes and the cosine term is
        // 1; compare against the tangent-line length at a tiny elevation.
        let grazing = ((cfg.earth_radius + cfg.sat_altitude).powi(2) - cfg.earth_radius.powi(2)).sqrt();
        let r = slant_range(&cfg, 1e-12).unwrap();
        assert_rel(r, grazing, 1e-9);
    }

    #[test]
    fn slant_range_is_strictly_decreasing() {
        let cfg = table_config();
        let mut prev = f64::INFINITY;
        for k in 1..=1000 {
            let eps = std::f64::consts::FRAC_PI_2 * k as f64 / 1000.0;
            let r = slant_range(&cfg, eps).unwrap();
            assert!(r < prev, "slant range not decreasing at {eps}");
            prev = r;
        }
    }

    #[test]
    fn optical_depth_matches_reference_evaluation() {
        // Frozen from a 40-digit evaluation of the extinction formula with
        // the reference parameters (0.05 absorption depth, 15 km visibility,
        // 1550 nm, exponent 1.3, 2 km scale height).
        assert_rel(zenith_optical_depth(&table_config()), 0.185_636_905_023_790_86, 1e-14);
    }

    #[test]
    fn optical_depth_vanishes_without_extinction() {
        let mut cfg = table_config();
        cfg.abs_transmittance = 1.0;
        cfg.visibility = 1e30;
        assert!(zenith_optical_depth(&cfg).abs() < 1e-25);
    }

    #[test]
    fn optical_depth_wavelength_factor_is_one_at_reference_wavelength() {
        let mut cfg = table_config();
        cfg.wavelength = 550e-9;
        cfg.abs_transmittance = 1.0;
        let expected = (3.912 / cfg.visibility) * cfg.bl_scale_height;
        assert_rel(zenith_optical_depth(&cfg), expected, 1e-14);
    }

    #[test]
    fn transmittance_collapses_to_zenith_value_at_ninety_degrees() {
        let cfg = table_config();
        let t = atmospheric_transmittance(&cfg, std::f64::consts::FRAC_PI_2).unwrap();
        assert_rel(t, (-zenith_optical_depth(&cfg)).exp(), 1e-14);
    }

    #[test]
    fn transmittance_obeys_cosecant_scaling() {
        // T(ε)^(1/cscε) must be elevation-independent and equal exp(−τ_0).
        let cfg = table_config();
        let zenith = (-zenith_optical_depth(&cfg)).exp();
        for deg in [5.0_f64, 20.0, 30.0, 45.0, 60.0, 75.0, 90.0] {
            let eps = deg.to_radians();
            let t = atmospheric_transmittance(&cfg, eps).unwrap();
            assert_rel(t.powf(eps.sin()), zenith, 1e-12);
        }
    }

    #[test]
    fn transmittance_at_thirty_degrees_squares_the_zenith_value() {
        let cfg = table_config();
        let t30 = atmospheric_transmittance(&cfg, 30f64.to_radians()).unwrap();
        let t90 = atmospheric_transmittance(&cfg, std::f64::consts::FRAC_PI_2).unwrap();
        assert_rel(t30, t90 * t90, 1e-12);
    }

    #[test]
    fn gain_matches_reference_evaluation() {
        // Frozen from a 40-digit evaluation of the full gain chain at 25°.
        let cfg = table_config();
        let hc = large_scale_gain(&cfg, 25f64.to_radians()).unwrap();
        assert_rel(hc, 7.554_872_274_904_266_5e-5, 1e-12);
        let hc90 = large_scale_gain(&cfg, std::f64::consts::FRAC_PI_2).unwrap();
        assert_rel(hc90, 4.060_915_689_166_344_8e-4, 1e-12);
    }

    #[test]
    fn gain_factors_into_range_and_extinction_ratios() {
        let cfg = table_config();
        let e25 = 25f64.to_radians();
        let e90 = std::f64::consts::FRAC_PI_2;
        let ratio = large_scale_gain(&cfg, e90).unwrap() / large_scale_gain(&cfg, e25).unwrap();
        let tau0 = zenith_optical_depth(&cfg);
        let expected = (slant_range(&cfg, e25).unwrap() / slant_range(&cfg, e90).unwrap()).powi(2)
            * (-tau0 * (1.0 - 1.0 / e25.sin())).exp();
        assert_rel(ratio, expected, 1e-12);
    }

    #[test]
    fn gain_reduces_to_antenna_equation_without_losses() {
        let mut cfg = table_config();
        cfg.tx_efficiency = 1.0;
        cfg.rx_efficiency = 1.0;
        cfg.abs_transmittance = 1.0;
        cfg.visibility = 1e30;
        let eps = 40f64.to_radians();
        let r = slant_range(&cfg, eps).unwrap();
        let gt = (std::f64::consts::PI * cfg.tx_aperture / cfg.wavelength).powi(2);
        let gr = (std::f64::consts::PI * cfg.rx_aperture / cfg.wavelength).powi(2);
        let expected = gt * gr * (cfg.wavelength / (4.0 * std::f64::consts::PI * r)).powi(2);
        assert_rel(large_scale_gain(&cfg, eps).unwrap(), expected, 1e-12);
    }

    #[test]
    fn gain_is_strictly_increasing() {
        let cfg = table_config();
        let mut prev = 0.0;
        for k in 1..=1000 {
            let eps = std::f64::consts::FRAC_PI_2 * k as f64 / 1000.0;
            let hc = large_scale_gain(&cfg, eps).unwrap();
            assert!(hc > prev, "gain not increasing at {eps}");
            prev = hc;
        }
    }

    #[test]
    fn threshold_is_one_at_received_power_and_linear_in_tx_power() {
        let cfg = table_config();
        let eps = 30f64.to_radians();
        let received = cfg.tx_power * large_scale_gain(&cfg, eps).unwrap();
        assert_rel(normalized_threshold(&cfg, received, eps).unwrap(), 1.0, 1e-12);

        let mut doubled = cfg;
        doubled.tx_power *= 2.0;
        let nu = normalized_threshold(&cfg, 1e-9, eps).unwrap();
        let nu2 = normalized_threshold(&doubled, 1e-9, eps).unwrap();
        assert_rel(nu, 2.0 * nu2, 1e-12);
    }

    #[test]
    fn elevation_domain_is_enforced() {
        let cfg = table_config();
        assert!(slant_range(&cfg, 0.0).is_err());
        assert!(slant_range(&cfg, -0.1).is_err());
        assert!(slant_range(&cfg, std::f64::consts::FRAC_PI_2 + 1e-9).is_err());
        assert!(atmospheric_transmittance(&cfg, 0.0).is_err());
        assert!(large_scale_gain(&cfg, 0.0).is_err());
        assert!(normalized_threshold(&cfg, 0.0, 0.5).is_err());
    }

    #[test]
    fn config_invariants_are_enforced() {
        let mut cfg = table_config();
        cfg.sat_altitude = 10.0;
        assert!(cfg.validate().is_err());

        let mut cfg = table_config();
        cfg.tx_efficiency = 0.0;
        assert!(cfg.validate().is_err());

        let mut cfg = table_config();
        cfg.abs_transmittance = 1.2;
        assert!(cfg.validate().is_err());

        let mut cfg = table_config();
        cfg.min_elevation = 2.0;
        assert!(cfg.validate().is_err());
    }
}
