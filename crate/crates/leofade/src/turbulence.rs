//! Layered-turbulence second-order statistics for a slant optical path.
//!
//! The refractive-index structure profile is the Hufnagel–Valley model split
//! into two additive components: a free-atmosphere (FA) part driven by the
//! upper-air wind and a boundary-layer (BL) part pinned to the ground value
//! and decaying over 100 m. Two path-weighting kernels turn the profile into
//! the statistics the fading model consumes — the aperture-averaged
//! scintillation index σ_a² and the mean-square angle-of-arrival fluctuation
//! β_rms². Because the statistics are linear in the profile, the two
//! components can be integrated separately once per elevation into a 2×2
//! matrix; per-state profile scalings then become cheap matrix–vector
//! products.
//!
//! All integrals run over `[h_0, h_s]` with an adaptive Gauss–Kronrod rule
//! seeded by a geometric ladder of breakpoints (see [`crate::quad`]): the BL
//! term decays a hundred meters above the station while the domain spans
//! 550 km, so uninformed panels would hide the ground layer entirely.

use crate::error::{Error, Result};
use crate::linkbudget::LinkConfig;
use crate::quad::{self, QuadOptions};

/// Refractive-index structure profile parameters (HV model) and the
/// integration limits shared with the link geometry.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TurbulenceProfile {
    /// RMS upper-air wind speed (m/s), drives the FA pseudo-tropopause term.
    pub wind_rms: f64,
    /// Ground-level structure constant A_0 (m^(−2/3)), anchors the BL term.
    pub ground_cn2: f64,
    /// Ground-station altitude h_0 (m); the BL decay is measured from here.
    pub ogs_altitude: f64,
    /// Satellite altitude h_s (m); upper integration limit.
    pub sat_altitude: f64,
}

impl TurbulenceProfile {
    /// Build a profile that shares its altitude limits with a link config.
    pub fn from_link(cfg: &LinkConfig, wind_rms: f64, ground_cn2: f64) -> Self {
        TurbulenceProfile {
            wind_rms,
            ground_cn2,
            ogs_altitude: cfg.ogs_altitude,
            sat_altitude: cfg.sat_altitude,
        }
    }

    /// Check positivity of the strength parameters and the altitude ordering.
    pub fn validate(&self) -> Result<()> {
        if !(self.wind_rms > 0.0) || !self.wind_rms.is_finite() {
            return Err(Error::Config(format!("wind_rms must be positive, got {}", self.wind_rms)));
        }
        if !(self.ground_cn2 > 0.0) || !self.ground_cn2.is_finite() {
            return Err(Error::Config(format!(
                "ground_cn2 must be positive, got {}",
                self.ground_cn2
            )));
        }
        if !(self.sat_altitude > self.ogs_altitude) || !(self.ogs_altitude >= 0.0) {
            return Err(Error::Config(format!(
                "altitudes must satisfy 0 <= ogs ({}) < sat ({})",
                self.ogs_altitude, self.sat_altitude
            )));
        }
        Ok(())
    }
}

/// The two additive components of the structure profile.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Component {
    /// Free atmosphere: wind-driven pseudo-tropopause term plus the
    /// exponential upper-air background.
    FreeAtmosphere,
    /// Boundary layer: ground-anchored term decaying over 100 m.
    BoundaryLayer,
}

/// The pair of second-order statistics the fading model consumes.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct SecondOrderStats {
    /// Aperture-averaged scintillation index σ_a² (dimensionless).
    pub sigma_a2: f64,
    /// Mean-square angle-of-arrival fluctuation β_rms² (rad²).
    pub beta_rms2: f64,
}

/// Geometry-dependent quantities shared by both path kernels at one
/// elevation: the optical wavenumber, the altitude span, the receive
/// aperture, and the Fresnel-like parameter α that controls aperture
/// averaging of the scintillation kernel.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelContext {
    /// Optical wavenumber k_0 = 2π/λ_0 (rad/m).
    pub wavenumber: f64,
    /// Altitude span Δh = h_s − h_0 (m).
    pub delta_h: f64,
    /// Receive aperture diameter D_R (m).
    pub rx_aperture: f64,
    /// Elevation angle ε (rad).
    pub elevation: f64,
    /// Ground-station altitude h_0 (m); origin of the normalized altitude.
    pub ogs_altitude: f64,
    /// Aperture parameter α = k_0 D_R² / (16 Δh csc ε) (dimensionless).
    pub alpha: f64,
}

impl KernelContext {
    /// Assemble the kernel context for one elevation from the link geometry.
    pub fn new(cfg: &LinkConfig, elevation: f64) -> Result<Self> {
        if !(elevation > 0.0 && elevation <= std::f64::consts::FRAC_PI_2) {
            return Err(Error::Domain(format!(
                "elevation must lie in (0, pi/2] radians, got {elevation}"
            )));
        }
        let wavenumber = 2.0 * std::f64::consts::PI / cfg.wavelength;
        let delta_h = cfg.sat_altitude - cfg.ogs_altitude;
        let alpha = wavenumber * cfg.rx_aperture * cfg.rx_aperture * elevation.sin() / (16.0 * delta_h);
        Ok(KernelContext {
            wavenumber,
            delta_h,
            rx_aperture: cfg.rx_aperture,
            elevation,
            ogs_altitude: cfg.ogs_altitude,
            alpha,
        })
    }
}

/// Free-atmosphere structure constant at altitude `h` meters:
///
/// C²_FA(h) = 0.00594 (v_rms/27)² (10⁻⁵ h)¹⁰ e^(−h/1000) + 2.7×10⁻¹⁶ e^(−h/1500).
pub fn cn2_fa(profile: &TurbulenceProfile, h: f64) -> f64 {
    let wind_term = 0.00594 * (profile.wind_rms / 27.0).powi(2) * (1e-5 * h).powi(10) * (-h / 1000.0).exp();
    wind_term + 2.7e-16 * (-h / 1500.0).exp()
}

/// Boundary-layer structure constant at altitude `h` meters:
///
/// C²_BL(h) = A_0 · e^(−(h − h_0)/100).
pub fn cn2_bl(profile: &TurbulenceProfile, h: f64) -> f64 {
    profile.ground_cn2 * (-(h - profile.ogs_altitude) / 100.0).exp()
}

/// Scintillation path kernel at altitude `h`:
///
/// K_a(h) = 8.70 k_0^(7/6) Δh^(5/6) csc^(11/6)ε · Re{(α + iξ)^(5/6) − α^(5/6)},
///
/// with ξ = (h − h_0)/Δh. The complex power uses the principal branch in
/// polar form; with α > 0 and ξ ≥ 0 the argument stays in the first
/// quadrant, so there is no branch ambiguity. The kernel vanishes
/// quadratically as h → h_0 (see [`kernel_asymptotic_coeff`]).
pub fn scint_kernel(ctx: &KernelContext, h: f64) -> f64 {
    let xi = (h - ctx.ogs_altitude) / ctx.delta_h;
    let r = ctx.alpha.hypot(xi);
    let phi = xi.atan2(ctx.alpha);
    let re_power = r.powf(5.0 / 6.0) * (5.0 * phi / 6.0).cos();
    let csc = 1.0 / ctx.elevation.sin();
    8.70 * ctx.wavenumber.powf(7.0 / 6.0)
        * ctx.delta_h.powf(5.0 / 6.0)
        * csc.powf(11.0 / 6.0)
        * (re_power - ctx.alpha.powf(5.0 / 6.0))
}

/// Angle-of-arrival path kernel, constant in altitude:
///
/// K_β = 2.91 · D_R^(−1/3) · csc ε.
pub fn aoa_kernel(ctx: &KernelContext) -> f64 {
    2.91 * ctx.rx_aperture.powf(-1.0 / 3.0) / ctx.elevation.sin()
}

/// Leading coefficient of the quadratic vanishing of the scintillation
/// kernel at the station altitude:
///
/// C_a = (29/48) k_0^(7/6) csc^(11/6)ε · α^(−7/6) Δh^(−7/6),
///
/// so that K_a(h_0 + δ) → C_a δ² as δ → 0. Used to cross-check the kernel
/// implementation against its small-altitude expansion.
pub fn kernel_asymptotic_coeff(ctx: &KernelContext) -> f64 {
    let csc = 1.0 / ctx.elevation.sin();
    (29.0 / 48.0)
        * ctx.wavenumber.powf(7.0 / 6.0)
        * csc.powf(11.0 / 6.0)
        * ctx.alpha.powf(-7.0 / 6.0)
        * ctx.delta_h.powf(-7.0 / 6.0)
}

/// Breakpoints for the altitude integrals: a geometric ladder from the 50 m
/// scale (below the 100 m BL decay) up to the satellite, with an extra split
/// one kilometer above the station where the BL contribution has died off.
fn altitude_breakpoints(profile: &TurbulenceProfile) -> Vec<f64> {
    let mut points = quad::geometric_ladder(profile.ogs_altitude, profile.sat_altitude, 50.0, 2.5);
    let split = profile.ogs_altitude + 1000.0;
    if split < profile.sat_altitude && !points.contains(&split) {
        points.push(split);
        points.sort_by(f64::total_cmp);
    }
    points
}

/// Evaluate the structure profile of one component.
fn cn2_component(profile: &TurbulenceProfile, component: Component, h: f64) -> f64 {
    match component {
        Component::FreeAtmosphere => cn2_fa(profile, h),
        Component::BoundaryLayer => cn2_bl(profile, h),
    }
}

/// Integrate one profile component against both path kernels:
///
/// σ²_{a,j} = ∫ K_a(h) C²_j(h) dh,  β²_{rms,j} = K_β ∫ C²_j(h) dh
///
/// over [h_0, h_s]. The AoA kernel is constant in altitude, so its integral
/// reuses the plain profile integral.
pub fn component_stats(
    profile: &TurbulenceProfile,
    ctx: &KernelContext,
    component: Component,
    opts: &QuadOptions,
) -> Result<SecondOrderStats> {
    let points = altitude_breakpoints(profile);
    let scint = quad::integrate_segments(
        |h| scint_kernel(ctx, h) * cn2_component(profile, component, h),
        &points,
        opts,
    )?;
    let profile_mass = quad::integrate_segments(|h| cn2_component(profile, component, h), &points, opts)?;
    Ok(SecondOrderStats {
        sigma_a2: scint.value,
        beta_rms2: aoa_kernel(ctx) * profile_mass.value,
    })
}

/// The 2×2 matrix mapping per-component profile scalings to second-order
/// statistics: columns are the FA and BL component statistics, rows are
/// (σ_a², β_rms²). For a state that scales the FA profile by χ_FA and the
/// BL profile by χ_BL, the state statistics are `M · [χ_FA, χ_BL]ᵀ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StatsMatrix {
    /// First column: statistics of the unscaled FA component.
    pub fa: SecondOrderStats,
    /// Second column: statistics of the unscaled BL component.
    pub bl: SecondOrderStats,
}

impl StatsMatrix {
    /// Apply the matrix to a component-scaling vector χ = [χ_FA, χ_BL].
    pub fn apply(&self, chi: [f64; 2]) -> SecondOrderStats {
        SecondOrderStats {
            sigma_a2: self.fa.sigma_a2 * chi[0] + self.bl.sigma_a2 * chi[1],
            beta_rms2: self.fa.beta_rms2 * chi[0] + self.bl.beta_rms2 * chi[1],
        }
    }

    /// The column associated with one component.
    pub fn column(&self, component: Component) -> SecondOrderStats {
        match component {
            Component::FreeAtmosphere => self.fa,
            Component::BoundaryLayer => self.bl,
        }
    }
}

/// Integrate both components at one elevation into the statistics matrix.
pub fn stats_matrix(
    profile: &TurbulenceProfile,
    ctx: &KernelContext,
    opts: &QuadOptions,
) -> Result<StatsMatrix> {
    Ok(StatsMatrix {
        fa: component_stats(profile, ctx, Component::FreeAtmosphere, opts)?,
        bl: component_stats(profile, ctx, Component::BoundaryLayer, opts)?,
    })
}
