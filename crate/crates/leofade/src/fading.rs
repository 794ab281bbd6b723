//! State-conditioned fading marginals and their joint mixture.
//!
//! The atmosphere is modeled as sitting in one of a few discrete states
//! (e.g. nominal, boundary-layer-dominant, free-atmosphere-dominant), each
//! scaling the two turbulence components by its own factor pair. Conditioned
//! on the state, the two small-scale fading factors are independent:
//!
//! * `h_a` — scintillation, a unit-mean Gamma variable whose shape is the
//!   reciprocal of the state's aperture-averaged scintillation index;
//! * `h_p` — angular capture loss, a power-law variable on (0, 1] whose
//!   exponent compares the equivalent field-of-view angle with the combined
//!   mechanical-jitter and atmospheric angle-of-arrival spread.
//!
//! Both marginals depend on the same underlying turbulence strength, so
//! averaging over states couples them: the unconditional joint law is a
//! probability-weighted mixture of per-state products, which does not
//! factorize. That coupling, not the marginals themselves, is what the
//! outage analysis quantifies.

use crate::error::{Error, Result};
use crate::linkbudget::LinkConfig;
use crate::specfun;
use crate::turbulence::{SecondOrderStats, StatsMatrix};
use rand::distr::Distribution;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Gamma, StandardNormal};

/// Discrete atmospheric state space: occupation probabilities and the
/// per-state component scaling vectors χ_s = (χ_FA, χ_BL).
#[derive(Debug, Clone, PartialEq)]
pub struct StateModel {
    /// State probabilities π_s; must sum to one.
    pub probs: Vec<f64>,
    /// Per-state scaling of the (FA, BL) profile components.
    pub scales: Vec<[f64; 2]>,
}

impl StateModel {
    /// Check the probability simplex and scale positivity.
    pub fn validate(&self) -> Result<()> {
        if self.probs.is_empty() || self.probs.len() != self.scales.len() {
            return Err(Error::Config(format!(
                "state model needs matching, non-empty probs ({}) and scales ({})",
                self.probs.len(),
                self.scales.len()
            )));
        }
        if self.probs.iter().any(|&p| !(p >= 0.0) || !p.is_finite()) {
            return Err(Error::Config("state probabilities must be non-negative".into()));
        }
        let total: f64 = self.probs.iter().sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::Config(format!(
                "state probabilities must sum to 1 (got {total:.17})"
            )));
        }
        if self.scales.iter().flatten().any(|&c| !(c > 0.0) || !c.is_finite()) {
            return Err(Error::Config("state scale factors must be positive".into()));
        }
        Ok(())
    }

    /// Number of states W.
    pub fn len(&self) -> usize {
        self.probs.len()
    }

    /// True when the model has no states (invalid; kept for completeness).
    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }
}

/// The two parameters of one state's fading law: the Gamma shape `m` of the
/// scintillation factor and the power-law exponent `q` of the angular loss.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FadingParams {
    /// Gamma shape m = 1/σ_a² (> 0).
    pub m: f64,
    /// Angular exponent q = θ_eq² / (4σ_m² + 2η_tt β_rms²) (> 0).
    pub q: f64,
}

/// Second-order statistics of one state: z_s = M · χ_s.
pub fn state_stats(matrix: &StatsMatrix, state_scale: [f64; 2]) -> SecondOrderStats {
    matrix.apply(state_scale)
}

/// Map second-order statistics to the fading parameters of one state:
///
/// m = 1/σ_a²,  q = θ_eq² / (4σ_m² + 2η_tt β_rms²),
///
/// with the equivalent beamwidth θ_eq² = θ_FOV² + (λ_0/D_R)². The
/// tip/tilt coupling efficiency η_tt scales how much of the angle-of-arrival
/// variance survives the fine-pointing loop; η_tt = 0 leaves only the
/// mechanical jitter.
pub fn fading_params(stats: &SecondOrderStats, cfg: &LinkConfig, eta_tt: f64) -> Result<FadingParams> {
    if !(stats.sigma_a2 > 0.0) {
        return Err(Error::Domain(format!(
            "scintillation index must be positive for the Gamma model, got {}",
            stats.sigma_a2
        )));
    }
    if !(eta_tt >= 0.0) || !eta_tt.is_finite() {
        return Err(Error::Domain(format!("eta_tt must be non-negative, got {eta_tt}")));
    }
    let theta_eq2 = cfg.fov_angle * cfg.fov_angle + (cfg.wavelength / cfg.rx_aperture).powi(2);
    let denom = 4.0 * cfg.jitter_std * cfg.jitter_std + 2.0 * eta_tt * stats.beta_rms2;
    if !(denom > 0.0) {
        return Err(Error::Domain(format!(
            "angular variance denominator must be positive, got {denom}"
        )));
    }
    Ok(FadingParams {
        m: 1.0 / stats.sigma_a2,
        q: theta_eq2 / denom,
    })
}

/// Unit-mean Gamma density of the scintillation factor,
///
/// f(x) = m^m / Γ(m) · x^(m−1) e^(−m x),  x > 0,
///
/// evaluated in log space so large shapes do not overflow.
pub fn scint_pdf(x: f64, m: f64) -> f64 {
    if !(x > 0.0) || !(m > 0.0) {
        return 0.0;
    }
    let log_pdf = m * m.ln() - specfun::ln_gamma(m) + (m - 1.0) * x.ln() - m * x;
    log_pdf.exp()
}

/// Power-law density of the angular capture loss,
///
/// f(u) = q·u^(q−1),  0 < u ≤ 1,  with CDF u^q.
pub fn angular_pdf(u: f64, q: f64) -> f64 {
    if !(u > 0.0 && u <= 1.0) || !(q > 0.0) {
        return 0.0;
    }
    q * u.powf(q - 1.0)
}

/// Joint mixture density of (h_a, h_p):
///
/// f(x, u) = Σ_s π_s · f_a(x | m_s) · f_p(u | q_s).
///
/// Conditioned on the state the factors are independent; the mixture over
/// states is what couples them.
pub fn joint_pdf(x: f64, u: f64, states: &StateModel, params: &[FadingParams]) -> Result<f64> {
    if params.len() != states.len() {
        return Err(Error::Config(format!(
            "parameter vector length {} does not match state count {}",
            params.len(),
            states.len()
        )));
    }
    Ok(states
        .probs
        .iter()
        .zip(params)
        .map(|(&pi, p)| pi * scint_pdf(x, p.m) * angular_pdf(u, p.q))
        .sum())
}

/// How the sampler realizes the angular loss.
///
/// Both paths draw from the same law — the power-law CDF u^q — and must
/// agree in distribution; keeping both exposes the physical construction to
/// testing against the closed form.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AngularPath {
    /// Direct inversion: h_p = U^(1/q) with U uniform on (0, 1].
    InverseCdf,
    /// Physical construction: h_p = exp(−2‖θ‖²/θ_eq²) with θ a 2-D
    /// isotropic Gaussian pointing error. Because θ_eq² = 4q·σ_θ², this
    /// reduces to exp(−(n_1² + n_2²)/(2q)) with standard normal n_i.
    Gaussian,
}

/// Seedable stream of correlated fading pairs (h_a, h_p).
///
/// Each draw picks a state from π, then samples the two factors from that
/// state's marginals. The generator is a ChaCha8 stream cipher: fully
/// deterministic given (seed, stream), with independent streams for
/// parallel Monte Carlo (one stream per worker).
#[derive(Debug, Clone)]
pub struct FadingSampler {
    cumulative: Vec<f64>,
    params: Vec<FadingParams>,
    gammas: Vec<Gamma<f64>>,
    path: AngularPath,
    rng: ChaCha8Rng,
}

impl FadingSampler {
    /// Build a sampler on stream 0 using the inverse-CDF angular path.
    pub fn new(states: &StateModel, params: &[FadingParams], seed: u64) -> Result<Self> {
        Self::with_stream(states, params, seed, 0, AngularPath::InverseCdf)
    }

    /// Build a sampler on a numbered stream with an explicit angular path.
    pub fn with_stream(
        states: &StateModel,
        params: &[FadingParams],
        seed: u64,
        stream: u64,
        path: AngularPath,
    ) -> Result<Self> {
        states.validate()?;
        if params.len() != states.len() {
            return Err(Error::Config(format!(
                "parameter vector length {} does not match state count {}",
                params.len(),
                states.len()
            )));
        }
        if params.iter().any(|p| !(p.m > 0.0) || !(p.q > 0.0)) {
            return Err(Error::Config("fading parameters must be positive".into()));
        }
        let mut cumulative = Vec::with_capacity(states.len());
        let mut acc = 0.0;
        for &p in &states.probs {
            acc += p;
            cumulative.push(acc);
        }
        let gammas = params
            .iter()
            .map(|p| {
                Gamma::new(p.m, 1.0 / p.m)
                    .map_err(|e| Error::Config(format!("invalid Gamma shape {}: {e}", p.m)))
            })
            .collect::<Result<Vec<_>>>()?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream);
        Ok(FadingSampler {
            cumulative,
            params: params.to_vec(),
            gammas,
            path,
            rng,
        })
    }

    /// Draw one pair together with the index of the state it came from.
    pub fn draw_labeled(&mut self) -> (usize, f64, f64) {
        let r: f64 = self.rng.random();
        let state = self
            .cumulative
            .iter()
            .position(|&c| r < c)
            .unwrap_or(self.cumulative.len() - 1);
        let h_a = self.gammas[state].sample(&mut self.rng);
        let q = self.params[state].q;
        let h_p = match self.path {
            AngularPath::InverseCdf => {
                // 1 − [0,1) lands in (0,1], keeping ln(u) finite.
                let u = 1.0 - self.rng.random::<f64>();
                (u.ln() / q).exp()
            }
            AngularPath::Gaussian => {
                let n1: f64 = StandardNormal.sample(&mut self.rng);
                let n2: f64 = StandardNormal.sample(&mut self.rng);
                (-(n1 * n1 + n2 * n2) / (2.0 * q)).exp()
            }
        };
        (state, h_a, h_p)
    }

    /// Draw one (h_a, h_p) pair.
    pub fn draw(&mut self) -> (f64, f64) {
        let (_, h_a, h_p) = self.draw_labeled();
        (h_a, h_p)
    }
}

impl Iterator for FadingSampler {
    type Item = (f64, f64);

    fn next(&mut self) -> Option<(f64, f64)> {
        Some(self.draw())
    }
}
