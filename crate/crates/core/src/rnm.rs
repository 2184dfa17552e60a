//! Report Noisy Max over `m` additive-noise scores.

use crate::error::{invalid, require_finite_positive, Error, Result};
use crate::profiles::{gaussian_profile, PrivacyProfile, RdpCurve};

#[derive(Debug, Clone)]
pub enum RnmNoise {
    Gaussian {
        sigma: f64,
    },
    /// Profile of the additive mechanism at the effective sensitivity
    /// (2, or 1 for monotone scores).
    Profile(PrivacyProfile),
}

#[derive(Debug, Clone)]
pub struct RnmSpec {
    pub candidates: u64,
    pub monotone: bool,
    pub noise: RnmNoise,
}

impl RnmSpec {
    pub fn gaussian(candidates: u64, sigma: f64, monotone: bool) -> Result<Self> {
        require_finite_positive("sigma", sigma)?;
        if candidates == 0 {
            return Err(invalid("m", "at least one candidate is required"));
        }
        Ok(Self {
            candidates,
            monotone,
            noise: RnmNoise::Gaussian { sigma },
        })
    }

    /// Effective sensitivity of a single noisy score.
    pub fn sensitivity(&self) -> f64 {
        if self.monotone {
            1.0
        } else {
            2.0
        }
    }

    pub fn base_profile(&self) -> Result<PrivacyProfile> {
        match &self.noise {
            RnmNoise::Gaussian { sigma } => gaussian_profile(*sigma, self.sensitivity()),
            RnmNoise::Profile(p) => Ok(p.clone()),
        }
    }

    pub fn profile(&self) -> Result<PrivacyProfile> {
        Ok(rnm_profile(&self.base_profile()?, self.candidates))
    }
}

/// `min(1, m * delta_base(eps))`.
pub fn rnm_profile(base: &PrivacyProfile, m: u64) -> PrivacyProfile {
    if m == 1 {
        return base.clone();
    }
    base.scaled(m as f64, format!("rnm(m={m})[{}]", base.label()))
}

/// `min(1, m^k * delta_comp(eps))` for `k` adaptive rounds; `composed` must
/// be the profile of the `k`-fold composition of the base mechanism.
pub fn rnm_composition_profile(composed: &PrivacyProfile, m: u64, k: u64) -> Result<PrivacyProfile> {
    if m == 0 || k == 0 {
        return Err(invalid("m", "candidates and rounds must be positive"));
    }
    if k == 1 {
        return Ok(rnm_profile(composed, m));
    }
    let ln_factor = k as f64 * (m as f64).ln();
    let inner = composed.clone();
    let label = format!("rnm-composed(m={m},k={k})[{}]", composed.label());
    if ln_factor < 300.0 * std::f64::consts::LN_10 {
        let factor = ln_factor.exp();
        return Ok(PrivacyProfile::new(label, move |e| (factor * inner.delta(e)).min(1.0)));
    }
    Ok(PrivacyProfile::new(label, move |e| {
        let d = inner.delta(e);
        if d == 0.0 {
            0.0
        } else {
            (ln_factor + d.ln()).min(0.0).exp()
        }
    }))
}

/// Closed-form `eps = 2/σ² + (2/σ) sqrt(2 log(m/δ))`.
pub fn rnm_gaussian_eps(sigma: f64, m: u64, delta: f64) -> Result<f64> {
    require_finite_positive("sigma", sigma)?;
    if m == 0 || !(delta > 0.0 && delta < 1.0) {
        return Err(invalid("delta", "need m >= 1 and delta in (0,1)"));
    }
    let ratio = m as f64 / delta;
    if ratio <= 1.0 {
        return Err(Error::Domain(format!("m/delta = {ratio} must exceed 1")));
    }
    Ok(2.0 / (sigma * sigma) + 2.0 / sigma * (2.0 * ratio.ln()).sqrt())
}

/// RDP of Report Noisy Max from the RDP of one noisy score at the
/// effective sensitivity: `eps(α) + log m / (α - 1)`.
pub fn rnm_rdp_curve(base: &RdpCurve, m: u64) -> Result<RdpCurve> {
    let lm = (m as f64).ln();
    RdpCurve::new(
        format!("rnm-rdp(m={m})[{}]", base.label()),
        base.orders().to_vec(),
        base.iter().map(|(a, e)| e + lm / (a - 1.0)).collect(),
    )
}
