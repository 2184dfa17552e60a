//! Privacy profiles, Rényi curves, and the conversions between them.

use std::fmt;
use std::sync::Arc;

use crate::error::{invalid, require_finite_positive, require_probability, Error, Result};
use crate::numeric::{bisect_predicate, ln_normal_cdf, normal_cdf};

type DeltaFn = dyn Fn(f64) -> f64 + Send + Sync;

/// An evaluator `eps -> delta(eps)`.
///
/// `kinks` lists points where the curve is not smooth (for example the
/// stored points of a pointwise profile); optimizers use them as extra
/// candidates.
#[derive(Clone)]
pub struct PrivacyProfile {
    label: String,
    eval: Arc<DeltaFn>,
    domain: Option<(f64, f64)>,
    kinks: Vec<f64>,
}

impl fmt::Debug for PrivacyProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("PrivacyProfile")
            .field("label", &self.label)
            .field("domain", &self.domain)
            .field("kinks", &self.kinks)
            .finish_non_exhaustive()
    }
}

impl PrivacyProfile {
    pub fn new(label: impl Into<String>, f: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        Self {
            label: label.into(),
            eval: Arc::new(f),
            domain: None,
            kinks: Vec::new(),
        }
    }

    pub fn with_domain(mut self, lo: f64, hi: f64) -> Self {
        self.domain = Some((lo, hi));
        self
    }

    pub fn with_kinks(mut self, kinks: Vec<f64>) -> Self {
        self.kinks = kinks;
        self
    }

    /// `delta(eps)`, clipped to `[0, 1]`.
    pub fn delta(&self, eps: f64) -> f64 {
        (self.eval)(eps).clamp(0.0, 1.0)
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn domain(&self) -> Option<(f64, f64)> {
        self.domain
    }

    pub fn kinks(&self) -> &[f64] {
        &self.kinks
    }

    /// `min(1, factor * delta(eps))`.
    pub fn scaled(&self, factor: f64, label: impl Into<String>) -> Self {
        let inner = self.clone();
        Self {
            label: label.into(),
            eval: Arc::new(move |e| (factor * inner.delta(e)).min(1.0)),
            domain: self.domain,
            kinks: self.kinks.clone(),
        }
    }
}

/// A single `(eps, delta)` guarantee.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PointDP {
    pub eps: f64,
    pub delta: f64,
}

impl PointDP {
    pub fn new(eps: f64, delta: f64) -> Result<Self> {
        if !(eps >= 0.0 && eps.is_finite()) {
            return Err(invalid("eps", format!("must be finite and non-negative, got {eps}")));
        }
        require_probability("delta", delta)?;
        Ok(Self { eps, delta })
    }
}

/// Rényi-DP curve tabulated on a grid of orders.
#[derive(Debug, Clone, PartialEq)]
pub struct RdpCurve {
    label: String,
    orders: Vec<f64>,
    eps: Vec<f64>,
}

impl RdpCurve {
    pub fn new(label: impl Into<String>, orders: Vec<f64>, eps: Vec<f64>) -> Result<Self> {
        if orders.is_empty() {
            return Err(Error::EmptyCurve);
        }
        if orders.len() != eps.len() {
            return Err(invalid("eps", "one value per order is required"));
        }
        if orders.iter().any(|&a| !(a > 1.0)) || orders.windows(2).any(|w| w[0] >= w[1]) {
            return Err(invalid("orders", "orders must be > 1 and strictly increasing"));
        }
        if eps.iter().any(|&e| e.is_nan() || e < 0.0) {
            return Err(invalid("eps", "values must be non-negative"));
        }
        Ok(Self {
            label: label.into(),
            orders,
            eps,
        })
    }

    pub fn from_fn(label: impl Into<String>, orders: &[f64], f: impl Fn(f64) -> f64) -> Result<Self> {
        let eps = orders.iter().map(|&a| f(a)).collect();
        Self::new(label, orders.to_vec(), eps)
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn orders(&self) -> &[f64] {
        &self.orders
    }

    pub fn values(&self) -> &[f64] {
        &self.eps
    }

    pub fn iter(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.orders.iter().copied().zip(self.eps.iter().copied())
    }

    /// Value at a tabulated order.
    pub fn at(&self, alpha: f64) -> Option<f64> {
        self.orders.iter().position(|&a| a == alpha).map(|i| self.eps[i])
    }

    /// RDP of the `t`-fold composition.
    pub fn compose(&self, t: u64) -> Self {
        Self {
            label: format!("{}x{t}", self.label),
            orders: self.orders.clone(),
            eps: self.eps.iter().map(|e| e * t as f64).collect(),
        }
    }
}

/// `{1 + k/10 : k = 1..90} ∪ {11, ..., 256}`.
pub fn default_alpha_grid() -> Vec<f64> {
    let mut grid: Vec<f64> = (1..=90).map(|k| 1.0 + k as f64 / 10.0).collect();
    grid.extend((11..=256).map(|a| a as f64));
    grid
}

pub fn gaussian_rdp_curve(sigma: f64, sensitivity: f64, orders: &[f64]) -> Result<RdpCurve> {
    require_finite_positive("sigma", sigma)?;
    require_finite_positive("sensitivity", sensitivity)?;
    let c = sensitivity * sensitivity / (2.0 * sigma * sigma);
    RdpCurve::from_fn(format!("gaussian-rdp(sigma={sigma})"), orders, |a| a * c)
}

/// Exact profile of the Gaussian mechanism with noise `sigma` and
/// L2-sensitivity `sensitivity`.
pub fn gaussian_profile(sigma: f64, sensitivity: f64) -> Result<PrivacyProfile> {
    require_finite_positive("sigma", sigma)?;
    require_finite_positive("sensitivity", sensitivity)?;
    let a = sensitivity / (2.0 * sigma);
    let r = sigma / sensitivity;
    Ok(PrivacyProfile::new(
        format!("gaussian(sigma={sigma},sens={sensitivity})"),
        move |eps| gaussian_delta(a, r, eps),
    ))
}

fn gaussian_delta(a: f64, r: f64, eps: f64) -> f64 {
    let b = eps * r;
    let first = normal_cdf(a - b);
    if first == 0.0 {
        return 0.0;
    }
    // e^eps Φ(-a-b) in log space so large eps cannot overflow
    let second = (eps + ln_normal_cdf(-a - b)).exp();
    (first - second).max(0.0)
}

/// Pessimistic profile through a finite set of guarantees, using
/// `delta(eps) <= delta_i + (e^{eps_i} - e^eps)_+`.
pub fn profile_from_points(points: &[PointDP]) -> Result<PrivacyProfile> {
    if points.is_empty() {
        return Err(invalid("points", "at least one point is required"));
    }
    let pts: Vec<PointDP> = points.to_vec();
    let kinks = pts.iter().map(|p| p.eps).collect();
    Ok(PrivacyProfile::new("pointwise", move |eps| {
        let ee = eps.exp();
        pts.iter()
            .map(|p| p.delta + (p.eps.exp() - ee).max(0.0))
            .fold(f64::INFINITY, f64::min)
            .clamp(0.0, 1.0)
    })
    .with_kinks(kinks))
}

/// A pure `eps`-DP mechanism as a profile.
pub fn pure_profile(eps: f64) -> Result<PrivacyProfile> {
    let p = PointDP::new(eps, 0.0)?;
    Ok(profile_from_points(&[p])?.relabel(format!("pure(eps={eps})")))
}

impl PrivacyProfile {
    pub fn relabel(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }
}

fn ln_conversion_delta(alpha: f64, rdp_eps: f64, eps: f64) -> f64 {
    (alpha - 1.0) * (rdp_eps - eps) - alpha.ln() + (alpha - 1.0) * (-1.0 / alpha).ln_1p()
}

/// RDP to (eps, delta) conversion, minimized over the curve's orders.
pub fn rdp_to_dp(curve: &RdpCurve, eps: f64) -> f64 {
    curve
        .iter()
        .map(|(a, e)| ln_conversion_delta(a, e, eps))
        .fold(f64::INFINITY, f64::min)
        .exp()
        .min(1.0)
}

pub fn rdp_to_dp_profile(curve: &RdpCurve) -> PrivacyProfile {
    let c = curve.clone();
    PrivacyProfile::new(format!("rdp->dp[{}]", curve.label()), move |e| rdp_to_dp(&c, e))
}

/// Smallest `eps >= 0` that the conversion certifies at `delta`; the formula
/// is inverted per order, so no search is needed.
pub fn rdp_epsilon_for_delta(curve: &RdpCurve, delta: f64) -> Result<f64> {
    if !(delta > 0.0 && delta < 1.0) {
        return Err(invalid("delta", format!("must lie in (0,1), got {delta}")));
    }
    let best = curve
        .iter()
        .map(|(a, e)| e + ((1.0 / delta).ln() + (a - 1.0) * (-1.0 / a).ln_1p() - a.ln()) / (a - 1.0))
        .fold(f64::INFINITY, f64::min);
    Ok(best.max(0.0))
}

pub const EPS_SEARCH_CAP: f64 = 1e4;
pub const EPS_TOL: f64 = 1e-6;

/// Smallest `eps >= 0` with `profile(eps) <= delta`, to within [`EPS_TOL`].
///
/// The returned point always satisfies the target.
pub fn epsilon_for_delta(profile: &PrivacyProfile, delta: f64) -> Result<f64> {
    epsilon_for_delta_tol(profile, delta, EPS_TOL)
}

pub fn epsilon_for_delta_tol(profile: &PrivacyProfile, delta: f64, tol: f64) -> Result<f64> {
    if !(delta > 0.0 && delta <= 1.0) {
        return Err(invalid("delta", format!("must lie in (0,1], got {delta}")));
    }
    let lo = 0.0;
    if profile.delta(lo) <= delta {
        return Ok(lo);
    }
    let mut hi = 1.0;
    while profile.delta(hi) > delta {
        if hi >= EPS_SEARCH_CAP {
            return Err(Error::UnreachableTarget {
                target: delta,
                reason: format!("{} stays above the target up to eps={EPS_SEARCH_CAP}", profile.label()),
            });
        }
        hi = (2.0 * hi).min(EPS_SEARCH_CAP);
    }
    let start = if hi > 1.0 { hi / 2.0 } else { lo };
    let found = bisect_predicate(|e| profile.delta(e) <= delta, start, hi, tol);
    // a kink inside the final bracket is often the exact answer
    let snapped = profile
        .kinks()
        .iter()
        .copied()
        .filter(|&k| k > found - tol && k <= found && profile.delta(k) <= delta)
        .fold(found, f64::min);
    Ok(snapped)
}

/// Noise scale of a sensitivity-1 Gaussian mechanism that is exactly
/// `(eps, delta)`-DP.
pub fn gaussian_sigma_for_eps_delta(eps: f64, delta: f64) -> Result<f64> {
    require_finite_positive("eps", eps)?;
    if !(delta > 0.0 && delta < 1.0) {
        return Err(invalid("delta", format!("must lie in (0,1), got {delta}")));
    }
    let d = |sigma: f64| gaussian_delta(0.5 / sigma, sigma, eps);
    let (mut lo, mut hi) = (1e-3_f64, 1.0_f64);
    while d(lo) < delta {
        lo *= 0.5;
    }
    while d(hi) > delta {
        hi *= 2.0;
        if hi > 1e12 {
            return Err(Error::Numerical("noise scale search diverged".into()));
        }
    }
    // δ decreases in σ: keep d(lo) >= target >= d(hi)
    let (mut a, mut b) = (lo.ln(), hi.ln());
    for _ in 0..300 {
        let mid = 0.5 * (a + b);
        let v = d(mid.exp());
        if (v - delta).abs() <= 1e-12 * delta {
            return Ok(mid.exp());
        }
        if v > delta {
            a = mid;
        } else {
            b = mid;
        }
        if b - a < 1e-17 {
            break;
        }
    }
    Ok(b.exp())
}
