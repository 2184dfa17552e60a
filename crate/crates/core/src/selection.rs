//! Privacy bounds for private selection: run the base mechanism a random
//! number of times and release the best run.

use crate::count_dist::CountDistribution;
use crate::error::{invalid, require_finite_positive, Error, Result};
use crate::numeric::{bisect_predicate, golden_section_min};
use crate::profiles::{epsilon_for_delta, PointDP, PrivacyProfile, RdpCurve};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Eps1Strategy {
    Fixed(f64),
    Optimized,
}

/// The auxiliary `eps1` chosen for a bound and the penalty it costs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Eps1Choice {
    pub eps1: f64,
    pub delta1: f64,
    pub penalty: f64,
}

#[derive(Debug, Clone)]
pub struct SelectionBoundResult {
    pub profile: PrivacyProfile,
    pub eps1: Eps1Choice,
    pub distribution: CountDistribution,
    pub base_label: String,
}

const EPS1_GRID_POINTS: usize = 200;
const EPS1_FLOOR: f64 = 1e-6;
const EPS1_CAP: f64 = 50.0;
const EPS1_TOL: f64 = 1e-6;

/// Minimizes `penalty(eps1, delta_base(eps1))` over `eps1 >= lower`.
///
/// Candidates are the lower end, the base profile's kinks, and a log-spaced
/// grid up to where the base profile reaches 1e-15; the best candidate is
/// polished by golden-section search between its neighbours. Ties go to the
/// smallest `eps1`.
pub fn optimize_eps1(base: &PrivacyProfile, penalty: &dyn Fn(f64, f64) -> f64, lower: f64) -> Eps1Choice {
    let lower = lower.max(0.0);
    let eps_hi = epsilon_for_delta(base, 1e-15)
        .map_or(EPS1_CAP, |e| e.min(EPS1_CAP))
        .max(lower);
    let eval = |e: f64| penalty(e, base.delta(e));

    let mut candidates = vec![lower];
    candidates.extend(base.kinks().iter().copied().filter(|&k| k >= lower && k <= EPS1_CAP));
    let g_lo = lower.max(EPS1_FLOOR);
    if eps_hi > g_lo {
        let ratio = (eps_hi / g_lo).ln();
        candidates
            .extend((0..EPS1_GRID_POINTS).map(|i| g_lo * (ratio * i as f64 / (EPS1_GRID_POINTS - 1) as f64).exp()));
    }
    candidates.sort_by(f64::total_cmp);
    candidates.dedup();

    let values: Vec<f64> = candidates.iter().map(|&e| eval(e)).collect();
    let mut best = 0;
    for (i, &v) in values.iter().enumerate() {
        if v < values[best] {
            best = i;
        }
    }
    let mut eps1 = candidates[best];
    let mut value = values[best];
    let left = candidates[best.saturating_sub(1)];
    let right = candidates[(best + 1).min(candidates.len() - 1)];
    if right > left {
        let (x, fx) = golden_section_min(eval, left, right, EPS1_TOL);
        if fx < value {
            eps1 = x;
            value = fx;
        }
    }
    Eps1Choice {
        eps1,
        delta1: base.delta(eps1),
        penalty: value,
    }
}

fn resolve_eps1(
    base: &PrivacyProfile,
    strategy: Eps1Strategy,
    penalty: &dyn Fn(f64, f64) -> f64,
    lower: f64,
) -> Result<Eps1Choice> {
    match strategy {
        Eps1Strategy::Fixed(e) => {
            if !(e >= lower && e.is_finite()) {
                return Err(invalid("eps1", format!("must be finite and at least {lower}, got {e}")));
            }
            let d = base.delta(e);
            Ok(Eps1Choice {
                eps1: e,
                delta1: d,
                penalty: penalty(e, d),
            })
        }
        Eps1Strategy::Optimized => Ok(optimize_eps1(base, penalty, lower)),
    }
}

fn shifted_profile(
    base: &PrivacyProfile,
    factor: f64,
    penalty: f64,
    positive_eps_only: bool,
    label: String,
) -> PrivacyProfile {
    let inner = base.clone();
    let kinks = base.kinks().iter().map(|k| k + penalty).collect();
    PrivacyProfile::new(label, move |e| {
        if positive_eps_only && e <= 0.0 {
            return 1.0;
        }
        (factor * inner.delta(e - penalty)).min(1.0)
    })
    .with_kinks(kinks)
}

/// Penalty `(η+1) log(e^{ε₁} + ((1-γ)/γ) δ(ε₁))` of the negative-binomial bound.
pub fn negbin_penalty(eta: f64, gamma: f64) -> impl Fn(f64, f64) -> f64 {
    let c = (1.0 - gamma) / gamma;
    move |e1, d1| (eta + 1.0) * (e1.exp() + c * d1).ln()
}

/// Truncated negative binomial `K`: `delta(eps) <= m delta_base(eps - penalty)`.
pub fn select_negbin_profile(
    base: &PrivacyProfile,
    eta: f64,
    gamma: f64,
    strategy: Eps1Strategy,
) -> Result<SelectionBoundResult> {
    let dist = CountDistribution::trunc_neg_binomial(eta, gamma)?;
    let pen = negbin_penalty(eta, gamma);
    let choice = resolve_eps1(base, strategy, &pen, 0.0)?;
    let m = dist.mean();
    Ok(SelectionBoundResult {
        profile: shifted_profile(
            base,
            m,
            choice.penalty,
            false,
            format!("hs-negbin(eta={eta},gamma={gamma})[{}]", base.label()),
        ),
        eps1: choice,
        distribution: dist,
        base_label: base.label().to_string(),
    })
}

/// Pure base: the selection is `(η+2) eps`-DP.
pub fn select_negbin_pure(eps_base: f64, eta: f64) -> Result<f64> {
    if !(eps_base >= 0.0 && eps_base.is_finite()) {
        return Err(invalid("eps", "must be finite and non-negative"));
    }
    if !(eta > -1.0) {
        return Err(invalid("eta", "must exceed -1"));
    }
    Ok((eta + 2.0) * eps_base)
}

/// `((η+2) eps + delta/γ, m delta)` from a single base guarantee.
pub fn select_negbin_pointwise(point: PointDP, eta: f64, gamma: f64) -> Result<PointDP> {
    let dist = CountDistribution::trunc_neg_binomial(eta, gamma)?;
    let eps = (eta + 2.0) * point.eps + point.delta / gamma;
    let delta = (dist.mean() * point.delta).min(1.0);
    PointDP::new(eps, delta)
}

/// Closed form for a Gaussian base with noise multiplier `sigma`.
pub fn select_gdp_eps(sigma: f64, eta: f64, gamma: f64, delta: f64) -> Result<f64> {
    require_finite_positive("sigma", sigma)?;
    CountDistribution::trunc_neg_binomial(eta, gamma)?;
    if !(delta > 0.0 && delta < 1.0) {
        return Err(invalid("delta", "must lie in (0,1)"));
    }
    if gamma * delta >= 1.0 {
        return Err(Error::Domain("gamma * delta must be below 1".into()));
    }
    let inner = 1.0 / (2.0 * sigma * sigma) + (2.0 * (1.0 / (gamma * delta)).ln()).sqrt() / sigma;
    Ok((eta + 2.0) * inner + delta)
}

/// Smallest admissible `eps1` for the binomial bound, i.e. the start of
/// `{e : e >= log(1 + p/(1-p) delta(e))}`.
pub fn binomial_eps1_threshold(base: &PrivacyProfile, p: f64) -> Result<f64> {
    let c = p / (1.0 - p);
    let ok = |e: f64| e >= (c * base.delta(e)).ln_1p();
    if ok(0.0) {
        return Ok(0.0);
    }
    let mut hi = 1e-3;
    while !ok(hi) {
        hi *= 2.0;
        if hi > 1e4 {
            return Err(Error::Numerical("no admissible eps1 for the binomial bound".into()));
        }
    }
    Ok(bisect_predicate(ok, 0.0, hi, 1e-12))
}

pub fn binomial_penalty(n: u64, p: f64) -> impl Fn(f64, f64) -> f64 {
    let k = (n - 1) as f64;
    move |e1, d1| k * (p * e1.exp_m1() + p * d1).ln_1p()
}

/// Binomial `K`: `delta(eps) <= n p delta_base(eps - penalty)` for `eps > 0`.
pub fn select_binomial_profile(
    base: &PrivacyProfile,
    n: u64,
    p: f64,
    strategy: Eps1Strategy,
) -> Result<SelectionBoundResult> {
    let dist = CountDistribution::binomial(n, p)?;
    let lower = binomial_eps1_threshold(base, p)?;
    let choice = resolve_eps1(base, strategy, &binomial_penalty(n, p), lower)?;
    Ok(SelectionBoundResult {
        profile: shifted_profile(
            base,
            n as f64 * p,
            choice.penalty,
            true,
            format!("hs-binomial(n={n},p={p})[{}]", base.label()),
        ),
        eps1: choice,
        distribution: dist,
        base_label: base.label().to_string(),
    })
}

pub fn poisson_penalty(m: f64) -> impl Fn(f64, f64) -> f64 {
    move |e1, d1| m * e1.exp_m1() + m * d1
}

/// Poisson `K`: `delta(eps) <= m delta_base(eps - m(e^{ε₁}-1) - m δ(ε₁))`
/// for `eps > 0`.
pub fn select_poisson_profile(base: &PrivacyProfile, m: f64, strategy: Eps1Strategy) -> Result<SelectionBoundResult> {
    let dist = CountDistribution::poisson(m)?;
    let choice = resolve_eps1(base, strategy, &poisson_penalty(m), 0.0)?;
    Ok(SelectionBoundResult {
        profile: shifted_profile(
            base,
            m,
            choice.penalty,
            true,
            format!("hs-poisson(m={m})[{}]", base.label()),
        ),
        eps1: choice,
        distribution: dist,
        base_label: base.label().to_string(),
    })
}

/// Dispatches to the bound matching the family of `dist`.
pub fn select_profile(
    base: &PrivacyProfile,
    dist: &CountDistribution,
    strategy: Eps1Strategy,
) -> Result<SelectionBoundResult> {
    match *dist {
        CountDistribution::TruncNegBinomial { eta, gamma } => select_negbin_profile(base, eta, gamma, strategy),
        CountDistribution::Binomial { n, p } => select_binomial_profile(base, n, p, strategy),
        CountDistribution::Poisson { mean } => select_poisson_profile(base, mean, strategy),
    }
}

/// RDP baseline for truncated negative binomial `K`.
pub fn rdp_select_negbin(base: &RdpCurve, eta: f64, gamma: f64) -> Result<RdpCurve> {
    let dist = CountDistribution::trunc_neg_binomial(eta, gamma)?;
    let lm = dist.mean().ln();
    // the α̂-term does not depend on α
    let extra = base
        .iter()
        .map(|(ah, eh)| (eta + 1.0) * (1.0 - 1.0 / ah) * eh + (1.0 + eta) * (1.0 / gamma).ln() / ah)
        .fold(f64::INFINITY, f64::min);
    RdpCurve::new(
        format!("rdp-negbin(eta={eta},gamma={gamma})[{}]", base.label()),
        base.orders().to_vec(),
        base.iter().map(|(a, e)| e + extra + lm / (a - 1.0)).collect(),
    )
}

/// RDP baseline for Poisson `K`, given one `(eps_hat, delta_hat)` guarantee
/// of the base; orders violating `e^{eps_hat} <= 1 + 1/(α-1)` are dropped.
pub fn rdp_select_poisson(base: &RdpCurve, point: PointDP, m: f64) -> Result<RdpCurve> {
    require_finite_positive("m", m)?;
    let lm = m.ln();
    let (orders, values): (Vec<f64>, Vec<f64>) = base
        .iter()
        .filter(|&(a, _)| point.eps.exp() <= 1.0 + 1.0 / (a - 1.0))
        .map(|(a, e)| (a, e + m * point.delta + lm / (a - 1.0)))
        .unzip();
    if orders.is_empty() {
        return Err(Error::EmptyCurve);
    }
    RdpCurve::new(format!("rdp-poisson(m={m})[{}]", base.label()), orders, values)
}

/// Poisson RDP baseline with the base guarantee chosen per order: the
/// largest admissible `eps_hat = log(α/(α-1))` and its profile value.
pub fn rdp_select_poisson_profiled(base: &RdpCurve, profile: &PrivacyProfile, m: f64) -> Result<RdpCurve> {
    require_finite_positive("m", m)?;
    let lm = m.ln();
    RdpCurve::new(
        format!("rdp-poisson(m={m})[{}]", base.label()),
        base.orders().to_vec(),
        base.iter()
            .map(|(a, e)| {
                let eps_hat = (a / (a - 1.0)).ln();
                e + m * profile.delta(eps_hat) + lm / (a - 1.0)
            })
            .collect(),
    )
}

/// `(eps_hat + (η+1) log(e^{ε₁} + ((1-γ)/γ) δ₁), delta)`.
pub fn adjust_guarantee(eps1: f64, delta1: f64, eps_hat: f64, eta: f64, gamma: f64, delta: f64) -> Result<PointDP> {
    if [eps1, delta1, eps_hat, delta].iter().any(|v| !(*v >= 0.0)) {
        return Err(invalid("eps1", "all inputs must be non-negative"));
    }
    CountDistribution::trunc_neg_binomial(eta, gamma)?;
    PointDP::new(eps_hat + negbin_penalty(eta, gamma)(eps1, delta1), delta.min(1.0))
}

/// Generalized propose-test-release: `(eps + eps_hat, delta + delta_hat + delta')`.
pub fn gptr_combine(eps: f64, delta: f64, eps_hat: f64, delta_hat: f64, delta_prime: f64) -> Result<PointDP> {
    if [eps, delta, eps_hat, delta_hat, delta_prime]
        .iter()
        .any(|v| !(*v >= 0.0))
    {
        return Err(invalid("eps", "all inputs must be non-negative"));
    }
    PointDP::new(eps + eps_hat, (delta + delta_hat + delta_prime).min(1.0))
}

/// Largest expected count `m` (real-valued) whose bound, built by `bound`,
/// stays `(target_eps, delta)`-DP. `bound(m)` returns the certified
/// epsilon at `delta` and must be non-decreasing in `m`.
pub fn max_expected_count(bound: &dyn Fn(f64) -> Result<f64>, target_eps: f64, lo: f64, hi: f64) -> Result<f64> {
    // an unreachable delta at m certainly exceeds the target
    let fits = |m: f64| match bound(m) {
        Ok(e) => Ok(e <= target_eps),
        Err(Error::UnreachableTarget { .. }) => Ok(false),
        Err(e) => Err(e),
    };
    if !fits(lo)? {
        return Err(Error::UnreachableTarget {
            target: target_eps,
            reason: format!("even m={lo} exceeds the target"),
        });
    }
    if fits(hi)? {
        return Ok(hi);
    }
    let (mut a, mut b) = (lo.ln(), hi.ln());
    while b - a > 1e-7 {
        let mid = 0.5 * (a + b);
        if fits(mid.exp())? {
            a = mid;
        } else {
            b = mid;
        }
    }
    Ok(a.exp())
}
