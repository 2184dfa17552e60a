//! Turns a scenario into a privacy guarantee under one of the methods.

use privsel::count_dist::{CountDistribution, CountFamily};
use privsel::pld::{subsampled_gaussian_rdp_default, GridSpec, SubsampledGaussianParams};
use privsel::profiles::{
    default_alpha_grid, epsilon_for_delta, gaussian_profile, gaussian_rdp_curve, profile_from_points, pure_profile,
    rdp_epsilon_for_delta, rdp_to_dp,
};
use privsel::rnm::{rnm_composition_profile, rnm_gaussian_eps, rnm_rdp_curve};
use privsel::scenarios::AccountantSource;
use privsel::selection::{
    rdp_select_negbin, rdp_select_poisson_profiled, select_gdp_eps, select_negbin_pointwise, select_negbin_pure,
    select_profile, Eps1Strategy,
};
use privsel::{PointDP, PrivacyProfile, RdpCurve};
use serde::Serialize;

use crate::config::{BaseSpec, FamilySpec, Method};
use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Target {
    Delta(f64),
    Eps(f64),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Guarantee {
    pub eps: f64,
    pub delta: f64,
    pub method: &'static str,
    /// Auxiliary threshold of the selection bound, when one was chosen.
    pub eps1: Option<f64>,
}

/// A base mechanism with whatever descriptions of it are available.
pub struct Base {
    pub profile: PrivacyProfile,
    pub rdp: Option<RdpCurve>,
}

pub fn grid_for(spacing: Option<f64>) -> GridSpec {
    match spacing {
        Some(h) => GridSpec::default().with_spacing(h),
        None => GridSpec::default(),
    }
}

impl Base {
    /// Builds the base at sensitivity multiplier `scale` (RNM scores use 2,
    /// or 1 when monotone) composed over `rounds` rounds.
    pub fn build(
        spec: &BaseSpec,
        scale: f64,
        rounds: u64,
        grid: &GridSpec,
        source: &dyn AccountantSource,
    ) -> Result<Self, CliError> {
        let (profile, rdp) = match *spec {
            BaseSpec::Gaussian { sigma, sensitivity } => {
                let sens = sensitivity * scale * (rounds as f64).sqrt();
                (
                    gaussian_profile(sigma, sens)?,
                    Some(gaussian_rdp_curve(sigma, sens, &default_alpha_grid())?),
                )
            }
            BaseSpec::SubsampledGaussian { q, sigma, steps } => {
                if scale != 1.0 || rounds != 1 {
                    return Err(CliError::config(
                        "base",
                        "report noisy max needs a gaussian, pure or pointwise base",
                    ));
                }
                let params = SubsampledGaussianParams::new(q, sigma, steps)?;
                let acc = source.accountant(&params, grid)?;
                (acc.profile(), Some(subsampled_gaussian_rdp_default(&params)?))
            }
            BaseSpec::Pure { eps } if rounds == 1 => (pure_profile(eps)?, None),
            BaseSpec::Pointwise { ref points } if rounds == 1 => {
                let pts = points
                    .iter()
                    .map(|&[e, d]| PointDP::new(e, d))
                    .collect::<privsel::Result<Vec<_>>>()?;
                (profile_from_points(&pts)?, None)
            }
            _ => return Err(CliError::config("family.rnm.k", "several rounds need a gaussian base")),
        };
        Ok(Self { profile, rdp })
    }

    fn rdp(&self) -> Result<&RdpCurve, CliError> {
        self.rdp
            .as_ref()
            .ok_or_else(|| CliError::config("method", "rdp needs a gaussian or subsampled_gaussian base"))
    }
}

pub fn count_distribution(family: &FamilySpec) -> Result<Option<CountDistribution>, CliError> {
    let d = match *family {
        FamilySpec::Negbin { eta, m, gamma } => match (m, gamma) {
            (Some(m), None) => CountDistribution::from_expected(CountFamily::TruncNegBinomial { eta }, m)?,
            (None, Some(g)) => CountDistribution::trunc_neg_binomial(eta, g)?,
            _ => return Err(CliError::config("family.negbin", "give exactly one of `m` and `gamma`")),
        },
        FamilySpec::Binomial { n, m, p } => match (m, p) {
            (Some(m), None) => CountDistribution::from_expected(CountFamily::Binomial { n }, m)?,
            (None, Some(p)) => CountDistribution::binomial(n, p)?,
            _ => return Err(CliError::config("family.binomial", "give exactly one of `m` and `p`")),
        },
        FamilySpec::Poisson { m } => CountDistribution::poisson(m)?,
        FamilySpec::Rnm { .. } => return Ok(None),
    };
    Ok(Some(d))
}

/// The same family with its expected count replaced by `m`.
pub fn with_expected(family: &FamilySpec, m: f64) -> Result<FamilySpec, CliError> {
    Ok(match *family {
        FamilySpec::Negbin { eta, .. } => FamilySpec::Negbin {
            eta,
            m: Some(m),
            gamma: None,
        },
        FamilySpec::Binomial { n, .. } => FamilySpec::Binomial { n, m: Some(m), p: None },
        FamilySpec::Poisson { .. } => FamilySpec::Poisson { m },
        FamilySpec::Rnm { monotone, k, .. } => {
            if m < 1.0 || m.fract() != 0.0 {
                return Err(CliError::config(
                    "m_grid",
                    "report noisy max needs whole candidate counts",
                ));
            }
            FamilySpec::Rnm {
                m: m as u64,
                monotone,
                k,
            }
        }
    })
}

enum Bound {
    Profile(PrivacyProfile, Option<f64>),
    Rdp(RdpCurve),
    /// Closed forms give one epsilon at the requested delta.
    Point(f64),
}

fn resolve(target: Target, bound: Bound, method: Method) -> Result<Guarantee, CliError> {
    let method = method.name();
    let (eps, delta, eps1) = match (bound, target) {
        (Bound::Profile(p, eps1), Target::Delta(d)) => (epsilon_for_delta(&p, d)?, d, eps1),
        (Bound::Profile(p, eps1), Target::Eps(e)) => (e, p.delta(e), eps1),
        (Bound::Rdp(c), Target::Delta(d)) => (rdp_epsilon_for_delta(&c, d)?, d, None),
        (Bound::Rdp(c), Target::Eps(e)) => (e, rdp_to_dp(&c, e), None),
        (Bound::Point(e), Target::Delta(d)) => (e, d, None),
        (Bound::Point(_), Target::Eps(_)) => {
            return Err(CliError::config("eps", "closed forms answer a delta target only"));
        }
    };
    Ok(Guarantee {
        eps,
        delta,
        method,
        eps1,
    })
}

fn target_delta(target: Target) -> Result<f64, CliError> {
    match target {
        Target::Delta(d) => Ok(d),
        Target::Eps(_) => Err(CliError::config("eps", "closed forms answer a delta target only")),
    }
}

/// Guarantee of the base mechanism alone.
pub fn base_guarantee(
    base: &BaseSpec,
    method: Method,
    target: Target,
    grid: &GridSpec,
    source: &dyn AccountantSource,
) -> Result<Guarantee, CliError> {
    check_target(target)?;
    let b = Base::build(base, 1.0, 1, grid, source)?;
    let bound = match method {
        Method::Hs => Bound::Profile(b.profile, None),
        Method::Rdp => Bound::Rdp(b.rdp()?.clone()),
        Method::ClosedForm => return Err(CliError::config("method", "closed forms need a count family")),
    };
    resolve(target, bound, method)
}

fn check_target(target: Target) -> Result<(), CliError> {
    match target {
        Target::Delta(d) if !(d > 0.0 && d < 1.0) => Err(CliError::config("delta", "must lie in (0, 1)")),
        Target::Eps(e) if !(e >= 0.0 && e.is_finite()) => {
            Err(CliError::config("eps", "must be finite and non-negative"))
        }
        _ => Ok(()),
    }
}

pub fn guarantee(
    base: &BaseSpec,
    family: &FamilySpec,
    method: Method,
    target: Target,
    grid: &GridSpec,
    source: &dyn AccountantSource,
) -> Result<Guarantee, CliError> {
    check_target(target)?;
    if let FamilySpec::Rnm { m, monotone, k } = *family {
        if m == 0 || k == 0 {
            return Err(CliError::config("family.rnm", "`m` and `k` must be positive"));
        }
        let scale = if monotone { 1.0 } else { 2.0 };
        let bound = match method {
            Method::Hs => {
                let composed = Base::build(base, scale, k, grid, source)?;
                Bound::Profile(rnm_composition_profile(&composed.profile, m, k)?, None)
            }
            Method::Rdp => {
                let single = Base::build(base, scale, 1, grid, source)?;
                Bound::Rdp(rnm_rdp_curve(single.rdp()?, m)?.compose(k))
            }
            Method::ClosedForm => match *base {
                BaseSpec::Gaussian { sigma, sensitivity } if k == 1 => {
                    // the closed form is written for sensitivity-2 scores
                    let sigma_eff = sigma / (sensitivity * scale / 2.0);
                    Bound::Point(rnm_gaussian_eps(sigma_eff, m, target_delta(target)?)?)
                }
                _ => {
                    return Err(CliError::config(
                        "method",
                        "closed form for noisy max needs a gaussian base, k = 1",
                    ))
                }
            },
        };
        return resolve(target, bound, method);
    }

    let dist = count_distribution(family)?.expect("non-rnm family");
    let b = Base::build(base, 1.0, 1, grid, source)?;
    let bound = match method {
        Method::Hs => {
            let r = select_profile(&b.profile, &dist, Eps1Strategy::Optimized)?;
            Bound::Profile(r.profile, Some(r.eps1.eps1))
        }
        Method::Rdp => match dist {
            CountDistribution::TruncNegBinomial { eta, gamma } => Bound::Rdp(rdp_select_negbin(b.rdp()?, eta, gamma)?),
            CountDistribution::Poisson { mean } => Bound::Rdp(rdp_select_poisson_profiled(b.rdp()?, &b.profile, mean)?),
            CountDistribution::Binomial { .. } => {
                return Err(CliError::config("method", "no rdp baseline for binomial counts"));
            }
        },
        Method::ClosedForm => {
            let CountDistribution::TruncNegBinomial { eta, gamma } = dist else {
                return Err(CliError::config("method", "closed forms cover negbin counts only"));
            };
            match *base {
                BaseSpec::Pure { eps } => Bound::Point(select_negbin_pure(eps, eta)?),
                BaseSpec::Gaussian { sigma, sensitivity } => {
                    Bound::Point(select_gdp_eps(sigma / sensitivity, eta, gamma, target_delta(target)?)?)
                }
                BaseSpec::Pointwise { ref points } if points.len() == 1 => {
                    // the single guarantee fixes delta as well
                    let [e, d] = points[0];
                    let p = select_negbin_pointwise(PointDP::new(e, d)?, eta, gamma)?;
                    return Ok(Guarantee {
                        eps: p.eps,
                        delta: p.delta,
                        method: method.name(),
                        eps1: None,
                    });
                }
                _ => {
                    // fall back on the pointwise bound at the base guarantee for delta / m
                    let total = target_delta(target)?;
                    let share = total / dist.mean();
                    let point = PointDP::new(epsilon_for_delta(&b.profile, share)?, share)?;
                    Bound::Point(select_negbin_pointwise(point, eta, gamma)?.eps)
                }
            }
        }
    };
    resolve(target, bound, method)
}
