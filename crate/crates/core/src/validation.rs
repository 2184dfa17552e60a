//! Cross-checks of the analytic bounds against the brute-force oracles.
//! Used by the `oracle` subcommand and by the acceptance suite.

use crate::count_dist::CountDistribution;
use crate::error::Result;
use crate::numeric::normal_sf;
use crate::oracles::{
    hs_divergence_quadrature, mc_selection_sample, rnm_exact_divergence, rnm_exact_divergence_rounds,
    selection_best_cdf, selection_best_mean, selection_exact_divergence, DensityPair, GaussianMixture,
};
use crate::pld::{subsampled_gaussian_pld, Direction, GridSpec, SubsampledGaussianParams};
use crate::profiles::{gaussian_profile, rdp_to_dp, RdpCurve};
use crate::rnm::{rnm_composition_profile, rnm_profile};
use crate::selection::{select_profile, Eps1Strategy};

/// Outcome of one sweep: how many comparisons ran and which failed.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Sweep {
    pub checked: usize,
    pub violations: Vec<String>,
    /// Largest `oracle / bound` seen (how close the bound is to tight).
    pub max_ratio: f64,
    /// Largest absolute discrepancy, for agreement sweeps.
    pub max_error: f64,
}

impl Sweep {
    pub fn passed(&self) -> bool {
        self.violations.is_empty() && self.checked > 0
    }

    fn dominated(&mut self, what: impl FnOnce() -> String, oracle: f64, bound: f64) {
        self.checked += 1;
        if bound > 0.0 {
            self.max_ratio = self.max_ratio.max(oracle / bound);
        }
        // quadrature is good to ~1e-12 absolute
        if oracle > bound + 1e-12 + 1e-9 * bound {
            self.violations
                .push(format!("{}: oracle {oracle:e} > bound {bound:e}", what()));
        }
    }

    fn agrees(&mut self, what: impl FnOnce() -> String, a: f64, b: f64, tol: f64) {
        self.checked += 1;
        let err = (a - b).abs();
        self.max_error = self.max_error.max(err);
        if !(err <= tol) {
            self.violations.push(format!("{}: {a:e} vs {b:e}", what()));
        }
    }
}

/// Analytic Gaussian profile against quadrature of the two normal
/// densities, over `eps = 0, 0.5, ..., 5`, `sigma in {1, 4}`, `sens in {1, 2}`.
pub fn gaussian_profile_sweep() -> Result<Sweep> {
    let mut s = Sweep::default();
    for sigma in [1.0, 4.0] {
        for sens in [1.0, 2.0] {
            let prof = gaussian_profile(sigma, sens)?;
            let pair = DensityPair::gaussian_shift(sigma, sens, 0.0)?;
            for i in 0..=10 {
                let eps = 0.5 * i as f64;
                s.agrees(
                    || format!("sigma={sigma} sens={sens} eps={eps}"),
                    prof.delta(eps),
                    hs_divergence_quadrature(&pair, eps),
                    1e-10,
                );
            }
        }
    }
    Ok(s)
}

/// Adversarial neighbouring score vectors for `m` candidates with
/// `f(X) = 0`: one coordinate moves down by one and the rest up by one
/// (each position in turn), plus the same pairs with roles swapped.
pub fn adversarial_configs(m: usize) -> Vec<(Vec<f64>, Vec<f64>)> {
    let zero = vec![0.0; m];
    let mut out = Vec::new();
    for i in 0..m {
        let shifted: Vec<f64> = (0..m).map(|j| if j == i { -1.0 } else { 1.0 }).collect();
        out.push((zero.clone(), shifted.clone()));
        out.push((shifted, zero.clone()));
    }
    out
}

/// Same-sign shifts: all coordinates, or a single one, by `+1` or `-1`.
pub fn monotone_configs(m: usize) -> Vec<(Vec<f64>, Vec<f64>)> {
    let zero = vec![0.0; m];
    let mut out = Vec::new();
    for s in [1.0, -1.0] {
        out.push((zero.clone(), vec![s; m]));
        for i in 0..m {
            let one: Vec<f64> = (0..m).map(|j| if j == i { s } else { 0.0 }).collect();
            out.push((zero.clone(), one.clone()));
            out.push((one, zero.clone()));
        }
    }
    out
}

pub const RNM_EPS: [f64; 4] = [0.0, 0.5, 1.0, 2.0];

/// Exact argmax divergences against `m` times the Gaussian profile at
/// sensitivity 2 (general) or 1 (monotone).
pub fn rnm_soundness_sweep() -> Result<Sweep> {
    let mut s = Sweep::default();
    for m in [2usize, 3, 5] {
        for sigma in [1.0, 2.0] {
            let general = rnm_profile(&gaussian_profile(sigma, 2.0)?, m as u64);
            let monotone = rnm_profile(&gaussian_profile(sigma, 1.0)?, m as u64);
            for (configs, bound, kind) in [
                (adversarial_configs(m), &general, "general"),
                (monotone_configs(m), &monotone, "monotone"),
            ] {
                for (mu, mu_prime) in &configs {
                    for eps in RNM_EPS {
                        let exact = rnm_exact_divergence(mu, mu_prime, sigma, eps)?;
                        s.dominated(
                            || format!("{kind} m={m} sigma={sigma} eps={eps} mu'={mu_prime:?}"),
                            exact,
                            bound.delta(eps),
                        );
                    }
                }
            }
        }
    }
    Ok(s)
}

/// Two non-adaptive rounds over two candidates against the composed bound
/// `m^2 delta_{sens 2 sqrt 2}`.
pub fn rnm_two_round_sweep() -> Result<Sweep> {
    let mut s = Sweep::default();
    for sigma in [1.0, 2.0] {
        let composed = gaussian_profile(sigma, 2.0 * 2f64.sqrt())?;
        let bound = rnm_composition_profile(&composed, 2, 2)?;
        let configs = adversarial_configs(2);
        for a in &configs {
            for b in &configs {
                for eps in RNM_EPS {
                    let exact = rnm_exact_divergence_rounds(&[a.clone(), b.clone()], sigma, eps)?;
                    s.dominated(
                        || format!("sigma={sigma} eps={eps} rounds={a:?},{b:?}"),
                        exact,
                        bound.delta(eps),
                    );
                }
            }
        }
    }
    Ok(s)
}

/// Count distributions of the selection soundness table.
pub fn selection_instances() -> Result<Vec<CountDistribution>> {
    Ok(vec![
        CountDistribution::trunc_neg_binomial(1.0, 0.1)?,
        CountDistribution::trunc_neg_binomial(1.0, 1.0 / 30.0)?,
        CountDistribution::binomial(20, 0.5)?,
        CountDistribution::poisson(10.0)?,
    ])
}

pub const SELECTION_EPS: [f64; 4] = [1.0, 2.0, 3.0, 4.0];

/// Exact selection divergences for quality scores `N(0, σ²)` vs
/// `N(1, σ²)` (both orders) against each family's optimized bound.
pub fn selection_soundness_sweep(sigmas: &[f64]) -> Result<Sweep> {
    let mut s = Sweep::default();
    for &sigma in sigmas {
        let base = gaussian_profile(sigma, 1.0)?;
        let pair = DensityPair::gaussian_shift(sigma, 0.0, 1.0)?;
        for dist in selection_instances()? {
            let bound = select_profile(&base, &dist, Eps1Strategy::Optimized)?.profile;
            for p in [pair.clone(), pair.reversed()] {
                for eps in SELECTION_EPS {
                    let exact = selection_exact_divergence(&p, &dist, eps)?;
                    s.dominated(
                        || format!("{} sigma={sigma} eps={eps} {}", dist.label(), p.label),
                        exact,
                        bound.delta(eps),
                    );
                }
            }
        }
    }
    Ok(s)
}

/// Single-step PLD profiles against quadrature of the dominating pairs;
/// the discretization must never be optimistic.
pub fn pld_pessimism_sweep(q: f64, sigma: f64, grid: &GridSpec) -> Result<Sweep> {
    let mut s = Sweep::default();
    let params = SubsampledGaussianParams::new(q, sigma, 1)?;
    for dir in [Direction::Remove, Direction::Add] {
        let pld = subsampled_gaussian_pld(&params, dir, grid)?;
        let pair = match dir {
            Direction::Remove => DensityPair::subsampled_remove(q, sigma)?,
            Direction::Add => DensityPair::subsampled_add(q, sigma)?,
        };
        for eps in [0.0, 0.1, 0.25, 0.5, 1.0, 2.0] {
            let exact = hs_divergence_quadrature(&pair, eps);
            s.dominated(|| format!("{} eps={eps}", dir.name()), exact, pld.delta(eps));
        }
    }
    Ok(s)
}

/// Simulated best-of-K against the quadrature CDF and mean.
pub fn monte_carlo_sweep(trials: u64, seed: u64) -> Result<Sweep> {
    let mut s = Sweep::default();
    let probes = [-0.5, 0.0, 0.5, 1.0, 1.5, 2.0, 2.5];
    let base = GaussianMixture::normal(0.0, 1.0)?;
    for dist in [
        CountDistribution::poisson(5.0)?,
        CountDistribution::trunc_neg_binomial(1.0, 0.2)?,
        CountDistribution::binomial(8, 0.5)?,
    ] {
        let mc = mc_selection_sample(&base, &dist, trials, seed, &probes)?;
        for pt in &mc.ecdf {
            let exact = selection_best_cdf(&base, &dist, pt.y);
            s.agrees(
                || format!("{} cdf({})", dist.label(), pt.y),
                pt.value,
                exact,
                pt.radius.max(1e-4),
            );
        }
        let mean = selection_best_mean(&base, &dist);
        s.agrees(|| format!("{} mean", dist.label()), mc.mean_best, mean, mc.mean_radius);
    }
    Ok(s)
}

/// The conversion at `α = 2, ε' = 1, ε = 3` and monotonicity in `ε`.
pub fn conversion_check() -> Result<Sweep> {
    let mut s = Sweep::default();
    let curve = RdpCurve::new("hand", vec![2.0], vec![1.0])?;
    s.agrees(
        || "alpha=2 eps'=1 eps=3".into(),
        rdp_to_dp(&curve, 3.0),
        0.033_833_820_809_153_17,
        1e-9,
    );
    let grid = crate::profiles::default_alpha_grid();
    let gauss = crate::profiles::gaussian_rdp_curve(4.0, 1.0, &grid)?;
    let mut prev = f64::INFINITY;
    for i in 0..=400 {
        let e = 0.025 * i as f64;
        let d = rdp_to_dp(&gauss, e);
        s.checked += 1;
        if d > prev {
            s.violations.push(format!("increase at eps={e}: {prev:e} -> {d:e}"));
        }
        prev = d;
    }
    Ok(s)
}

pub struct Check {
    pub name: &'static str,
    pub sweep: Result<Sweep>,
}

impl Check {
    pub fn passed(&self) -> bool {
        self.sweep.as_ref().is_ok_and(Sweep::passed)
    }
}

/// The full oracle suite, in a fixed order.
pub fn run_all() -> Vec<Check> {
    let grid = GridSpec::default();
    vec![
        Check {
            name: "gaussian-profile-vs-quadrature",
            sweep: gaussian_profile_sweep(),
        },
        Check {
            name: "rnm-soundness",
            sweep: rnm_soundness_sweep(),
        },
        Check {
            name: "rnm-two-round-composition",
            sweep: rnm_two_round_sweep(),
        },
        Check {
            name: "selection-soundness",
            sweep: selection_soundness_sweep(&[1.0, 4.0]),
        },
        Check {
            name: "pld-single-step-pessimism",
            sweep: pld_pessimism_sweep(256.0 / 60000.0, 1.1, &grid),
        },
        Check {
            name: "monte-carlo-selection",
            sweep: monte_carlo_sweep(200_000, 20_240_601),
        },
        Check {
            name: "rdp-conversion",
            sweep: conversion_check(),
        },
        Check {
            name: "normal-tail-sanity",
            sweep: Ok({
                let mut s = Sweep::default();
                s.agrees(|| "sf(5)".into(), normal_sf(5.0) / 2.866_515_718_791_939e-7, 1.0, 1e-14);
                s
            }),
        },
    ]
}
