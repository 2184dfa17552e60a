//! Comparison tables behind the figure presets, and the horizon-adjustment
//! procedure for tuning the noise level of DP-SGD.
//!
//! Everything here is deterministic: the same preset always yields the same
//! numbers, whatever the thread count.

use std::fmt;
use std::str::FromStr;

use crate::count_dist::{CountDistribution, CountFamily};
use crate::error::{invalid, Error, Result};
use crate::pld::{GridSpec, HorizonProfiles, SubsampledGaussianAccountant, SubsampledGaussianParams};
use crate::profiles::{
    default_alpha_grid, epsilon_for_delta, gaussian_profile, gaussian_rdp_curve, gaussian_sigma_for_eps_delta,
    rdp_epsilon_for_delta, rdp_to_dp, PointDP, PrivacyProfile, RdpCurve,
};
use crate::rnm::{rnm_gaussian_eps, rnm_profile, rnm_rdp_curve};
use crate::selection::{
    adjust_guarantee, max_expected_count, negbin_penalty, optimize_eps1, rdp_select_negbin,
    rdp_select_poisson_profiled, select_gdp_eps, select_negbin_pointwise, select_profile, Eps1Strategy,
};

pub const DEFAULT_DELTA: f64 = 1e-6;
/// Expected candidate count for the adjustment preset.
pub const FIG8_DEFAULT_M: f64 = 10.0;
/// Target epsilon at which the model capacities of the two DP-SGD bounds
/// are compared; both bounds admit m > 1 there.
pub const FIG7_DEFAULT_TARGET_EPS: f64 = 2.5;
/// Grid for the long-horizon preset: the default 1e-4 misses the 1e-4
/// relative refinement tolerance at eps = 3.
pub const FIG6_SPACING: f64 = 2.5e-5;

pub const FIG6_Q: f64 = 256.0 / 60000.0;
pub const FIG6_SIGMA: f64 = 1.1;
pub const FIG7_Q: f64 = 16384.0 / 50000.0;
pub const FIG7_SIGMA: f64 = 21.1;
pub const FIG7_STEPS: u64 = 250;

/// `ceil(60 / q)` for the fig6 sampling rate.
pub fn fig6_steps() -> u64 {
    (60.0 / FIG6_Q).ceil() as u64
}

pub fn fig6_params() -> SubsampledGaussianParams {
    SubsampledGaussianParams::new(FIG6_Q, FIG6_SIGMA, fig6_steps()).expect("valid preset")
}

pub fn fig7_params() -> SubsampledGaussianParams {
    SubsampledGaussianParams::new(FIG7_Q, FIG7_SIGMA, FIG7_STEPS).expect("valid preset")
}

pub fn fig6_grid() -> GridSpec {
    GridSpec::default().with_spacing(FIG6_SPACING)
}

/// Epsilon grid of the base-profile tables of the DP-SGD presets.
pub fn pld_profile_grid() -> Vec<f64> {
    (0..=16).map(|i| 0.25 * i as f64).collect()
}

/// Epsilon grid of the binomial-ladder table.
pub fn fig4_eps_grid() -> Vec<f64> {
    (1..=20).map(|i| 0.5 * i as f64).collect()
}

pub const FIG4_M: f64 = 10.0;
pub const FIG4_N: [u64; 4] = [15, 20, 50, 1000];
pub const FIG2_M: [f64; 3] = [30.0, 300.0, 3000.0];

fn one_two_five(lo_exp: i32, hi_exp: i32) -> Vec<f64> {
    let mut v = Vec::new();
    for e in lo_exp..=hi_exp {
        for d in [1.0, 2.0, 5.0] {
            v.push(d * 10f64.powi(e));
        }
    }
    v
}

/// `1, 2, 5, 10, ..., 10^4` candidates.
pub fn fig1_m_grid() -> Vec<u64> {
    one_two_five(0, 4)
        .into_iter()
        .filter(|&m| m <= 1e4)
        .map(|m| m as u64)
        .collect()
}

pub fn fig3_m_grid() -> Vec<f64> {
    let mut v: Vec<f64> = one_two_five(0, 4)
        .into_iter()
        .filter(|&m| m > 1.0 && m <= 1e4)
        .collect();
    v.extend([30.0, 300.0, 3000.0]);
    v.sort_by(f64::total_cmp);
    v
}

pub fn dpsgd_m_grid() -> Vec<f64> {
    one_two_five(0, 3)
        .into_iter()
        .filter(|&m| m > 1.0 && m <= 1e3)
        .collect()
}

/// A rectangular numeric table; `NaN` marks values a method cannot supply.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub name: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    fn new(name: &str, columns: &[&str]) -> Self {
        Self {
            name: name.into(),
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    fn push(&mut self, row: Vec<f64>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let i = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| r[i]).collect())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Preset {
    Fig1,
    Fig2,
    Fig3,
    Fig4,
    Fig6,
    Fig7,
    Fig8,
}

impl Preset {
    pub const ALL: [Preset; 7] = [
        Preset::Fig1,
        Preset::Fig2,
        Preset::Fig3,
        Preset::Fig4,
        Preset::Fig6,
        Preset::Fig7,
        Preset::Fig8,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Preset::Fig1 => "fig1",
            Preset::Fig2 => "fig2",
            Preset::Fig3 => "fig3",
            Preset::Fig4 => "fig4",
            Preset::Fig6 => "fig6",
            Preset::Fig7 => "fig7",
            Preset::Fig8 => "fig8",
        }
    }
}

impl fmt::Display for Preset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Preset {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Preset::ALL
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| invalid("preset", format!("unknown preset `{s}`")))
    }
}

/// Where composed PLDs come from; the CLI plugs in an on-disk cache.
pub trait AccountantSource {
    fn accountant(&self, params: &SubsampledGaussianParams, grid: &GridSpec) -> Result<SubsampledGaussianAccountant>;
}

/// Composes from scratch every time.
#[derive(Debug, Clone, Copy, Default)]
pub struct Compose;

impl AccountantSource for Compose {
    fn accountant(&self, params: &SubsampledGaussianParams, grid: &GridSpec) -> Result<SubsampledGaussianAccountant> {
        SubsampledGaussianAccountant::new(*params, *grid)
    }
}

/// Preset knobs with no canonical value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PresetOptions {
    pub delta: f64,
    pub fig7_target_eps: f64,
    pub fig8_m: f64,
    /// Overrides the preset loss grid spacing of fig6/fig7/fig8.
    pub spacing: Option<f64>,
}

impl Default for PresetOptions {
    fn default() -> Self {
        Self {
            delta: DEFAULT_DELTA,
            fig7_target_eps: FIG7_DEFAULT_TARGET_EPS,
            fig8_m: FIG8_DEFAULT_M,
            spacing: None,
        }
    }
}

impl PresetOptions {
    fn grid(&self, preset_default: GridSpec) -> GridSpec {
        match self.spacing {
            Some(h) => preset_default.with_spacing(h),
            None => preset_default,
        }
    }
}

/// Certified epsilon at `delta`, or `NaN` when the bound never reaches it.
fn or_nan(r: Result<f64>) -> Result<f64> {
    match r {
        Ok(v) => Ok(v),
        Err(Error::UnreachableTarget { .. }) | Err(Error::EmptyCurve) => Ok(f64::NAN),
        Err(e) => Err(e),
    }
}

/// Epsilon of the optimized hockey-stick selection bound at `delta`.
pub fn hs_selection_eps(base: &PrivacyProfile, dist: &CountDistribution, delta: f64) -> Result<f64> {
    epsilon_for_delta(&select_profile(base, dist, Eps1Strategy::Optimized)?.profile, delta)
}

/// Epsilon of the matching RDP baseline at `delta` (negative binomial and
/// Poisson counts only).
pub fn rdp_selection_eps(
    base_rdp: &RdpCurve,
    base_profile: &PrivacyProfile,
    dist: &CountDistribution,
    delta: f64,
) -> Result<f64> {
    let curve = match *dist {
        CountDistribution::TruncNegBinomial { eta, gamma } => rdp_select_negbin(base_rdp, eta, gamma)?,
        CountDistribution::Poisson { mean } => rdp_select_poisson_profiled(base_rdp, base_profile, mean)?,
        CountDistribution::Binomial { .. } => {
            return Err(Error::Domain("no RDP baseline for binomial counts".into()));
        }
    };
    rdp_epsilon_for_delta(&curve, delta)
}

/// Pointwise closed form fed with the base guarantee at `delta / m`, so that
/// the selection ends up `(eps, delta)`-DP.
pub fn pointwise_selection_eps(base: &PrivacyProfile, eta: f64, m: f64, delta: f64) -> Result<f64> {
    let dist = CountDistribution::from_expected(CountFamily::TruncNegBinomial { eta }, m)?;
    let CountDistribution::TruncNegBinomial { gamma, .. } = dist else {
        unreachable!()
    };
    let mean = dist.mean();
    let point = PointDP::new(epsilon_for_delta(base, delta / mean)?, delta / mean)?;
    Ok(select_negbin_pointwise(point, eta, gamma)?.eps)
}

fn geometric(m: f64) -> Result<CountDistribution> {
    CountDistribution::from_expected(CountFamily::TruncNegBinomial { eta: 1.0 }, m)
}

/// Report Noisy Max over unit-sensitivity Gaussian scores, sigma = 4.
pub fn fig1(opts: &PresetOptions) -> Result<Vec<Table>> {
    let sigma = 4.0;
    let base2 = gaussian_profile(sigma, 2.0)?;
    let base1 = gaussian_profile(sigma, 1.0)?;
    let rdp2 = gaussian_rdp_curve(sigma, 2.0, &default_alpha_grid())?;
    let mut t = Table::new("rnm", &["m", "hs", "hs_monotone", "rdp", "closed_form"]);
    for m in fig1_m_grid() {
        t.push(vec![
            m as f64,
            or_nan(epsilon_for_delta(&rnm_profile(&base2, m), opts.delta))?,
            or_nan(epsilon_for_delta(&rnm_profile(&base1, m), opts.delta))?,
            rdp_epsilon_for_delta(&rnm_rdp_curve(&rdp2, m)?, opts.delta)?,
            rnm_gaussian_eps(sigma, m, opts.delta)?,
        ]);
    }
    Ok(vec![t])
}

fn gaussian_negbin_rows(name: &str, ms: &[f64], opts: &PresetOptions, pointwise: bool) -> Result<Table> {
    let sigma = 4.0;
    let base = gaussian_profile(sigma, 1.0)?;
    let rdp = gaussian_rdp_curve(sigma, 1.0, &default_alpha_grid())?;
    let cols: &[&str] = if pointwise {
        &["m", "hs_negbin", "rdp_negbin", "pointwise_closed", "gdp_closed"]
    } else {
        &["m", "hs_negbin", "rdp_negbin", "gdp_closed"]
    };
    let mut t = Table::new(name, cols);
    for &m in ms {
        let dist = geometric(m)?;
        let mut row = vec![
            m,
            hs_selection_eps(&base, &dist, opts.delta)?,
            rdp_selection_eps(&rdp, &base, &dist, opts.delta)?,
        ];
        if pointwise {
            row.push(pointwise_selection_eps(&base, 1.0, m, opts.delta)?);
        }
        row.push(select_gdp_eps(sigma, 1.0, 1.0 / m, opts.delta)?);
        t.push(row);
    }
    Ok(t)
}

/// Geometric K with m in {30, 300, 3000}, Gaussian base sigma = 4.
pub fn fig2(opts: &PresetOptions) -> Result<Vec<Table>> {
    Ok(vec![gaussian_negbin_rows("negbin", &FIG2_M, opts, true)?])
}

/// Growth of epsilon in m for the same setting as fig2.
pub fn fig3(opts: &PresetOptions) -> Result<Vec<Table>> {
    Ok(vec![gaussian_negbin_rows("growth", &fig3_m_grid(), opts, false)?])
}

/// Binomial ladder `Bin(n, 10/n)` against Poisson(10), Gaussian base
/// sigma = 4, plus the CDFs of K.
pub fn fig4(opts: &PresetOptions) -> Result<Vec<Table>> {
    let _ = opts;
    let base = gaussian_profile(4.0, 1.0)?;
    let rdp = gaussian_rdp_curve(4.0, 1.0, &default_alpha_grid())?;
    let mut dists: Vec<CountDistribution> = FIG4_N
        .iter()
        .map(|&n| CountDistribution::from_expected(CountFamily::Binomial { n }, FIG4_M))
        .collect::<Result<_>>()?;
    dists.push(CountDistribution::poisson(FIG4_M)?);
    let profiles: Vec<PrivacyProfile> = dists
        .iter()
        .map(|d| select_profile(&base, d, Eps1Strategy::Optimized).map(|r| r.profile))
        .collect::<Result<_>>()?;
    let rdp_poisson = rdp_select_poisson_profiled(&rdp, &base, FIG4_M)?;

    let names: Vec<String> = FIG4_N
        .iter()
        .map(|n| format!("bin_n{n}"))
        .chain(["poisson".to_string()])
        .collect();
    let mut cols: Vec<&str> = vec!["eps"];
    cols.extend(names.iter().map(String::as_str));
    cols.push("rdp_poisson");
    let mut prof = Table::new("profiles", &cols);
    for eps in fig4_eps_grid() {
        let mut row = vec![eps];
        row.extend(profiles.iter().map(|p| p.delta(eps)));
        row.push(rdp_to_dp(&rdp_poisson, eps));
        prof.push(row);
    }

    let mut cols: Vec<&str> = vec!["k"];
    cols.extend(names.iter().map(String::as_str));
    let mut cdf = Table::new("cdf", &cols);
    for k in 0..=25u64 {
        let mut row = vec![k as f64];
        row.extend(dists.iter().map(|d| d.cdf(k)));
        cdf.push(row);
    }
    Ok(vec![prof, cdf])
}

fn dpsgd_tables(
    acc: &SubsampledGaussianAccountant,
    opts: &PresetOptions,
    with_poisson: bool,
) -> Result<(Table, Table, PrivacyProfile, RdpCurve)> {
    let base = acc.profile();
    let rdp = crate::pld::subsampled_gaussian_rdp_default(&acc.params)?;
    let cols: &[&str] = if with_poisson {
        &["m", "hs_negbin", "hs_poisson", "rdp_negbin", "rdp_poisson"]
    } else {
        &["m", "hs_negbin", "rdp_negbin"]
    };
    let mut bounds = Table::new("bounds", cols);
    for m in dpsgd_m_grid() {
        let nb = geometric(m)?;
        let mut row = vec![m, or_nan(hs_selection_eps(&base, &nb, opts.delta))?];
        let po = CountDistribution::poisson(m)?;
        if with_poisson {
            row.push(or_nan(hs_selection_eps(&base, &po, opts.delta))?);
        }
        row.push(or_nan(rdp_selection_eps(&rdp, &base, &nb, opts.delta))?);
        if with_poisson {
            row.push(or_nan(rdp_selection_eps(&rdp, &base, &po, opts.delta))?);
        }
        bounds.push(row);
    }
    let mut prof = Table::new("profile", &["eps", "delta"]);
    for eps in pld_profile_grid() {
        prof.push(vec![eps, acc.delta(eps)]);
    }
    Ok((bounds, prof, base, rdp))
}

/// Subsampled Gaussian q = 256/60000, sigma = 1.1, T = ceil(60/q).
pub fn fig6(opts: &PresetOptions, source: &dyn AccountantSource) -> Result<Vec<Table>> {
    let acc = source.accountant(&fig6_params(), &opts.grid(fig6_grid()))?;
    let (bounds, prof, _, _) = dpsgd_tables(&acc, opts, true)?;
    Ok(vec![bounds, prof])
}

/// Largest expected count of geometric K that the hockey-stick and RDP
/// bounds certify at `(target_eps, delta)`.
pub fn model_capacity(base: &PrivacyProfile, rdp: &RdpCurve, target_eps: f64, delta: f64) -> Result<(f64, f64)> {
    let lo = 1.0 + 1e-9;
    let hi = 1e9;
    let hs = |m: f64| hs_selection_eps(base, &geometric(m)?, delta);
    let rd = |m: f64| rdp_selection_eps(rdp, base, &geometric(m)?, delta);
    Ok((
        max_expected_count(&hs, target_eps, lo, hi)?,
        max_expected_count(&rd, target_eps, lo, hi)?,
    ))
}

/// Subsampled Gaussian q = 16384/50000, sigma = 21.1, T = 250.
pub fn fig7(opts: &PresetOptions, source: &dyn AccountantSource) -> Result<Vec<Table>> {
    let acc = source.accountant(&fig7_params(), &opts.grid(GridSpec::default()))?;
    let (bounds, prof, base, rdp) = dpsgd_tables(&acc, opts, false)?;
    let (m_hs, m_rdp) = model_capacity(&base, &rdp, opts.fig7_target_eps, opts.delta)?;
    let mut cap = Table::new("capacity", &["target_eps", "delta", "max_m_hs", "max_m_rdp", "ratio"]);
    cap.push(vec![opts.fig7_target_eps, opts.delta, m_hs, m_rdp, m_hs / m_rdp]);
    Ok(vec![cap, bounds, prof])
}

/// Inputs of the horizon-adjustment procedure.
#[derive(Debug, Clone, PartialEq)]
pub struct AdjustConfig {
    /// `(q, sigma)` per candidate.
    pub candidates: Vec<(f64, f64)>,
    pub eps_q: f64,
    pub delta: f64,
    /// Expected number of candidates evaluated.
    pub m: f64,
    pub eta: f64,
    pub grid: GridSpec,
    pub max_steps: u64,
}

impl AdjustConfig {
    pub fn fig8(m: f64) -> Self {
        Self {
            candidates: vec![(0.01, 2.0), (0.01, 3.0), (0.01, 4.0)],
            eps_q: 1.5,
            delta: DEFAULT_DELTA,
            m,
            eta: 1.0,
            grid: GridSpec::default(),
            max_steps: 1 << 20,
        }
    }
}

/// Thresholds shared by all candidates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdjustThresholds {
    pub reference_sigma: f64,
    pub eps1: f64,
    pub delta1: f64,
    pub eps_hat: f64,
    pub guarantee: PointDP,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdjustRow {
    pub q: f64,
    pub sigma: f64,
    pub steps: u64,
    pub adjust_eps: f64,
    /// Optimized negative-binomial bound of the candidate at its horizon.
    pub candidate_eps: f64,
    pub gap: f64,
}

/// Pointwise thresholds from a Gaussian mechanism calibrated to
/// `(eps_q, delta)`: `eps1` minimizes the selection penalty on its profile
/// and `eps_hat` is where it reaches `delta / m`.
pub fn adjust_thresholds(cfg: &AdjustConfig) -> Result<(AdjustThresholds, CountDistribution)> {
    let dist = CountDistribution::from_expected(CountFamily::TruncNegBinomial { eta: cfg.eta }, cfg.m)?;
    let CountDistribution::TruncNegBinomial { gamma, .. } = dist else {
        unreachable!()
    };
    let sigma = gaussian_sigma_for_eps_delta(cfg.eps_q, cfg.delta)?;
    let reference = gaussian_profile(sigma, 1.0)?;
    let choice = optimize_eps1(&reference, &negbin_penalty(cfg.eta, gamma), 0.0);
    let eps_hat = epsilon_for_delta(&reference, cfg.delta / dist.mean())?;
    let guarantee = adjust_guarantee(choice.eps1, choice.delta1, eps_hat, cfg.eta, gamma, cfg.delta)?;
    Ok((
        AdjustThresholds {
            reference_sigma: sigma,
            eps1: choice.eps1,
            delta1: choice.delta1,
            eps_hat,
            guarantee,
        },
        dist,
    ))
}

/// For each candidate, the longest horizon whose profile stays below both
/// thresholds, the resulting guarantee, and the candidate's own optimized
/// bound for comparison.
pub fn adjust(cfg: &AdjustConfig) -> Result<(AdjustThresholds, Vec<AdjustRow>)> {
    if cfg.candidates.is_empty() {
        return Err(invalid("candidates", "at least one candidate is required"));
    }
    let (th, dist) = adjust_thresholds(cfg)?;
    let tail_delta = cfg.delta / dist.mean();
    let mut rows = Vec::with_capacity(cfg.candidates.len());
    for &(q, sigma) in &cfg.candidates {
        let mut horizons = HorizonProfiles::new(q, sigma, &cfg.grid)?;
        let mut fits = |t: u64| -> Result<bool> {
            let a = horizons.accountant(t, cfg.grid)?;
            Ok(a.delta(th.eps1) <= th.delta1 && a.delta(th.eps_hat) <= tail_delta)
        };
        if !fits(1)? {
            return Err(Error::UnreachableTarget {
                target: cfg.eps_q,
                reason: format!("a single step with q={q}, sigma={sigma} already exceeds the thresholds"),
            });
        }
        let (mut lo, mut hi) = (1u64, 2u64);
        while hi <= cfg.max_steps && fits(hi)? {
            lo = hi;
            hi *= 2;
        }
        let hi = hi.min(cfg.max_steps + 1);
        let (mut lo, mut hi) = (lo, hi);
        while hi - lo > 1 {
            let mid = lo + (hi - lo) / 2;
            if fits(mid)? {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let acc = horizons.accountant(lo, cfg.grid)?;
        let candidate_eps = hs_selection_eps(&acc.profile(), &dist, cfg.delta)?;
        rows.push(AdjustRow {
            q,
            sigma,
            steps: lo,
            adjust_eps: th.guarantee.eps,
            candidate_eps,
            gap: (th.guarantee.eps - candidate_eps) / candidate_eps,
        });
    }
    Ok((th, rows))
}

pub fn adjust_table(th: &AdjustThresholds, rows: &[AdjustRow]) -> Table {
    let mut t = Table::new(
        "adjust",
        &[
            "q",
            "sigma",
            "steps",
            "eps1",
            "delta1",
            "eps_hat",
            "adjust_eps",
            "candidate_eps",
            "gap",
        ],
    );
    for r in rows {
        t.push(vec![
            r.q,
            r.sigma,
            r.steps as f64,
            th.eps1,
            th.delta1,
            th.eps_hat,
            r.adjust_eps,
            r.candidate_eps,
            r.gap,
        ]);
    }
    t
}

/// Noise-level tuning with q = 0.01, thresholds (1.5, 1e-6).
pub fn fig8(opts: &PresetOptions) -> Result<Vec<Table>> {
    let mut cfg = AdjustConfig::fig8(opts.fig8_m);
    cfg.delta = opts.delta;
    cfg.grid = opts.grid(cfg.grid);
    let (th, rows) = adjust(&cfg)?;
    Ok(vec![adjust_table(&th, &rows)])
}

pub fn run_preset(preset: Preset, opts: &PresetOptions, source: &dyn AccountantSource) -> Result<Vec<Table>> {
    match preset {
        Preset::Fig1 => fig1(opts),
        Preset::Fig2 => fig2(opts),
        Preset::Fig3 => fig3(opts),
        Preset::Fig4 => fig4(opts),
        Preset::Fig6 => fig6(opts, source),
        Preset::Fig7 => fig7(opts, source),
        Preset::Fig8 => fig8(opts),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn preset_names_round_trip() {
        for p in Preset::ALL {
            assert_eq!(p.name().parse::<Preset>().unwrap(), p);
        }
        assert!("fig5".parse::<Preset>().is_err());
    }

    #[test]
    fn fig6_horizon() {
        assert_eq!(fig6_steps(), 14063);
    }

    #[test]
    fn grids() {
        assert_eq!(fig1_m_grid().first(), Some(&1));
        assert_eq!(fig1_m_grid().last(), Some(&10_000));
        assert_eq!(fig4_eps_grid().len(), 20);
        assert!(fig3_m_grid().windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn fig2_ordering() {
        let t = &fig2(&PresetOptions::default()).unwrap()[0];
        for row in &t.rows {
            assert!(row[1] < row[2], "hs {} vs rdp {}", row[1], row[2]);
            assert!(row[1] <= row[3] && row[1] <= row[4]);
        }
    }

    #[test]
    fn empty_adjust_is_rejected() {
        let mut cfg = AdjustConfig::fig8(10.0);
        cfg.candidates.clear();
        assert!(adjust(&cfg).is_err());
    }
}
