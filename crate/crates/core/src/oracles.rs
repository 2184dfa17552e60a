//! Brute-force references for small instances: quadrature of hockey-stick
//! divergences between explicit densities, exact Report Noisy Max outcome
//! probabilities, the selection output density, and a seeded Monte Carlo
//! simulator of the selection algorithm.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::count_dist::CountDistribution;
use crate::error::{invalid, Error, Result};
use crate::numeric::{
    bisect_predicate, breakpoints, integrate, integrate_pieces, normal_cdf, normal_pdf, normal_sf, CompensatedSum,
    QuadOptions,
};

const WINDOW_Z: f64 = 9.0;
const SCAN_POINTS: usize = 4000;

fn quad() -> QuadOptions {
    QuadOptions {
        rel_tol: 1e-13,
        abs_tol: 1e-300,
        max_intervals: 4000,
    }
}

/// Finite mixture of normals, `Σ w_i N(mean_i, sd_i²)`.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianMixture {
    components: Vec<(f64, f64, f64)>,
}

impl GaussianMixture {
    pub fn new(components: Vec<(f64, f64, f64)>) -> Result<Self> {
        if components.is_empty() {
            return Err(invalid("components", "at least one component is required"));
        }
        if components
            .iter()
            .any(|&(w, m, s)| !(w >= 0.0 && m.is_finite() && s > 0.0))
        {
            return Err(invalid("components", "weights must be >= 0 and scales > 0"));
        }
        let total: f64 = components.iter().map(|c| c.0).sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(invalid("components", format!("weights sum to {total}")));
        }
        Ok(Self { components })
    }

    pub fn normal(mean: f64, sd: f64) -> Result<Self> {
        Self::new(vec![(1.0, mean, sd)])
    }

    pub fn components(&self) -> &[(f64, f64, f64)] {
        &self.components
    }

    pub fn pdf(&self, x: f64) -> f64 {
        self.components
            .iter()
            .map(|&(w, m, s)| w * normal_pdf((x - m) / s) / s)
            .sum()
    }

    pub fn cdf(&self, x: f64) -> f64 {
        self.components
            .iter()
            .map(|&(w, m, s)| w * normal_cdf((x - m) / s))
            .sum::<f64>()
            .min(1.0)
    }

    pub fn sf(&self, x: f64) -> f64 {
        self.components
            .iter()
            .map(|&(w, m, s)| w * normal_sf((x - m) / s))
            .sum::<f64>()
            .min(1.0)
    }

    pub fn min_sd(&self) -> f64 {
        self.components.iter().map(|c| c.2).fold(f64::INFINITY, f64::min)
    }

    /// Interval outside of which each component has < 1e-16 mass.
    pub fn window(&self) -> (f64, f64) {
        let lo = self
            .components
            .iter()
            .map(|&(_, m, s)| m - WINDOW_Z * s)
            .fold(f64::INFINITY, f64::min);
        let hi = self
            .components
            .iter()
            .map(|&(_, m, s)| m + WINDOW_Z * s)
            .fold(f64::NEG_INFINITY, f64::max);
        (lo, hi)
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let u: f64 = rng.gen();
        let mut acc = 0.0;
        let mut chosen = self.components[self.components.len() - 1];
        for &c in &self.components {
            acc += c.0;
            if u < acc {
                chosen = c;
                break;
            }
        }
        let z: f64 = rng.sample(StandardNormal);
        chosen.1 + chosen.2 * z
    }
}

/// Two densities compared by a divergence.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityPair {
    pub p: GaussianMixture,
    pub q: GaussianMixture,
    pub label: String,
}

impl DensityPair {
    pub fn new(p: GaussianMixture, q: GaussianMixture, label: impl Into<String>) -> Self {
        Self {
            p,
            q,
            label: label.into(),
        }
    }

    /// `N(mu_p, σ²)` against `N(mu_q, σ²)`.
    pub fn gaussian_shift(sigma: f64, mu_p: f64, mu_q: f64) -> Result<Self> {
        Ok(Self::new(
            GaussianMixture::normal(mu_p, sigma)?,
            GaussianMixture::normal(mu_q, sigma)?,
            format!("N({mu_p},{sigma}^2)|N({mu_q},{sigma}^2)"),
        ))
    }

    /// Remove-direction pair of the Poisson-subsampled Gaussian.
    pub fn subsampled_remove(q: f64, sigma: f64) -> Result<Self> {
        let mix = if q < 1.0 {
            GaussianMixture::new(vec![(1.0 - q, 0.0, sigma), (q, 1.0, sigma)])?
        } else {
            GaussianMixture::normal(1.0, sigma)?
        };
        Ok(Self::new(
            mix,
            GaussianMixture::normal(0.0, sigma)?,
            format!("subsampled-remove(q={q},sigma={sigma})"),
        ))
    }

    pub fn subsampled_add(q: f64, sigma: f64) -> Result<Self> {
        let r = Self::subsampled_remove(q, sigma)?;
        Ok(Self::new(r.q, r.p, format!("subsampled-add(q={q},sigma={sigma})")))
    }

    pub fn reversed(&self) -> Self {
        Self::new(self.q.clone(), self.p.clone(), format!("reversed[{}]", self.label))
    }

    fn window(&self) -> (f64, f64) {
        let (a, b) = self.p.window();
        let (c, d) = self.q.window();
        (a.min(c), b.max(d))
    }

    fn resolution(&self) -> f64 {
        self.p.min_sd().min(self.q.min_sd())
    }
}

/// `∫ max(f, 0)` over `[a, b]`: sign changes of `f` are located on a scan
/// grid and refined by bisection, then each positive piece is integrated
/// adaptively.
fn positive_part_integral<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, piece: f64) -> f64 {
    let xs: Vec<f64> = (0..=SCAN_POINTS)
        .map(|i| a + (b - a) * i as f64 / SCAN_POINTS as f64)
        .collect();
    let mut cuts = vec![a];
    for w in xs.windows(2) {
        let (l, r) = (w[0], w[1]);
        let (fl, fr) = (f(l), f(r));
        if (fl > 0.0) != (fr > 0.0) {
            let root = if fl > 0.0 {
                bisect_predicate(|x| f(x) <= 0.0, l, r, 1e-15 * (1.0 + l.abs()))
            } else {
                bisect_predicate(|x| f(x) > 0.0, l, r, 1e-15 * (1.0 + l.abs()))
            };
            cuts.push(root);
        }
    }
    cuts.push(b);
    let mut total = CompensatedSum::default();
    for w in cuts.windows(2) {
        let (l, r) = (w[0], w[1]);
        if r <= l {
            continue;
        }
        let mid = 0.5 * (l + r);
        if f(mid) <= 0.0 {
            continue;
        }
        let pts = breakpoints(l, r, piece);
        total.add(integrate_pieces(|x| f(x).max(0.0), &pts, quad()).value);
    }
    total.value()
}

/// `H_{e^eps}(P || Q) = ∫ max(P - e^eps Q, 0)`.
pub fn hs_divergence_quadrature(pair: &DensityPair, eps: f64) -> f64 {
    let (a, b) = pair.window();
    let scale = eps.exp();
    let f = |x: f64| {
        let qv = pair.q.pdf(x);
        pair.p.pdf(x) - if qv == 0.0 { 0.0 } else { scale * qv }
    };
    positive_part_integral(f, a, b, pair.resolution() / 2.0).clamp(0.0, 1.0)
}

/// Probability that coordinate `i` attains the maximum of
/// `mu_j + N(0, σ²)` over `j`.
pub fn rnm_outcome_probabilities(mu: &[f64], sigma: f64) -> Vec<f64> {
    let lo = mu.iter().copied().fold(f64::INFINITY, f64::min) - 10.0 * sigma;
    let hi = mu.iter().copied().fold(f64::NEG_INFINITY, f64::max) + 10.0 * sigma;
    let pts = breakpoints(lo, hi, sigma / 2.0);
    (0..mu.len())
        .map(|i| {
            let f = |t: f64| {
                let mut v = normal_pdf((t - mu[i]) / sigma) / sigma;
                for (j, &mj) in mu.iter().enumerate() {
                    if j != i {
                        v *= normal_cdf((t - mj) / sigma);
                    }
                }
                v
            };
            integrate_pieces(f, &pts, quad()).value
        })
        .collect()
}

fn check_rnm_instance(mu: &[f64], mu_prime: &[f64], sigma: f64) -> Result<()> {
    if mu.len() != mu_prime.len() {
        return Err(invalid("mu_prime", "score vectors must have equal length"));
    }
    if !(2..=8).contains(&mu.len()) {
        return Err(invalid(
            "mu",
            format!("the oracle handles 2..=8 candidates, got {}", mu.len()),
        ));
    }
    if !(sigma > 0.0) {
        return Err(invalid("sigma", "must be positive"));
    }
    for (i, (a, b)) in mu.iter().zip(mu_prime).enumerate() {
        let gap = (a - b).abs();
        if gap > 1.0 + 1e-12 {
            return Err(Error::SensitivityViolation { index: i, gap });
        }
    }
    Ok(())
}

fn discrete_hockey_stick(p: &[f64], q: &[f64], eps: f64) -> f64 {
    let e = eps.exp();
    let mut s = CompensatedSum::default();
    for (a, b) in p.iter().zip(q) {
        s.add((a - e * b).max(0.0));
    }
    s.value().clamp(0.0, 1.0)
}

/// Exact hockey-stick divergence between the argmax distributions of
/// neighbouring score vectors.
pub fn rnm_exact_divergence(mu: &[f64], mu_prime: &[f64], sigma: f64, eps: f64) -> Result<f64> {
    check_rnm_instance(mu, mu_prime, sigma)?;
    let p = rnm_outcome_probabilities(mu, sigma);
    let q = rnm_outcome_probabilities(mu_prime, sigma);
    Ok(discrete_hockey_stick(&p, &q, eps))
}

/// Divergence of the joint outcome of several independent rounds, each with
/// its own pair of neighbouring score vectors.
pub fn rnm_exact_divergence_rounds(rounds: &[(Vec<f64>, Vec<f64>)], sigma: f64, eps: f64) -> Result<f64> {
    if rounds.is_empty() {
        return Err(invalid("rounds", "at least one round is required"));
    }
    let mut joint_p = vec![1.0];
    let mut joint_q = vec![1.0];
    for (mu, mu_prime) in rounds {
        check_rnm_instance(mu, mu_prime, sigma)?;
        let p = rnm_outcome_probabilities(mu, sigma);
        let q = rnm_outcome_probabilities(mu_prime, sigma);
        joint_p = joint_p.iter().flat_map(|a| p.iter().map(move |b| a * b)).collect();
        joint_q = joint_q.iter().flat_map(|a| q.iter().map(move |b| a * b)).collect();
    }
    Ok(discrete_hockey_stick(&joint_p, &joint_q, eps))
}

/// Density of the selected score when `K ~ dist` independent draws from
/// `base` are taken and the largest is released.
pub fn selection_density(base: &GaussianMixture, dist: &CountDistribution, y: f64) -> f64 {
    let f = base.cdf(y).clamp(0.0, 1.0);
    base.pdf(y) * dist.pgf_deriv(f).unwrap_or(0.0)
}

/// Exact `H_{e^eps}` between the selection outputs on the two sides of a
/// base pair.
pub fn selection_exact_divergence(pair: &DensityPair, dist: &CountDistribution, eps: f64) -> Result<f64> {
    if dist.prob_zero() > 0.0 && !(eps > 0.0) {
        return Err(Error::Domain(
            "families that can select nothing are only compared at eps > 0".into(),
        ));
    }
    let (a, b) = pair.window();
    let scale = eps.exp();
    let f = |y: f64| selection_density(&pair.p, dist, y) - scale * selection_density(&pair.q, dist, y);
    Ok(positive_part_integral(f, a, b, pair.resolution() / 2.0).clamp(0.0, 1.0))
}

/// `P(best <= y | K >= 1)`.
pub fn selection_best_cdf(base: &GaussianMixture, dist: &CountDistribution, y: f64) -> f64 {
    let p0 = dist.prob_zero();
    let phi = dist.pgf(base.cdf(y).clamp(0.0, 1.0)).unwrap_or(1.0);
    ((phi - p0) / (1.0 - p0)).clamp(0.0, 1.0)
}

/// `E[best | K >= 1]` by quadrature of the selection density.
pub fn selection_best_mean(base: &GaussianMixture, dist: &CountDistribution) -> f64 {
    let (a, b) = base.window();
    // the maximum of many draws sits to the right of the base window
    let b = b + 2.0 * base.components().iter().map(|c| c.2).fold(0.0, f64::max);
    let pts = breakpoints(a, b, base.min_sd() / 4.0);
    let num = integrate_pieces(|y| y * selection_density(base, dist, y), &pts, quad()).value;
    num / (1.0 - dist.prob_zero())
}

#[derive(Debug, Clone, PartialEq)]
pub struct EcdfPoint {
    pub y: f64,
    pub value: f64,
    pub radius: f64,
}

/// Summary of simulated selection runs.
#[derive(Debug, Clone, PartialEq)]
pub struct McSummary {
    pub trials: u64,
    /// Runs with `K = 0` (nothing released).
    pub empty: u64,
    pub mean_best: f64,
    pub mean_radius: f64,
    pub ecdf: Vec<EcdfPoint>,
}

const MC_SHARDS: u64 = 8;
pub const MC_MIN_TRIALS: u64 = 100_000;

/// Simulates `trials` runs of best-of-`K` selection from `base`.
///
/// Trials are split over a fixed number of shards, each with its own
/// ChaCha8 stream of the master seed, so the summary does not depend on the
/// number of threads.
pub fn mc_selection_sample(
    base: &GaussianMixture,
    dist: &CountDistribution,
    trials: u64,
    seed: u64,
    probes: &[f64],
) -> Result<McSummary> {
    if trials < MC_MIN_TRIALS {
        return Err(invalid(
            "trials",
            format!("at least {MC_MIN_TRIALS} trials are required"),
        ));
    }
    let support = dist.truncated_support();
    let mut cumulative = Vec::with_capacity(support.len());
    let mut acc = 0.0;
    for &(_, p) in &support {
        acc += p;
        cumulative.push(acc);
    }
    let shard_results: Vec<(u64, u64, f64, f64, Vec<u64>)> = std::thread::scope(|scope| {
        let handles: Vec<_> = (0..MC_SHARDS)
            .map(|shard| {
                let cumulative = &cumulative;
                let n = trials / MC_SHARDS + u64::from(shard < trials % MC_SHARDS);
                scope.spawn(move || {
                    let mut rng = ChaCha8Rng::seed_from_u64(seed);
                    rng.set_stream(shard);
                    let (mut empty, mut nonempty) = (0u64, 0u64);
                    let (mut sum, mut sum_sq) = (0.0, 0.0);
                    let mut below = vec![0u64; probes.len()];
                    for _ in 0..n {
                        let u: f64 = rng.gen();
                        let k = cumulative.partition_point(|&c| c < u).min(cumulative.len() - 1);
                        if k == 0 {
                            empty += 1;
                            continue;
                        }
                        let best = (0..k).map(|_| base.sample(&mut rng)).fold(f64::NEG_INFINITY, f64::max);
                        nonempty += 1;
                        sum += best;
                        sum_sq += best * best;
                        for (c, &y) in below.iter_mut().zip(probes) {
                            if best <= y {
                                *c += 1;
                            }
                        }
                    }
                    (empty, nonempty, sum, sum_sq, below)
                })
            })
            .collect();
        handles.into_iter().map(|h| h.join().expect("shard panicked")).collect()
    });
    let (mut empty, mut nonempty, mut sum, mut sum_sq) = (0u64, 0u64, 0.0, 0.0);
    let mut below = vec![0u64; probes.len()];
    for (e, ne, s, s2, b) in shard_results {
        empty += e;
        nonempty += ne;
        sum += s;
        sum_sq += s2;
        below.iter_mut().zip(b).for_each(|(x, y)| *x += y);
    }
    let n = nonempty.max(1) as f64;
    let mean = sum / n;
    let var = (sum_sq / n - mean * mean).max(0.0);
    let ecdf = probes
        .iter()
        .zip(&below)
        .map(|(&y, &c)| {
            let p = c as f64 / n;
            EcdfPoint {
                y,
                value: p,
                radius: 3.0 * (p * (1.0 - p) / n).sqrt(),
            }
        })
        .collect();
    Ok(McSummary {
        trials,
        empty,
        mean_best: mean,
        mean_radius: 3.0 * (var / n).sqrt(),
        ecdf,
    })
}

/// Plain adaptive integral of a mixture density over its window, used to
/// check normalization.
pub fn mixture_mass(m: &GaussianMixture) -> f64 {
    let (a, b) = m.window();
    integrate(|x| m.pdf(x), a, b, quad()).value
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identical_pair_has_zero_divergence() {
        let pair = DensityPair::gaussian_shift(4.0, 0.0, 0.0).unwrap();
        assert_eq!(hs_divergence_quadrature(&pair, 0.0), 0.0);
    }

    #[test]
    fn gaussian_total_variation() {
        let pair = DensityPair::gaussian_shift(4.0, 1.0, 0.0).unwrap();
        let tv = hs_divergence_quadrature(&pair, 0.0);
        assert!((tv - 0.099_476_449_660_225_786).abs() < 1e-13);
        let d1 = hs_divergence_quadrature(&pair, 1.0);
        assert!((d1 - 2.924_272_104_856_407e-6).abs() < 1e-15);
    }

    #[test]
    fn subsampled_pair_reference() {
        let q = 256.0 / 60000.0;
        let r = DensityPair::subsampled_remove(q, 1.1).unwrap();
        let a = DensityPair::subsampled_add(q, 1.1).unwrap();
        // 40-digit quadrature references
        assert!((hs_divergence_quadrature(&r, 0.0) / 1.495_738_522_765_847e-3 - 1.0).abs() < 1e-10);
        assert!((hs_divergence_quadrature(&a, 0.0) / 1.495_738_522_765_847e-3 - 1.0).abs() < 1e-10);
        assert!((hs_divergence_quadrature(&r, 0.5) / 1.162_370_464_016e-10 - 1.0).abs() < 1e-8);
        assert!((hs_divergence_quadrature(&r, 1.0) / 2.095_803_524_834_373e-13 - 1.0).abs() < 1e-6);
        assert_eq!(hs_divergence_quadrature(&a, 1.0), 0.0);
    }

    #[test]
    fn rnm_toy_instance() {
        let p = rnm_outcome_probabilities(&[0.0, 0.0], 1.0);
        assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        let d = rnm_exact_divergence(&[0.0, 0.0], &[-1.0, 1.0], 1.0, 0.0).unwrap();
        // 1/2 - Φ(-√2)
        assert!((d - 0.421_350_396_474_857_4).abs() < 1e-12);
        assert_eq!(rnm_exact_divergence(&[0.5, 1.0], &[0.5, 1.0], 1.0, 0.0).unwrap(), 0.0);
        let err = rnm_exact_divergence(&[0.0, 0.0], &[0.0, 1.5], 1.0, 0.0);
        assert!(matches!(err, Err(Error::SensitivityViolation { index: 1, .. })));
    }

    #[test]
    fn single_draw_selection_is_base_divergence() {
        let pair = DensityPair::gaussian_shift(4.0, 0.0, 1.0).unwrap();
        let dist = CountDistribution::binomial(1, 1.0 - 1e-12).unwrap();
        for eps in [0.5, 1.0] {
            let sel = selection_exact_divergence(&pair, &dist, eps).unwrap();
            let base = hs_divergence_quadrature(&pair, eps);
            assert!((sel - base).abs() < 1e-9);
        }
        let dist = CountDistribution::poisson(3.0).unwrap();
        assert!(selection_exact_divergence(&pair, &dist, 0.0).is_err());
    }

    #[test]
    fn selection_density_integrates_to_nonempty_mass() {
        let base = GaussianMixture::normal(0.0, 1.0).unwrap();
        let dist = CountDistribution::poisson(5.0).unwrap();
        let pts = breakpoints(-9.0, 12.0, 0.25);
        let mass = integrate_pieces(|y| selection_density(&base, &dist, y), &pts, quad()).value;
        assert!((mass - (1.0 - (-5.0f64).exp())).abs() < 1e-12);
    }

    #[test]
    fn monte_carlo_is_reproducible() {
        let base = GaussianMixture::normal(0.0, 1.0).unwrap();
        let dist = CountDistribution::poisson(5.0).unwrap();
        let a = mc_selection_sample(&base, &dist, 100_000, 7, &[0.0, 1.0]).unwrap();
        let b = mc_selection_sample(&base, &dist, 100_000, 7, &[0.0, 1.0]).unwrap();
        assert_eq!(a, b);
        assert!(mc_selection_sample(&base, &dist, 10, 7, &[]).is_err());
    }
}
