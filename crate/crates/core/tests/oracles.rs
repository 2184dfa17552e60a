use privsel::count_dist::CountDistribution;
use privsel::oracles::*;
use privsel::profiles::gaussian_profile;
use privsel::Error;

#[test]
fn mixtures_are_normalized() {
    let m = GaussianMixture::new(vec![(0.3, -1.0, 0.5), (0.7, 2.0, 1.5)]).unwrap();
    assert!((mixture_mass(&m) - 1.0).abs() < 1e-12);
    assert!((m.cdf(0.4) + m.sf(0.4) - 1.0).abs() < 1e-15);
    assert!(GaussianMixture::new(vec![(0.5, 0.0, 1.0)]).is_err());
    assert!(GaussianMixture::new(vec![(1.0, 0.0, -1.0)]).is_err());
}

#[test]
fn quadrature_matches_closed_gaussian_profile() {
    for sigma in [0.5, 1.0, 3.0] {
        let pair = DensityPair::gaussian_shift(sigma, 1.0, 0.0).unwrap();
        let exact = gaussian_profile(sigma, 1.0).unwrap();
        for eps in [0.0, 0.25, 1.0, 2.5] {
            assert!((hs_divergence_quadrature(&pair, eps) - exact.delta(eps)).abs() < 1e-11);
        }
    }
}

#[test]
fn rnm_outcomes_sum_to_one() {
    let p = rnm_outcome_probabilities(&[0.0, 0.4, -1.2, 2.0], 1.3);
    assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-12);
    // equal scores split evenly
    let p = rnm_outcome_probabilities(&[1.0, 1.0, 1.0], 2.0);
    assert!(p.iter().all(|x| (x - 1.0 / 3.0).abs() < 1e-12));
}

#[test]
fn multi_round_oracle_factorizes() {
    let r = (vec![0.0, 0.0], vec![1.0, -1.0]);
    let one = rnm_exact_divergence(&r.0, &r.1, 1.0, 0.0).unwrap();
    let two = rnm_exact_divergence_rounds(&[r.clone(), r], 1.0, 0.0).unwrap();
    // total variation over a product is sub-additive and at least the marginal
    assert!(two >= one - 1e-12 && two <= 2.0 * one + 1e-12);
}

#[test]
fn selection_density_matches_cdf() {
    let base = GaussianMixture::normal(0.0, 1.0).unwrap();
    let dist = CountDistribution::geometric(0.2).unwrap();
    // the density of the best of K integrates to the cdf increment
    let (a, b) = (-0.5, 1.5);
    let n = 4000;
    let h = (b - a) / n as f64;
    let integral: f64 = (0..n)
        .map(|i| selection_density(&base, &dist, a + (i as f64 + 0.5) * h) * h)
        .sum();
    let diff = selection_best_cdf(&base, &dist, b) - selection_best_cdf(&base, &dist, a);
    assert!((integral - diff).abs() < 1e-6);
}

#[test]
fn selection_oracle_is_zero_for_identical_inputs() {
    let pair = DensityPair::gaussian_shift(1.0, 0.0, 0.0).unwrap();
    let dist = CountDistribution::poisson(4.0).unwrap();
    assert!(selection_exact_divergence(&pair, &dist, 1.0).unwrap() < 1e-14);
    // the empty-output atom makes eps <= 0 ill-posed for Poisson counts
    assert!(matches!(
        selection_exact_divergence(&pair, &dist, 0.0),
        Err(Error::Domain(_))
    ));
}

#[test]
fn monte_carlo_agrees_with_quadrature() {
    let base = GaussianMixture::new(vec![(0.5, 0.0, 1.0), (0.5, 1.0, 0.5)]).unwrap();
    for dist in [
        CountDistribution::geometric(0.25).unwrap(),
        CountDistribution::binomial(6, 0.5).unwrap(),
    ] {
        let probes = [0.0, 0.8, 1.5, 2.5];
        let mc = mc_selection_sample(&base, &dist, 200_000, 7, &probes).unwrap();
        let mean = selection_best_mean(&base, &dist);
        assert!(
            (mc.mean_best - mean).abs() <= mc.mean_radius + 1e-3,
            "{} vs {mean}",
            mc.mean_best
        );
        for p in &mc.ecdf {
            let exact = selection_best_cdf(&base, &dist, p.y);
            assert!(
                (p.value - exact).abs() <= p.radius + 1e-3,
                "y={}: {} vs {exact}",
                p.y,
                p.value
            );
        }
    }
}

#[test]
fn monte_carlo_is_reproducible() {
    let base = GaussianMixture::normal(0.0, 1.0).unwrap();
    let dist = CountDistribution::poisson(3.0).unwrap();
    let a = mc_selection_sample(&base, &dist, MC_MIN_TRIALS, 99, &[0.5]).unwrap();
    let b = mc_selection_sample(&base, &dist, MC_MIN_TRIALS, 99, &[0.5]).unwrap();
    assert_eq!(a, b);
    let c = mc_selection_sample(&base, &dist, MC_MIN_TRIALS, 100, &[0.5]).unwrap();
    assert_ne!(a.mean_best, c.mean_best);
    // about e^-3 of the runs release nothing
    let frac = a.empty as f64 / a.trials as f64;
    assert!((frac - (-3f64).exp()).abs() < 3e-3);
    assert!(mc_selection_sample(&base, &dist, MC_MIN_TRIALS - 1, 1, &[]).is_err());
}
