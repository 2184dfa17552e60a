use privsel::{CountDistribution, CountFamily};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn support_sum(d: &CountDistribution) -> (f64, f64) {
    d.truncated_support()
        .iter()
        .fold((0.0, 0.0), |(s, m), &(k, p)| (s + p, m + k as f64 * p))
}

#[test]
fn logarithmic_limit_mean() {
    // η = 0 is the logarithmic law on {1, 2, ...}
    let d = CountDistribution::trunc_neg_binomial(0.0, 0.1).unwrap();
    assert!((d.mean() - 3.908_650_337_129_266_4).abs() < 1e-13);
    let d = CountDistribution::from_expected(CountFamily::TruncNegBinomial { eta: 0.0 }, 10.0).unwrap();
    let CountDistribution::TruncNegBinomial { gamma, .. } = d else {
        panic!()
    };
    assert!((gamma - 0.026_918_259_600_680_22).abs() < 1e-12);
}

#[test]
fn geometric_mean_is_inverse_rate() {
    let d = CountDistribution::from_expected(CountFamily::TruncNegBinomial { eta: 1.0 }, 30.0).unwrap();
    assert_eq!(d, CountDistribution::geometric(1.0 / 30.0).unwrap());
}

#[test]
fn infeasible_means_are_rejected() {
    assert!(CountDistribution::from_expected(CountFamily::Binomial { n: 10 }, 10.0).is_err());
    assert!(CountDistribution::from_expected(CountFamily::TruncNegBinomial { eta: 1.0 }, 1.0).is_err());
    assert!(CountDistribution::from_expected(CountFamily::Poisson, 0.0).is_err());
    assert!(CountDistribution::trunc_neg_binomial(-1.0, 0.5).is_err());
    assert!(CountDistribution::trunc_neg_binomial(1.0, 1.0).is_err());
}

#[test]
fn seeded_sampling_matches_mean() {
    let d = CountDistribution::trunc_neg_binomial(2.0, 0.2).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let n = 200_000;
    let total: u64 = (0..n).map(|_| d.sample(&mut rng)).sum();
    let mean = total as f64 / n as f64;
    // mean 9.6, sd about 6.6
    assert!((mean - d.mean()).abs() < 0.05, "{mean} vs {}", d.mean());
}

proptest! {
    #[test]
    fn tnb_mass_and_mean(eta in -0.9f64..5.0, gamma in 0.005f64..0.95) {
        let d = CountDistribution::trunc_neg_binomial(eta, gamma).unwrap();
        let (mass, mean) = support_sum(&d);
        prop_assert!((mass - 1.0).abs() < 1e-10);
        prop_assert!(((mean - d.mean()) / d.mean()).abs() < 1e-8);
        prop_assert_eq!(d.prob_zero(), 0.0);
        prop_assert!((d.pgf(1.0).unwrap() - 1.0).abs() < 1e-12);
        prop_assert!(((d.pgf_deriv(1.0).unwrap() - d.mean()) / d.mean()).abs() < 1e-8);
    }

    #[test]
    fn binomial_and_poisson_moments(n in 1u64..400, p in 0.01f64..0.99, mean in 0.05f64..60.0) {
        let b = CountDistribution::binomial(n, p).unwrap();
        let (mass, m) = support_sum(&b);
        prop_assert!((mass - 1.0).abs() < 1e-10);
        prop_assert!((m - n as f64 * p).abs() < 1e-8 * n as f64);
        let po = CountDistribution::poisson(mean).unwrap();
        let (mass, m) = support_sum(&po);
        prop_assert!((mass - 1.0).abs() < 1e-10);
        prop_assert!((m - mean).abs() < 1e-8 * mean.max(1.0));
        prop_assert!((po.prob_zero() - (-mean).exp()).abs() < 1e-15);
    }

    #[test]
    fn from_expected_round_trips(eta in -0.8f64..4.0, m in 1.05f64..5000.0) {
        let d = CountDistribution::from_expected(CountFamily::TruncNegBinomial { eta }, m).unwrap();
        prop_assert!(((d.mean() - m) / m).abs() < 1e-9);
    }

    #[test]
    fn cdf_is_monotone_and_quantile_consistent(eta in -0.5f64..3.0, gamma in 0.01f64..0.8, u in 0.001f64..0.999) {
        let d = CountDistribution::trunc_neg_binomial(eta, gamma).unwrap();
        let mut prev = 0.0;
        for k in 0..200 {
            let c = d.cdf(k);
            prop_assert!(c + 1e-15 >= prev);
            prev = c;
        }
        let k = d.quantile(u);
        prop_assert!(d.cdf(k) >= u - 1e-12);
        if k > 0 {
            prop_assert!(d.cdf(k - 1) < u + 1e-12);
        }
    }

    #[test]
    fn pgf_derivative_is_increasing(n in 2u64..100, p in 0.05f64..0.95, z1 in 0.0f64..1.0, z2 in 0.0f64..1.0) {
        let d = CountDistribution::binomial(n, p).unwrap();
        let (a, b) = if z1 < z2 { (z1, z2) } else { (z2, z1) };
        prop_assert!(d.pgf_deriv(a).unwrap() <= d.pgf_deriv(b).unwrap() + 1e-12);
        prop_assert!(d.pgf_deriv(1.5).is_err());
    }
}
