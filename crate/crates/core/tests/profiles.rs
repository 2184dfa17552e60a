use privsel::oracles::{hs_divergence_quadrature, DensityPair};
use privsel::profiles::*;
use privsel::PointDP;
use proptest::prelude::*;

#[test]
fn gaussian_profile_at_point_masses() {
    let p = gaussian_profile(4.0, 1.0).unwrap();
    assert!((p.delta(0.0) - 0.099_476_449_660_225_786).abs() < 1e-15);
    assert!((p.delta(1.0) / 2.924_272_104_856_407e-6 - 1.0).abs() < 1e-10);
    let e = epsilon_for_delta(&gaussian_profile(4.0, 2.0).unwrap(), 1e-6).unwrap();
    assert!((e - 2.254_084_650_219_74).abs() < 2e-6);
}

#[test]
fn sigma_calibration_reference() {
    let s = gaussian_sigma_for_eps_delta(1.5, 1e-6).unwrap();
    assert!((s / 2.904_057_947_019_019_4 - 1.0).abs() < 1e-11);
    let e = epsilon_for_delta(&gaussian_profile(s, 1.0).unwrap(), 1e-6).unwrap();
    assert!((e - 1.5).abs() < 2e-6);
}

#[test]
fn pointwise_profile_examples() {
    let p = profile_from_points(&[PointDP::new(0.0, 0.5).unwrap(), PointDP::new(1.0, 0.1).unwrap()]).unwrap();
    assert_eq!(p.delta(0.0), 0.5);
    assert_eq!(p.delta(1.0), 0.1);
    // min(0.5, 0.1 + e - e^0.5)
    let expected = (0.1 + std::f64::consts::E - 0.5f64.exp()).min(0.5);
    assert!((p.delta(0.5) - expected).abs() < 1e-15);
    assert!(profile_from_points(&[]).is_err());
}

#[test]
fn gaussian_rdp_conversion() {
    let curve = gaussian_rdp_curve(4.0, 1.0, &default_alpha_grid()).unwrap();
    let d = rdp_to_dp(&curve, 1.0);
    assert!((d / 1.233_330_423_741_85e-5 - 1.0).abs() < 1e-9);
    // the dense-grid optimum lies just below the default-grid value
    assert!(d >= 1.225_308_126_165_95e-5);
    let p = gaussian_profile(4.0, 1.0).unwrap();
    assert!(p.delta(1.0) <= d);
}

#[test]
fn gaussian_profile_matches_quadrature_off_grid() {
    for (sigma, sens) in [(0.7, 1.0), (2.5, 3.0)] {
        let prof = gaussian_profile(sigma, sens).unwrap();
        let pair = DensityPair::gaussian_shift(sigma, sens, 0.0).unwrap();
        for eps in [0.13, 0.77, 1.9, 3.3] {
            assert!((prof.delta(eps) - hs_divergence_quadrature(&pair, eps)).abs() < 1e-10);
        }
    }
}

proptest! {
    #[test]
    fn gaussian_profile_is_a_valid_profile(sigma in 0.2f64..20.0, sens in 0.1f64..5.0, e1 in 0.0f64..30.0, e2 in 0.0f64..30.0) {
        let p = gaussian_profile(sigma, sens).unwrap();
        let (a, b) = if e1 < e2 { (e1, e2) } else { (e2, e1) };
        let (da, db) = (p.delta(a), p.delta(b));
        prop_assert!((0.0..=1.0).contains(&da));
        prop_assert!(db <= da + 1e-16);
    }

    #[test]
    fn epsilon_for_delta_inverts(sigma in 0.5f64..10.0, log_delta in -12.0f64..-2.0) {
        let p = gaussian_profile(sigma, 1.0).unwrap();
        let delta = 10f64.powf(log_delta);
        let e = epsilon_for_delta(&p, delta).unwrap();
        prop_assert!(p.delta(e) <= delta);
        if e > 2e-6 {
            prop_assert!(p.delta(e - 2e-6) > delta);
        }
    }

    #[test]
    fn conversion_is_non_increasing(sigma in 0.5f64..10.0, e1 in 0.0f64..10.0, e2 in 0.0f64..10.0) {
        let c = gaussian_rdp_curve(sigma, 1.0, &default_alpha_grid()).unwrap();
        let (a, b) = if e1 < e2 { (e1, e2) } else { (e2, e1) };
        prop_assert!(rdp_to_dp(&c, b) <= rdp_to_dp(&c, a) + 1e-16);
        // the conversion never beats the exact profile
        prop_assert!(gaussian_profile(sigma, 1.0).unwrap().delta(a) <= rdp_to_dp(&c, a) * (1.0 + 1e-9) + 1e-300);
    }

    #[test]
    fn closed_form_rdp_inversion(sigma in 0.5f64..10.0, log_delta in -12.0f64..-2.0) {
        let c = gaussian_rdp_curve(sigma, 1.0, &default_alpha_grid()).unwrap();
        let delta = 10f64.powf(log_delta);
        let e = rdp_epsilon_for_delta(&c, delta).unwrap();
        prop_assert!(rdp_to_dp(&c, e) <= delta * (1.0 + 1e-9));
        prop_assert!(rdp_to_dp(&c, (e - 1e-6).max(0.0)) >= delta * (1.0 - 1e-9) || e < 1e-6);
    }

    #[test]
    fn pointwise_extension_is_exact_at_points(e0 in 0.0f64..2.0, gap in 0.01f64..2.0, d0 in 0.0f64..1.0, ratio in 0.0f64..1.0) {
        let pts = [PointDP::new(e0, d0).unwrap(), PointDP::new(e0 + gap, d0 * ratio).unwrap()];
        let p = profile_from_points(&pts).unwrap();
        prop_assert_eq!(p.delta(e0 + gap), d0 * ratio);
        prop_assert!(p.delta(e0) <= d0);
        prop_assert!(p.delta(e0 + gap / 2.0) <= d0);
    }
}
