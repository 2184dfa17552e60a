use privsel::oracles::rnm_exact_divergence;
use privsel::profiles::{
    default_alpha_grid, epsilon_for_delta, gaussian_profile, gaussian_rdp_curve, rdp_epsilon_for_delta,
};
use privsel::rnm::*;
use privsel::validation::{rnm_soundness_sweep, rnm_two_round_sweep};
use privsel::Error;

#[test]
fn closed_form_dominates_for_every_candidate_count() {
    let base = gaussian_profile(4.0, 2.0).unwrap();
    for m in 1..=10_000u64 {
        let exact = epsilon_for_delta(&rnm_profile(&base, m), 1e-6).unwrap();
        let closed = rnm_gaussian_eps(4.0, m, 1e-6).unwrap();
        assert!(closed >= exact - 1e-6, "m={m}: {closed} < {exact}");
    }
}

#[test]
fn profile_bound_beats_rdp_bound() {
    let base = gaussian_profile(4.0, 2.0).unwrap();
    let rdp = gaussian_rdp_curve(4.0, 2.0, &default_alpha_grid()).unwrap();
    for m in [2u64, 10, 100, 1000] {
        let hs = epsilon_for_delta(&rnm_profile(&base, m), 1e-6).unwrap();
        let r = rdp_epsilon_for_delta(&rnm_rdp_curve(&rdp, m).unwrap(), 1e-6).unwrap();
        assert!(hs < r, "m={m}");
    }
}

#[test]
fn adversarial_and_monotone_configurations_are_covered() {
    let s = rnm_soundness_sweep().unwrap();
    assert!(s.passed(), "{:?}", s.violations);
    // (2+3+5) * 2 sigmas * (general + monotone configs) * 4 eps values
    assert!(s.checked > 400);
    // the bound is not vacuous on these instances
    assert!(s.max_ratio > 0.1);
}

#[test]
fn two_round_oracle_is_dominated() {
    let s = rnm_two_round_sweep().unwrap();
    assert!(s.passed(), "{:?}", s.violations);
}

#[test]
fn toy_instance_total_variation() {
    // two candidates, one moves down and the other up
    let d = rnm_exact_divergence(&[0.0, 0.0], &[-1.0, 1.0], 1.0, 0.0).unwrap();
    assert!((d - 0.421_350_396_474_857_434_67).abs() < 1e-12);
    let bound = rnm_profile(&gaussian_profile(1.0, 2.0).unwrap(), 2);
    assert!(d <= bound.delta(0.0));
}

#[test]
fn oracle_rejects_out_of_range_instances() {
    assert!(rnm_exact_divergence(&[0.0], &[0.0], 1.0, 0.0).is_err());
    assert!(rnm_exact_divergence(&[0.0; 9], &[0.0; 9], 1.0, 0.0).is_err());
    assert!(matches!(
        rnm_exact_divergence(&[0.0, 0.0], &[2.0, 0.0], 1.0, 0.0),
        Err(Error::SensitivityViolation { index: 0, .. })
    ));
}

#[test]
fn monotone_spec_uses_unit_sensitivity() {
    let general = RnmSpec::gaussian(10, 4.0, false).unwrap();
    let monotone = RnmSpec::gaussian(10, 4.0, true).unwrap();
    let (g, m) = (general.profile().unwrap(), monotone.profile().unwrap());
    for e in [0.0, 1.0, 2.0] {
        assert!(m.delta(e) <= g.delta(e));
    }
    assert!(RnmSpec::gaussian(0, 4.0, false).is_err());
}

#[test]
fn bounds_grow_with_candidates() {
    let base = gaussian_profile(2.0, 2.0).unwrap();
    for e in [0.5, 1.0, 3.0] {
        let mut prev = 0.0;
        for m in [1u64, 2, 5, 50, 500] {
            let d = rnm_profile(&base, m).delta(e);
            assert!(d >= prev && d <= 1.0);
            prev = d;
        }
    }
}
