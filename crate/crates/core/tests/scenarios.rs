use privsel::scenarios::*;
use privsel::Error;

#[test]
fn presets_parse_and_print() {
    for p in Preset::ALL {
        assert_eq!(p.name().parse::<Preset>().unwrap(), p);
        assert_eq!(p.to_string(), p.name());
    }
    assert!(matches!("fig5".parse::<Preset>(), Err(Error::InvalidParameter { .. })));
}

#[test]
fn analytic_presets_are_deterministic_and_rectangular() {
    let opts = PresetOptions::default();
    for p in [Preset::Fig1, Preset::Fig2, Preset::Fig3, Preset::Fig4] {
        let a = run_preset(p, &opts, &Compose).unwrap();
        let b = run_preset(p, &opts, &Compose).unwrap();
        // bitwise equal, NaN included
        let bits = |t: &Vec<Table>| -> Vec<Vec<u64>> {
            t.iter()
                .flat_map(|t| t.rows.iter().map(|r| r.iter().map(|v| v.to_bits()).collect()))
                .collect()
        };
        assert_eq!(bits(&a), bits(&b), "{p}");
        for t in &a {
            assert!(!t.rows.is_empty());
            assert!(t.rows.iter().all(|r| r.len() == t.columns.len()), "{p}/{}", t.name);
        }
    }
}

#[test]
fn fig1_bounds_are_ordered() {
    let t = &fig1(&PresetOptions::default()).unwrap()[0];
    let (hs, rdp, closed) = (
        t.column("hs").unwrap(),
        t.column("rdp").unwrap(),
        t.column("closed_form").unwrap(),
    );
    assert_eq!(t.column("m").unwrap().len(), fig1_m_grid().len());
    for i in 0..hs.len() {
        assert!(hs[i] <= closed[i] + 1e-6);
        if rdp[i].is_finite() {
            assert!(hs[i] <= rdp[i] + 1e-6);
        }
    }
}

#[test]
fn fig4_tables_have_expected_shape() {
    let t = fig4(&PresetOptions::default()).unwrap();
    let prof = t.iter().find(|t| t.name == "profiles").unwrap();
    assert_eq!(prof.rows.len(), fig4_eps_grid().len());
    let cdf = t.iter().find(|t| t.name == "cdf").unwrap();
    for col in cdf.columns.iter().skip(1) {
        let c = cdf.column(col).unwrap();
        assert!(c.windows(2).all(|w| w[1] >= w[0]), "{col}");
    }
}

#[test]
fn capacity_is_larger_under_the_profile_bound() {
    let opts = PresetOptions {
        spacing: Some(2e-4),
        ..PresetOptions::default()
    };
    let t = fig7(&opts, &Compose).unwrap();
    let cap = t.iter().find(|t| t.name == "capacity").unwrap();
    for r in cap.column("ratio").unwrap() {
        assert!(r > 1.0);
    }
}

#[test]
fn adjust_rejects_empty_candidates() {
    let mut cfg = AdjustConfig::fig8(FIG8_DEFAULT_M);
    cfg.candidates.clear();
    assert!(matches!(adjust(&cfg), Err(Error::InvalidParameter { .. })));
}

#[test]
fn adjust_reports_an_unreachable_single_step() {
    let mut cfg = AdjustConfig::fig8(FIG8_DEFAULT_M);
    cfg.candidates = vec![(1.0, 0.2)];
    assert!(matches!(adjust(&cfg), Err(Error::UnreachableTarget { .. })));
}

#[test]
fn adjusted_guarantee_is_close_to_candidate_bounds() {
    let mut cfg = AdjustConfig::fig8(FIG8_DEFAULT_M);
    cfg.candidates = vec![(0.01, 3.0)];
    cfg.grid = cfg.grid.with_spacing(2e-4);
    let (th, rows) = adjust(&cfg).unwrap();
    assert!(th.eps_hat > th.eps1);
    let r = rows[0];
    assert!(r.candidate_eps <= r.adjust_eps + 1e-6);
    assert!(r.gap < 0.1);
    assert!(r.steps > 5000 && r.steps < 15000, "{}", r.steps);
}
