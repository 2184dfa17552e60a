use std::path::Path;
use std::process::{Command, Output};

fn privsel(args: &[&str], cache: Option<&Path>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_privsel"));
    cmd.args(args).env_remove("PRIVSEL_PLD_CACHE");
    if let Some(dir) = cache {
        cmd.env("PRIVSEL_PLD_CACHE", dir);
    }
    cmd.output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn write_config(dir: &Path, name: &str, body: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, body).unwrap();
    p.to_str().unwrap().to_string()
}

#[test]
fn gaussian_profile_has_51_rows() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "g.json",
        r#"{"base": {"gaussian": {"sigma": 4, "sensitivity": 1}}}"#,
    );
    let o = privsel(&["profile", "--config", &cfg], None);
    assert!(o.status.success());
    let text = stdout(&o);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "eps,delta");
    assert_eq!(lines.len(), 52);
    let deltas: Vec<f64> = lines[1..]
        .iter()
        .map(|l| l.split(',').nth(1).unwrap().parse().unwrap())
        .collect();
    assert!(deltas.windows(2).all(|w| w[1] <= w[0]));
    assert_eq!(lines[1], "0,0.0994764496602");
}

#[test]
fn malformed_config_exits_with_2() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "bad.json",
        "{\"base\": {\"gaussian\": {\n \"sigma\": \"four\"}}}",
    );
    let o = privsel(&["profile", "--config", &cfg], None);
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("line 2") && err.contains("base.gaussian.sigma"), "{err}");
    // decreasing grids are config errors as well
    let cfg = write_config(
        dir.path(),
        "grid.json",
        r#"{"base": {"pure": {"eps": 1}}, "eps_grid": [1, 0.5]}"#,
    );
    assert_eq!(privsel(&["profile", "--config", &cfg], None).status.code(), Some(2));
}

#[test]
fn unknown_preset_exits_with_2() {
    assert_eq!(privsel(&["compare", "fig5"], None).status.code(), Some(2));
}

#[test]
fn empty_candidate_list_exits_with_2() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "a.json", r#"{"adjust": {"candidates": []}}"#);
    assert_eq!(privsel(&["adjust", "--config", &cfg], None).status.code(), Some(2));
}

#[test]
fn pure_base_gives_three_eps() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "p.json",
        r#"{"base": {"pure": {"eps": 1}}, "family": {"negbin": {"eta": 1, "m": 10}}}"#,
    );
    for method in ["hs", "closed-form"] {
        let o = privsel(&["guarantee", "--config", &cfg, "--method", method], None);
        assert!(o.status.success());
        assert!(stdout(&o).starts_with("eps=3 delta=1e-6 method="), "{}", stdout(&o));
    }
}

#[test]
fn guarantee_matches_the_fig2_row() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "g.json",
        r#"{"base": {"gaussian": {"sigma": 4}}, "family": {"negbin": {"eta": 1, "m": 30}}}"#,
    );
    let o = privsel(
        &[
            "guarantee",
            "--config",
            &cfg,
            "--delta",
            "1e-6",
            "--m",
            "300",
            "--format",
            "json",
        ],
        None,
    );
    assert!(o.status.success());
    let g: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    let table = stdout(&privsel(&["compare", "fig2"], None));
    let row: Vec<&str> = table
        .lines()
        .find(|l| l.starts_with("300,"))
        .unwrap()
        .split(',')
        .collect();
    let fig2: f64 = row[1].parse().unwrap();
    assert!((g["eps"].as_f64().unwrap() - fig2).abs() < 1e-9);
    assert_eq!(g["method"], "hs");
    assert!(g["eps1"].as_f64().unwrap() > 0.0);
}

#[test]
fn total_variation_of_the_base() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "g.json", r#"{"base": {"gaussian": {"sigma": 4}}}"#);
    let o = privsel(&["guarantee", "--config", &cfg, "--eps", "0"], None);
    assert_eq!(stdout(&o).trim(), "eps=0 delta=0.0994764496602 method=hs eps1=none");
}

#[test]
fn flags_override_the_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "g.json",
        r#"{"base": {"gaussian": {"sigma": 4}}, "family": {"poisson": {"m": 10}}, "method": "rdp", "delta": 1e-3}"#,
    );
    let file = stdout(&privsel(&["guarantee", "--config", &cfg], None));
    assert!(file.contains("delta=0.001 method=rdp"), "{file}");
    let flag = stdout(&privsel(
        &["guarantee", "--config", &cfg, "--delta", "1e-6", "--method", "hs"],
        None,
    ));
    assert!(flag.contains("delta=1e-6 method=hs"), "{flag}");
}

#[test]
fn unreachable_target_exits_with_3() {
    let dir = tempfile::tempdir().unwrap();
    // a single point guarantee never gets below its own delta
    let cfg = write_config(
        dir.path(),
        "p.json",
        r#"{"base": {"pointwise": {"points": [[1.0, 0.01]]}}, "family": {"poisson": {"m": 5}}}"#,
    );
    assert_eq!(
        privsel(&["guarantee", "--config", &cfg, "--delta", "1e-6"], None)
            .status
            .code(),
        Some(3)
    );
}

#[test]
fn coarse_grid_exits_with_4() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "s.json",
        r#"{"base": {"subsampled_gaussian": {"q": 0.5, "sigma": 0.3, "steps": 1}}, "spacing": 0.5}"#,
    );
    assert_eq!(privsel(&["profile", "--config", &cfg], None).status.code(), Some(4));
}

#[test]
fn presets_are_byte_identical_across_runs() {
    for preset in ["fig1", "fig4"] {
        let a = privsel(&["compare", preset], None);
        let b = privsel(&["compare", preset], None);
        assert!(a.status.success());
        assert_eq!(a.stdout, b.stdout, "{preset}");
    }
    let a = privsel(&["compare", "fig4", "--table", "cdf"], None);
    assert!(stdout(&a).starts_with("k,bin_n15,bin_n20,bin_n50,bin_n1000,poisson\n"));
    assert_eq!(
        privsel(&["compare", "fig4", "--table", "nope"], None).status.code(),
        Some(2)
    );
}

#[test]
fn cache_round_trip_gives_identical_output() {
    let cache = tempfile::tempdir().unwrap();
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "s.json",
        r#"{"base": {"subsampled_gaussian": {"q": 0.05, "sigma": 1.0, "steps": 50}}, "spacing": 1e-3}"#,
    );
    let cold = privsel(&["profile", "--config", &cfg], Some(cache.path()));
    let files = std::fs::read_dir(cache.path()).unwrap().count();
    assert_eq!(files, 2);
    let warm = privsel(&["profile", "--config", &cfg], Some(cache.path()));
    let none = privsel(&["profile", "--config", &cfg], None);
    assert!(cold.status.success());
    assert_eq!(cold.stdout, warm.stdout);
    assert_eq!(cold.stdout, none.stdout);
    // a corrupted entry is recomputed
    for entry in std::fs::read_dir(cache.path()).unwrap() {
        std::fs::write(entry.unwrap().path(), "garbage").unwrap();
    }
    assert_eq!(
        privsel(&["profile", "--config", &cfg], Some(cache.path())).stdout,
        cold.stdout
    );
}

#[test]
fn adjust_with_one_candidate() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "a.json",
        r#"{"adjust": {"candidates": [[0.01, 3.0]], "m": 10}, "spacing": 2e-4}"#,
    );
    let o = privsel(&["adjust", "--config", &cfg], None);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = stdout(&o);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(
        lines[0],
        "q,sigma,steps,eps1,delta1,eps_hat,adjust_eps,candidate_eps,gap"
    );
    assert_eq!(lines.len(), 2);
}

#[test]
fn oracle_table_passes() {
    let o = privsel(&["oracle"], None);
    assert!(o.status.success());
    let text = stdout(&o);
    assert!(text.lines().skip(1).all(|l| l.ends_with(",pass")), "{text}");
}

#[test]
fn custom_compare_marks_missing_methods() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "b.json",
        r#"{"base": {"gaussian": {"sigma": 4}}, "family": {"binomial": {"n": 100, "m": 10}}, "m_grid": [5, 10]}"#,
    );
    let text = stdout(&privsel(&["compare", "--config", &cfg], None));
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "m,hs,rdp,closed_form");
    assert!(lines[1].ends_with(",nan,nan"), "{text}");
}
