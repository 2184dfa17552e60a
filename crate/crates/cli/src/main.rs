mod cache;
mod config;
mod error;
mod eval;
mod output;

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use privsel::pld::GridSpec;
use privsel::scenarios::{adjust, adjust_table, run_preset, AdjustConfig, Preset, PresetOptions, Table};
use privsel::validation::run_all;

use crate::cache::PldCache;
use crate::config::{GridInput, Method, ScenarioConfig};
use crate::error::CliError;
use crate::eval::{base_guarantee, grid_for, guarantee, with_expected, Base, Target};

#[derive(Parser)]
#[command(
    name = "privsel",
    version,
    about = "Privacy accounting for noisy max and private selection"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

/// Flags shared by the config-driven subcommands; each overrides the file.
#[derive(clap::Args, Default)]
struct Common {
    /// JSON scenario file
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    delta: Option<f64>,
    /// Loss-grid spacing of the PLD accountant
    #[arg(long)]
    spacing: Option<f64>,
    /// Write to this file instead of stdout
    #[arg(long, short)]
    output: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Privacy profile of the base mechanism as `eps,delta` rows
    Profile {
        #[command(flatten)]
        common: Common,
        /// `start:stop:step`, inclusive
        #[arg(long)]
        eps_grid: Option<String>,
    },
    /// Figure tables, or per-method epsilon over `m_grid` for a custom config
    Compare {
        /// One of fig1, fig2, fig3, fig4, fig6, fig7, fig8
        preset: Option<String>,
        #[command(flatten)]
        common: Common,
        /// Print only this table of a multi-table preset
        #[arg(long)]
        table: Option<String>,
        /// Write every table to `<dir>/<preset>_<table>.csv`
        #[arg(long)]
        out_dir: Option<PathBuf>,
        #[arg(long)]
        fig7_target_eps: Option<f64>,
        /// Expected candidate count of the fig8 thresholds
        #[arg(long)]
        fig8_m: Option<f64>,
    },
    /// One guarantee: epsilon at --delta, or delta at --eps; without a
    /// family, the base mechanism's own
    Guarantee {
        #[command(flatten)]
        common: Common,
        #[arg(long, conflicts_with = "delta")]
        eps: Option<f64>,
        #[arg(long, value_enum)]
        method: Option<Method>,
        /// Replace the expected count of the configured family
        #[arg(long)]
        m: Option<f64>,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// Longest horizon per candidate under the tuning thresholds
    Adjust {
        #[command(flatten)]
        common: Common,
        /// Expected number of candidates
        #[arg(long)]
        m: Option<f64>,
    },
    /// Runs the oracle cross-checks and prints a pass/fail table
    Oracle {
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
}

fn load(common: &Common) -> Result<ScenarioConfig, CliError> {
    let mut cfg = match &common.config {
        Some(p) => ScenarioConfig::load(p)?,
        None => ScenarioConfig::default(),
    };
    if common.delta.is_some() {
        cfg.delta = common.delta;
        cfg.eps = None;
    }
    if common.spacing.is_some() {
        cfg.spacing = common.spacing;
    }
    if common.output.is_some() {
        cfg.output = common.output.clone();
    }
    if let Some(h) = cfg.spacing {
        if !(h > 0.0 && h.is_finite()) {
            return Err(CliError::config("spacing", "must be finite and positive"));
        }
    }
    Ok(cfg)
}

fn sink(path: Option<&Path>) -> Result<Box<dyn Write>, CliError> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(std::io::stdout().lock())),
    })
}

fn parse_range(s: &str) -> Result<GridInput, CliError> {
    let parts: Vec<&str> = s.split(':').collect();
    let num = |x: &str| x.trim().parse::<f64>().map_err(|e| CliError::config("eps_grid", e));
    match parts.as_slice() {
        [a, b, c] => Ok(GridInput::Range {
            start: num(a)?,
            stop: num(b)?,
            step: num(c)?,
        }),
        _ => Err(CliError::config("eps_grid", "expected start:stop:step")),
    }
}

fn cmd_profile(common: &Common, eps_grid: Option<&str>) -> Result<(), CliError> {
    let mut cfg = load(common)?;
    if let Some(g) = eps_grid {
        cfg.eps_grid = Some(parse_range(g)?);
    }
    let grid = cfg.eps_grid.clone().unwrap_or(GridInput::Range {
        start: 0.0,
        stop: 5.0,
        step: 0.1,
    });
    let eps = grid.values("eps_grid")?;
    let cache = PldCache::from_env();
    let base = Base::build(cfg.base()?, 1.0, 1, &grid_for(cfg.spacing), &cache)?;
    let rows: Vec<Vec<f64>> = eps.iter().map(|&e| vec![e, base.profile.delta(e)]).collect();
    let mut out = sink(cfg.output.as_deref())?;
    output::write_csv(&mut out, &["eps".into(), "delta".into()], &rows)?;
    out.flush()?;
    Ok(())
}

fn custom_compare(cfg: &ScenarioConfig) -> Result<Table, CliError> {
    let base = cfg.base()?;
    let family = cfg.family()?;
    let ms = match &cfg.m_grid {
        Some(g) => g.values("m_grid")?,
        None => vec![2.0, 5.0, 10.0, 20.0, 50.0, 100.0, 200.0, 500.0, 1000.0],
    };
    let delta = cfg.delta.unwrap_or(privsel::scenarios::DEFAULT_DELTA);
    let grid = grid_for(cfg.spacing);
    let cache = PldCache::from_env();
    let methods = [Method::Hs, Method::Rdp, Method::ClosedForm];
    let mut rows = Vec::with_capacity(ms.len());
    for &m in &ms {
        let fam = with_expected(family, m)?;
        let mut row = vec![m];
        for method in methods {
            // unsupported combinations and unreachable targets become NaN
            row.push(
                match guarantee(base, &fam, method, Target::Delta(delta), &grid, &cache) {
                    Ok(g) => g.eps,
                    Err(e) if matches!(e.exit_code(), 2 | 3) => f64::NAN,
                    Err(e) => return Err(e),
                },
            );
        }
        rows.push(row);
    }
    Ok(Table {
        name: "custom".into(),
        columns: ["m", "hs", "rdp", "closed_form"]
            .iter()
            .map(|s| s.to_string())
            .collect(),
        rows,
    })
}

fn cmd_compare(
    preset: Option<&str>,
    common: &Common,
    table: Option<&str>,
    out_dir: Option<&Path>,
    fig7_target_eps: Option<f64>,
    fig8_m: Option<f64>,
) -> Result<(), CliError> {
    let cfg = load(common)?;
    let (label, tables) = match preset {
        Some(name) => {
            if common.config.is_some() {
                return Err(CliError::Config("give either a preset or --config, not both".into()));
            }
            let preset: Preset = name.parse()?;
            let mut opts = PresetOptions::default();
            if let Some(d) = cfg.delta {
                opts.delta = d;
            }
            if let Some(e) = fig7_target_eps {
                opts.fig7_target_eps = e;
            }
            if let Some(m) = fig8_m {
                opts.fig8_m = m;
            }
            opts.spacing = cfg.spacing;
            (
                preset.name().to_string(),
                run_preset(preset, &opts, &PldCache::from_env())?,
            )
        }
        None if common.config.is_some() => ("custom".to_string(), vec![custom_compare(&cfg)?]),
        None => return Err(CliError::Config("give a preset name or --config".into())),
    };
    if let Some(dir) = out_dir {
        std::fs::create_dir_all(dir)?;
        for t in &tables {
            let mut out = sink(Some(&dir.join(format!("{label}_{}.csv", t.name))))?;
            output::write_table(&mut out, t)?;
            out.flush()?;
        }
        return Ok(());
    }
    let chosen = match table {
        Some(name) => tables.iter().find(|t| t.name == name).ok_or_else(|| {
            let names: Vec<&str> = tables.iter().map(|t| t.name.as_str()).collect();
            CliError::config("table", format!("`{name}` is not one of {}", names.join(", ")))
        })?,
        None => &tables[0],
    };
    let mut out = sink(cfg.output.as_deref())?;
    output::write_table(&mut out, chosen)?;
    out.flush()?;
    Ok(())
}

fn cmd_guarantee(
    common: &Common,
    eps: Option<f64>,
    method: Option<Method>,
    m: Option<f64>,
    format: Format,
) -> Result<(), CliError> {
    let mut cfg = load(common)?;
    if eps.is_some() {
        cfg.eps = eps;
        cfg.delta = None;
    }
    if let Some(method) = method {
        cfg.method = method;
    }
    let target = match (cfg.delta, cfg.eps) {
        (Some(_), Some(_)) => return Err(CliError::Config("give only one of `delta` and `eps`".into())),
        (Some(d), None) => Target::Delta(d),
        (None, Some(e)) => Target::Eps(e),
        (None, None) => Target::Delta(privsel::scenarios::DEFAULT_DELTA),
    };
    let (grid, cache) = (grid_for(cfg.spacing), PldCache::from_env());
    let g = match (&cfg.family, m) {
        (None, Some(_)) => return Err(CliError::config("family", "--m needs a count family")),
        (None, None) => base_guarantee(cfg.base()?, cfg.method, target, &grid, &cache)?,
        (Some(f), Some(m)) => guarantee(cfg.base()?, &with_expected(f, m)?, cfg.method, target, &grid, &cache)?,
        (Some(f), None) => guarantee(cfg.base()?, f, cfg.method, target, &grid, &cache)?,
    };
    let mut out = sink(cfg.output.as_deref())?;
    match format {
        Format::Text => writeln!(
            out,
            "eps={} delta={} method={} eps1={}",
            output::number(g.eps),
            output::number(g.delta),
            g.method,
            g.eps1.map_or("none".to_string(), output::number)
        )?,
        Format::Json => writeln!(
            out,
            "{}",
            serde_json::to_string(&g).map_err(|e| CliError::Config(e.to_string()))?
        )?,
    }
    out.flush()?;
    Ok(())
}

fn cmd_adjust(common: &Common, m: Option<f64>) -> Result<(), CliError> {
    let cfg = load(common)?;
    let mut ac = AdjustConfig::fig8(privsel::scenarios::FIG8_DEFAULT_M);
    if common.config.is_some() {
        let spec = cfg
            .adjust
            .as_ref()
            .ok_or_else(|| CliError::config("adjust", "the config has no `adjust` section"))?;
        if spec.candidates.is_empty() {
            return Err(CliError::config(
                "adjust.candidates",
                "at least one candidate is required",
            ));
        }
        ac.candidates = spec.candidates.iter().map(|&[q, s]| (q, s)).collect();
        ac.eps_q = spec.eps_q;
        ac.eta = spec.eta;
        if let Some(m) = spec.m {
            ac.m = m;
        }
        if let Some(t) = spec.max_steps {
            ac.max_steps = t;
        }
    }
    if let Some(m) = m {
        ac.m = m;
    }
    if let Some(d) = cfg.delta {
        ac.delta = d;
    }
    ac.grid = cfg
        .spacing
        .map_or(GridSpec::default(), |h| GridSpec::default().with_spacing(h));
    let (th, rows) = adjust(&ac)?;
    let mut out = sink(cfg.output.as_deref())?;
    output::write_table(&mut out, &adjust_table(&th, &rows))?;
    out.flush()?;
    Ok(())
}

fn cmd_oracle(path: Option<&Path>) -> Result<bool, CliError> {
    let checks = run_all();
    let mut out = sink(path)?;
    writeln!(out, "check,checks,violations,max_ratio,max_error,status")?;
    for c in &checks {
        match &c.sweep {
            Ok(s) => writeln!(
                out,
                "{},{},{},{},{},{}",
                c.name,
                s.checked,
                s.violations.len(),
                output::number(s.max_ratio),
                output::number(s.max_error),
                if c.passed() { "pass" } else { "fail" }
            )?,
            Err(e) => writeln!(out, "{},0,0,nan,nan,fail ({e})", c.name)?,
        }
    }
    out.flush()?;
    Ok(checks.iter().all(|c| c.passed()))
}

fn run(cli: Cli) -> Result<ExitCode, CliError> {
    match cli.command {
        Command::Profile { common, eps_grid } => cmd_profile(&common, eps_grid.as_deref())?,
        Command::Compare {
            preset,
            common,
            table,
            out_dir,
            fig7_target_eps,
            fig8_m,
        } => cmd_compare(
            preset.as_deref(),
            &common,
            table.as_deref(),
            out_dir.as_deref(),
            fig7_target_eps,
            fig8_m,
        )?,
        Command::Guarantee {
            common,
            eps,
            method,
            m,
            format,
        } => cmd_guarantee(&common, eps, method, m, format)?,
        Command::Adjust { common, m } => cmd_adjust(&common, m)?,
        Command::Oracle { output } => {
            if !cmd_oracle(output.as_deref())? {
                return Ok(ExitCode::FAILURE);
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
