//! JSON scenario files. Every section is externally tagged with snake_case
//! names, e.g. `{"base": {"gaussian": {"sigma": 4}}}`.

use std::path::{Path, PathBuf};

use serde::Deserialize;

use crate::error::CliError;

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub base: Option<BaseSpec>,
    pub family: Option<FamilySpec>,
    #[serde(default)]
    pub method: Method,
    pub delta: Option<f64>,
    pub eps: Option<f64>,
    pub eps_grid: Option<GridInput>,
    pub m_grid: Option<GridInput>,
    /// Loss-grid spacing of the PLD accountant.
    pub spacing: Option<f64>,
    pub output: Option<PathBuf>,
    pub adjust: Option<AdjustSpec>,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum BaseSpec {
    Gaussian {
        sigma: f64,
        #[serde(default = "unit")]
        sensitivity: f64,
    },
    SubsampledGaussian {
        q: f64,
        sigma: f64,
        steps: u64,
    },
    Pure {
        eps: f64,
    },
    /// `[eps, delta]` pairs the mechanism satisfies simultaneously.
    Pointwise {
        points: Vec<[f64; 2]>,
    },
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum FamilySpec {
    /// Truncated negative binomial, fixed by its mean `m` or by `gamma`.
    Negbin {
        eta: f64,
        m: Option<f64>,
        gamma: Option<f64>,
    },
    Binomial {
        n: u64,
        m: Option<f64>,
        p: Option<f64>,
    },
    Poisson {
        m: f64,
    },
    /// Report Noisy Max over `m` scores, `k` adaptive rounds.
    Rnm {
        m: u64,
        #[serde(default)]
        monotone: bool,
        #[serde(default = "one")]
        k: u64,
    },
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    #[default]
    Hs,
    Rdp,
    ClosedForm,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::Hs => "hs",
            Method::Rdp => "rdp",
            Method::ClosedForm => "closed_form",
        }
    }
}

/// Either an explicit list or an inclusive `start..=stop` range.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(untagged)]
pub enum GridInput {
    List(Vec<f64>),
    Range { start: f64, stop: f64, step: f64 },
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AdjustSpec {
    /// `[q, sigma]` per candidate.
    pub candidates: Vec<[f64; 2]>,
    #[serde(default = "default_eps_q")]
    pub eps_q: f64,
    pub m: Option<f64>,
    #[serde(default = "unit")]
    pub eta: f64,
    pub max_steps: Option<u64>,
}

fn unit() -> f64 {
    1.0
}

fn one() -> u64 {
    1
}

fn default_eps_q() -> f64 {
    1.5
}

impl GridInput {
    pub fn values(&self, field: &str) -> Result<Vec<f64>, CliError> {
        let v = match *self {
            GridInput::List(ref v) => v.clone(),
            GridInput::Range { start, stop, step } => {
                if !(step > 0.0 && start.is_finite() && stop.is_finite() && stop >= start) {
                    return Err(CliError::config(field, "range needs finite start <= stop and step > 0"));
                }
                let n = ((stop - start) / step + 1e-9).floor() as usize;
                (0..=n).map(|i| start + i as f64 * step).collect()
            }
        };
        if v.is_empty() {
            return Err(CliError::config(field, "grid is empty"));
        }
        if v.iter().any(|x| !x.is_finite()) || v.windows(2).any(|w| w[1] <= w[0]) {
            return Err(CliError::config(field, "grid must be finite and strictly increasing"));
        }
        Ok(v)
    }
}

impl ScenarioConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text).map_err(|e| match e {
            CliError::Config(msg) => CliError::Config(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    pub fn parse(text: &str) -> Result<Self, CliError> {
        let de = &mut serde_json::Deserializer::from_str(text);
        serde_path_to_error::deserialize(de).map_err(|e| {
            let inner = e.inner();
            let path = e.path().to_string();
            CliError::Config(format!(
                "line {} column {}, field `{path}`: {inner}",
                inner.line(),
                inner.column()
            ))
        })
    }

    pub fn base(&self) -> Result<&BaseSpec, CliError> {
        self.base
            .as_ref()
            .ok_or_else(|| CliError::config("base", "a base mechanism is required"))
    }

    pub fn family(&self) -> Result<&FamilySpec, CliError> {
        self.family
            .as_ref()
            .ok_or_else(|| CliError::config("family", "a count family is required"))
    }
}
