//! Laws of the number of base-mechanism runs in private selection.

use rand::Rng;
use statrs::function::gamma::ln_gamma;

use crate::error::{invalid, Error, Result};

/// Truncation quantile used whenever a series over the support is summed.
pub const SERIES_QUANTILE: f64 = 1.0 - 1e-15;

/// Distribution of the run count `K`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CountDistribution {
    /// Truncated negative binomial on `{1, 2, ...}`; `eta = 1` is geometric.
    TruncNegBinomial {
        eta: f64,
        gamma: f64,
    },
    Binomial {
        n: u64,
        p: f64,
    },
    Poisson {
        mean: f64,
    },
}

/// Family selector for [`CountDistribution::from_expected`], carrying the
/// shape parameter that the expected count does not determine.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CountFamily {
    TruncNegBinomial { eta: f64 },
    Binomial { n: u64 },
    Poisson,
}

fn check_eta(eta: f64) -> Result<()> {
    if eta.is_finite() && eta > -1.0 {
        Ok(())
    } else {
        Err(invalid("eta", format!("must lie in (-1, inf), got {eta}")))
    }
}

fn check_open_unit(name: &'static str, v: f64) -> Result<()> {
    if v > 0.0 && v < 1.0 {
        Ok(())
    } else {
        Err(invalid(name, format!("must lie in (0,1), got {v}")))
    }
}

// (1-γ)^k (η)_k / k! / (γ^{-η} - 1), in log space with the gamma-function
// sign folded out so η ∈ (-1, 0) is handled too.
fn tnb_ln_pmf(eta: f64, gamma: f64, k: u64) -> f64 {
    let kf = k as f64;
    let ln_q = (-gamma).ln_1p();
    if eta == 0.0 {
        return kf * ln_q - kf.ln() - (-gamma.ln()).ln();
    }
    let ln_abs_gamma_eta = if eta > 0.0 {
        ln_gamma(eta)
    } else {
        ln_gamma(eta + 1.0) - (-eta).ln()
    };
    let ln_abs_norm = (-eta * gamma.ln()).exp_m1().abs().ln();
    kf * ln_q + ln_gamma(kf + eta) - ln_gamma(kf + 1.0) - ln_abs_gamma_eta - ln_abs_norm
}

fn ln_choose(n: u64, k: u64) -> f64 {
    ln_gamma(n as f64 + 1.0) - ln_gamma(k as f64 + 1.0) - ln_gamma((n - k) as f64 + 1.0)
}

impl CountDistribution {
    pub fn trunc_neg_binomial(eta: f64, gamma: f64) -> Result<Self> {
        check_eta(eta)?;
        check_open_unit("gamma", gamma)?;
        Ok(Self::TruncNegBinomial { eta, gamma })
    }

    /// Geometric special case (`eta = 1`) with mean `1/gamma`.
    pub fn geometric(gamma: f64) -> Result<Self> {
        Self::trunc_neg_binomial(1.0, gamma)
    }

    pub fn binomial(n: u64, p: f64) -> Result<Self> {
        if n == 0 {
            return Err(invalid("n", "must be at least 1"));
        }
        check_open_unit("p", p)?;
        Ok(Self::Binomial { n, p })
    }

    pub fn poisson(mean: f64) -> Result<Self> {
        if !(mean.is_finite() && mean > 0.0) {
            return Err(invalid("mean", format!("must be positive, got {mean}")));
        }
        Ok(Self::Poisson { mean })
    }

    /// Builds a distribution from the family and its expected count.
    pub fn from_expected(family: CountFamily, m: f64) -> Result<Self> {
        if !(m.is_finite() && m > 0.0) {
            return Err(Error::InfeasibleMean {
                mean: m,
                reason: "expected count must be positive".into(),
            });
        }
        match family {
            CountFamily::Poisson => Self::poisson(m),
            CountFamily::Binomial { n } => {
                if n == 0 || m >= n as f64 {
                    return Err(Error::InfeasibleMean {
                        mean: m,
                        reason: format!("binomial with n={n} needs p=m/n < 1"),
                    });
                }
                Self::binomial(n, m / n as f64)
            }
            CountFamily::TruncNegBinomial { eta } => {
                check_eta(eta)?;
                if m <= 1.0 {
                    return Err(Error::InfeasibleMean {
                        mean: m,
                        reason: "a zero-truncated count has mean above 1".into(),
                    });
                }
                if eta == 1.0 {
                    return Self::geometric(1.0 / m);
                }
                let gamma = solve_tnb_gamma(eta, m)?;
                Self::trunc_neg_binomial(eta, gamma)
            }
        }
    }

    pub fn pmf(&self, k: u64) -> f64 {
        match *self {
            Self::TruncNegBinomial { eta, gamma } => {
                if k == 0 {
                    0.0
                } else {
                    tnb_ln_pmf(eta, gamma, k).exp()
                }
            }
            Self::Binomial { n, p } => {
                if k > n {
                    0.0
                } else {
                    let kf = k as f64;
                    (ln_choose(n, k) + kf * p.ln() + (n - k) as f64 * (-p).ln_1p()).exp()
                }
            }
            Self::Poisson { mean } => {
                let kf = k as f64;
                (kf * mean.ln() - mean - ln_gamma(kf + 1.0)).exp()
            }
        }
    }

    /// `P(K <= k)`.
    pub fn cdf(&self, k: u64) -> f64 {
        let upper = match *self {
            Self::Binomial { n, .. } if k >= n => return 1.0,
            _ => k,
        };
        let mut s = crate::numeric::CompensatedSum::default();
        for j in 0..=upper {
            s.add(self.pmf(j));
        }
        s.value().min(1.0)
    }

    pub fn mean(&self) -> f64 {
        match *self {
            Self::TruncNegBinomial { eta, gamma } => {
                if eta == 0.0 {
                    (1.0 / gamma - 1.0) / (1.0 / gamma).ln()
                } else {
                    // 1 - γ^η computed as -expm1(η ln γ) to stay accurate for small η
                    eta * (1.0 - gamma) / (gamma * -(eta * gamma.ln()).exp_m1())
                }
            }
            Self::Binomial { n, p } => n as f64 * p,
            Self::Poisson { mean } => mean,
        }
    }

    /// `P(K = 0)`.
    pub fn prob_zero(&self) -> f64 {
        self.pmf(0)
    }

    /// Probability generating function `E[z^K]` on `[0, 1]`.
    pub fn pgf(&self, z: f64) -> Result<f64> {
        check_z(z)?;
        Ok(match *self {
            Self::TruncNegBinomial { eta, gamma } => {
                let base = 1.0 - (1.0 - gamma) * z;
                if eta == 0.0 {
                    -base.ln() / (1.0 / gamma).ln()
                } else {
                    (-eta * base.ln()).exp_m1() / (-eta * gamma.ln()).exp_m1()
                }
            }
            Self::Binomial { n, p } => (1.0 - p + p * z).powf(n as f64),
            Self::Poisson { mean } => (mean * (z - 1.0)).exp(),
        })
    }

    /// Derivative of the generating function on `[0, 1]`.
    pub fn pgf_deriv(&self, z: f64) -> Result<f64> {
        check_z(z)?;
        Ok(match *self {
            Self::TruncNegBinomial { eta, gamma } => {
                let base = 1.0 - (1.0 - gamma) * z;
                ((-eta - 1.0) * base.ln() + (eta + 1.0) * gamma.ln()).exp() * self.mean()
            }
            Self::Binomial { n, p } => n as f64 * p * (1.0 - p + p * z).powf(n as f64 - 1.0),
            Self::Poisson { mean } => mean * (mean * (z - 1.0)).exp(),
        })
    }

    /// Smallest `k` with `P(K <= k) >= prob`.
    pub fn quantile(&self, prob: f64) -> u64 {
        let mut acc = crate::numeric::CompensatedSum::default();
        let mut k = 0u64;
        loop {
            acc.add(self.pmf(k));
            if acc.value() >= prob {
                return k;
            }
            if let Self::Binomial { n, .. } = *self {
                if k >= n {
                    return n;
                }
            }
            // rounding can keep the running sum just short of `prob`; stop once
            // the remaining tail is negligible (geometric-tail estimate)
            let m = self.mean();
            if k as f64 > m && self.pmf(k) * 10.0 * (m + 1.0) < 1e-17 {
                return k;
            }
            k += 1;
        }
    }

    /// `(k, pmf(k))` over the support up to the series truncation quantile.
    pub fn truncated_support(&self) -> Vec<(u64, f64)> {
        let top = self.quantile(SERIES_QUANTILE);
        (0..=top).map(|k| (k, self.pmf(k))).collect()
    }

    /// Draws `K` by inverse-CDF sampling.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> u64 {
        let u: f64 = rng.gen();
        self.quantile(u)
    }

    pub fn label(&self) -> String {
        match *self {
            Self::TruncNegBinomial { eta, gamma } => format!("tnb(eta={eta},gamma={gamma})"),
            Self::Binomial { n, p } => format!("binomial(n={n},p={p})"),
            Self::Poisson { mean } => format!("poisson(m={mean})"),
        }
    }
}

fn check_z(z: f64) -> Result<()> {
    if (0.0..=1.0).contains(&z) {
        Ok(())
    } else {
        Err(Error::Domain(format!("generating function argument {z} outside [0,1]")))
    }
}

// The mean decreases from +inf (γ -> 0) to 1 (γ -> 1).
fn solve_tnb_gamma(eta: f64, m: f64) -> Result<f64> {
    let mean_at = |g: f64| CountDistribution::TruncNegBinomial { eta, gamma: g }.mean();
    let mut hi = 0.5;
    let mut lo;
    if mean_at(hi) >= m {
        lo = hi;
        loop {
            hi = 1.0 - 0.5 * (1.0 - hi);
            if mean_at(hi) < m {
                break;
            }
            if 1.0 - hi < 1e-15 {
                return Err(Error::InfeasibleMean {
                    mean: m,
                    reason: "expected count too close to 1".into(),
                });
            }
            lo = hi;
        }
    } else {
        lo = hi;
        loop {
            lo *= 0.5;
            let v = mean_at(lo);
            if v.is_finite() && v >= m {
                break;
            }
            if lo < 1e-300 {
                return Err(Error::InfeasibleMean {
                    mean: m,
                    reason: "no gamma in (0,1) reaches this mean".into(),
                });
            }
            hi = lo;
        }
    }
    // bisection in log γ: the mean varies over many orders of magnitude
    let (mut a, mut b) = (lo.ln(), hi.ln());
    for _ in 0..500 {
        if (b - a).abs() <= 1e-12 * a.abs().max(1e-300) || b - a <= 1e-15 {
            break;
        }
        let mid = 0.5 * (a + b);
        if mean_at(mid.exp()) >= m {
            a = mid;
        } else {
            b = mid;
        }
    }
    let gamma = (0.5 * (a + b)).exp();
    let got = mean_at(gamma);
    if ((got - m) / m).abs() > 1e-9 {
        return Err(Error::InfeasibleMean {
            mean: m,
            reason: format!("bisection stalled at gamma={gamma} with mean {got}"),
        });
    }
    Ok(gamma)
}
