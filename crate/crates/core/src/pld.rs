//! Privacy-loss-distribution accounting for the Poisson-subsampled Gaussian
//! mechanism under add/remove neighbourhood.
//!
//! Losses live on the lattice `k * h`. A single step is discretized from the
//! dominating pair; `T` steps are composed by FFT convolution with
//! exponent-by-squaring. After every convolution the array is cropped to a
//! window derived from Chernoff bounds on the discretized loss: mass below
//! the window is raised to its lower edge and mass above goes to the
//! infinite-loss atom, so every step keeps `delta(eps)` an upper bound.

use std::fmt::Write as _;
use std::sync::{Arc, OnceLock};

use rustfft::num_complex::Complex;
use rustfft::FftPlanner;

use crate::error::{invalid, require_finite_positive, Error, Result};
use crate::numeric::{integrate, normal_pdf, normal_upper_quantile, CompensatedSum, QuadOptions};
use crate::profiles::{default_alpha_grid, PrivacyProfile, RdpCurve};

/// Default lattice spacing of the loss grid.
pub const DEFAULT_SPACING: f64 = 1e-4;
/// Default mass allowed outside the grid, per side and per construction step.
pub const DEFAULT_TAIL_MASS: f64 = 1e-15;
/// Largest array the accountant will allocate.
pub const MAX_CELLS: usize = 1 << 28;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SubsampledGaussianParams {
    pub q: f64,
    pub sigma: f64,
    pub steps: u64,
}

impl SubsampledGaussianParams {
    pub fn new(q: f64, sigma: f64, steps: u64) -> Result<Self> {
        if !(q > 0.0 && q <= 1.0) {
            return Err(invalid("q", format!("sampling ratio must lie in (0,1], got {q}")));
        }
        require_finite_positive("sigma", sigma)?;
        if steps == 0 {
            return Err(invalid("steps", "at least one step is required"));
        }
        Ok(Self { q, sigma, steps })
    }

    pub fn with_steps(self, steps: u64) -> Result<Self> {
        Self::new(self.q, self.sigma, steps)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Direction {
    /// `P = (1-q) N(0,σ²) + q N(1,σ²)` against `Q = N(0,σ²)`.
    Remove,
    /// The same pair reversed.
    Add,
}

impl Direction {
    pub fn name(self) -> &'static str {
        match self {
            Self::Remove => "remove",
            Self::Add => "add",
        }
    }
}

/// How the loss mass inside one lattice cell is assigned to grid points.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Discretization {
    /// All mass moves to the upper edge of the cell.
    RoundUp,
    /// Mass is split between both edges so that the cell's total mass and
    /// its mass under the reference measure are both preserved. Still an
    /// upper bound (the hockey-stick integrand is convex in `e^{-loss}`),
    /// with second-order instead of first-order discretization error.
    Split,
}

impl Discretization {
    pub fn name(self) -> &'static str {
        match self {
            Self::RoundUp => "round-up",
            Self::Split => "split",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub spacing: f64,
    pub discretization: Discretization,
    pub tail_mass: f64,
    /// Rebuild the single step at half spacing and fail if `delta(0)` moves
    /// by more than [`REFINEMENT_TOLERANCE`] (relative).
    pub check_refinement: bool,
}

pub const REFINEMENT_TOLERANCE: f64 = 1e-3;

impl Default for GridSpec {
    fn default() -> Self {
        Self {
            spacing: DEFAULT_SPACING,
            discretization: Discretization::Split,
            tail_mass: DEFAULT_TAIL_MASS,
            check_refinement: true,
        }
    }
}

impl GridSpec {
    pub fn with_spacing(self, spacing: f64) -> Self {
        Self { spacing, ..self }
    }

    fn validate(&self) -> Result<()> {
        require_finite_positive("spacing", self.spacing)?;
        if !(self.tail_mass > 0.0 && self.tail_mass < 1e-3) {
            return Err(invalid(
                "tail_mass",
                format!("must lie in (0, 1e-3), got {}", self.tail_mass),
            ));
        }
        Ok(())
    }
}

/// Discretized privacy-loss distribution: `masses[j]` sits at loss
/// `(offset + j) * spacing`, and `infinity_mass` at `+inf`.
#[derive(Debug, Clone)]
pub struct DiscretePLD {
    offset: i64,
    spacing: f64,
    masses: Vec<f64>,
    infinity_mass: f64,
    suffix: OnceLock<Arc<SuffixSums>>,
}

impl PartialEq for DiscretePLD {
    fn eq(&self, other: &Self) -> bool {
        self.offset == other.offset
            && self.spacing == other.spacing
            && self.infinity_mass == other.infinity_mass
            && self.masses == other.masses
    }
}

#[derive(Debug)]
struct SuffixSums {
    // Σ_{i>=j} m_i and Σ_{i>=j} m_i e^{-(ℓ_i - ℓ_0)}
    mass: Vec<f64>,
    weighted: Vec<f64>,
}

impl DiscretePLD {
    pub fn new(offset: i64, spacing: f64, masses: Vec<f64>, infinity_mass: f64) -> Result<Self> {
        require_finite_positive("spacing", spacing)?;
        if masses.iter().any(|&m| !(m >= 0.0 && m.is_finite())) {
            return Err(invalid("masses", "must be finite and non-negative"));
        }
        if !(0.0..=1.0).contains(&infinity_mass) {
            return Err(invalid("infinity_mass", "must lie in [0,1]"));
        }
        let mut total = CompensatedSum::default();
        masses.iter().for_each(|&m| total.add(m));
        let total = total.value() + infinity_mass;
        if (total - 1.0).abs() > 1e-9 {
            return Err(invalid("masses", format!("total mass {total} differs from 1")));
        }
        Ok(Self::from_parts(offset, spacing, masses, infinity_mass))
    }

    fn from_parts(offset: i64, spacing: f64, masses: Vec<f64>, infinity_mass: f64) -> Self {
        Self {
            offset,
            spacing,
            masses,
            infinity_mass,
            suffix: OnceLock::new(),
        }
    }

    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    pub fn offset(&self) -> i64 {
        self.offset
    }

    /// Loss of the first grid point.
    pub fn origin(&self) -> f64 {
        self.offset as f64 * self.spacing
    }

    pub fn masses(&self) -> &[f64] {
        &self.masses
    }

    pub fn infinity_mass(&self) -> f64 {
        self.infinity_mass
    }

    pub fn len(&self) -> usize {
        self.masses.len()
    }

    pub fn is_empty(&self) -> bool {
        self.masses.is_empty()
    }

    pub fn loss(&self, j: usize) -> f64 {
        (self.offset + j as i64) as f64 * self.spacing
    }

    pub fn total_mass(&self) -> f64 {
        let mut s = CompensatedSum::default();
        self.masses.iter().for_each(|&m| s.add(m));
        s.value() + self.infinity_mass
    }

    fn suffix(&self) -> &SuffixSums {
        self.suffix.get_or_init(|| {
            let n = self.masses.len();
            let mut mass = vec![0.0; n + 1];
            let mut weighted = vec![0.0; n + 1];
            let (mut s0, mut s1) = (CompensatedSum::default(), CompensatedSum::default());
            for j in (0..n).rev() {
                s0.add(self.masses[j]);
                s1.add(self.masses[j] * (-(j as f64) * self.spacing).exp());
                mass[j] = s0.value();
                weighted[j] = s1.value();
            }
            Arc::new(SuffixSums { mass, weighted })
        })
    }

    /// `delta(eps) = Σ_{ℓ > eps} (1 - e^{eps - ℓ}) mass(ℓ) + infinity_mass`.
    pub fn delta(&self, eps: f64) -> f64 {
        let n = self.masses.len();
        // first grid index with loss strictly above eps
        let rel = eps / self.spacing - self.offset as f64;
        let mut j = if rel < 0.0 {
            0
        } else {
            (rel.floor() as usize).saturating_add(1).min(n)
        };
        while j > 0 && self.loss(j - 1) > eps {
            j -= 1;
        }
        while j < n && self.loss(j) <= eps {
            j += 1;
        }
        if j == n {
            return self.infinity_mass.min(1.0);
        }
        let span = (n - 1) as f64 * self.spacing;
        let finite = if span < 700.0 {
            let s = self.suffix();
            s.mass[j] - (eps - self.origin()).exp() * s.weighted[j]
        } else {
            let mut acc = CompensatedSum::default();
            for i in j..n {
                acc.add(-(eps - self.loss(i)).exp_m1() * self.masses[i]);
            }
            acc.value()
        };
        (finite.max(0.0) + self.infinity_mass).clamp(0.0, 1.0)
    }

    /// Portable text serialization (`privsel-pld v1`).
    pub fn to_text(&self) -> String {
        let mut out = String::with_capacity(self.masses.len() * 24 + 128);
        out.push_str("privsel-pld v1\n");
        let _ = writeln!(out, "spacing {:e}", self.spacing);
        let _ = writeln!(out, "offset {}", self.offset);
        let _ = writeln!(out, "infinity {:e}", self.infinity_mass);
        let _ = writeln!(out, "count {}", self.masses.len());
        for m in &self.masses {
            let _ = writeln!(out, "{m:e}");
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let bad = |what: &str| Error::Numerical(format!("malformed PLD text: {what}"));
        let mut lines = text.lines();
        if lines.next() != Some("privsel-pld v1") {
            return Err(bad("missing or unsupported header"));
        }
        let mut field = |name: &str| -> Result<String> {
            let line = lines.next().ok_or_else(|| bad(name))?;
            line.strip_prefix(name)
                .and_then(|rest| rest.strip_prefix(' '))
                .map(str::to_string)
                .ok_or_else(|| bad(name))
        };
        let spacing: f64 = field("spacing")?.parse().map_err(|_| bad("spacing"))?;
        let offset: i64 = field("offset")?.parse().map_err(|_| bad("offset"))?;
        let infinity: f64 = field("infinity")?.parse().map_err(|_| bad("infinity"))?;
        let count: usize = field("count")?.parse().map_err(|_| bad("count"))?;
        let masses = lines
            .take(count)
            .map(|l| l.trim().parse::<f64>().map_err(|_| bad("mass value")))
            .collect::<Result<Vec<_>>>()?;
        if masses.len() != count {
            return Err(bad("truncated mass list"));
        }
        Self::new(offset, spacing, masses, infinity)
    }
}

// ---------------------------------------------------------------------------
// single-step discretization

struct PairModel {
    q: f64,
    sigma: f64,
    direction: Direction,
}

impl PairModel {
    fn x(&self, t: f64) -> f64 {
        (2.0 * t - 1.0) / (2.0 * self.sigma * self.sigma)
    }

    // ln((1-q) + q e^x)
    fn ln_mix(&self, x: f64) -> f64 {
        let q = self.q;
        if q == 1.0 {
            x
        } else if x > 30.0 {
            q.ln() + x + ((1.0 - q) / q * (-x).exp()).ln_1p()
        } else {
            (q * x.exp_m1()).ln_1p()
        }
    }

    fn loss(&self, t: f64) -> f64 {
        let l = self.ln_mix(self.x(t));
        match self.direction {
            Direction::Remove => l,
            Direction::Add => -l,
        }
    }

    /// Density of the numerator distribution `P`.
    fn density(&self, t: f64) -> f64 {
        let s = self.sigma;
        match self.direction {
            Direction::Remove => ((1.0 - self.q) * normal_pdf(t / s) + self.q * normal_pdf((t - 1.0) / s)) / s,
            Direction::Add => normal_pdf(t / s) / s,
        }
    }

    /// Point `t` with `loss(t) = l`, or `None` outside the loss range.
    fn inverse(&self, l: f64) -> Option<f64> {
        let s2 = self.sigma * self.sigma;
        let signed = match self.direction {
            Direction::Remove => l,
            Direction::Add => -l,
        };
        let x = if self.q == 1.0 {
            signed
        } else {
            let u = signed.exp_m1() / self.q;
            if !(u > -1.0) {
                return None;
            }
            u.ln_1p()
        };
        let t = s2 * x + 0.5;
        t.is_finite().then_some(t)
    }
}

/// Single-step PLD of the subsampled Gaussian in one direction.
pub fn subsampled_gaussian_pld(
    params: &SubsampledGaussianParams,
    direction: Direction,
    grid: &GridSpec,
) -> Result<DiscretePLD> {
    grid.validate()?;
    let pld = discretize_step(params, direction, grid.spacing, grid)?;
    if grid.check_refinement {
        // cell midpoints: split cells are exact at grid points, so the
        // discretization error shows up between them
        let fine = discretize_step(params, direction, grid.spacing / 2.0, grid)?;
        let h = grid.spacing;
        for eps in [0.5 * h, ((0.5 / h).floor() + 0.5) * h] {
            let (coarse_d, fine_d) = (pld.delta(eps), fine.delta(eps));
            if fine_d > 1e-12 && coarse_d - fine_d > REFINEMENT_TOLERANCE * fine_d {
                return Err(Error::GridTooCoarse {
                    eps,
                    coarse: coarse_d,
                    fine: fine_d,
                });
            }
        }
    }
    Ok(pld)
}

fn discretize_step(
    params: &SubsampledGaussianParams,
    direction: Direction,
    h: f64,
    grid: &GridSpec,
) -> Result<DiscretePLD> {
    let model = PairModel {
        q: params.q,
        sigma: params.sigma,
        direction,
    };
    let z = normal_upper_quantile(grid.tail_mass / 2.0);
    let (t_lo, t_hi) = (-z * params.sigma, 1.0 + z * params.sigma);
    // tails of P outside the window, per component
    let tail = |a: f64, b: f64| -> (f64, f64) {
        let s = params.sigma;
        let below = |m: f64| crate::numeric::normal_cdf((a - m) / s);
        let above = |m: f64| crate::numeric::normal_sf((b - m) / s);
        match direction {
            Direction::Remove => (
                (1.0 - params.q) * below(0.0) + params.q * below(1.0),
                (1.0 - params.q) * above(0.0) + params.q * above(1.0),
            ),
            Direction::Add => (below(0.0), above(0.0)),
        }
    };
    let (mass_below, mass_above) = tail(t_lo, t_hi);
    let (l_at_lo, l_at_hi) = (model.loss(t_lo), model.loss(t_hi));
    let (l_min, l_max) = (l_at_lo.min(l_at_hi), l_at_lo.max(l_at_hi));
    // mass whose loss is below l_min, and above l_max
    let (low_tail, high_tail) = match direction {
        Direction::Remove => (mass_below, mass_above),
        Direction::Add => (mass_above, mass_below),
    };

    let k_lo = (l_min / h).floor() as i64;
    let k_hi = (l_max / h).ceil() as i64;
    let n_points = (k_hi - k_lo + 1) as usize;
    if n_points > MAX_CELLS {
        return Err(Error::MemoryBudget {
            cells: n_points,
            budget: MAX_CELLS,
        });
    }
    // t at every grid point, clipped to the window
    let t_of = |k: i64| -> f64 {
        let l = k as f64 * h;
        let (at_min, at_max) = match direction {
            Direction::Remove => (t_lo, t_hi),
            Direction::Add => (t_hi, t_lo),
        };
        if l <= l_min {
            at_min
        } else if l >= l_max {
            at_max
        } else {
            model.inverse(l).map_or(at_min, |t| t.clamp(t_lo, t_hi))
        }
    };
    // the split weight carries round-off of order ulp(loss)/h, so tighter
    // relative tolerances only burn subdivisions
    let opts = QuadOptions {
        rel_tol: 1e-11,
        abs_tol: 1e-300,
        max_intervals: 32,
    };
    let norm = -(-h).exp_m1();
    let mut masses = vec![0.0; n_points];
    let mut t_prev = t_of(k_lo);
    for c in 0..n_points - 1 {
        let t_next = t_of(k_lo + c as i64 + 1);
        let (a, b) = if t_prev <= t_next {
            (t_prev, t_next)
        } else {
            (t_next, t_prev)
        };
        t_prev = t_next;
        if b <= a {
            continue;
        }
        let cell_mass = integrate(|t| model.density(t), a, b, opts).value;
        match grid.discretization {
            Discretization::RoundUp => masses[c + 1] += cell_mass,
            Discretization::Split => {
                let l_c = (k_lo + c as i64) as f64 * h;
                let upper = integrate(
                    |t| model.density(t) * -(l_c - model.loss(t)).min(0.0).exp_m1(),
                    a,
                    b,
                    opts,
                )
                .value
                    / norm;
                let upper = upper.clamp(0.0, cell_mass);
                masses[c] += cell_mass - upper;
                masses[c + 1] += upper;
            }
        }
    }
    // losses below l_min are raised to the first grid point at or above l_min
    let raise_to = ((l_min / h).ceil() as i64 - k_lo) as usize;
    masses[raise_to.min(n_points - 1)] += low_tail;
    let infinity_mass = high_tail;
    Ok(DiscretePLD::from_parts(k_lo, h, masses, infinity_mass))
}

// ---------------------------------------------------------------------------
// composition

/// Chernoff tail bounds of the discretized single-step loss.
#[derive(Debug, Clone)]
struct ChernoffTable {
    // (λ, ln Σ m e^{λℓ}) for λ > 0 and for -λ
    upper: Vec<(f64, f64)>,
    lower: Vec<(f64, f64)>,
    l_min: f64,
    l_max: f64,
}

impl ChernoffTable {
    fn new(pld: &DiscretePLD) -> Self {
        let lambdas: Vec<f64> = (0..=64).map(|i| 10f64.powf(-2.0 + i as f64 / 8.0)).collect();
        let support: Vec<(f64, f64)> = pld
            .masses
            .iter()
            .enumerate()
            .filter(|(_, &m)| m > 0.0)
            .map(|(j, &m)| (pld.loss(j), m.ln()))
            .collect();
        let ln_mgf = |lambda: f64| -> f64 {
            let peak = support
                .iter()
                .map(|&(l, lm)| lm + lambda * l)
                .fold(f64::NEG_INFINITY, f64::max);
            let mut s = CompensatedSum::default();
            for &(l, lm) in &support {
                s.add((lm + lambda * l - peak).exp());
            }
            peak + s.value().ln()
        };
        let l_min = support.first().map_or(0.0, |s| s.0);
        let l_max = support.last().map_or(0.0, |s| s.0);
        Self {
            upper: lambdas.iter().map(|&l| (l, ln_mgf(l))).collect(),
            lower: lambdas.iter().map(|&l| (l, ln_mgf(-l))).collect(),
            l_min,
            l_max,
        }
    }

    /// Loss interval holding all but `tail` mass (per side) of the
    /// `count`-fold composition.
    fn window(&self, count: u64, tail: f64) -> (f64, f64) {
        let c = count as f64;
        let lt = (1.0 / tail).ln();
        let hi = self
            .upper
            .iter()
            .map(|&(l, m)| (c * m + lt) / l)
            .fold(c * self.l_max, f64::min);
        let lo = self
            .lower
            .iter()
            .map(|&(l, m)| -(c * m + lt) / l)
            .fold(c * self.l_min, f64::max);
        (lo, hi.max(lo))
    }
}

/// Repeated self-composition of one PLD, caching its powers `P^{2^j}` so
/// several horizons can be evaluated cheaply.
pub struct Composer {
    base: DiscretePLD,
    chernoff: ChernoffTable,
    tail_mass: f64,
    powers: Vec<(u64, DiscretePLD)>,
    planner: FftPlanner<f64>,
}

impl Composer {
    pub fn new(base: DiscretePLD, tail_mass: f64) -> Self {
        let chernoff = ChernoffTable::new(&base);
        Self {
            powers: vec![(1, base.clone())],
            base,
            chernoff,
            tail_mass,
            planner: FftPlanner::new(),
        }
    }

    pub fn base(&self) -> &DiscretePLD {
        &self.base
    }

    fn power(&mut self, j: usize) -> Result<DiscretePLD> {
        while self.powers.len() <= j {
            let (count, last) = self.powers.last().cloned().expect("base power present");
            let next = self.convolve(&last, &last, 2 * count)?;
            self.powers.push((2 * count, next));
        }
        Ok(self.powers[j].1.clone())
    }

    /// The `t`-fold composition.
    pub fn compose(&mut self, t: u64) -> Result<DiscretePLD> {
        if t == 0 {
            return Err(invalid("T", "composition count must be at least 1"));
        }
        if t == 1 {
            return Ok(self.base.clone());
        }
        let mut acc: Option<(u64, DiscretePLD)> = None;
        for j in 0..64 {
            if t >> j & 1 == 1 {
                let p = self.power(j)?;
                acc = Some(match acc {
                    None => (1 << j, p),
                    Some((c, a)) => {
                        let total = c + (1 << j);
                        (total, self.convolve(&a, &p, total)?)
                    }
                });
            }
            if t >> (j + 1) == 0 {
                break;
            }
        }
        Ok(acc.expect("t >= 1").1)
    }

    fn convolve(&mut self, a: &DiscretePLD, b: &DiscretePLD, count: u64) -> Result<DiscretePLD> {
        let h = a.spacing;
        let raw_len = a.len() + b.len() - 1;
        let (w_lo, w_hi) = self.chernoff.window(count, self.tail_mass);
        let offset = a.offset + b.offset;
        let lo_idx = ((w_lo / h).floor() as i64 - offset).max(0) as usize;
        let hi_idx = (((w_hi / h).ceil() as i64 - offset).max(0) as usize).min(raw_len - 1);
        if hi_idx.saturating_sub(lo_idx) + 1 > MAX_CELLS || raw_len.next_power_of_two() > MAX_CELLS {
            return Err(Error::MemoryBudget {
                cells: raw_len,
                budget: MAX_CELLS,
            });
        }
        let full = fft_convolve(&mut self.planner, &a.masses, &b.masses, std::ptr::eq(a, b));
        let lo_idx = lo_idx.min(hi_idx);
        let mut below = CompensatedSum::default();
        full[..lo_idx].iter().for_each(|&m| below.add(m));
        let mut above = CompensatedSum::default();
        full[hi_idx + 1..].iter().for_each(|&m| above.add(m));
        let mut masses = full[lo_idx..=hi_idx].to_vec();
        masses[0] += below.value();
        let inf = (a.infinity_mass + b.infinity_mass + above.value()).min(1.0);
        Ok(DiscretePLD::from_parts(offset + lo_idx as i64, h, masses, inf))
    }
}

fn fft_convolve(planner: &mut FftPlanner<f64>, a: &[f64], b: &[f64], same: bool) -> Vec<f64> {
    let out_len = a.len() + b.len() - 1;
    let n = out_len.next_power_of_two();
    let fwd = planner.plan_fft_forward(n);
    let inv = planner.plan_fft_inverse(n);
    let load = |x: &[f64]| {
        let mut buf = vec![Complex::new(0.0, 0.0); n];
        for (d, &s) in buf.iter_mut().zip(x) {
            d.re = s;
        }
        buf
    };
    let mut fa = load(a);
    fwd.process(&mut fa);
    if same {
        fa.iter_mut().for_each(|z| *z = *z * *z);
    } else {
        let mut fb = load(b);
        fwd.process(&mut fb);
        fa.iter_mut().zip(&fb).for_each(|(x, y)| *x *= *y);
    }
    inv.process(&mut fa);
    let scale = 1.0 / n as f64;
    // round-off leaves tiny negative values; clamping them only adds mass
    fa[..out_len].iter().map(|z| (z.re * scale).max(0.0)).collect()
}

/// `T`-fold self-composition.
pub fn compose(pld: &DiscretePLD, t: u64) -> Result<DiscretePLD> {
    if t == 1 {
        return Ok(pld.clone());
    }
    Composer::new(pld.clone(), DEFAULT_TAIL_MASS).compose(t)
}

/// Composed PLDs of both directions.
#[derive(Debug, Clone)]
pub struct SubsampledGaussianAccountant {
    pub params: SubsampledGaussianParams,
    pub grid: GridSpec,
    pub remove: Arc<DiscretePLD>,
    pub add: Arc<DiscretePLD>,
}

impl SubsampledGaussianAccountant {
    pub fn new(params: SubsampledGaussianParams, grid: GridSpec) -> Result<Self> {
        let build = |d| -> Result<DiscretePLD> {
            let step = subsampled_gaussian_pld(&params, d, &grid)?;
            Composer::new(step, grid.tail_mass).compose(params.steps)
        };
        Ok(Self {
            remove: Arc::new(build(Direction::Remove)?),
            add: Arc::new(build(Direction::Add)?),
            params,
            grid,
        })
    }

    pub fn from_plds(params: SubsampledGaussianParams, grid: GridSpec, remove: DiscretePLD, add: DiscretePLD) -> Self {
        Self {
            params,
            grid,
            remove: Arc::new(remove),
            add: Arc::new(add),
        }
    }

    pub fn delta(&self, eps: f64) -> f64 {
        self.remove.delta(eps).max(self.add.delta(eps))
    }

    pub fn profile(&self) -> PrivacyProfile {
        let (r, a) = (self.remove.clone(), self.add.clone());
        let p = self.params;
        PrivacyProfile::new(
            format!("subsampled-gaussian(q={},sigma={},T={})", p.q, p.sigma, p.steps),
            move |e| r.delta(e).max(a.delta(e)),
        )
    }
}

/// Profile of `T` steps of the subsampled Gaussian on the default grid.
pub fn subsampled_gaussian_profile(params: &SubsampledGaussianParams) -> Result<PrivacyProfile> {
    subsampled_gaussian_profile_with(params, &GridSpec::default())
}

pub fn subsampled_gaussian_profile_with(params: &SubsampledGaussianParams, grid: &GridSpec) -> Result<PrivacyProfile> {
    Ok(SubsampledGaussianAccountant::new(*params, *grid)?.profile())
}

/// Profiles of one subsampled Gaussian at many horizons, sharing the cached
/// powers of the single-step PLDs.
pub struct HorizonProfiles {
    params: SubsampledGaussianParams,
    remove: Composer,
    add: Composer,
}

impl HorizonProfiles {
    pub fn new(q: f64, sigma: f64, grid: &GridSpec) -> Result<Self> {
        let params = SubsampledGaussianParams::new(q, sigma, 1)?;
        let r = subsampled_gaussian_pld(&params, Direction::Remove, grid)?;
        let a = subsampled_gaussian_pld(&params, Direction::Add, grid)?;
        Ok(Self {
            params,
            remove: Composer::new(r, grid.tail_mass),
            add: Composer::new(a, grid.tail_mass),
        })
    }

    pub fn accountant(&mut self, steps: u64, grid: GridSpec) -> Result<SubsampledGaussianAccountant> {
        let params = self.params.with_steps(steps)?;
        let r = self.remove.compose(steps)?;
        let a = self.add.compose(steps)?;
        Ok(SubsampledGaussianAccountant::from_plds(params, grid, r, a))
    }
}

// ---------------------------------------------------------------------------
// Rényi divergences of the dominating pairs

const LN_1E30: f64 = 69.077_552_789_821_37;

/// `T * max_direction D_alpha(P || Q)` by adaptive quadrature.
pub fn renyi_subsampled_gaussian(params: &SubsampledGaussianParams, alpha: f64) -> Result<f64> {
    if !(alpha > 1.0 && alpha.is_finite()) {
        return Err(invalid("alpha", format!("order must exceed 1, got {alpha}")));
    }
    let mut best: f64 = 0.0;
    for direction in [Direction::Remove, Direction::Add] {
        let d = renyi_one_direction(params.q, params.sigma, direction, alpha)?;
        best = best.max(d);
    }
    Ok(params.steps as f64 * best)
}

fn renyi_one_direction(q: f64, sigma: f64, direction: Direction, alpha: f64) -> Result<f64> {
    let model = PairModel { q, sigma, direction };
    let s = sigma;
    let ln_ref = |t: f64| -> f64 {
        // log density of the reference measure Q
        let ln_n0 = -0.5 * (t / s).powi(2) - (s * (2.0 * std::f64::consts::PI).sqrt()).ln();
        match direction {
            Direction::Remove => ln_n0,
            Direction::Add => ln_n0 + model.ln_mix(model.x(t)),
        }
    };
    // log of the integrand (P/Q)^α Q
    let g = |t: f64| alpha * model.loss(t) + ln_ref(t);
    let w = 1.0 + sigma * (2.0 * LN_1E30).sqrt();
    let (a, b) = ((1.0 - alpha).min(0.0) - w, alpha.max(1.0) + w);
    let pieces = crate::numeric::breakpoints(a, b, sigma.min(1.0));
    let peak = pieces
        .iter()
        .chain([0.0, 1.0, alpha, 1.0 - alpha].iter())
        .filter(|&&t| t >= a && t <= b)
        .map(|&t| g(t))
        .fold(f64::NEG_INFINITY, f64::max);
    if !peak.is_finite() {
        return Err(Error::Numerical("Renyi integrand overflowed".into()));
    }
    let opts = QuadOptions {
        rel_tol: 1e-12,
        abs_tol: 1e-300,
        max_intervals: 2000,
    };
    let scaled = crate::numeric::integrate_pieces(|t| (g(t) - peak).exp(), &pieces, opts).value;
    let ln_i = peak + scaled.ln();
    if !ln_i.is_finite() {
        return Err(Error::Numerical("Renyi integral is not finite".into()));
    }
    if ln_i < 0.5 {
        // close to 1: integrate the non-negative excess z^α - 1 - α(z - 1)
        // so the logarithm does not cancel
        let excess = |t: f64| -> f64 {
            let l = model.loss(t);
            let u = l.exp_m1();
            let v = (alpha * u.ln_1p()).exp_m1() - alpha * u;
            v.max(0.0) * ln_ref(t).exp()
        };
        let j = crate::numeric::integrate_pieces(excess, &pieces, opts).value;
        return Ok(j.ln_1p() / (alpha - 1.0));
    }
    Ok((ln_i / (alpha - 1.0)).max(0.0))
}

/// RDP curve of `T` steps over the given orders.
pub fn subsampled_gaussian_rdp_curve(params: &SubsampledGaussianParams, orders: &[f64]) -> Result<RdpCurve> {
    let values = orders
        .iter()
        .map(|&a| renyi_subsampled_gaussian(params, a))
        .collect::<Result<Vec<_>>>()?;
    // quadrature noise must not break the monotonicity in α
    let mut running: f64 = 0.0;
    let values = values
        .into_iter()
        .map(|v| {
            running = running.max(v);
            running
        })
        .collect();
    RdpCurve::new(
        format!(
            "subsampled-gaussian-rdp(q={},sigma={},T={})",
            params.q, params.sigma, params.steps
        ),
        orders.to_vec(),
        values,
    )
}

pub fn subsampled_gaussian_rdp_default(params: &SubsampledGaussianParams) -> Result<RdpCurve> {
    subsampled_gaussian_rdp_curve(params, &default_alpha_grid())
}
