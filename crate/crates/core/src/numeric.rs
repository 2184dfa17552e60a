//! Shared numerical kernels: normal distribution functions, adaptive
//! Gauss–Kronrod quadrature, bracketing root search and golden-section
//! minimization.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::f64::consts::{PI, SQRT_2};

use libm::erfc;

const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_8;

/// Standard normal density.
pub fn normal_pdf(x: f64) -> f64 {
    (-0.5 * x * x).exp() / (2.0 * PI).sqrt()
}

/// Standard normal CDF, evaluated through `erfc` so the lower tail keeps
/// full relative precision.
pub fn normal_cdf(x: f64) -> f64 {
    0.5 * erfc(-x / SQRT_2)
}

/// Standard normal survival function `1 - Φ(x)`.
pub fn normal_sf(x: f64) -> f64 {
    0.5 * erfc(x / SQRT_2)
}

/// `ln Φ(x)`, finite for every finite `x`.
pub fn ln_normal_cdf(x: f64) -> f64 {
    if x > 0.0 {
        (-normal_sf(x)).ln_1p()
    } else if x > -37.0 {
        normal_cdf(x).ln()
    } else {
        // asymptotic expansion of the Mills ratio; relative error < 1e-13 here
        let r = 1.0 / (x * x);
        let series = 1.0 - r * (1.0 - r * (3.0 - r * (15.0 - 105.0 * r)));
        -0.5 * x * x - (-x).ln() - LN_SQRT_2PI + series.ln()
    }
}

/// Upper standard normal quantile: the `z` with `1 - Φ(z) = tail`.
pub fn normal_upper_quantile(tail: f64) -> f64 {
    assert!(tail > 0.0 && tail < 1.0, "tail probability must lie in (0,1)");
    let (mut lo, mut hi) = (-40.0_f64, 40.0_f64);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if normal_sf(mid) > tail {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-14 {
            break;
        }
    }
    0.5 * (lo + hi)
}

/// Neumaier compensated accumulator.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompensatedSum {
    sum: f64,
    carry: f64,
}

impl CompensatedSum {
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.carry += (self.sum - t) + x;
        } else {
            self.carry += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.carry
    }
}

// 15-point Kronrod nodes with the embedded 7-point Gauss rule.
const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_728_8,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

fn gauss_kronrod_15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for j in 0..7 {
        let dx = half * XGK[j];
        let pair = f(center - dx) + f(center + dx);
        kronrod += WGK[j] * pair;
        if j % 2 == 1 {
            gauss += WG[j / 2] * pair;
        }
    }
    let value = kronrod * half;
    let error = ((kronrod - gauss) * half).abs();
    (value, error)
}

/// Tolerances for [`integrate`].
#[derive(Debug, Clone, Copy)]
pub struct QuadOptions {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_intervals: usize,
}

impl Default for QuadOptions {
    fn default() -> Self {
        Self {
            rel_tol: 1e-12,
            abs_tol: 1e-300,
            max_intervals: 20_000,
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct QuadResult {
    pub value: f64,
    pub error: f64,
    pub intervals: usize,
}

struct Segment {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Segment {}
impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Segment {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

/// Globally adaptive Gauss–Kronrod (7/15) quadrature on a finite interval.
///
/// The segment with the largest error estimate is bisected until the total
/// estimate drops below `max(abs_tol, rel_tol * |value|)`.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, opts: QuadOptions) -> QuadResult {
    if a == b {
        return QuadResult {
            value: 0.0,
            error: 0.0,
            intervals: 0,
        };
    }
    let (value, error) = gauss_kronrod_15(&f, a, b);
    let mut heap = BinaryHeap::new();
    heap.push(Segment { a, b, value, error });
    let mut total = value;
    let mut total_err = error;
    let mut count = 1;
    while total_err > opts.abs_tol.max(opts.rel_tol * total.abs()) && count < opts.max_intervals {
        let Some(seg) = heap.pop() else { break };
        let mid = 0.5 * (seg.a + seg.b);
        if mid <= seg.a || mid >= seg.b {
            heap.push(seg);
            break;
        }
        let (v1, e1) = gauss_kronrod_15(&f, seg.a, mid);
        let (v2, e2) = gauss_kronrod_15(&f, mid, seg.b);
        total += v1 + v2 - seg.value;
        total_err += e1 + e2 - seg.error;
        heap.push(Segment {
            a: seg.a,
            b: mid,
            value: v1,
            error: e1,
        });
        heap.push(Segment {
            a: mid,
            b: seg.b,
            value: v2,
            error: e2,
        });
        count += 1;
    }
    // re-sum to shed the drift of the running updates
    let mut sum = CompensatedSum::default();
    let mut err = 0.0;
    for seg in heap.iter() {
        sum.add(seg.value);
        err += seg.error;
    }
    QuadResult {
        value: sum.value(),
        error: err,
        intervals: count,
    }
}

/// Integrates over consecutive breakpoints, summing the pieces.
pub fn integrate_pieces<F: Fn(f64) -> f64>(f: F, points: &[f64], opts: QuadOptions) -> QuadResult {
    let mut sum = CompensatedSum::default();
    let mut error = 0.0;
    let mut intervals = 0;
    for w in points.windows(2) {
        let r = integrate(&f, w[0], w[1], opts);
        sum.add(r.value);
        error += r.error;
        intervals += r.intervals;
    }
    QuadResult {
        value: sum.value(),
        error,
        intervals,
    }
}

/// Evenly spaced breakpoints covering `[a, b]` with pieces no longer than `max_len`.
pub fn breakpoints(a: f64, b: f64, max_len: f64) -> Vec<f64> {
    let n = (((b - a) / max_len).ceil() as usize).max(1);
    (0..=n).map(|i| a + (b - a) * i as f64 / n as f64).collect()
}

/// Bisection for a monotone predicate that is false at `lo` and true at
/// `hi`. Returns the final `hi`, so the predicate holds at the result.
pub fn bisect_predicate<P: Fn(f64) -> bool>(pred: P, mut lo: f64, mut hi: f64, tol: f64) -> f64 {
    for _ in 0..400 {
        if hi - lo <= tol {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if pred(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    hi
}

const INV_PHI: f64 = 0.618_033_988_749_894_9;

/// Golden-section search for a minimum of `f` on `[a, b]`.
///
/// Returns `(x, f(x))` for the best point evaluated.
pub fn golden_section_min<F: Fn(f64) -> f64>(f: F, mut a: f64, mut b: f64, tol: f64) -> (f64, f64) {
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    while (b - a).abs() > tol {
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d);
        }
    }
    if fc <= fd {
        (c, fc)
    } else {
        (d, fd)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn normal_tails_match_reference() {
        // mpmath: ncdf(-5), ncdf(-10), ncdf(-30)
        let cases = [
            (-5.0, 2.866_515_718_791_939e-7),
            (-10.0, 7.619_853_024_160_527e-24),
            (-30.0, 4.906_713_927_148_187e-198),
        ];
        for (x, expected) in cases {
            // relative accuracy is limited by rounding of x/sqrt(2), about x^2 ulp
            let tol = 1e-15 * x * x;
            let got = normal_cdf(x);
            assert!(((got - expected) / expected).abs() < tol, "x={x}: {got} vs {expected}");
            assert!(((normal_sf(-x) - expected) / expected).abs() < tol);
        }
    }

    #[test]
    fn ln_normal_cdf_is_continuous_across_branches() {
        let below = ln_normal_cdf(-37.0 - 1e-9);
        let above = ln_normal_cdf(-37.0 + 1e-9);
        assert!((below - above).abs() < 1e-6);
        // mpmath: log(ncdf(-40))
        let expected = -804.608_442_013_754;
        assert!((ln_normal_cdf(-40.0) - expected).abs() < 1e-9);
        assert!((ln_normal_cdf(3.0) - normal_cdf(3.0).ln()).abs() < 1e-15);
    }

    #[test]
    fn upper_quantile_inverts_survival() {
        for tail in [0.5, 1e-3, 1e-10, 5e-16] {
            let z = normal_upper_quantile(tail);
            assert!(((normal_sf(z) - tail) / tail).abs() < 1e-10);
        }
    }

    #[test]
    fn gauss_kronrod_integrates_gaussian_density() {
        let r = integrate(normal_pdf, -10.0, 10.0, QuadOptions::default());
        assert!((r.value - 1.0).abs() < 1e-14);
        let r = integrate(|x| x.abs(), -1.0, 2.0, QuadOptions::default());
        assert!((r.value - 2.5).abs() < 1e-11);
    }

    #[test]
    fn golden_section_finds_parabola_minimum() {
        let (x, fx) = golden_section_min(|x| (x - 0.3) * (x - 0.3) + 1.0, 0.0, 2.0, 1e-9);
        assert!((x - 0.3).abs() < 1e-7);
        assert!((fx - 1.0).abs() < 1e-15);
    }

    #[test]
    fn bisection_returns_satisfying_endpoint() {
        let x = bisect_predicate(|x| x * x >= 2.0, 0.0, 2.0, 1e-12);
        assert!(x * x >= 2.0);
        assert!((x - 2f64.sqrt()).abs() < 1e-11);
    }

    #[test]
    fn compensated_sum_recovers_small_terms() {
        let mut s = CompensatedSum::default();
        s.add(1.0);
        for _ in 0..1000 {
            s.add(1e-17);
        }
        s.add(-1.0);
        assert!((s.value() - 1e-14).abs() < 1e-20);
    }
}
