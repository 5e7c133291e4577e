//! Adaptive Gauss-Kronrod (7-15) integration.
//!
//! The integrator bisects the sub-interval with the largest error estimate
//! until the summed estimate drops below the requested absolute tolerance or
//! the evaluation budget runs out. Error estimates follow the QUADPACK
//! rescaling of `|K15 - G7|`, floored at the roundoff level of the integrand.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use serde::Serialize;

use crate::domain::{check_alpha, check_weights, Interval};
use crate::error::{Error, Result};

/// Hard cap on integrand evaluations per call.
pub const MAX_EVALUATIONS: usize = 1_000_000;
/// Default tolerance for coefficient oracles.
pub const DEFAULT_COEFF_TOL: f64 = 1e-10;
/// Default tolerance for left-hand-side integrals.
pub const DEFAULT_LHS_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QuadResult {
    pub value: f64,
    pub error_estimate: f64,
    pub evaluations: usize,
    /// `false` when the budget ran out before the tolerance was met; `value`
    /// is then the best available estimate.
    pub converged: bool,
}

impl QuadResult {
    /// Turn an unconverged result into [`Error::Budget`].
    pub fn require_converged(self) -> Result<Self> {
        if self.converged {
            Ok(self)
        } else {
            Err(Error::Budget(self))
        }
    }

    fn empty() -> Self {
        QuadResult { value: 0.0, error_estimate: 0.0, evaluations: 0, converged: true }
    }

    fn combine(self, other: QuadResult) -> Self {
        QuadResult {
            value: self.value + other.value,
            error_estimate: self.error_estimate + other.error_estimate,
            evaluations: self.evaluations + other.evaluations,
            converged: self.converged && other.converged,
        }
    }
}

// Kronrod abscissae; odd indices are the 7-point Gauss nodes.
#[allow(clippy::excessive_precision)]
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];

#[allow(clippy::excessive_precision)]
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];

#[allow(clippy::excessive_precision)]
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

#[derive(Debug, Clone, Copy)]
struct Segment {
    lo: f64,
    hi: f64,
    value: f64,
    error: f64,
    abs_value: f64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
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
        self.error.total_cmp(&other.error).then_with(|| other.lo.total_cmp(&self.lo))
    }
}

fn gk15<F: Fn(f64) -> f64>(f: &F, lo: f64, hi: f64) -> Result<Segment> {
    let center = 0.5 * (lo + hi);
    let half = 0.5 * (hi - lo);
    let eval = |x: f64| {
        let y = f(x);
        if y.is_finite() {
            Ok(y)
        } else {
            Err(Error::NonFinite { x })
        }
    };

    let fc = eval(center)?;
    let mut kronrod = WGK[7] * fc;
    let mut gauss = WG[3] * fc;
    let mut res_abs = kronrod.abs();
    let mut fv1 = [0.0; 7];
    let mut fv2 = [0.0; 7];
    for j in 0..7 {
        let dx = half * XGK[j];
        let f1 = eval(center - dx)?;
        let f2 = eval(center + dx)?;
        fv1[j] = f1;
        fv2[j] = f2;
        kronrod += WGK[j] * (f1 + f2);
        res_abs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            gauss += WG[j / 2] * (f1 + f2);
        }
    }

    let mean = 0.5 * kronrod;
    let mut res_asc = WGK[7] * (fc - mean).abs();
    for j in 0..7 {
        res_asc += WGK[j] * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }

    let width = half.abs();
    let res_abs = res_abs * width;
    let res_asc = res_asc * width;
    let mut error = ((kronrod - gauss) * half).abs();
    if res_asc != 0.0 && error != 0.0 {
        error = res_asc * (200.0 * error / res_asc).powf(1.5).min(1.0);
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        error = error.max(50.0 * f64::EPSILON * res_abs);
    }

    Ok(Segment { lo, hi, value: kronrod * half, error, abs_value: res_abs })
}

/// Integrate `f` over `[lo, hi]` (`lo <= hi`) to absolute tolerance `tol`,
/// spending at most `max_evaluations` integrand calls.
pub fn integrate_with_budget<F: Fn(f64) -> f64>(
    f: F,
    lo: f64,
    hi: f64,
    tol: f64,
    max_evaluations: usize,
) -> Result<QuadResult> {
    if !(tol > 0.0) {
        return Err(Error::param(format!("quadrature tolerance must be > 0, got {tol}")));
    }
    if !lo.is_finite() || !hi.is_finite() || lo > hi {
        return Err(Error::param(format!("bad integration range [{lo}, {hi}]")));
    }
    if lo == hi {
        return Ok(QuadResult::empty());
    }

    let first = gk15(&f, lo, hi)?;
    let mut evaluations = 15;
    let mut heap = BinaryHeap::new();
    // Segments too narrow to bisect further.
    let mut frozen: Vec<Segment> = Vec::new();
    let mut total_error = first.error;
    let mut total_abs = first.abs_value;
    heap.push(first);

    let mut converged = false;
    loop {
        let target = tol.max(64.0 * f64::EPSILON * total_abs);
        if total_error <= target {
            converged = true;
            break;
        }
        if evaluations + 30 > max_evaluations {
            break;
        }
        let Some(worst) = heap.pop() else { break };
        let mid = 0.5 * (worst.lo + worst.hi);
        if mid <= worst.lo || mid >= worst.hi {
            frozen.push(worst);
            continue;
        }
        let left = gk15(&f, worst.lo, mid)?;
        let right = gk15(&f, mid, worst.hi)?;
        evaluations += 30;
        total_error += left.error + right.error - worst.error;
        total_abs += left.abs_value + right.abs_value - worst.abs_value;
        heap.push(left);
        heap.push(right);
    }

    let mut segments: Vec<Segment> = heap.into_vec();
    segments.extend(frozen);
    segments.sort_by(|x, y| x.lo.total_cmp(&y.lo));
    let value = segments.iter().map(|s| s.value).sum();
    let error_estimate = segments.iter().map(|s| s.error).sum();
    Ok(QuadResult { value, error_estimate, evaluations, converged })
}

/// Integrate `f` over `[lo, hi]` with the default evaluation budget.
pub fn integrate_range<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, tol: f64) -> Result<QuadResult> {
    integrate_with_budget(f, lo, hi, tol, MAX_EVALUATIONS)
}

/// Integrate `f` over an [`Interval`].
pub fn integrate<F: Fn(f64) -> f64>(f: F, iv: &Interval, tol: f64) -> Result<QuadResult> {
    integrate_range(f, iv.a(), iv.b(), tol)
}

/// Integrate over consecutive pieces `[p0, p1], [p1, p2], ...`, so that
/// non-smooth points in `breakpoints` are never inside a quadrature panel.
/// The tolerance is shared equally between the pieces.
pub fn integrate_pieces<F: Fn(f64) -> f64>(f: F, breakpoints: &[f64], tol: f64) -> Result<QuadResult> {
    if breakpoints.len() < 2 {
        return Err(Error::param("need at least two breakpoints"));
    }
    let pieces = (breakpoints.len() - 1) as f64;
    let mut total = QuadResult::empty();
    for w in breakpoints.windows(2) {
        total = total.combine(integrate_range(&f, w[0], w[1], tol / pieces)?);
    }
    Ok(total)
}

/// Weight multiplying the kernel in [`kernel_moment`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KernelWeight {
    /// `t^alpha`
    TPowAlpha,
    /// `1 - t^alpha`
    OneMinusTPowAlpha,
    /// `1`
    One,
}

/// Which weight sits in the kernel `|(lambda + mu) t - s|`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KinkAt {
    Lambda,
    Mu,
}

/// `∫_0^1 |(lambda + mu) t - s|^p_exp w(t) dt` evaluated numerically by
/// splitting at the kink `t = s / (lambda + mu)`.
///
/// This is the independent oracle for the closed-form coefficients.
pub fn kernel_moment(
    alpha: f64,
    lambda: f64,
    mu: f64,
    weight: KernelWeight,
    kink: KinkAt,
    p_exp: f64,
    tol: f64,
) -> Result<QuadResult> {
    check_alpha(alpha)?;
    check_weights(lambda, mu)?;
    if !(p_exp >= 1.0) {
        return Err(Error::param(format!("kernel exponent must be >= 1, got {p_exp}")));
    }
    let c = lambda + mu;
    let s = match kink {
        KinkAt::Lambda => lambda,
        KinkAt::Mu => mu,
    };
    let t0 = s / c;
    let integrand = |t: f64| {
        let w = match weight {
            KernelWeight::TPowAlpha => t.powf(alpha),
            KernelWeight::OneMinusTPowAlpha => 1.0 - t.powf(alpha),
            KernelWeight::One => 1.0,
        };
        (c * t - s).abs().powf(p_exp) * w
    };
    integrate_pieces(integrand, &[0.0, t0, 1.0], tol)
}
