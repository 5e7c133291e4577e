//! Special means of two positive numbers and the mean inequalities obtained
//! by feeding `x^n` and `1/x` into the weighted trapezoid bounds.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::bounds::{rhs, Theorem};
use crate::domain::{check_weights, conjugate, validate_params, Interval, Params, TestFunction};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum MeanKind {
    WeightedArithmetic,
    Arithmetic,
    WeightedHarmonic,
    Harmonic,
    Logarithmic,
    PLogarithmic,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MeanValue {
    pub kind: MeanKind,
    pub weight: Option<f64>,
    pub value: f64,
}

/// `A_w(a, b) = w a + (1 - w) b`.
pub fn weighted_arithmetic(w: f64, a: f64, b: f64) -> f64 {
    w * a + (1.0 - w) * b
}

pub fn arithmetic(a: f64, b: f64) -> f64 {
    0.5 * (a + b)
}

/// `H_w(a, b) = (w/a + (1 - w)/b)^-1`.
pub fn weighted_harmonic(w: f64, a: f64, b: f64) -> f64 {
    1.0 / (w / a + (1.0 - w) / b)
}

pub fn harmonic(a: f64, b: f64) -> f64 {
    2.0 * a * b / (a + b)
}

/// `L(a, b) = (b - a) / (ln b - ln a)`, `L(a, a) = a`.
pub fn logarithmic(a: f64, b: f64) -> f64 {
    if a == b {
        return b;
    }
    let (lo, hi) = if a < b { (a, b) } else { (b, a) };
    (hi - lo) / ((hi - lo) / lo).ln_1p()
}

/// `(b^(p+1) - a^(p+1)) / ((p+1)(b-a))`, i.e. `L_p(a, b)^p`, the integral
/// mean of `x^p` over `[a, b]`.
pub fn p_logarithmic_power(a: f64, b: f64, p: i32) -> f64 {
    if a == b {
        return b.powi(p);
    }
    let (lo, hi) = if a < b { (a, b) } else { (b, a) };
    let e = f64::from(p + 1);
    // hi^e - lo^e = lo^e (exp(e ln(hi/lo)) - 1)
    let diff = lo.powf(e) * (e * ((hi - lo) / lo).ln_1p()).exp_m1();
    diff / (e * (hi - lo))
}

/// `L_p(a, b)`.
pub fn p_logarithmic(a: f64, b: f64, p: i32) -> f64 {
    if a == b {
        return b;
    }
    p_logarithmic_power(a, b, p).powf(1.0 / f64::from(p))
}

fn check_weight(w: f64) -> Result<()> {
    if (0.0..=1.0).contains(&w) {
        Ok(())
    } else {
        Err(Error::param(format!("mean weight must lie in [0, 1], got {w}")))
    }
}

/// Evaluate one of the special means with argument checks.
pub fn mean(kind: MeanKind, a: f64, b: f64, weight: Option<f64>, p: Option<i32>) -> Result<MeanValue> {
    if !a.is_finite() || !b.is_finite() {
        return Err(Error::domain(format!("mean arguments must be finite, got ({a}, {b})")));
    }
    let positive = matches!(
        kind,
        MeanKind::WeightedHarmonic | MeanKind::Harmonic | MeanKind::Logarithmic | MeanKind::PLogarithmic
    );
    if positive && !(a > 0.0 && b > 0.0) {
        return Err(Error::domain(format!("{kind} mean needs a, b > 0, got ({a}, {b})")));
    }
    if !positive && !(a >= 0.0 && b >= 0.0) {
        return Err(Error::domain(format!("{kind} mean needs a, b >= 0, got ({a}, {b})")));
    }
    let weighted = |w: Option<f64>| -> Result<f64> {
        let w = w.ok_or_else(|| Error::param(format!("{kind} mean needs a weight")))?;
        check_weight(w)?;
        Ok(w)
    };
    let (value, weight) = match kind {
        MeanKind::WeightedArithmetic => {
            let w = weighted(weight)?;
            (weighted_arithmetic(w, a, b), Some(w))
        }
        MeanKind::Arithmetic => (arithmetic(a, b), None),
        MeanKind::WeightedHarmonic => {
            let w = weighted(weight)?;
            (weighted_harmonic(w, a, b), Some(w))
        }
        MeanKind::Harmonic => (harmonic(a, b), None),
        MeanKind::Logarithmic => (logarithmic(a, b), None),
        MeanKind::PLogarithmic => {
            let p = p.ok_or_else(|| Error::param("p-logarithmic mean needs p"))?;
            if p == 0 || p == -1 {
                return Err(Error::domain(format!("p-logarithmic mean needs p not in {{-1, 0}}, got {p}")));
            }
            (p_logarithmic(a, b, p), None)
        }
    };
    Ok(MeanValue { kind, weight, value })
}

impl MeanKind {
    pub fn id(self) -> &'static str {
        match self {
            MeanKind::WeightedArithmetic => "weighted_arithmetic",
            MeanKind::Arithmetic => "arithmetic",
            MeanKind::WeightedHarmonic => "weighted_harmonic",
            MeanKind::Harmonic => "harmonic",
            MeanKind::Logarithmic => "logarithmic",
            MeanKind::PLogarithmic => "p_logarithmic",
        }
    }
}

impl fmt::Display for MeanKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

impl FromStr for MeanKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        use MeanKind::*;
        [WeightedArithmetic, Arithmetic, WeightedHarmonic, Harmonic, Logarithmic, PLogarithmic]
            .into_iter()
            .find(|k| k.id() == s)
            .ok_or_else(|| Error::Unknown(format!("mean kind `{s}`")))
    }
}

/// One of the six mean inequalities. Propositions 1-3 use `f(x) = x^n`
/// with `|n| >= 2`; 4-6 use `f(x) = 1/x`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Proposition {
    index: u8,
    n: i32,
}

impl Proposition {
    pub fn new(index: u8, n: Option<i32>) -> Result<Self> {
        match index {
            1..=3 => {
                let n = n.ok_or_else(|| Error::param(format!("proposition {index} needs n")))?;
                if n.abs() < 2 {
                    return Err(Error::param(format!("proposition {index} needs |n| >= 2, got {n}")));
                }
                Ok(Proposition { index, n })
            }
            4..=6 => Ok(Proposition { index, n: -1 }),
            _ => Err(Error::param(format!("proposition index must be 1..=6, got {index}"))),
        }
    }

    pub fn index(&self) -> u8 {
        self.index
    }

    pub fn exponent(&self) -> i32 {
        self.n
    }

    /// The bound it instantiates (at `alpha = m = 1`).
    pub fn theorem(&self) -> Theorem {
        match self.index {
            1 | 4 => Theorem::Thm11,
            2 | 5 => Theorem::Thm211,
            _ => Theorem::Thm22,
        }
    }

    pub fn function(&self) -> TestFunction {
        if self.index <= 3 {
            TestFunction::power(self.n)
        } else {
            TestFunction::new("recip", |x: f64| 1.0 / x, |x: f64| -1.0 / (x * x), crate::domain::SINGULAR_MARGIN)
        }
    }

    fn allows_q_one(&self) -> bool {
        matches!(self.index, 1 | 4)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PropositionCheck {
    pub proposition: u8,
    /// Distance between the weighted endpoint mean and the integral mean.
    pub mean_lhs: f64,
    /// Right-hand side assembled from the mean-form display.
    pub mean_rhs: f64,
    /// Right-hand side from the generic bound applied to `x^n` or `1/x`.
    pub corollary_rhs: f64,
    /// `|mean_rhs - corollary_rhs|`.
    pub residual: f64,
    /// `mean_lhs <= corollary_rhs`, up to rounding.
    pub holds: bool,
    /// `mean_lhs <= mean_rhs`, up to rounding.
    pub display_holds: bool,
    /// Proposition 6 only: `|A_w(λ^p, μ^p)^(1/p) - ((λ^(p+1) + μ^(p+1))/(λ+μ))^(1/p)|`.
    pub factor_residual: Option<f64>,
}

/// Relative rounding allowance in the `holds` comparisons.
const HOLDS_REL_TOL: f64 = 1e-12;

/// Evaluate proposition `prop` on `0 < a < b` with weights `(lambda, mu)`
/// and exponent `q`.
pub fn proposition_check(prop: Proposition, a: f64, b: f64, lambda: f64, mu: f64, q: f64) -> Result<PropositionCheck> {
    if !(a > 0.0 && a < b && b.is_finite()) {
        return Err(Error::domain(format!("need 0 < a < b, got ({a}, {b})")));
    }
    check_weights(lambda, mu)?;
    if prop.allows_q_one() {
        if !(q >= 1.0 && q.is_finite()) {
            return Err(Error::param(format!("proposition {} needs q >= 1, got {q}", prop.index)));
        }
    } else {
        conjugate(q)?;
    }

    let c = lambda + mu;
    let w = lambda / c;
    let n = prop.n;
    let nf = f64::from(n);

    let mean_lhs = if prop.index <= 3 {
        (weighted_arithmetic(w, a.powi(n), b.powi(n)) - p_logarithmic(a, b, n).powi(n)).abs()
    } else {
        (1.0 / weighted_harmonic(w, a, b) - 1.0 / logarithmic(a, b)).abs()
    };

    let mut factor_residual = None;
    let mean_rhs = match prop.index {
        1 | 4 => {
            let (g1, g2, g3, g4) = unit_alpha_gammas(lambda, mu);
            // |f'(x)|^q without the constant |n|^q.
            let e = if prop.index == 1 { q * (nf - 1.0) } else { -2.0 * q };
            let (pa, pb) = (a.powf(e), b.powf(e));
            let scale = if prop.index == 1 { nf.abs() } else { 1.0 };
            let mass = (lambda * lambda + mu * mu) / (2.0 * c);
            let pre = (b - a) / c * mass.powf((q - 1.0) / q) * scale;
            pre * (g1 * pb + g2 * pa).powf(1.0 / q).min((g3 * pa + g4 * pb).powf(1.0 / q))
        }
        2 | 5 => {
            let p = conjugate(q)?;
            let z = weighted_arithmetic(w, b, a);
            let (m1, m2, scale) = if prop.index == 2 {
                let e = (nf - 1.0) * q;
                (arithmetic(a.powf(e), z.powf(e)), arithmetic(b.powf(e), z.powf(e)), nf.abs())
            } else {
                let e = 2.0 * q;
                (1.0 / harmonic(a.powf(e), z.powf(e)), 1.0 / harmonic(b.powf(e), z.powf(e)), 1.0)
            };
            (b - a) / (c * c)
                * (1.0 / (p + 1.0)).powf(1.0 / p)
                * scale
                * (lambda * lambda * m1.powf(1.0 / q) + mu * mu * m2.powf(1.0 / q))
        }
        3 => {
            let p = conjugate(q)?;
            let e = (nf - 1.0) * q;
            (b - a) / c
                * ((lambda.powf(p + 1.0) + mu.powf(p + 1.0)) / c).powf(1.0 / p)
                * (1.0 / (p + 1.0)).powf(1.0 / p)
                * nf.abs()
                * arithmetic(a.powf(e), b.powf(e)).powf(1.0 / q)
        }
        _ => {
            let p = conjugate(q)?;
            let a_factor = weighted_arithmetic(w, lambda.powf(p), mu.powf(p)).powf(1.0 / p);
            let direct = ((lambda.powf(p + 1.0) + mu.powf(p + 1.0)) / c).powf(1.0 / p);
            factor_residual = Some((a_factor - direct).abs());
            let e = 2.0 * q;
            (b - a) / c
                * a_factor
                * (1.0 / (p + 1.0)).powf(1.0 / p)
                * 0.5_f64.powf(1.0 / q)
                * weighted_harmonic(0.5, a.powf(e), b.powf(e)).powf(-1.0 / q)
        }
    };

    let params = Params::new(1.0, 1.0, lambda, mu, q)?;
    let iv = Interval::new(a, b)?;
    let cfg = validate_params(params, iv, &prop.function())?;
    let corollary_rhs = rhs(prop.theorem(), &cfg)?.value;

    let allowance = |r: f64| HOLDS_REL_TOL * r.abs().max(1.0);
    Ok(PropositionCheck {
        proposition: prop.index,
        mean_lhs,
        mean_rhs,
        corollary_rhs,
        residual: (mean_rhs - corollary_rhs).abs(),
        holds: mean_lhs <= corollary_rhs + allowance(corollary_rhs),
        display_holds: mean_lhs <= mean_rhs + allowance(mean_rhs),
        factor_residual,
    })
}

/// `gamma1..gamma4` at `alpha = 1`, in the reduced form
/// `gamma1 = (2λ^3/(λ+μ)^2 + 2μ - λ) / 6`.
fn unit_alpha_gammas(lambda: f64, mu: f64) -> (f64, f64, f64, f64) {
    let c = lambda + mu;
    let mass = (lambda * lambda + mu * mu) / (2.0 * c);
    let g1 = (2.0 * lambda.powi(3) / (c * c) + 2.0 * mu - lambda) / 6.0;
    let g3 = (2.0 * mu.powi(3) / (c * c) + 2.0 * lambda - mu) / 6.0;
    (g1, mass - g1, g3, mass - g3)
}
