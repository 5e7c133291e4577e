//! Left- and right-hand sides of the trapezoid-type inequalities.
//!
//! Every bound controls the weighted trapezoid deviation
//!
//! ```text
//! | (λ f(a) + μ f(b)) / (λ + μ) - 1/(b-a) ∫_a^b f(x) dx |
//! ```
//!
//! (at `λ = μ` for the classical ones) except [`Theorem::Sso`], which bounds
//! the integral mean itself.

use std::fmt;
use std::str::FromStr;

use serde::{Serialize, Serializer};

use crate::coefficients::{gamma_coeffs, k_factors, kernel_mass, m_factors, mu_factors, nu_coeffs};
use crate::convexity::{check_alpha_m_convex_on, derivative_power, ConvexityVerdict, DEFAULT_GRID_N};
use crate::domain::{
    check_weights, conjugate, validate_params, BoundReport, CoefficientSet, Config, Interval, Params, TestFunction,
};
use crate::error::{Error, Result};
use crate::quadrature::{integrate, integrate_pieces, DEFAULT_LHS_TOL};

/// Additive slack in `holds` on top of the quadrature error estimate.
pub const DEFAULT_HOLDS_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Theorem {
    /// `(b-a)/8 (|f'(a)| + |f'(b)|)` for convex `|f'|`.
    Da,
    /// Integral-mean bound for `(alpha, m)`-convex `f`.
    Sso,
    /// Hoelder bound for `m`-convex `|f'|^q` with `mu1`, `mu2`.
    BopM,
    /// Power-mean bound for `(alpha, m)`-convex `|f'|^q` with `nu1`, `nu2`.
    BopAm,
    /// Weighted power-mean bound with `gamma1..gamma4`.
    Thm11,
    /// Hoelder bound split at the kink, with `M1`, `M2`.
    Thm211,
    /// Global Hoelder bound with `K1`, `K2`.
    Thm22,
}

impl Theorem {
    pub const ALL: [Theorem; 7] =
        [Theorem::Da, Theorem::Sso, Theorem::BopM, Theorem::BopAm, Theorem::Thm11, Theorem::Thm211, Theorem::Thm22];

    pub fn id(self) -> &'static str {
        match self {
            Theorem::Da => "da",
            Theorem::Sso => "sso",
            Theorem::BopM => "bop_m",
            Theorem::BopAm => "bop_am",
            Theorem::Thm11 => "thm11",
            Theorem::Thm211 => "thm211",
            Theorem::Thm22 => "thm22",
        }
    }

    /// The bound is stated for `q > 1` and uses the conjugate exponent.
    pub fn needs_conjugate(self) -> bool {
        matches!(self, Theorem::BopM | Theorem::Thm211 | Theorem::Thm22)
    }

    /// Parameter restrictions beyond [`Params::check`].
    pub fn check_params(self, params: &Params) -> Result<()> {
        params.check()?;
        if self.needs_conjugate() {
            conjugate(params.q)
                .map_err(|_| Error::param(format!("`{}` requires q > 1, got {}", self.id(), params.q)))?;
        }
        Ok(())
    }

    /// The convexity hypothesis the bound rests on.
    pub fn hypothesis(self, params: &Params) -> Hypothesis {
        let deriv = |q| GateTarget::DerivativePower(q);
        match self {
            Theorem::Da => Hypothesis { target: deriv(1.0), alpha: 1.0, m: 1.0 },
            Theorem::Sso => Hypothesis { target: GateTarget::Function, alpha: params.alpha, m: params.m },
            Theorem::BopM => Hypothesis { target: deriv(params.q), alpha: 1.0, m: params.m },
            Theorem::BopAm | Theorem::Thm11 | Theorem::Thm211 | Theorem::Thm22 => {
                Hypothesis { target: deriv(params.q), alpha: params.alpha, m: params.m }
            }
        }
    }
}

impl fmt::Display for Theorem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

impl FromStr for Theorem {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Theorem::ALL.into_iter().find(|t| t.id() == s.trim()).ok_or_else(|| Error::Unknown(format!("theorem `{s}`")))
    }
}

impl Serialize for Theorem {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(self.id())
    }
}

/// What must be `(alpha, m)`-convex.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GateTarget {
    Function,
    DerivativePower(f64),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Hypothesis {
    pub target: GateTarget,
    pub alpha: f64,
    pub m: f64,
}

/// Tolerances for one evaluation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Settings {
    pub quad_tol: f64,
    pub holds_tol: f64,
    pub grid_n: usize,
}

impl Default for Settings {
    fn default() -> Self {
        Settings { quad_tol: DEFAULT_LHS_TOL, holds_tol: DEFAULT_HOLDS_TOL, grid_n: DEFAULT_GRID_N }
    }
}

/// A right-hand side with the pieces that produced it.
#[derive(Debug, Clone, PartialEq)]
pub struct Rhs {
    pub value: f64,
    pub branches: Option<[f64; 2]>,
    pub loose: Option<f64>,
    pub coefficients: Option<CoefficientSet>,
}

impl Rhs {
    fn plain(value: f64) -> Self {
        Rhs { value, branches: None, loose: None, coefficients: None }
    }

    fn min_of(first: f64, second: f64) -> Self {
        Rhs { value: first.min(second), branches: Some([first, second]), loose: None, coefficients: None }
    }

    fn with(mut self, coefficients: CoefficientSet) -> Self {
        self.coefficients = Some(coefficients);
        self
    }
}

/// The weighted trapezoid deviation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Deviation {
    pub weighted_endpoint_value: f64,
    pub integral_mean: f64,
    pub lhs_abs: f64,
    pub quad_error: f64,
}

/// `1/(b-a) ∫_a^b f` and its error estimate.
pub fn integral_mean(func: &TestFunction, iv: &Interval, tol: f64) -> Result<(f64, f64)> {
    let r = integrate(|x| func.eval(x), iv, tol)?;
    Ok((r.value / iv.width(), r.error_estimate / iv.width()))
}

pub fn deviation(func: &TestFunction, iv: &Interval, lambda: f64, mu: f64, tol: f64) -> Result<Deviation> {
    check_weights(lambda, mu)?;
    let weighted = (lambda * func.eval(iv.a()) + mu * func.eval(iv.b())) / (lambda + mu);
    let (mean, err) = integral_mean(func, iv, tol)?;
    Ok(Deviation {
        weighted_endpoint_value: weighted,
        integral_mean: mean,
        lhs_abs: (weighted - mean).abs(),
        quad_error: err,
    })
}

/// Both sides of the integration-by-parts identity
/// `(λf(a)+μf(b))/(λ+μ) - mean(f) = (b-a)/(λ+μ) ∫_0^1 ((λ+μ)t - λ) f'(tb + (1-t)a) dt`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IdentityCheck {
    pub lhs: f64,
    pub rhs: f64,
    pub residual: f64,
    pub quad_error: f64,
}

pub fn lemma21(func: &TestFunction, iv: &Interval, lambda: f64, mu: f64, tol: f64) -> Result<IdentityCheck> {
    let dev = deviation(func, iv, lambda, mu, tol)?;
    let lhs = dev.weighted_endpoint_value - dev.integral_mean;
    let c = lambda + mu;
    let (a, b) = (iv.a(), iv.b());
    let kernel = |t: f64| (c * t - lambda) * func.deriv(t * b + (1.0 - t) * a);
    let r = integrate_pieces(kernel, &[0.0, lambda / c, 1.0], tol)?;
    let scale = iv.width() / c;
    let rhs = scale * r.value;
    Ok(IdentityCheck { lhs, rhs, residual: (lhs - rhs).abs(), quad_error: dev.quad_error + scale * r.error_estimate })
}

/// `|LHS - RHS|` of the identity in [`lemma21`].
pub fn lemma21_residual(func: &TestFunction, iv: &Interval, lambda: f64, mu: f64, tol: f64) -> Result<f64> {
    lemma21(func, iv, lambda, mu, tol).map(|c| c.residual)
}

/// `(f((a+b)/2), (f(a)+f(b))/2)`, which bracket the integral mean of a convex `f`.
pub fn bound_hh(func: &TestFunction, iv: &Interval) -> (f64, f64) {
    (func.eval(iv.midpoint()), 0.5 * (func.eval(iv.a()) + func.eval(iv.b())))
}

fn abs_pow(func: &TestFunction, q: f64) -> impl Fn(f64) -> f64 + '_ {
    move |x| func.deriv(x).abs().powf(q)
}

/// `(u)^(1/q)`, skipping the root at `q = 1`.
fn root(u: f64, q: f64) -> f64 {
    if q == 1.0 {
        u
    } else {
        u.powf(1.0 / q)
    }
}

fn rhs_da(cfg: &Config) -> Rhs {
    let (f, iv) = (&cfg.function, &cfg.interval);
    Rhs::plain(iv.width() / 8.0 * (f.deriv(iv.a()).abs() + f.deriv(iv.b()).abs()))
}

fn rhs_sso(cfg: &Config) -> Rhs {
    let (f, iv, p) = (&cfg.function, &cfg.interval, &cfg.params);
    let (a, b, alpha, m) = (iv.a(), iv.b(), p.alpha, p.m);
    let first = (f.eval(a) + alpha * m * f.eval(b / m)) / (alpha + 1.0);
    let second = (f.eval(b) + alpha * m * f.eval(a / m)) / (alpha + 1.0);
    Rhs::min_of(first, second)
}

fn rhs_bop_m(cfg: &Config) -> Result<Rhs> {
    let (f, iv, p) = (&cfg.function, &cfg.interval, &cfg.params);
    let q = p.q;
    let pc = conjugate(q)?;
    let mu = mu_factors(f, iv, p.m, q)?;
    let loose = iv.width() / 4.0 * (root(mu.value("mu1"), q) + root(mu.value("mu2"), q));
    let factor = ((q - 1.0) / (2.0 * q - 1.0)).powf(1.0 / pc);
    Ok(Rhs { value: factor * loose, branches: None, loose: Some(loose), coefficients: Some(mu) })
}

fn rhs_bop_am(cfg: &Config) -> Result<Rhs> {
    let (f, iv, p) = (&cfg.function, &cfg.interval, &cfg.params);
    let (a, b, m, q) = (iv.a(), iv.b(), p.m, p.q);
    let nu = nu_coeffs(p.alpha)?;
    let (nu1, nu2) = (nu.value("nu1"), nu.value("nu2"));
    let g = abs_pow(f, q);
    let first = root(nu1 * g(a) + m * nu2 * g(b / m), q);
    let second = root(nu1 * g(b) + m * nu2 * g(a / m), q);
    let scale = if q == 1.0 { 1.0 } else { 0.5_f64.powf(1.0 - 1.0 / q) };
    let pre = iv.width() / 2.0 * scale;
    Ok(Rhs::min_of(pre * first, pre * second).with(nu))
}

fn rhs_thm11(cfg: &Config) -> Result<Rhs> {
    let (f, iv, p) = (&cfg.function, &cfg.interval, &cfg.params);
    let (a, b, m, q) = (iv.a(), iv.b(), p.m, p.q);
    let (lambda, mu) = (p.lambda, p.mu);
    let gamma = gamma_coeffs(p.alpha, lambda, mu)?;
    let [g1, g2, g3, g4] = ["gamma1", "gamma2", "gamma3", "gamma4"].map(|k| gamma.value(k));
    let outer = iv.width() / (lambda + mu);
    let (first, second) = if q == 1.0 {
        let d = |x: f64| f.deriv(x).abs();
        (outer * (g1 * d(b) + m * g2 * d(a / m)), outer * (g3 * d(a) + m * g4 * d(b / m)))
    } else {
        let g = abs_pow(f, q);
        let pre = outer * kernel_mass(lambda, mu).powf((q - 1.0) / q);
        (pre * (g1 * g(b) + m * g2 * g(a / m)).powf(1.0 / q), pre * (g3 * g(a) + m * g4 * g(b / m)).powf(1.0 / q))
    };
    Ok(Rhs::min_of(first, second).with(gamma))
}

fn rhs_thm211(cfg: &Config) -> Result<Rhs> {
    let (f, iv, p) = (&cfg.function, &cfg.interval, &cfg.params);
    let q = p.q;
    let pc = conjugate(q)?;
    let (lambda, mu) = (p.lambda, p.mu);
    let mf = m_factors(f, iv, p.alpha, p.m, lambda, mu, q)?;
    let c = lambda + mu;
    let value = iv.width() / (c * c)
        * (1.0 / (pc + 1.0)).powf(1.0 / pc)
        * (lambda * lambda * mf.value("M1").powf(1.0 / q) + mu * mu * mf.value("M2").powf(1.0 / q));
    Ok(Rhs::plain(value).with(mf))
}

fn rhs_thm22(cfg: &Config) -> Result<Rhs> {
    let (f, iv, p) = (&cfg.function, &cfg.interval, &cfg.params);
    let q = p.q;
    let pc = conjugate(q)?;
    let (lambda, mu) = (p.lambda, p.mu);
    let k = k_factors(f, iv, p.alpha, p.m, q)?;
    let c = lambda + mu;
    let kernel = ((lambda.powf(pc + 1.0) + mu.powf(pc + 1.0)) / ((pc + 1.0) * c)).powf(1.0 / pc);
    let pre = iv.width() / c * kernel * (1.0 / (p.alpha + 1.0)).powf(1.0 / q);
    let first = pre * k.value("K1").powf(1.0 / q);
    let second = pre * k.value("K2").powf(1.0 / q);
    Ok(Rhs::min_of(first, second).with(k))
}

/// Closed-form right-hand side of `theorem` for a validated configuration.
pub fn rhs(theorem: Theorem, cfg: &Config) -> Result<Rhs> {
    theorem.check_params(&cfg.params)?;
    match theorem {
        Theorem::Da => Ok(rhs_da(cfg)),
        Theorem::Sso => Ok(rhs_sso(cfg)),
        Theorem::BopM => rhs_bop_m(cfg),
        Theorem::BopAm => rhs_bop_am(cfg),
        Theorem::Thm11 => rhs_thm11(cfg),
        Theorem::Thm211 => rhs_thm211(cfg),
        Theorem::Thm22 => rhs_thm22(cfg),
    }
}

/// Left-hand side of `theorem` and its quadrature error.
pub fn lhs(theorem: Theorem, cfg: &Config, tol: f64) -> Result<(f64, f64)> {
    let (f, iv, p) = (&cfg.function, &cfg.interval, &cfg.params);
    match theorem {
        Theorem::Sso => integral_mean(f, iv, tol),
        Theorem::Da | Theorem::BopM | Theorem::BopAm => {
            deviation(f, iv, 1.0, 1.0, tol).map(|d| (d.lhs_abs, d.quad_error))
        }
        Theorem::Thm11 | Theorem::Thm211 | Theorem::Thm22 => {
            deviation(f, iv, p.lambda, p.mu, tol).map(|d| (d.lhs_abs, d.quad_error))
        }
    }
}

/// Evaluate both sides without checking the convexity hypothesis.
pub fn evaluate(theorem: Theorem, cfg: &Config, settings: &Settings) -> Result<BoundReport> {
    let rhs = rhs(theorem, cfg)?;
    let (lhs, err) = lhs(theorem, cfg, settings.quad_tol)?;
    Ok(BoundReport::assemble(theorem, lhs, err, rhs, settings.holds_tol))
}

/// Screen the theorem's convexity hypothesis on the range its proof touches,
/// `[min(a, a/m), max(b, b/m)]`.
pub fn gate(theorem: Theorem, cfg: &Config, grid_n: usize) -> Result<ConvexityVerdict> {
    let hyp = theorem.hypothesis(&cfg.params);
    let (lo, hi) = cfg.interval.stretched(hyp.m);
    match hyp.target {
        GateTarget::Function => {
            let f = cfg.function.clone();
            check_alpha_m_convex_on(move |x| f.eval(x), lo, hi, hyp.alpha, hyp.m, grid_n)
        }
        GateTarget::DerivativePower(q) => {
            check_alpha_m_convex_on(derivative_power(&cfg.function, q), lo, hi, hyp.alpha, hyp.m, grid_n)
        }
    }
}

/// Validate, gate, and evaluate.
///
/// A failed hypothesis is reported as [`Error::Gate`], never as a violated bound.
pub fn verify(
    func: &TestFunction,
    iv: Interval,
    params: Params,
    theorem: Theorem,
    settings: &Settings,
) -> Result<BoundReport> {
    let cfg = validate_params(params, iv, func)?;
    theorem.check_params(&cfg.params)?;
    let verdict = gate(theorem, &cfg, settings.grid_n)?;
    if !verdict.holds {
        return Err(Error::Gate(Box::new(verdict)));
    }
    evaluate(theorem, &cfg, settings)
}

fn evaluate_default(theorem: Theorem, func: &TestFunction, iv: Interval, params: Params) -> Result<BoundReport> {
    let cfg = validate_params(params, iv, func)?;
    evaluate(theorem, &cfg, &Settings::default())
}

pub fn bound_da(func: &TestFunction, iv: Interval) -> Result<BoundReport> {
    evaluate_default(Theorem::Da, func, iv, Params::unit())
}

pub fn bound_sso(func: &TestFunction, iv: Interval, alpha: f64, m: f64) -> Result<BoundReport> {
    evaluate_default(Theorem::Sso, func, iv, Params::new(alpha, m, 1.0, 1.0, 1.0)?)
}

pub fn bound_bop_m(func: &TestFunction, iv: Interval, m: f64, q: f64) -> Result<BoundReport> {
    evaluate_default(Theorem::BopM, func, iv, Params::new(1.0, m, 1.0, 1.0, q)?)
}

pub fn bound_bop_am(func: &TestFunction, iv: Interval, alpha: f64, m: f64, q: f64) -> Result<BoundReport> {
    evaluate_default(Theorem::BopAm, func, iv, Params::new(alpha, m, 1.0, 1.0, q)?)
}

pub fn bound_thm11(func: &TestFunction, iv: Interval, params: Params) -> Result<BoundReport> {
    evaluate_default(Theorem::Thm11, func, iv, params)
}

pub fn bound_thm211(func: &TestFunction, iv: Interval, params: Params) -> Result<BoundReport> {
    evaluate_default(Theorem::Thm211, func, iv, params)
}

pub fn bound_thm22(func: &TestFunction, iv: Interval, params: Params) -> Result<BoundReport> {
    evaluate_default(Theorem::Thm22, func, iv, params)
}

/// The global Hoelder bound specialised to `lambda = mu`:
/// `(b-a)/2 (1/(p+1))^(1/p) (1/(alpha+1))^(1/q) min{K1, K2}^(1/q)`.
pub fn thm22_equal_weight_form(func: &TestFunction, iv: &Interval, alpha: f64, m: f64, q: f64) -> Result<f64> {
    let pc = conjugate(q)?;
    let k = k_factors(func, iv, alpha, m, q)?;
    Ok(iv.width() / 2.0
        * (1.0 / (pc + 1.0)).powf(1.0 / pc)
        * (1.0 / (alpha + 1.0)).powf(1.0 / q)
        * k.value("K1").min(k.value("K2")).powf(1.0 / q))
}

/// The global Hoelder bound specialised to `alpha = m = 1`:
/// `(b-a)/(λ+μ) ((λ^(p+1)+μ^(p+1))/(λ+μ))^(1/p) (1/(p+1))^(1/p) (1/2)^(1/q) (|f'(a)|^q + |f'(b)|^q)^(1/q)`.
pub fn thm22_unit_form(func: &TestFunction, iv: &Interval, lambda: f64, mu: f64, q: f64) -> Result<f64> {
    check_weights(lambda, mu)?;
    let pc = conjugate(q)?;
    let c = lambda + mu;
    let g = abs_pow(func, q);
    Ok(iv.width() / c
        * ((lambda.powf(pc + 1.0) + mu.powf(pc + 1.0)) / c).powf(1.0 / pc)
        * (1.0 / (pc + 1.0)).powf(1.0 / pc)
        * 0.5_f64.powf(1.0 / q)
        * (g(iv.a()) + g(iv.b())).powf(1.0 / q))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::corpus_function;

    fn iv(a: f64, b: f64) -> Interval {
        Interval::new(a, b).unwrap()
    }

    fn sq() -> TestFunction {
        corpus_function("pow2").unwrap()
    }

    fn params(alpha: f64, m: f64, lambda: f64, mu: f64, q: f64) -> Params {
        Params::new(alpha, m, lambda, mu, q).unwrap()
    }

    #[test]
    fn theorem_ids_round_trip() {
        for t in Theorem::ALL {
            assert_eq!(t.id().parse::<Theorem>().unwrap(), t);
        }
        assert!("thm99".parse::<Theorem>().is_err());
    }

    #[test]
    fn deviation_worked_values() {
        let d = deviation(&sq(), &iv(0.0, 1.0), 1.0, 1.0, 1e-12).unwrap();
        assert!((d.lhs_abs - 1.0 / 6.0).abs() < 1e-12);
        assert_eq!(d.weighted_endpoint_value, 0.5);
        let d = deviation(&sq(), &iv(1.0, 2.0), 2.0, 1.0, 1e-12).unwrap();
        assert!((d.lhs_abs - 1.0 / 3.0).abs() < 1e-12);
        let lin = corpus_function("linear").unwrap();
        let d = deviation(&lin, &iv(0.5, 3.0), 2.0, 2.0, 1e-12).unwrap();
        assert!(d.lhs_abs < 1e-14);
        let d = deviation(&lin, &iv(0.5, 3.0), 2.0, 1.0, 1e-12).unwrap();
        assert!(d.lhs_abs > 0.1);
        assert!(deviation(&lin, &iv(0.5, 3.0), 0.0, 0.0, 1e-12).is_err());
    }

    #[test]
    fn identity_worked_values() {
        let c = lemma21(&sq(), &iv(0.0, 1.0), 1.0, 1.0, 1e-12).unwrap();
        assert!((c.lhs - 1.0 / 6.0).abs() < 1e-12);
        assert!((c.rhs - 1.0 / 6.0).abs() < 1e-12);
        assert!(c.residual <= 1e-10);
        let e = corpus_function("exp").unwrap();
        assert!(lemma21_residual(&e, &iv(0.0, 1.0), 1.0, 3.0, 1e-12).unwrap() <= 1e-9);
        let k = TestFunction::new("const", |_| 4.0, |_| 0.0, 0.0);
        let c = lemma21(&k, &iv(1.0, 2.0), 1.0, 2.0, 1e-12).unwrap();
        assert!(c.lhs.abs() < 1e-14 && c.rhs == 0.0);
    }

    #[test]
    fn hh_bracket_worked_values() {
        let (lo, hi) = bound_hh(&sq(), &iv(0.0, 1.0));
        assert_eq!((lo, hi), (0.25, 0.5));
        let recip = corpus_function("recip").unwrap();
        let (lo, hi) = bound_hh(&recip, &iv(1.0, 2.0));
        assert!((lo - 2.0 / 3.0).abs() < 1e-15 && hi == 0.75);
        assert!(lo < std::f64::consts::LN_2 && std::f64::consts::LN_2 < hi);
        let lin = corpus_function("linear").unwrap();
        assert_eq!(bound_hh(&lin, &iv(1.0, 3.0)), (2.0, 2.0));
    }

    #[test]
    fn classical_bounds_worked_values() {
        let r = bound_da(&sq(), iv(0.0, 1.0)).unwrap();
        assert_eq!(r.rhs, 0.25);
        assert!(r.holds);
        let r = bound_da(&sq(), iv(1.0, 2.0)).unwrap();
        assert_eq!(r.rhs, 0.75);
        assert!((r.lhs - 1.0 / 6.0).abs() < 1e-12);

        let r = bound_sso(&sq(), iv(0.0, 1.0), 1.0, 1.0).unwrap();
        assert_eq!(r.rhs, 0.5);
        assert!((r.lhs - 1.0 / 3.0).abs() < 1e-12);
        let r = bound_sso(&sq(), iv(1.0, 2.0), 1.0, 1.0).unwrap();
        assert_eq!(r.rhs, 2.5);
        assert_eq!(r.branches, Some([2.5, 2.5]));

        let r = bound_bop_am(&sq(), iv(1.0, 2.0), 1.0, 1.0, 1.0).unwrap();
        assert!((r.rhs - 0.75).abs() < 1e-15);
    }

    #[test]
    fn bop_m_worked_values() {
        let r = bound_bop_m(&sq(), iv(1.0, 2.0), 1.0, 2.0).unwrap();
        let loose = 0.25 * (6.5_f64.sqrt() + 12.5_f64.sqrt());
        assert!((r.loose_rhs.unwrap() - loose).abs() < 1e-14);
        assert!((r.rhs - loose / 3.0_f64.sqrt()).abs() < 1e-14);
        assert!((r.loose_rhs.unwrap() - 1.5212).abs() < 1e-4);
        assert!((r.rhs - 0.8783).abs() < 1e-3);
        assert!(r.rhs <= r.loose_rhs.unwrap());
        assert!(matches!(bound_bop_m(&sq(), iv(1.0, 2.0), 1.0, 1.0), Err(Error::Param(_))));
    }

    #[test]
    fn thm11_worked_values() {
        let r = bound_thm11(&sq(), iv(1.0, 2.0), params(1.0, 1.0, 2.0, 1.0, 1.0)).unwrap();
        assert!((r.rhs - 61.0 / 81.0).abs() < 1e-14);
        assert!((r.lhs - 1.0 / 3.0).abs() < 1e-12);
        let [b1, b2] = r.branches.unwrap();
        assert!((b1 - b2).abs() < 1e-15);
        let r = bound_thm11(&sq(), iv(1.0, 2.0), params(1.0, 1.0, 1.0, 1.0, 1.0)).unwrap();
        assert!((r.rhs - 0.75).abs() < 1e-15);
    }

    #[test]
    fn thm211_worked_values() {
        let r = bound_thm211(&sq(), iv(1.0, 2.0), params(1.0, 1.0, 1.0, 1.0, 2.0)).unwrap();
        let expected = 0.25 / 3.0_f64.sqrt() * (6.5_f64.sqrt() + 12.5_f64.sqrt());
        assert!((r.rhs - expected).abs() < 1e-14);
        let r = bound_thm211(&sq(), iv(1.0, 2.0), params(1.0, 1.0, 2.0, 1.0, 2.0)).unwrap();
        let expected = (4.0 * (68.0_f64 / 9.0).sqrt() + (122.0_f64 / 9.0).sqrt()) / (9.0 * 3.0_f64.sqrt());
        assert!((r.rhs - expected).abs() < 1e-14);
        assert!((r.rhs - 0.9415).abs() < 1e-4);
        assert!(bound_thm211(&sq(), iv(1.0, 2.0), Params::unit()).is_err());
    }

    #[test]
    fn thm22_worked_values() {
        // (1/2) (2/(3*2))^(1/2) (1/2)^(1/2) sqrt(20) = sqrt(5/6)
        let r = bound_thm22(&sq(), iv(1.0, 2.0), params(1.0, 1.0, 1.0, 1.0, 2.0)).unwrap();
        assert!((r.rhs - (5.0_f64 / 6.0).sqrt()).abs() < 1e-14, "{}", r.rhs);
        let eq = thm22_equal_weight_form(&sq(), &iv(1.0, 2.0), 1.0, 1.0, 2.0).unwrap();
        assert!((r.rhs - eq).abs() < 1e-14);
        let unit = thm22_unit_form(&sq(), &iv(1.0, 2.0), 1.0, 1.0, 2.0).unwrap();
        assert!((r.rhs - unit).abs() < 1e-14);
    }

    #[test]
    fn q_one_prefactor_is_exactly_one() {
        let p = params(0.5, 0.5, 2.0, 5.0, 1.0);
        let cfg = validate_params(p, iv(1.0, 2.0), &sq()).unwrap();
        let r = rhs(Theorem::Thm11, &cfg).unwrap();
        let g = r.coefficients.clone().unwrap();
        let expected = 1.0 / 7.0 * (g.value("gamma1") * 4.0 + 0.5 * g.value("gamma2") * 4.0);
        assert_eq!(r.branches.unwrap()[0], expected);
    }

    #[test]
    fn verify_reports_gate_failure() {
        let e = corpus_function("exp").unwrap();
        let p = params(1.0, 0.5, 1.0, 1.0, 1.0);
        let err = verify(&e, iv(1.0, 2.0), p, Theorem::Thm11, &Settings::default()).unwrap_err();
        match err {
            Error::Gate(v) => assert!(!v.holds && v.worst_violation > 1e-9),
            other => panic!("expected gate failure, got {other:?}"),
        }
    }

    #[test]
    fn verify_worked_values() {
        let s = Settings::default();
        let r = verify(&sq(), iv(1.0, 2.0), params(1.0, 1.0, 2.0, 1.0, 1.0), Theorem::Thm11, &s).unwrap();
        assert!(r.holds);
        assert!((r.slack - (61.0 / 81.0 - 1.0 / 3.0)).abs() < 1e-9);
        let r = verify(&sq(), iv(0.0, 1.0), Params::unit(), Theorem::Da, &s).unwrap();
        assert!(r.holds);
        assert!((r.slack - (0.25 - 1.0 / 6.0)).abs() < 1e-9);
        let k = TestFunction::new("const", |_| 2.0, |_| 0.0, 0.0);
        for t in [Theorem::Da, Theorem::BopAm, Theorem::Thm11] {
            let r = verify(&k, iv(1.0, 2.0), Params::unit(), t, &s).unwrap();
            assert!(r.lhs.abs() < 1e-14 && r.holds, "{t}");
        }
    }

    #[test]
    fn conjugate_theorems_reject_q_one() {
        let s = Settings::default();
        for t in [Theorem::BopM, Theorem::Thm211, Theorem::Thm22] {
            let r = verify(&sq(), iv(1.0, 2.0), Params::unit(), t, &s);
            assert!(matches!(r, Err(Error::Param(_))), "{t}");
        }
    }

    #[test]
    fn report_fields_are_consistent() {
        let r = bound_thm22(&sq(), iv(0.5, 3.0), params(1.0, 1.0, 0.5, 2.0, 3.0)).unwrap();
        assert_eq!(r.slack, r.rhs - r.lhs);
        assert_eq!(r.holds, r.lhs <= r.rhs + r.quad_error + DEFAULT_HOLDS_TOL);
        assert!(r.quad_error >= 0.0);
    }
}
