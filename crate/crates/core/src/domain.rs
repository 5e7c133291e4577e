//! Domain types shared by every other module.

use std::fmt;
use std::sync::Arc;

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use serde::ser::SerializeMap;
use serde::{Serialize, Serializer};

use crate::bounds::Theorem;
use crate::error::{Error, Result};

/// Lower domain bound used for functions that are singular at the origin.
pub const SINGULAR_MARGIN: f64 = 1e-12;

/// Integration domain `[a, b]` with `0 <= a < b`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Interval {
    a: f64,
    b: f64,
}

impl Interval {
    pub fn new(a: f64, b: f64) -> Result<Self> {
        if !a.is_finite() || !b.is_finite() {
            return Err(Error::param(format!("interval endpoints must be finite, got [{a}, {b}]")));
        }
        if a < 0.0 {
            return Err(Error::param(format!("left endpoint must be >= 0, got {a}")));
        }
        if a >= b {
            return Err(Error::param(format!("need a < b, got [{a}, {b}]")));
        }
        Ok(Interval { a, b })
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn width(&self) -> f64 {
        self.b - self.a
    }

    pub fn midpoint(&self) -> f64 {
        0.5 * (self.a + self.b)
    }

    /// Smallest interval containing `a`, `b`, `a/m` and `b/m`.
    pub fn stretched(&self, m: f64) -> (f64, f64) {
        let lo = self.a.min(self.a / m);
        let hi = self.b.max(self.b / m);
        (lo, hi)
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.a, self.b)
    }
}

/// The tuple `(alpha, m, lambda, mu, q)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Params {
    pub alpha: f64,
    pub m: f64,
    pub lambda: f64,
    pub mu: f64,
    pub q: f64,
}

impl Params {
    pub fn new(alpha: f64, m: f64, lambda: f64, mu: f64, q: f64) -> Result<Self> {
        let p = Params { alpha, m, lambda, mu, q };
        p.check()?;
        Ok(p)
    }

    /// `alpha = m = 1`, `lambda = mu = 1`, `q = 1`.
    pub fn unit() -> Self {
        Params { alpha: 1.0, m: 1.0, lambda: 1.0, mu: 1.0, q: 1.0 }
    }

    pub fn with_weights(self, lambda: f64, mu: f64) -> Result<Self> {
        Params::new(self.alpha, self.m, lambda, mu, self.q)
    }

    pub fn check(&self) -> Result<()> {
        let in_unit = |v: f64| v > 0.0 && v <= 1.0;
        if !in_unit(self.alpha) {
            return Err(Error::param(format!("alpha must lie in (0, 1], got {}", self.alpha)));
        }
        if !in_unit(self.m) {
            return Err(Error::param(format!("m must lie in (0, 1], got {}", self.m)));
        }
        check_weights(self.lambda, self.mu)?;
        if !(self.q >= 1.0) || !self.q.is_finite() {
            return Err(Error::param(format!("q must be >= 1, got {}", self.q)));
        }
        Ok(())
    }

    /// Hoelder conjugate `p = q / (q - 1)`; undefined at `q = 1`.
    pub fn conjugate(&self) -> Result<f64> {
        conjugate(self.q)
    }

    pub fn weight_sum(&self) -> f64 {
        self.lambda + self.mu
    }
}

pub(crate) fn check_weights(lambda: f64, mu: f64) -> Result<()> {
    if !(lambda >= 0.0) || !(mu >= 0.0) || !lambda.is_finite() || !mu.is_finite() {
        return Err(Error::param(format!("lambda and mu must be finite and >= 0, got ({lambda}, {mu})")));
    }
    if lambda + mu <= 0.0 {
        return Err(Error::param("lambda + mu must be > 0"));
    }
    Ok(())
}

pub(crate) fn check_alpha(alpha: f64) -> Result<()> {
    if alpha > 0.0 && alpha <= 1.0 {
        Ok(())
    } else {
        Err(Error::param(format!("alpha must lie in (0, 1], got {alpha}")))
    }
}

pub fn conjugate(q: f64) -> Result<f64> {
    if q > 1.0 && q.is_finite() {
        Ok(q / (q - 1.0))
    } else {
        Err(Error::param(format!("conjugate exponent needs q > 1, got {q}")))
    }
}

type RealFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// A scalar function paired with its exact derivative.
///
/// `f` and `df` are finite on `[domain_min, domain_max]`.
#[derive(Clone)]
pub struct TestFunction {
    id: String,
    f: RealFn,
    df: RealFn,
    domain_min: f64,
    domain_max: f64,
}

impl fmt::Debug for TestFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("TestFunction")
            .field("id", &self.id)
            .field("domain_min", &self.domain_min)
            .field("domain_max", &self.domain_max)
            .finish_non_exhaustive()
    }
}

impl TestFunction {
    pub fn new<F, D>(id: impl Into<String>, f: F, df: D, domain_min: f64) -> Self
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
        D: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        TestFunction { id: id.into(), f: Arc::new(f), df: Arc::new(df), domain_min, domain_max: f64::INFINITY }
    }

    pub fn with_domain_max(mut self, domain_max: f64) -> Self {
        self.domain_max = domain_max;
        self
    }

    /// `x^n` with derivative `n x^(n-1)`. Negative powers are singular at 0.
    pub fn power(n: i32) -> Self {
        let nf = f64::from(n);
        let domain_min = if n < 0 { SINGULAR_MARGIN } else { 0.0 };
        TestFunction::new(power_id(n), move |x: f64| x.powi(n), move |x: f64| nf * x.powi(n - 1), domain_min)
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn eval(&self, x: f64) -> f64 {
        (self.f)(x)
    }

    pub fn deriv(&self, x: f64) -> f64 {
        (self.df)(x)
    }

    pub fn domain_min(&self) -> f64 {
        self.domain_min
    }

    pub fn domain_max(&self) -> f64 {
        self.domain_max
    }

    pub fn covers(&self, lo: f64, hi: f64) -> bool {
        lo >= self.domain_min && hi <= self.domain_max
    }

    /// `x -> f(a + b - x)`, the mirror image of `f` over `iv`.
    pub fn reflected(&self, iv: &Interval) -> Self {
        let s = iv.a() + iv.b();
        let f = Arc::clone(&self.f);
        let df = Arc::clone(&self.df);
        TestFunction {
            id: format!("{}_reflected", self.id),
            f: Arc::new(move |x| f(s - x)),
            df: Arc::new(move |x| -df(s - x)),
            domain_min: s - self.domain_max,
            domain_max: s - self.domain_min,
        }
    }
}

fn power_id(n: i32) -> String {
    if n < 0 {
        format!("powm{}", -n)
    } else {
        format!("pow{n}")
    }
}

/// The compiled-in function corpus.
pub fn builtin_corpus() -> Vec<TestFunction> {
    vec![
        TestFunction::power(2),
        TestFunction::power(3),
        TestFunction::power(4),
        TestFunction::power(-2),
        TestFunction::new("recip", |x: f64| 1.0 / x, |x: f64| -1.0 / (x * x), SINGULAR_MARGIN),
        TestFunction::new("exp", f64::exp, f64::exp, 0.0),
        TestFunction::new("xlogx", |x: f64| x * x.ln(), |x: f64| x.ln() + 1.0, SINGULAR_MARGIN),
        TestFunction::new("linear", |x: f64| x, |_| 1.0, 0.0),
    ]
}

pub fn corpus_function(id: &str) -> Result<TestFunction> {
    builtin_corpus().into_iter().find(|f| f.id() == id).ok_or_else(|| Error::Unknown(format!("function `{id}`")))
}

/// Worst disagreement between `df` and a central difference of `f`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DerivativeCheck {
    pub max_rel_error: f64,
    pub worst_x: f64,
}

/// Compare `df` with a central difference of `f` at `samples` pseudo-random
/// points of `[lo, hi]`, clipped to the declared domain. The error is relative
/// to `max(|df|, 1)`.
pub fn check_derivative(func: &TestFunction, lo: f64, hi: f64, samples: usize, seed: u64) -> DerivativeCheck {
    let lo = lo.max(func.domain_min());
    let hi = hi.min(func.domain_max());
    let mut rng = StdRng::seed_from_u64(seed);
    let mut worst = DerivativeCheck { max_rel_error: 0.0, worst_x: lo };
    for _ in 0..samples {
        let x = rng.gen_range(lo..hi);
        let h = 1e-5 * x.abs().max(1.0);
        let fd = (func.eval(x + h) - func.eval(x - h)) / (2.0 * h);
        let exact = func.deriv(x);
        let err = (fd - exact).abs() / exact.abs().max(1.0);
        if !(err <= worst.max_rel_error) {
            worst = DerivativeCheck { max_rel_error: err, worst_x: x };
        }
    }
    worst
}

/// A parameter set, interval and function that passed [`validate_params`].
#[derive(Debug, Clone)]
pub struct Config {
    pub params: Params,
    pub interval: Interval,
    pub function: TestFunction,
}

/// Accept `(params, iv, func)` iff the parameters are in range and `func` is
/// evaluable on `[min(a, a/m), max(b, b/m)]`.
pub fn validate_params(params: Params, iv: Interval, func: &TestFunction) -> Result<Config> {
    params.check()?;
    let (lo, hi) = iv.stretched(params.m);
    if !func.covers(lo, hi) {
        return Err(Error::domain(format!(
            "`{}` is defined on [{}, {}] but the bounds need [{lo}, {hi}]",
            func.id(),
            func.domain_min(),
            func.domain_max()
        )));
    }
    Ok(Config { params, interval: iv, function: func.clone() })
}

/// Named closed-form constants of one bound.
#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientSet {
    pub theorem_id: String,
    pub values: Vec<(&'static str, f64)>,
}

impl CoefficientSet {
    pub fn new(theorem_id: impl Into<String>, values: Vec<(&'static str, f64)>) -> Self {
        CoefficientSet { theorem_id: theorem_id.into(), values }
    }

    pub fn get(&self, name: &str) -> Option<f64> {
        self.values.iter().find(|(k, _)| *k == name).map(|(_, v)| *v)
    }

    /// Panicking lookup for names the producing function always sets.
    pub fn value(&self, name: &str) -> f64 {
        self.get(name).unwrap_or_else(|| panic!("coefficient `{name}` missing from {}", self.theorem_id))
    }

    pub fn all_finite_nonnegative(&self, slack: f64) -> bool {
        self.values.iter().all(|(_, v)| v.is_finite() && *v >= -slack)
    }
}

impl Serialize for CoefficientSet {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut map = serializer.serialize_map(Some(self.values.len()))?;
        for (k, v) in &self.values {
            map.serialize_entry(k, v)?;
        }
        map.end()
    }
}

/// Outcome of checking one inequality.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundReport {
    pub theorem_id: Theorem,
    pub lhs: f64,
    pub rhs: f64,
    pub slack: f64,
    pub holds: bool,
    pub quad_error: f64,
    /// Right-hand side under each branch of the outer `min`, when there is one.
    pub branches: Option<[f64; 2]>,
    /// Secondary, looser majorant when the bound displays two.
    pub loose_rhs: Option<f64>,
    pub coefficients: Option<CoefficientSet>,
}

impl BoundReport {
    pub(crate) fn assemble(
        theorem_id: Theorem,
        lhs: f64,
        quad_error: f64,
        rhs: crate::bounds::Rhs,
        holds_tol: f64,
    ) -> Self {
        BoundReport {
            theorem_id,
            lhs,
            rhs: rhs.value,
            slack: rhs.value - lhs,
            holds: lhs <= rhs.value + quad_error + holds_tol,
            quad_error,
            branches: rhs.branches,
            loose_rhs: rhs.loose,
            coefficients: rhs.coefficients,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn interval_rejects_bad_endpoints() {
        assert!(Interval::new(1.0, 1.0).is_err());
        assert!(Interval::new(2.0, 1.0).is_err());
        assert!(Interval::new(-0.5, 1.0).is_err());
        assert!(Interval::new(0.0, f64::NAN).is_err());
        assert!(Interval::new(0.0, 1.0).is_ok());
    }

    #[test]
    fn params_reject_out_of_range() {
        assert!(Params::new(1.0, 1.0, 1.0, 1.0, 1.0).is_ok());
        assert!(matches!(Params::new(1.0, 1.0, 0.0, 0.0, 1.0), Err(Error::Param(_))));
        assert!(Params::new(0.0, 1.0, 1.0, 1.0, 1.0).is_err());
        assert!(Params::new(1.2, 1.0, 1.0, 1.0, 1.0).is_err());
        assert!(Params::new(1.0, 0.0, 1.0, 1.0, 1.0).is_err());
        assert!(Params::new(1.0, 1.0, -1.0, 2.0, 1.0).is_err());
        assert!(Params::new(1.0, 1.0, 1.0, 1.0, 0.5).is_err());
        assert!(Params::new(1.0, 1.0, 1.0, 1.0, f64::NAN).is_err());
    }

    #[test]
    fn conjugate_needs_q_above_one() {
        assert!(Params::unit().conjugate().is_err());
        let p = Params::new(1.0, 1.0, 1.0, 1.0, 3.0).unwrap();
        let pc = p.conjugate().unwrap();
        assert!((1.0 / pc + 1.0 / p.q - 1.0).abs() < 1e-15);
    }

    #[test]
    fn validate_accepts_interior_configurations() {
        let iv = Interval::new(1.0, 2.0).unwrap();
        let sq = corpus_function("pow2").unwrap();
        assert!(validate_params(Params::unit(), iv, &sq).is_ok());

        let recip = corpus_function("recip").unwrap();
        let p = Params::new(1.0, 0.5, 1.0, 1.0, 1.0).unwrap();
        let cfg = validate_params(p, iv, &recip).unwrap();
        assert_eq!(cfg.interval.stretched(0.5), (1.0, 4.0));
        assert!(recip.deriv(4.0).is_finite());
    }

    #[test]
    fn validate_rejects_singular_domain() {
        let iv = Interval::new(0.0, 1.0).unwrap();
        let recip = corpus_function("recip").unwrap();
        assert!(matches!(validate_params(Params::unit(), iv, &recip), Err(Error::Domain(_))));
    }

    #[test]
    fn validate_rejects_stretched_domain_beyond_max() {
        let iv = Interval::new(1.0, 2.0).unwrap();
        let capped = TestFunction::new("capped", |x| x, |_| 1.0, 0.0).with_domain_max(3.0);
        assert!(validate_params(Params::unit(), iv, &capped).is_ok());
        let p = Params::new(1.0, 0.5, 1.0, 1.0, 1.0).unwrap();
        assert!(matches!(validate_params(p, iv, &capped), Err(Error::Domain(_))));
    }

    #[test]
    fn corpus_has_expected_members() {
        let corpus = builtin_corpus();
        assert_eq!(corpus.len(), 8);
        let pow2 = corpus_function("pow2").unwrap();
        assert_eq!(pow2.domain_min(), 0.0);
        assert_eq!(pow2.eval(3.0), 9.0);
        assert_eq!(pow2.deriv(3.0), 6.0);
        let pow3 = corpus_function("pow3").unwrap();
        assert_eq!(pow3.deriv(2.0), 12.0);
        let recip = corpus_function("recip").unwrap();
        assert!(recip.domain_min() > 0.0);
        assert_eq!(recip.deriv(2.0), -0.25);
        let powm2 = corpus_function("powm2").unwrap();
        assert_eq!(powm2.deriv(1.0), -2.0);
        assert!(corpus_function("nope").is_err());
    }

    #[test]
    fn corpus_derivatives_match_finite_differences() {
        for (i, func) in builtin_corpus().iter().enumerate() {
            let lo = func.domain_min().max(0.0) + 0.05;
            let check = check_derivative(func, lo, lo + 8.0, 64, 0x5eed + i as u64);
            assert!(
                check.max_rel_error < 1e-6,
                "{}: rel error {} at x = {}",
                func.id(),
                check.max_rel_error,
                check.worst_x
            );
        }
    }

    #[test]
    fn derivative_check_catches_wrong_derivative() {
        let bad = TestFunction::new("bad", |x: f64| x * x, |x: f64| 3.0 * x, 0.0);
        let check = check_derivative(&bad, 0.1, 5.0, 64, 1);
        assert!(check.max_rel_error > 0.1);
    }

    #[test]
    fn reflection_mirrors_values_and_flips_slope() {
        let iv = Interval::new(1.0, 2.0).unwrap();
        let e = corpus_function("exp").unwrap();
        let r = e.reflected(&iv);
        assert_eq!(r.eval(1.0), e.eval(2.0));
        assert_eq!(r.deriv(1.25), -e.deriv(1.75));
        assert!(r.covers(1.0, 2.0));
    }
}
