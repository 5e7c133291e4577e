//! Closed-form constants of the bounds.
//!
//! Every integral constant here has a numerical counterpart in
//! [`crate::quadrature::kernel_moment`]; the tests compare the two.

use serde::Serialize;

use crate::domain::{check_alpha, check_weights, CoefficientSet, Interval, TestFunction};
use crate::error::{Error, Result};

/// `∫_0^1 |(lambda + mu) t - lambda| dt`.
pub fn kernel_mass(lambda: f64, mu: f64) -> f64 {
    (lambda * lambda + mu * mu) / (2.0 * (lambda + mu))
}

/// `∫_0^1 |(lambda + mu) t - s| t^alpha dt` with `s` the first weight.
fn kernel_t_alpha(alpha: f64, s: f64, other: f64) -> f64 {
    let c = s + other;
    let head = 2.0 * s.powf(alpha + 2.0) / c.powf(alpha + 1.0);
    (head + (alpha + 1.0) * other - s) / ((alpha + 1.0) * (alpha + 2.0))
}

/// `gamma1..gamma4`.
///
/// `gamma1 = ∫|(λ+μ)t-λ| t^α`, `gamma2 = ∫|(λ+μ)t-λ| (1-t^α)`, and
/// `gamma3`, `gamma4` are the same moments with the kink at `μ/(λ+μ)`.
pub fn gamma_coeffs(alpha: f64, lambda: f64, mu: f64) -> Result<CoefficientSet> {
    check_alpha(alpha)?;
    check_weights(lambda, mu)?;
    let total = kernel_mass(lambda, mu);
    let g1 = kernel_t_alpha(alpha, lambda, mu);
    let g3 = kernel_t_alpha(alpha, mu, lambda);
    Ok(CoefficientSet::new(
        "thm11",
        vec![("gamma1", g1), ("gamma2", total - g1), ("gamma3", g3), ("gamma4", total - g3)],
    ))
}

/// `nu1`, `nu2`: the `gamma1`, `gamma2` of the unit weights `lambda = mu = 1`.
pub fn nu_coeffs(alpha: f64) -> Result<CoefficientSet> {
    check_alpha(alpha)?;
    let d = (alpha + 1.0) * (alpha + 2.0);
    let half_pow = 0.5_f64.powf(alpha);
    let nu1 = (alpha + half_pow) / d;
    let nu2 = ((alpha * alpha + alpha + 2.0) / 2.0 - half_pow) / d;
    Ok(CoefficientSet::new("bop_am", vec![("nu1", nu1), ("nu2", nu2)]))
}

fn check_q(q: f64) -> Result<()> {
    if q >= 1.0 && q.is_finite() {
        Ok(())
    } else {
        Err(Error::param(format!("q must be >= 1, got {q}")))
    }
}

fn check_m(m: f64) -> Result<()> {
    if m > 0.0 && m <= 1.0 {
        Ok(())
    } else {
        Err(Error::param(format!("m must lie in (0, 1], got {m}")))
    }
}

fn require_cover(func: &TestFunction, iv: &Interval, m: f64) -> Result<()> {
    let (lo, hi) = iv.stretched(m);
    if func.covers(lo, hi) {
        Ok(())
    } else {
        Err(Error::domain(format!("`{}` is not defined on [{lo}, {hi}]", func.id())))
    }
}

/// Closure `x -> |f'(x)|^q`.
fn dq(func: &TestFunction, q: f64) -> impl Fn(f64) -> f64 + '_ {
    move |x| func.deriv(x).abs().powf(q)
}

/// `mu1`, `mu2` of the `m`-convex bound, each a min of two averages.
pub fn mu_factors(func: &TestFunction, iv: &Interval, m: f64, q: f64) -> Result<CoefficientSet> {
    check_m(m)?;
    check_q(q)?;
    require_cover(func, iv, m)?;
    let g = dq(func, q);
    let (a, b) = (iv.a(), iv.b());
    let mid = iv.midpoint();
    let mu1_first = (g(a) + m * g(mid / m)) / 2.0;
    let mu1_second = (g(mid) + m * g(a / m)) / 2.0;
    let mu2_first = (g(b) + m * g(mid / m)) / 2.0;
    let mu2_second = (g(mid) + m * g(b / m)) / 2.0;
    Ok(CoefficientSet::new(
        "bop_m",
        vec![
            ("mu1", mu1_first.min(mu1_second)),
            ("mu2", mu2_first.min(mu2_second)),
            ("mu1_first", mu1_first),
            ("mu1_second", mu1_second),
            ("mu2_first", mu2_first),
            ("mu2_second", mu2_second),
        ],
    ))
}

/// `M1`, `M2` around the interior node `z = (lambda b + mu a) / (lambda + mu)`.
#[allow(clippy::too_many_arguments)]
pub fn m_factors(
    func: &TestFunction,
    iv: &Interval,
    alpha: f64,
    m: f64,
    lambda: f64,
    mu: f64,
    q: f64,
) -> Result<CoefficientSet> {
    check_alpha(alpha)?;
    check_m(m)?;
    check_weights(lambda, mu)?;
    check_q(q)?;
    require_cover(func, iv, m)?;
    let g = dq(func, q);
    let (a, b) = (iv.a(), iv.b());
    let z = (lambda * b + mu * a) / (lambda + mu);
    let am = alpha * m;
    let m1_first = (g(a) + am * g(z / m)) / (alpha + 1.0);
    let m1_second = (g(z) + am * g(a / m)) / (alpha + 1.0);
    let m2_first = (g(b) + am * g(z / m)) / (alpha + 1.0);
    let m2_second = (g(z) + am * g(b / m)) / (alpha + 1.0);
    Ok(CoefficientSet::new(
        "thm211",
        vec![
            ("M1", m1_first.min(m1_second)),
            ("M2", m2_first.min(m2_second)),
            ("M1_first", m1_first),
            ("M1_second", m1_second),
            ("M2_first", m2_first),
            ("M2_second", m2_second),
            ("z", z),
        ],
    ))
}

/// `K1 = |f'(b)|^q + m alpha |f'(a/m)|^q`, `K2 = |f'(a)|^q + m alpha |f'(b/m)|^q`.
pub fn k_factors(func: &TestFunction, iv: &Interval, alpha: f64, m: f64, q: f64) -> Result<CoefficientSet> {
    check_alpha(alpha)?;
    check_m(m)?;
    check_q(q)?;
    require_cover(func, iv, m)?;
    let g = dq(func, q);
    let (a, b) = (iv.a(), iv.b());
    let k1 = g(b) + m * alpha * g(a / m);
    let k2 = g(a) + m * alpha * g(b / m);
    Ok(CoefficientSet::new("thm22", vec![("K1", k1), ("K2", k2)]))
}

/// Closed form against quadrature for one coefficient.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Crosscheck {
    pub name: &'static str,
    pub closed_form: f64,
    pub quadrature: f64,
    pub abs_diff: f64,
}

/// Recompute `gamma1..gamma4` and `nu1`, `nu2` by quadrature.
pub fn crosscheck(alpha: f64, lambda: f64, mu: f64, tol: f64) -> Result<Vec<Crosscheck>> {
    use crate::quadrature::{kernel_moment, KernelWeight as W, KinkAt as K};
    let gammas = gamma_coeffs(alpha, lambda, mu)?;
    let nus = nu_coeffs(alpha)?;
    let cases = [
        ("gamma1", gammas.value("gamma1"), lambda, mu, W::TPowAlpha, K::Lambda),
        ("gamma2", gammas.value("gamma2"), lambda, mu, W::OneMinusTPowAlpha, K::Lambda),
        ("gamma3", gammas.value("gamma3"), lambda, mu, W::TPowAlpha, K::Mu),
        ("gamma4", gammas.value("gamma4"), lambda, mu, W::OneMinusTPowAlpha, K::Mu),
        ("nu1", nus.value("nu1"), 1.0, 1.0, W::TPowAlpha, K::Lambda),
        ("nu2", nus.value("nu2"), 1.0, 1.0, W::OneMinusTPowAlpha, K::Lambda),
    ];
    cases
        .into_iter()
        .map(|(name, closed_form, l, m, w, k)| {
            let quadrature = kernel_moment(alpha, l, m, w, k, 1.0, tol)?.require_converged()?.value;
            Ok(Crosscheck { name, closed_form, quadrature, abs_diff: (closed_form - quadrature).abs() })
        })
        .collect()
}
