//! Grid screening of the `(alpha, m)`-convexity inequality
//!
//! `g(t x + m (1 - t) y) <= t^alpha g(x) + m (1 - t^alpha) g(y)`.
//!
//! A passing verdict is a necessary condition only: the inequality is checked
//! on a finite tensor grid of `(x, y, t)` samples.

use rayon::prelude::*;
use serde::Serialize;

use crate::domain::TestFunction;
use crate::error::{Error, Result};

/// Largest scaled violation still treated as floating-point noise.
pub const VIOLATION_TOL: f64 = 1e-9;
/// Relative offset of the first `x`, `y` sample from the origin.
pub const ORIGIN_CLIP: f64 = 1e-8;
pub const DEFAULT_GRID_N: usize = 32;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConvexityVerdict {
    pub holds: bool,
    /// Max over samples of `(lhs - rhs) / max(1, |lhs|, |rhs|)`.
    pub worst_violation: f64,
    /// `(x, y, t)` attaining `worst_violation`.
    pub witness: (f64, f64, f64),
    /// Set when the sample range was moved off the origin.
    pub clipped: bool,
    pub samples: usize,
}

/// Screen `g` for `(alpha, m)`-convexity on `[0, b]`.
///
/// `x` and `y` run over `[eps, b]` with `eps = 1e-8 b` so that functions
/// singular at the origin can be screened; the verdict records the clipping.
pub fn check_alpha_m_convex<G>(g: G, b: f64, alpha: f64, m: f64, grid_n: usize) -> Result<ConvexityVerdict>
where
    G: Fn(f64) -> f64 + Sync,
{
    if !(b > 0.0) {
        return Err(Error::param(format!("b must be > 0, got {b}")));
    }
    let mut verdict = check_alpha_m_convex_on(g, ORIGIN_CLIP * b, b, alpha, m, grid_n)?;
    verdict.clipped = true;
    Ok(verdict)
}

/// Screen `g` with `x`, `y` restricted to `[lo, hi]`.
///
/// The grid has `grid_n` equal steps per axis (`grid_n + 1` samples), so
/// doubling `grid_n` refines the previous grid.
pub fn check_alpha_m_convex_on<G>(g: G, lo: f64, hi: f64, alpha: f64, m: f64, grid_n: usize) -> Result<ConvexityVerdict>
where
    G: Fn(f64) -> f64 + Sync,
{
    if grid_n < 8 {
        return Err(Error::param(format!("grid_n must be >= 8, got {grid_n}")));
    }
    if !(lo.is_finite() && hi.is_finite() && lo <= hi) {
        return Err(Error::param(format!("bad sample range [{lo}, {hi}]")));
    }
    if !((0.0..=1.0).contains(&alpha) && (0.0..=1.0).contains(&m)) {
        return Err(Error::param(format!("(alpha, m) = ({alpha}, {m}) outside [0, 1]^2")));
    }

    let n = grid_n as f64;
    let xs: Vec<f64> = (0..=grid_n).map(|i| lo + (hi - lo) * (i as f64 / n)).collect();
    let ts: Vec<f64> = (0..=grid_n).map(|k| k as f64 / n).collect();
    let eval = |x: f64| {
        let v = g(x);
        if v.is_finite() {
            Ok(v)
        } else {
            Err(Error::NonFinite { x })
        }
    };
    let gx: Vec<f64> = xs.iter().map(|&x| eval(x)).collect::<Result<_>>()?;

    // (violation, i, j, k); ties go to the lexicographically smallest index.
    type Candidate = (f64, usize, usize, usize);
    let better = |a: Candidate, b: Candidate| -> Candidate {
        match a.0.total_cmp(&b.0) {
            std::cmp::Ordering::Greater => a,
            std::cmp::Ordering::Less => b,
            std::cmp::Ordering::Equal => {
                if (a.1, a.2, a.3) <= (b.1, b.2, b.3) {
                    a
                } else {
                    b
                }
            }
        }
    };

    let best = (0..xs.len())
        .into_par_iter()
        .map(|i| -> Result<Candidate> {
            let mut local: Candidate = (f64::NEG_INFINITY, usize::MAX, 0, 0);
            for (j, &y) in xs.iter().enumerate() {
                for (k, &t) in ts.iter().enumerate() {
                    let ta = t.powf(alpha);
                    let lhs = eval(t * xs[i] + m * (1.0 - t) * y)?;
                    let rhs = ta * gx[i] + m * (1.0 - ta) * gx[j];
                    let scale = lhs.abs().max(rhs.abs()).max(1.0);
                    local = better(local, ((lhs - rhs) / scale, i, j, k));
                }
            }
            Ok(local)
        })
        .try_reduce(|| (f64::NEG_INFINITY, usize::MAX, 0, 0), |a, b| Ok(better(a, b)))?;

    let (worst, i, j, k) = best;
    Ok(ConvexityVerdict {
        holds: worst <= VIOLATION_TOL,
        worst_violation: worst,
        witness: (xs[i], xs[j], ts[k]),
        clipped: false,
        samples: xs.len() * xs.len() * ts.len(),
    })
}

/// `x -> |f'(x)|^q`.
pub fn derivative_power(func: &TestFunction, q: f64) -> impl Fn(f64) -> f64 + Send + Sync + Clone {
    let func = func.clone();
    move |x| {
        let d = func.deriv(x).abs();
        if q == 1.0 {
            d
        } else {
            d.powf(q)
        }
    }
}
