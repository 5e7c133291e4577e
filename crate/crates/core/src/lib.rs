//! Hermite-Hadamard type bounds for differentiable functions whose
//! derivative, raised to a power `q`, is `(alpha, m)`-convex.
//!
//! The crate evaluates each bound in closed form, measures the left-hand
//! side (the weighted trapezoid deviation) with adaptive quadrature, and
//! reports whether the inequality holds. The building blocks are:
//!
//! * [`domain`]: intervals, parameters, the function corpus, report types.
//! * [`quadrature`]: adaptive Gauss-Kronrod integration and kernel moments.
//! * [`convexity`]: sampling-based `(alpha, m)`-convexity screening.
//! * [`coefficients`]: closed-form constants used by the bounds.
//! * [`bounds`]: left- and right-hand sides of every inequality.
//! * [`means`]: special means and their inequalities.
//! * [`report`]: report rows and their CSV / JSON / text forms.
//! * [`sweep`]: batch evaluation and tightness tables used by the CLI.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bounds;
pub mod coefficients;
pub mod convexity;
pub mod domain;
pub mod error;
pub mod means;
pub mod quadrature;
pub mod report;
pub mod sweep;

pub use bounds::{verify, Settings, Theorem};
pub use domain::{
    builtin_corpus, validate_params, BoundReport, CoefficientSet, Config, Interval, Params, TestFunction,
};
pub use error::{Error, Result};
