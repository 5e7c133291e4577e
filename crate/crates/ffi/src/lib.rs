//! C ABI for `hh-bounds`.
//!
//! Every fallible function returns an `HH_*` status code and writes its
//! result through an out-pointer. After a non-zero code,
//! [`hh_last_error_message`] describes the failure on the calling thread.
//! Functions are opaque [`HhFunction`] handles released with
//! [`hh_function_free`].

#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::cell::RefCell;
use std::ffi::{c_char, c_void, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use hh_bounds::bounds::{self, Settings, Theorem};
use hh_bounds::coefficients::{gamma_coeffs, nu_coeffs};
use hh_bounds::convexity::ConvexityVerdict;
use hh_bounds::domain::{corpus_function, validate_params, Interval, Params, TestFunction};
use hh_bounds::means::{mean, proposition_check, MeanKind, Proposition};
use hh_bounds::quadrature::integrate_range;
use hh_bounds::{BoundReport, Error};

pub const HH_OK: i32 = 0;
pub const HH_ERR_PARAM: i32 = 1;
pub const HH_ERR_DOMAIN: i32 = 2;
pub const HH_ERR_NONFINITE: i32 = 3;
pub const HH_ERR_BUDGET: i32 = 4;
pub const HH_ERR_GATE: i32 = 5;
pub const HH_ERR_UNKNOWN: i32 = 6;
pub const HH_ERR_NULL: i32 = 7;
pub const HH_ERR_PANIC: i32 = 8;

pub const HH_THEOREM_DA: i32 = 0;
pub const HH_THEOREM_SSO: i32 = 1;
pub const HH_THEOREM_BOP_M: i32 = 2;
pub const HH_THEOREM_BOP_AM: i32 = 3;
pub const HH_THEOREM_THM11: i32 = 4;
pub const HH_THEOREM_THM211: i32 = 5;
pub const HH_THEOREM_THM22: i32 = 6;

pub const HH_MEAN_WEIGHTED_ARITHMETIC: i32 = 0;
pub const HH_MEAN_ARITHMETIC: i32 = 1;
pub const HH_MEAN_WEIGHTED_HARMONIC: i32 = 2;
pub const HH_MEAN_HARMONIC: i32 = 3;
pub const HH_MEAN_LOGARITHMIC: i32 = 4;
pub const HH_MEAN_P_LOGARITHMIC: i32 = 5;

/// A test function and its derivative.
pub struct HhFunction {
    inner: TestFunction,
}

/// `double f(double x, void *user_data)`.
pub type HhScalarFn = Option<unsafe extern "C" fn(x: f64, user_data: *mut c_void) -> f64>;

#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct HhParams {
    pub alpha: f64,
    pub m: f64,
    pub lambda: f64,
    pub mu: f64,
    pub q: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct HhSettings {
    pub quad_tol: f64,
    pub holds_tol: f64,
    pub grid_n: u32,
}

/// Absent optional values are NaN.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct HhBoundReport {
    pub theorem: i32,
    pub holds: bool,
    pub lhs: f64,
    pub rhs: f64,
    pub slack: f64,
    pub quad_error: f64,
    pub branch1: f64,
    pub branch2: f64,
    pub loose_rhs: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct HhGateVerdict {
    pub holds: bool,
    pub worst_violation: f64,
    pub witness_x: f64,
    pub witness_y: f64,
    pub witness_t: f64,
    pub samples: u64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct HhQuadResult {
    pub value: f64,
    pub error_estimate: f64,
    pub evaluations: u64,
    pub converged: bool,
}

/// `factor_residual` is NaN except for proposition 6.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct HhPropositionResult {
    pub mean_lhs: f64,
    pub mean_rhs: f64,
    pub corollary_rhs: f64,
    pub residual: f64,
    pub holds: bool,
    pub display_holds: bool,
    pub factor_residual: f64,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_last_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

struct Failure {
    code: i32,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match &e {
            Error::Param(_) => HH_ERR_PARAM,
            Error::Domain(_) => HH_ERR_DOMAIN,
            Error::NonFinite { .. } => HH_ERR_NONFINITE,
            Error::Budget(_) => HH_ERR_BUDGET,
            Error::Gate(_) => HH_ERR_GATE,
            Error::Unknown(_) => HH_ERR_UNKNOWN,
        };
        Failure { code, message: e.to_string() }
    }
}

fn null(what: &str) -> Failure {
    Failure { code: HH_ERR_NULL, message: format!("null pointer: {what}") }
}

fn guard<F: FnOnce() -> Result<(), Failure>>(body: F) -> i32 {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => HH_OK,
        Ok(Err(f)) => {
            set_last_error(&f.message);
            f.code
        }
        Err(_) => {
            set_last_error("internal panic");
            HH_ERR_PANIC
        }
    }
}

unsafe fn deref<'a, T>(p: *const T, what: &str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or_else(|| null(what))
}

unsafe fn write<T>(p: *mut T, value: T, what: &str) -> Result<(), Failure> {
    if p.is_null() {
        return Err(null(what));
    }
    p.write(value);
    Ok(())
}

fn theorem_from(code: i32) -> Result<Theorem, Failure> {
    usize::try_from(code)
        .ok()
        .and_then(|i| Theorem::ALL.get(i).copied())
        .ok_or_else(|| Error::Unknown(format!("theorem code {code}")).into())
}

fn theorem_code(t: Theorem) -> i32 {
    Theorem::ALL.iter().position(|&x| x == t).unwrap() as i32
}

fn to_params(p: &HhParams) -> Params {
    Params { alpha: p.alpha, m: p.m, lambda: p.lambda, mu: p.mu, q: p.q }
}

unsafe fn to_settings(s: *const HhSettings) -> Settings {
    match s.as_ref() {
        Some(s) => Settings { quad_tol: s.quad_tol, holds_tol: s.holds_tol, grid_n: s.grid_n as usize },
        None => Settings::default(),
    }
}

fn report_out(r: &BoundReport) -> HhBoundReport {
    HhBoundReport {
        theorem: theorem_code(r.theorem_id),
        holds: r.holds,
        lhs: r.lhs,
        rhs: r.rhs,
        slack: r.slack,
        quad_error: r.quad_error,
        branch1: r.branches.map_or(f64::NAN, |b| b[0]),
        branch2: r.branches.map_or(f64::NAN, |b| b[1]),
        loose_rhs: r.loose_rhs.unwrap_or(f64::NAN),
    }
}

fn verdict_out(v: &ConvexityVerdict) -> HhGateVerdict {
    HhGateVerdict {
        holds: v.holds,
        worst_violation: v.worst_violation,
        witness_x: v.witness.0,
        witness_y: v.witness.1,
        witness_t: v.witness.2,
        samples: v.samples as u64,
    }
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn hh_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Message for the last failure on this thread. Valid until the next call
/// into the library from the same thread.
#[no_mangle]
pub extern "C" fn hh_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

#[no_mangle]
pub extern "C" fn hh_settings_default() -> HhSettings {
    let s = Settings::default();
    HhSettings { quad_tol: s.quad_tol, holds_tol: s.holds_tol, grid_n: s.grid_n as u32 }
}

/// Look up a built-in function by id (`pow2`, `exp`, `recip`, ...).
///
/// # Safety
/// `id` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn hh_function_builtin(id: *const c_char, out: *mut *mut HhFunction) -> i32 {
    guard(|| {
        if id.is_null() {
            return Err(null("id"));
        }
        let id = CStr::from_ptr(id).to_str().map_err(|_| Error::Unknown("id is not UTF-8".into()))?;
        let inner = corpus_function(id)?;
        write(out, Box::into_raw(Box::new(HhFunction { inner })), "out")
    })
}

struct Callback {
    f: unsafe extern "C" fn(f64, *mut c_void) -> f64,
    data: *mut c_void,
}

// The caller promises thread-safe callbacks; evaluation fans out over threads.
unsafe impl Send for Callback {}
unsafe impl Sync for Callback {}

impl Callback {
    fn call(&self, x: f64) -> f64 {
        unsafe { (self.f)(x, self.data) }
    }
}

/// Wrap user callbacks for `f` and `f'`, defined on `[domain_min, domain_max]`
/// (`domain_max` may be `INFINITY`).
///
/// # Safety
/// Both callbacks must be safe to call concurrently from several threads
/// with `user_data`, which must outlive the returned handle.
#[no_mangle]
pub unsafe extern "C" fn hh_function_from_callbacks(
    f: HhScalarFn,
    df: HhScalarFn,
    user_data: *mut c_void,
    domain_min: f64,
    domain_max: f64,
    out: *mut *mut HhFunction,
) -> i32 {
    guard(|| {
        let f = f.ok_or_else(|| null("f"))?;
        let df = df.ok_or_else(|| null("df"))?;
        if !(domain_min < domain_max) || domain_min.is_nan() {
            return Err(Error::Param(format!("empty domain [{domain_min}, {domain_max}]")).into());
        }
        let fc = Callback { f, data: user_data };
        let dc = Callback { f: df, data: user_data };
        let inner = TestFunction::new("callback", move |x| fc.call(x), move |x| dc.call(x), domain_min)
            .with_domain_max(domain_max);
        write(out, Box::into_raw(Box::new(HhFunction { inner })), "out")
    })
}

/// Release a handle. Null is ignored.
///
/// # Safety
/// `func` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn hh_function_free(func: *mut HhFunction) {
    if !func.is_null() {
        drop(Box::from_raw(func));
    }
}

/// Evaluate `f` and `f'` at `x`. Either out-pointer may be null.
///
/// # Safety
/// `func` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn hh_function_eval(func: *const HhFunction, x: f64, value: *mut f64, deriv: *mut f64) -> i32 {
    guard(|| {
        let func = &deref(func, "func")?.inner;
        if !value.is_null() {
            value.write(func.eval(x));
        }
        if !deriv.is_null() {
            deriv.write(func.deriv(x));
        }
        Ok(())
    })
}

/// Validate, screen the hypothesis, and evaluate a bound.
///
/// On `HH_ERR_GATE` the verdict (if requested) carries the witness and the
/// report is left untouched. `settings` may be null for defaults.
///
/// # Safety
/// Pointers must be valid; `gate` may be null.
#[no_mangle]
pub unsafe extern "C" fn hh_verify(
    func: *const HhFunction,
    a: f64,
    b: f64,
    params: *const HhParams,
    theorem: i32,
    settings: *const HhSettings,
    report: *mut HhBoundReport,
    gate: *mut HhGateVerdict,
) -> i32 {
    guard(|| {
        let func = &deref(func, "func")?.inner;
        let params = to_params(deref(params, "params")?);
        let theorem = theorem_from(theorem)?;
        let settings = to_settings(settings);
        if report.is_null() {
            return Err(null("report"));
        }
        let cfg = validate_params(params, Interval::new(a, b)?, func)?;
        theorem.check_params(&cfg.params)?;
        let verdict = bounds::gate(theorem, &cfg, settings.grid_n)?;
        if !gate.is_null() {
            gate.write(verdict_out(&verdict));
        }
        if !verdict.holds {
            return Err(Error::Gate(Box::new(verdict)).into());
        }
        let r = bounds::evaluate(theorem, &cfg, &settings)?;
        report.write(report_out(&r));
        Ok(())
    })
}

/// Evaluate a bound without the hypothesis screen.
///
/// # Safety
/// Pointers must be valid; `settings` may be null.
#[no_mangle]
pub unsafe extern "C" fn hh_evaluate(
    func: *const HhFunction,
    a: f64,
    b: f64,
    params: *const HhParams,
    theorem: i32,
    settings: *const HhSettings,
    report: *mut HhBoundReport,
) -> i32 {
    guard(|| {
        let func = &deref(func, "func")?.inner;
        let params = to_params(deref(params, "params")?);
        let theorem = theorem_from(theorem)?;
        let cfg = validate_params(params, Interval::new(a, b)?, func)?;
        let r = bounds::evaluate(theorem, &cfg, &to_settings(settings))?;
        write(report, report_out(&r), "report")
    })
}

/// `gamma1..gamma4` into `out[0..4]`.
///
/// # Safety
/// `out` must hold four doubles.
#[no_mangle]
pub unsafe extern "C" fn hh_gamma_coeffs(alpha: f64, lambda: f64, mu: f64, out: *mut f64) -> i32 {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let g = gamma_coeffs(alpha, lambda, mu)?;
        for (i, name) in ["gamma1", "gamma2", "gamma3", "gamma4"].into_iter().enumerate() {
            out.add(i).write(g.value(name));
        }
        Ok(())
    })
}

/// `nu1`, `nu2` into `out[0..2]`.
///
/// # Safety
/// `out` must hold two doubles.
#[no_mangle]
pub unsafe extern "C" fn hh_nu_coeffs(alpha: f64, out: *mut f64) -> i32 {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let n = nu_coeffs(alpha)?;
        out.write(n.value("nu1"));
        out.add(1).write(n.value("nu2"));
        Ok(())
    })
}

/// Adaptive quadrature of a callback over `[lo, hi]`. An unconverged result
/// is still written and reported as `HH_ERR_BUDGET`.
///
/// # Safety
/// `f` must be callable with `user_data`; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn hh_integrate(
    f: HhScalarFn,
    user_data: *mut c_void,
    lo: f64,
    hi: f64,
    tol: f64,
    out: *mut HhQuadResult,
) -> i32 {
    guard(|| {
        let f = f.ok_or_else(|| null("f"))?;
        let cb = Callback { f, data: user_data };
        let r = integrate_range(|x| cb.call(x), lo, hi, tol)?;
        write(
            out,
            HhQuadResult {
                value: r.value,
                error_estimate: r.error_estimate,
                evaluations: r.evaluations as u64,
                converged: r.converged,
            },
            "out",
        )?;
        r.require_converged()?;
        Ok(())
    })
}

/// One of the special means. `weight` is read by the weighted kinds and `p`
/// by the p-logarithmic mean.
///
/// # Safety
/// `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn hh_mean(kind: i32, a: f64, b: f64, weight: f64, p: i32, out: *mut f64) -> i32 {
    guard(|| {
        let kind = match kind {
            HH_MEAN_WEIGHTED_ARITHMETIC => MeanKind::WeightedArithmetic,
            HH_MEAN_ARITHMETIC => MeanKind::Arithmetic,
            HH_MEAN_WEIGHTED_HARMONIC => MeanKind::WeightedHarmonic,
            HH_MEAN_HARMONIC => MeanKind::Harmonic,
            HH_MEAN_LOGARITHMIC => MeanKind::Logarithmic,
            HH_MEAN_P_LOGARITHMIC => MeanKind::PLogarithmic,
            other => return Err(Error::Unknown(format!("mean kind {other}")).into()),
        };
        let v = mean(kind, a, b, Some(weight), Some(p))?;
        write(out, v.value, "out")
    })
}

/// Evaluate proposition `index` (1..=6); `n` is read for 1..=3.
///
/// # Safety
/// `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn hh_proposition_check(
    index: u8,
    n: i32,
    a: f64,
    b: f64,
    lambda: f64,
    mu: f64,
    q: f64,
    out: *mut HhPropositionResult,
) -> i32 {
    guard(|| {
        let prop = Proposition::new(index, Some(n))?;
        let c = proposition_check(prop, a, b, lambda, mu, q)?;
        write(
            out,
            HhPropositionResult {
                mean_lhs: c.mean_lhs,
                mean_rhs: c.mean_rhs,
                corollary_rhs: c.corollary_rhs,
                residual: c.residual,
                holds: c.holds,
                display_holds: c.display_holds,
                factor_residual: c.factor_residual.unwrap_or(f64::NAN),
            },
            "out",
        )
    })
}
