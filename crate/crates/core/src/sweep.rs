//! Batch evaluation over a cross product of configurations.
//!
//! A sweep spec is a flat text file of `key = v1, v2, ...` lines; `#` starts
//! a comment. Recognised keys:
//!
//! ```text
//! functions = all            # or a list of corpus ids
//! intervals = 0:1, 1:2       # a:b pairs
//! alpha     = 0.5, 1
//! m         = 0.5, 1
//! lambda    = 0, 1, 2
//! mu        = 0, 1, 2
//! q         = 1, 2
//! theorems  = all            # or a list of theorem ids
//! quad_tol  = 1e-9
//! holds_tol = 1e-12
//! grid_n    = 32
//! ```

use std::collections::HashMap;
use std::str::FromStr;

use rayon::prelude::*;

use crate::bounds::{evaluate, gate, GateTarget, Settings, Theorem};
use crate::convexity::ConvexityVerdict;
use crate::domain::{builtin_corpus, validate_params, Config, Interval, Params, TestFunction};
use crate::error::{Error, Result};
use crate::report::{ReportRow, RowKey, RowStatus};

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub functions: Vec<String>,
    pub intervals: Vec<(f64, f64)>,
    pub alpha: Vec<f64>,
    pub m: Vec<f64>,
    pub lambda: Vec<f64>,
    pub mu: Vec<f64>,
    pub q: Vec<f64>,
    pub theorems: Vec<Theorem>,
    pub settings: Settings,
}

/// The spec run by the soundness acceptance check, as shipped in
/// `configs/default.sweep`.
pub const DEFAULT_SPEC_TEXT: &str = include_str!("../configs/default.sweep");

impl SweepSpec {
    pub fn default_acceptance() -> Self {
        SweepSpec::parse(DEFAULT_SPEC_TEXT).expect("bundled default spec parses")
    }

    /// A spec with one value per coordinate.
    pub fn single(function: &str, iv: (f64, f64), params: Params, theorem: Theorem, settings: Settings) -> Self {
        SweepSpec {
            functions: vec![function.to_owned()],
            intervals: vec![iv],
            alpha: vec![params.alpha],
            m: vec![params.m],
            lambda: vec![params.lambda],
            mu: vec![params.mu],
            q: vec![params.q],
            theorems: vec![theorem],
            settings,
        }
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut spec = SweepSpec {
            functions: Vec::new(),
            intervals: Vec::new(),
            alpha: Vec::new(),
            m: Vec::new(),
            lambda: Vec::new(),
            mu: Vec::new(),
            q: Vec::new(),
            theorems: Vec::new(),
            settings: Settings::default(),
        };
        let mut seen = Vec::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let bad = |msg: String| Error::param(format!("spec line {}: {msg}", lineno + 1));
            let (key, value) =
                line.split_once('=').ok_or_else(|| bad(format!("expected `key = values`, got `{line}`")))?;
            let key = key.trim();
            if seen.contains(&key.to_owned()) {
                return Err(bad(format!("duplicate key `{key}`")));
            }
            seen.push(key.to_owned());
            let items: Vec<&str> = value.split(',').map(str::trim).filter(|s| !s.is_empty()).collect();
            if items.is_empty() {
                return Err(bad(format!("`{key}` has no values")));
            }
            let reals = || -> Result<Vec<f64>> {
                items.iter().map(|s| parse_real(s).map_err(|e| bad(e.to_string()))).collect()
            };
            let scalar = || -> Result<&str> {
                match items.as_slice() {
                    [one] => Ok(*one),
                    _ => Err(bad(format!("`{key}` takes a single value"))),
                }
            };
            match key {
                "functions" => spec.functions = expand_functions(&items).map_err(|e| bad(e.to_string()))?,
                "intervals" => {
                    spec.intervals = items
                        .iter()
                        .map(|s| parse_interval(s).map_err(|e| bad(e.to_string())))
                        .collect::<Result<_>>()?
                }
                "alpha" => spec.alpha = reals()?,
                "m" => spec.m = reals()?,
                "lambda" => spec.lambda = reals()?,
                "mu" => spec.mu = reals()?,
                "q" => spec.q = reals()?,
                "theorems" => spec.theorems = expand_theorems(&items).map_err(|e| bad(e.to_string()))?,
                "quad_tol" => spec.settings.quad_tol = parse_real(scalar()?).map_err(|e| bad(e.to_string()))?,
                "holds_tol" => spec.settings.holds_tol = parse_real(scalar()?).map_err(|e| bad(e.to_string()))?,
                "grid_n" => {
                    spec.settings.grid_n =
                        scalar()?.parse().map_err(|_| bad(format!("grid_n must be an integer, got `{value}`")))?
                }
                other => return Err(bad(format!("unknown key `{other}`"))),
            }
        }
        spec.check()?;
        Ok(spec)
    }

    /// Every grid must be non-empty. Bad individual values surface as
    /// `input_error` rows.
    pub fn check(&self) -> Result<()> {
        let grids = [
            ("functions", self.functions.len()),
            ("intervals", self.intervals.len()),
            ("alpha", self.alpha.len()),
            ("m", self.m.len()),
            ("lambda", self.lambda.len()),
            ("mu", self.mu.len()),
            ("q", self.q.len()),
            ("theorems", self.theorems.len()),
        ];
        for (name, len) in grids {
            if len == 0 {
                return Err(Error::param(format!("spec grid `{name}` is empty")));
            }
        }
        if !(self.settings.quad_tol > 0.0 && self.settings.holds_tol >= 0.0) {
            return Err(Error::param("spec tolerances must be positive"));
        }
        if self.settings.grid_n < 8 {
            return Err(Error::param(format!("grid_n must be >= 8, got {}", self.settings.grid_n)));
        }
        Ok(())
    }

    /// Number of rows the sweep will produce.
    pub fn size(&self) -> usize {
        self.functions.len()
            * self.intervals.len()
            * self.alpha.len()
            * self.m.len()
            * self.lambda.len()
            * self.mu.len()
            * self.q.len()
            * self.theorems.len()
    }

    /// Row coordinates in output order.
    pub fn points(&self) -> Vec<RowKey> {
        let mut out = Vec::with_capacity(self.size());
        for function in &self.functions {
            for &(a, b) in &self.intervals {
                for &alpha in &self.alpha {
                    for &m in &self.m {
                        for &lambda in &self.lambda {
                            for &mu in &self.mu {
                                for &q in &self.q {
                                    for &theorem in &self.theorems {
                                        out.push(RowKey {
                                            function: function.clone(),
                                            a,
                                            b,
                                            alpha,
                                            m,
                                            lambda,
                                            mu,
                                            q,
                                            theorem,
                                        });
                                    }
                                }
                            }
                        }
                    }
                }
            }
        }
        out
    }
}

fn parse_real(s: &str) -> Result<f64> {
    f64::from_str(s).map_err(|_| Error::param(format!("not a number: `{s}`")))
}

fn parse_interval(s: &str) -> Result<(f64, f64)> {
    let (a, b) = s.split_once(':').ok_or_else(|| Error::param(format!("interval must be `a:b`, got `{s}`")))?;
    Ok((parse_real(a.trim())?, parse_real(b.trim())?))
}

fn expand_functions(items: &[&str]) -> Result<Vec<String>> {
    if items == ["all"] {
        return Ok(builtin_corpus().iter().map(|f| f.id().to_owned()).collect());
    }
    let corpus = builtin_corpus();
    items
        .iter()
        .map(|id| {
            corpus
                .iter()
                .find(|f| f.id() == *id)
                .map(|f| f.id().to_owned())
                .ok_or_else(|| Error::Unknown(format!("function `{id}`")))
        })
        .collect()
}

fn expand_theorems(items: &[&str]) -> Result<Vec<Theorem>> {
    if items == ["all"] {
        return Ok(Theorem::ALL.to_vec());
    }
    items.iter().map(|s| s.parse()).collect()
}

/// Gate verdicts are shared by every row with the same function, interval
/// and hypothesis.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
struct GateKey {
    function: String,
    a: u64,
    b: u64,
    target: Option<u64>,
    alpha: u64,
    m: u64,
}

fn gate_key(key: &RowKey, cfg: &Config) -> GateKey {
    let hyp = key.theorem.hypothesis(&cfg.params);
    GateKey {
        function: key.function.clone(),
        a: key.a.to_bits(),
        b: key.b.to_bits(),
        target: match hyp.target {
            GateTarget::Function => None,
            GateTarget::DerivativePower(q) => Some(q.to_bits()),
        },
        alpha: hyp.alpha.to_bits(),
        m: hyp.m.to_bits(),
    }
}

enum Prepared {
    Ready(Config),
    Done(ReportRow),
}

fn prepare(key: &RowKey, corpus: &[TestFunction]) -> Prepared {
    let fail =
        |status: RowStatus, e: Error| Prepared::Done(ReportRow::new(key.clone(), status).with_message(e.to_string()));
    let Some(func) = corpus.iter().find(|f| f.id() == key.function) else {
        return fail(RowStatus::InputError, Error::Unknown(format!("function `{}`", key.function)));
    };
    let cfg = Interval::new(key.a, key.b)
        .and_then(|iv| Params::new(key.alpha, key.m, key.lambda, key.mu, key.q).map(|p| (iv, p)))
        .and_then(|(iv, p)| validate_params(p, iv, func));
    match cfg {
        Err(e) => fail(RowStatus::InputError, e),
        Ok(cfg) => match key.theorem.check_params(&cfg.params) {
            Err(e) => fail(RowStatus::NotApplicable, e),
            Ok(()) => Prepared::Ready(cfg),
        },
    }
}

fn finish(key: &RowKey, cfg: &Config, verdict: &Result<ConvexityVerdict>, settings: &Settings) -> ReportRow {
    let row = ReportRow::new(key.clone(), RowStatus::InputError);
    let verdict = match verdict {
        Err(e) => return row.with_message(format!("gate: {e}")),
        Ok(v) => v,
    };
    let row = row.with_gate(verdict);
    if !verdict.holds {
        let mut row = row.with_message("hypothesis not satisfied");
        row.status = RowStatus::GateFailed;
        return row;
    }
    match evaluate(key.theorem, cfg, settings) {
        Ok(report) => row.with_report(&report),
        Err(e) => row.with_message(e.to_string()),
    }
}

/// Evaluate every point of `spec` against the built-in corpus.
///
/// Runs on the current rayon pool; rows come back in [`SweepSpec::points`] order.
pub fn run(spec: &SweepSpec) -> Result<Vec<ReportRow>> {
    run_with(spec, &builtin_corpus())
}

pub fn run_with(spec: &SweepSpec, corpus: &[TestFunction]) -> Result<Vec<ReportRow>> {
    spec.check()?;
    let points = spec.points();
    let prepared: Vec<Prepared> = points.par_iter().map(|k| prepare(k, corpus)).collect();

    let mut gates: HashMap<GateKey, (Theorem, usize)> = HashMap::new();
    for (i, (key, p)) in points.iter().zip(&prepared).enumerate() {
        if let Prepared::Ready(cfg) = p {
            gates.entry(gate_key(key, cfg)).or_insert((key.theorem, i));
        }
    }
    let mut jobs: Vec<(GateKey, Theorem, usize)> = gates.into_iter().map(|(k, (t, i))| (k, t, i)).collect();
    jobs.sort_by_key(|j| j.2);
    let verdicts: HashMap<GateKey, Result<ConvexityVerdict>> = jobs
        .into_par_iter()
        .map(|(gk, theorem, i)| {
            let Prepared::Ready(cfg) = &prepared[i] else { unreachable!() };
            (gk, gate(theorem, cfg, spec.settings.grid_n))
        })
        .collect();

    let rows = points
        .par_iter()
        .zip(prepared.into_par_iter())
        .map(|(key, p)| match p {
            Prepared::Done(row) => row,
            Prepared::Ready(cfg) => finish(key, &cfg, &verdicts[&gate_key(key, &cfg)], &spec.settings),
        })
        .collect();
    Ok(rows)
}

/// Run on a dedicated pool of `jobs` threads.
pub fn run_parallel(spec: &SweepSpec, jobs: usize) -> Result<Vec<ReportRow>> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .map_err(|e| Error::Unknown(format!("thread pool: {e}")))?;
    pool.install(|| run(spec))
}

/// One row of a tightness comparison.
#[derive(Debug, Clone, PartialEq)]
pub struct TightnessEntry {
    pub row: ReportRow,
    /// 1-based position by slack among evaluated rows.
    pub rank: Option<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TightnessTable {
    pub entries: Vec<TightnessEntry>,
    pub midpoint_value: f64,
    pub trapezoid_value: f64,
    pub integral_mean: f64,
    /// `(f(a) + f(b))/2 - mean f`, the gap to the classical upper bound.
    pub trapezoid_gap: f64,
}

impl TightnessTable {
    pub fn tightest(&self) -> Option<&TightnessEntry> {
        self.entries.iter().find(|e| e.rank == Some(1))
    }
}

/// Evaluate `theorems` at one configuration and rank them by slack.
pub fn tightness(
    function: &str,
    iv: (f64, f64),
    params: Params,
    theorems: &[Theorem],
    settings: Settings,
) -> Result<TightnessTable> {
    if theorems.len() < 2 {
        return Err(Error::param("tightness needs at least two theorems"));
    }
    let func = crate::domain::corpus_function(function)?;
    let interval = Interval::new(iv.0, iv.1)?;
    validate_params(params, interval, &func)?;
    let spec = SweepSpec {
        functions: vec![function.to_owned()],
        intervals: vec![iv],
        alpha: vec![params.alpha],
        m: vec![params.m],
        lambda: vec![params.lambda],
        mu: vec![params.mu],
        q: vec![params.q],
        theorems: theorems.to_vec(),
        settings,
    };
    let rows = run(&spec)?;
    let mut order: Vec<usize> = (0..rows.len()).filter(|&i| rows[i].slack.is_some()).collect();
    order.sort_by(|&i, &j| rows[i].slack.unwrap().total_cmp(&rows[j].slack.unwrap()).then(i.cmp(&j)));
    let mut entries: Vec<TightnessEntry> = rows.into_iter().map(|row| TightnessEntry { row, rank: None }).collect();
    for (r, &i) in order.iter().enumerate() {
        entries[i].rank = Some(r + 1);
    }
    let (midpoint_value, trapezoid_value) = crate::bounds::bound_hh(&func, &interval);
    let (integral_mean, _) = crate::bounds::integral_mean(&func, &interval, settings.quad_tol)?;
    Ok(TightnessTable {
        entries,
        midpoint_value,
        trapezoid_value,
        integral_mean,
        trapezoid_gap: trapezoid_value - integral_mean,
    })
}
