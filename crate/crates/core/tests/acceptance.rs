//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero when any criterion fails.

use std::process::ExitCode;
use std::time::Instant;

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use hh_bounds::bounds::{deviation, lemma21, rhs, thm22_equal_weight_form, thm22_unit_form, Theorem};
use hh_bounds::coefficients::{gamma_coeffs, nu_coeffs};
use hh_bounds::domain::{builtin_corpus, validate_params, Interval, Params, TestFunction};
use hh_bounds::means::{proposition_check, Proposition};
use hh_bounds::quadrature::{kernel_moment, KernelWeight, KinkAt};
use hh_bounds::report::{write_csv, RowStatus};
use hh_bounds::sweep::{run_parallel, SweepSpec};

const IDENTITY_TOL: f64 = 1e-9;
const ORACLE_TOL: f64 = 1e-10;
const NU_SUM_TOL: f64 = 1e-14;
const REDUCTION_TOL: f64 = 1e-12;
const WORKED_TOL: f64 = 1e-12;
const MEANS_TOL: f64 = 1e-12;
const SWAP_TOL: f64 = 1e-12;

const INTERVALS: [(f64, f64); 4] = [(0.0, 1.0), (1.0, 2.0), (0.5, 3.0), (2.0, 5.0)];
const WEIGHTS: [f64; 5] = [0.0, 0.5, 1.0, 2.0, 5.0];

type Criterion = (&'static str, fn() -> Outcome);

struct Outcome {
    pass: bool,
    detail: String,
    notes: Vec<String>,
}

impl Outcome {
    fn new(pass: bool, detail: impl Into<String>) -> Self {
        Outcome { pass, detail: detail.into(), notes: Vec::new() }
    }

    fn note(mut self, n: impl Into<String>) -> Self {
        self.notes.push(n.into());
        self
    }
}

fn weight_pairs() -> Vec<(f64, f64)> {
    let mut out = Vec::new();
    for &l in &WEIGHTS {
        for &m in &WEIGHTS {
            if l + m > 0.0 {
                out.push((l, m));
            }
        }
    }
    out
}

/// `|x - y| <= tol * max(1, |x|, |y|)`.
fn close(x: f64, y: f64, tol: f64) -> bool {
    (x - y).abs() <= tol * x.abs().max(y.abs()).max(1.0)
}

fn iv(a: f64, b: f64) -> Interval {
    Interval::new(a, b).unwrap()
}

fn bound(theorem: Theorem, f: &TestFunction, i: Interval, p: Params) -> Option<f64> {
    let cfg = validate_params(p, i, f).ok()?;
    Some(rhs(theorem, &cfg).unwrap().value)
}

fn criterion_1() -> Outcome {
    let mut checks = 0;
    let mut skipped = 0;
    let mut worst: f64 = 0.0;
    let mut failures = Vec::new();
    for f in builtin_corpus() {
        for &(a, b) in &INTERVALS {
            for (l, m) in weight_pairs() {
                if !f.covers(a, b) {
                    skipped += 1;
                    continue;
                }
                checks += 1;
                match lemma21(&f, &iv(a, b), l, m, 1e-12) {
                    Ok(c) => {
                        worst = worst.max(c.residual);
                        if c.residual.is_nan() || c.residual > IDENTITY_TOL {
                            failures.push(format!("{} [{a}, {b}] ({l}, {m}): {:e}", f.id(), c.residual));
                        }
                    }
                    Err(e) => failures.push(format!("{} [{a}, {b}] ({l}, {m}): {e}", f.id())),
                }
            }
        }
    }
    let mut out = Outcome::new(
        failures.is_empty(),
        format!(
            "{checks} checks, worst residual {worst:e} (tol {IDENTITY_TOL:e}), {skipped} outside the function domain"
        ),
    );
    for f in failures.into_iter().take(5) {
        out = out.note(f);
    }
    out
}

fn criterion_2() -> Outcome {
    let mut worst_oracle: f64 = 0.0;
    for &alpha in &[0.25, 0.5, 0.75, 1.0] {
        for (l, m) in weight_pairs() {
            let g = gamma_coeffs(alpha, l, m).unwrap();
            let cases = [
                ("gamma1", KernelWeight::TPowAlpha, KinkAt::Lambda),
                ("gamma2", KernelWeight::OneMinusTPowAlpha, KinkAt::Lambda),
                ("gamma3", KernelWeight::TPowAlpha, KinkAt::Mu),
                ("gamma4", KernelWeight::OneMinusTPowAlpha, KinkAt::Mu),
            ];
            for (name, w, k) in cases {
                let q = kernel_moment(alpha, l, m, w, k, 1.0, 1e-13).unwrap();
                worst_oracle = worst_oracle.max((g.value(name) - q.value).abs());
            }
        }
    }
    let oracle_ok = worst_oracle <= ORACLE_TOL;

    let mut rng = StdRng::seed_from_u64(0x5eed_0002);
    let mut worst_sum: f64 = 0.0;
    for _ in 0..50 {
        let alpha: f64 = rng.gen_range(1e-6..=1.0);
        let nu = nu_coeffs(alpha).unwrap();
        worst_sum = worst_sum.max((nu.value("nu1") + nu.value("nu2") - 0.5).abs());
    }
    let sum_ok = worst_sum <= NU_SUM_TOL;

    let mut worst_red: f64 = 0.0;
    let mut worst_scaled: f64 = 0.0;
    let mut offenders = Vec::new();
    for &alpha in &[0.25, 0.5, 0.75, 1.0] {
        let nu = nu_coeffs(alpha).unwrap();
        for &l in &WEIGHTS[1..] {
            let g = gamma_coeffs(alpha, l, l).unwrap();
            for (gi, ni) in [("gamma1", "nu1"), ("gamma2", "nu2"), ("gamma3", "nu1"), ("gamma4", "nu2")] {
                let d = (g.value(gi) - nu.value(ni)).abs();
                worst_red = worst_red.max(d);
                worst_scaled = worst_scaled.max((g.value(gi) / l - nu.value(ni)).abs());
                if d > REDUCTION_TOL && !offenders.contains(&l) {
                    offenders.push(l);
                }
            }
        }
    }
    let red_ok = worst_red <= REDUCTION_TOL;

    let mut out = Outcome::new(
        oracle_ok && sum_ok && red_ok,
        format!(
            "oracle {worst_oracle:e} (tol {ORACLE_TOL:e}) {}; nu1+nu2 {worst_sum:e} (tol {NU_SUM_TOL:e}) {}; \
             gamma(lambda=mu) vs nu {worst_red:e} (tol {REDUCTION_TOL:e}) {}",
            verdict(oracle_ok),
            verdict(sum_ok),
            verdict(red_ok)
        ),
    );
    if !red_ok {
        out = out.note(format!(
            "gamma_i(lambda = mu) equals nu_i only at lambda = mu = 1; mismatch at lambda = mu in {offenders:?}. \
             gamma_i / lambda vs nu_i: {worst_scaled:e}, so gamma_i(lambda = mu) = lambda * nu_i."
        ));
    }
    out
}

fn verdict(ok: bool) -> &'static str {
    if ok {
        "ok"
    } else {
        "MISMATCH"
    }
}

fn criterion_3() -> Outcome {
    let spec = SweepSpec::default_acceptance();
    let rows = run_parallel(&spec, 4).unwrap();
    let count = |s: RowStatus| rows.iter().filter(|r| r.status == s).count();
    let gated: Vec<_> = rows.iter().filter(|r| r.gate_holds == Some(true)).collect();
    let unsound = gated.iter().filter(|r| !r.holds).count();
    let mut out = Outcome::new(
        count(RowStatus::Violated) == 0 && unsound == 0,
        format!(
            "{} rows: {} holds, {} violated, {} gate failed, {} not applicable, {} input errors",
            rows.len(),
            count(RowStatus::Holds),
            count(RowStatus::Violated),
            count(RowStatus::GateFailed),
            count(RowStatus::NotApplicable),
            count(RowStatus::InputError)
        ),
    );
    for r in rows.iter().filter(|r| r.status == RowStatus::Violated).take(5) {
        out = out.note(format!("violated: {} lhs={:?} rhs={:?}", r.config_label(), r.lhs, r.rhs));
    }
    out
}

fn criterion_4() -> Outcome {
    let corpus = builtin_corpus();
    let mut counts = [0usize; 5];
    let mut worst = [0.0f64; 5];
    let mut failures = Vec::new();
    let mut record = |k: usize, label: String, x: f64, y: f64| {
        counts[k] += 1;
        let d = (x - y).abs() / x.abs().max(y.abs()).max(1.0);
        worst[k] = worst[k].max(d);
        if !close(x, y, REDUCTION_TOL) {
            failures.push(format!("{label}: {x:?} vs {y:?}"));
        }
    };
    for f in &corpus {
        for &(a, b) in &INTERVALS {
            let i = iv(a, b);
            for &alpha in &[0.5, 1.0] {
                for &m in &[0.5, 1.0] {
                    for &q in &[1.0, 2.0, 3.0] {
                        for &l in &WEIGHTS[1..] {
                            let p = Params::new(alpha, m, l, l, q).unwrap();
                            let label = format!("{} [{a}, {b}] alpha={alpha} m={m} q={q} lambda=mu={l}", f.id());
                            let Some(t11) = bound(Theorem::Thm11, f, i, p) else { continue };
                            let am = bound(Theorem::BopAm, f, i, p).unwrap();
                            record(0, format!("thm11 vs bop_am {label}"), t11, am);
                            if alpha == 1.0 && m == 1.0 && q == 1.0 {
                                let da = bound(Theorem::Da, f, i, p).unwrap();
                                record(1, format!("thm11 vs da {label}"), t11, da);
                            }
                            if q > 1.0 {
                                if alpha == 1.0 {
                                    let t211 = bound(Theorem::Thm211, f, i, p).unwrap();
                                    let bm = bound(Theorem::BopM, f, i, p).unwrap();
                                    record(2, format!("thm211 vs bop_m {label}"), t211, bm);
                                }
                                let t22 = bound(Theorem::Thm22, f, i, p).unwrap();
                                let form = thm22_equal_weight_form(f, &i, alpha, m, q).unwrap();
                                record(3, format!("thm22 vs equal-weight form {label}"), t22, form);
                            }
                        }
                        if alpha == 1.0 && m == 1.0 && q > 1.0 {
                            for (l, mu) in weight_pairs() {
                                let p = Params::new(1.0, 1.0, l, mu, q).unwrap();
                                let Some(t22) = bound(Theorem::Thm22, f, i, p) else { continue };
                                let form = thm22_unit_form(f, &i, l, mu, q).unwrap();
                                record(
                                    4,
                                    format!("thm22 vs unit form {} [{a}, {b}] q={q} ({l}, {mu})", f.id()),
                                    t22,
                                    form,
                                );
                            }
                        }
                    }
                }
            }
        }
    }
    let names = ["thm11=bop_am", "thm11=da", "thm211=bop_m", "thm22=equal-weight", "thm22=unit"];
    let summary: Vec<String> = (0..5).map(|k| format!("{} {}x worst {:e}", names[k], counts[k], worst[k])).collect();
    let mut out = Outcome::new(
        failures.is_empty() && counts.iter().all(|&c| c > 0),
        format!("{} (tol {REDUCTION_TOL:e})", summary.join("; ")),
    );
    for f in failures.into_iter().take(5) {
        out = out.note(f);
    }
    out
}

fn criterion_5() -> Outcome {
    let sq = TestFunction::power(2);
    let t11 = bound(Theorem::Thm11, &sq, iv(1.0, 2.0), Params::new(1.0, 1.0, 2.0, 1.0, 1.0).unwrap()).unwrap();
    let t11_ok = (t11 - 61.0 / 81.0).abs() <= WORKED_TOL;

    let t22 = bound(Theorem::Thm22, &sq, iv(1.0, 2.0), Params::new(1.0, 1.0, 1.0, 1.0, 2.0).unwrap()).unwrap();
    let t22_expected = 5f64.sqrt() / 12f64.sqrt();
    let t22_ok = (t22 - t22_expected).abs() <= WORKED_TOL;

    let mut dev_worst: f64 = 0.0;
    for &l in &WEIGHTS[1..] {
        let d = deviation(&sq, &iv(0.0, 1.0), l, l, 1e-12).unwrap();
        dev_worst = dev_worst.max((d.lhs_abs - 1.0 / 6.0).abs());
    }
    let dev_ok = dev_worst <= WORKED_TOL;

    let mut out = Outcome::new(
        t11_ok && t22_ok && dev_ok,
        format!(
            "thm11 {t11:?} vs 61/81 {}; thm22 {t22:?} vs sqrt(5)/sqrt(12) = {t22_expected:?} {}; deviation 1/6 within {dev_worst:e} {}",
            verdict(t11_ok),
            verdict(t22_ok),
            verdict(dev_ok)
        ),
    );
    if !t22_ok {
        out = out.note(format!(
            "thm22 evaluates to (1/2)(1/3)^(1/2)(1/2)^(1/2)(4 + 16)^(1/2) = sqrt(5/6) = {:?}; \
             difference from computed {:e}. The expected value sqrt(5)/sqrt(12) uses (p+1)^(-1/p) = (2/12)^(1/2) in place of (1/3)^(1/2).",
            (5.0f64 / 6.0).sqrt(),
            (t22 - (5.0f64 / 6.0).sqrt()).abs()
        ));
    }
    out
}

fn criterion_6() -> Outcome {
    let mut checked = 0;
    let mut failures = Vec::new();
    let mut findings = Vec::new();
    let mut worst_factor: f64 = 0.0;
    let mut worst_residual = [0.0f64; 7];
    let mut display_failures = 0;
    let mut first_display_failure = None;
    for index in 1u8..=6 {
        let exponents: &[i32] = if index <= 3 { &[2, 3, -2] } else { &[-1] };
        for &n in exponents {
            let prop = Proposition::new(index, (index <= 3).then_some(n)).unwrap();
            let qs: &[f64] = if matches!(index, 1 | 4) { &[1.0, 2.0] } else { &[2.0] };
            for &a in &[0.5, 1.0, 1.5] {
                for &b in &[2.0, 3.0] {
                    for (l, mu) in weight_pairs() {
                        for &q in qs {
                            checked += 1;
                            let label = format!("prop {index} n={n} a={a} b={b} ({l}, {mu}) q={q}");
                            let c = match proposition_check(prop, a, b, l, mu, q) {
                                Ok(c) => c,
                                Err(e) => {
                                    failures.push(format!("{label}: {e}"));
                                    continue;
                                }
                            };
                            let rel = c.residual / c.corollary_rhs.abs().max(1.0);
                            worst_residual[index as usize] = worst_residual[index as usize].max(rel);
                            if !c.holds {
                                failures.push(format!("{label}: lhs {:?} > rhs {:?}", c.mean_lhs, c.corollary_rhs));
                            }
                            if let Some(fr) = c.factor_residual {
                                worst_factor = worst_factor.max(fr);
                                if fr > MEANS_TOL {
                                    failures.push(format!("{label}: A_w(lambda^p, mu^p) factor residual {fr:e}"));
                                }
                            }
                            if index == 6 {
                                if !c.display_holds {
                                    display_failures += 1;
                                    first_display_failure.get_or_insert_with(|| label.clone());
                                }
                            } else if rel > MEANS_TOL {
                                failures.push(format!("{label}: mean form vs corollary residual {rel:e}"));
                            }
                        }
                    }
                }
            }
        }
    }
    if worst_residual[6] > MEANS_TOL {
        findings.push(format!(
            "prop 6: mean-form display differs from the corollary by a factor 2^(-1/q) (worst relative residual {:e}); \
             the display's inequality fails in {display_failures} configurations, first at {}",
            worst_residual[6],
            first_display_failure.as_deref().unwrap_or("none")
        ));
    }
    let res: Vec<String> = (1..=6).map(|k| format!("{k}:{:e}", worst_residual[k])).collect();
    let mut out = Outcome::new(
        failures.is_empty(),
        format!(
            "{checked} checks; worst relative residual per proposition [{}]; A_w factor residual {worst_factor:e} (tol {MEANS_TOL:e})",
            res.join(" ")
        ),
    );
    for f in findings {
        out = out.note(format!("finding: {f}"));
    }
    for f in failures.into_iter().take(5) {
        out = out.note(f);
    }
    out
}

fn criterion_7() -> Outcome {
    let spec = SweepSpec::default_acceptance();
    let render = |jobs| {
        let rows = run_parallel(&spec, jobs).unwrap();
        let mut buf = Vec::new();
        write_csv(&rows, &mut buf).unwrap();
        buf
    };
    let first = render(1);
    let second = render(4);
    Outcome::new(
        first == second,
        format!("two runs (1 and 4 threads), {} bytes each, identical: {}", first.len(), first == second),
    )
}

fn criterion_8() -> Outcome {
    let corpus = builtin_corpus();
    let mut rng = StdRng::seed_from_u64(0x5eed_0008);
    let mut done = 0;
    let mut worst: f64 = 0.0;
    let mut failures = Vec::new();
    while done < 100 {
        let f = &corpus[rng.gen_range(0..corpus.len())];
        let a: f64 = rng.gen_range(0.1..3.0);
        let b = a + rng.gen_range(0.1..3.0);
        let i = iv(a, b);
        let alpha: f64 = rng.gen_range(0.05..=1.0);
        let q = if rng.gen_bool(0.5) { 1.0 } else { rng.gen_range(1.0..4.0) };
        let l: f64 = rng.gen_range(0.0..5.0);
        let mu: f64 = rng.gen_range(0.0..5.0);
        let Some(x) = bound(Theorem::Thm11, f, i, Params::new(alpha, 1.0, l, mu, q).unwrap()) else { continue };
        let Some(y) = bound(Theorem::Thm11, &f.reflected(&i), i, Params::new(alpha, 1.0, mu, l, q).unwrap()) else {
            continue;
        };
        done += 1;
        let d = (x - y).abs() / x.abs().max(1.0);
        worst = worst.max(d);
        if !close(x, y, SWAP_TOL) {
            failures.push(format!("{} [{a}, {b}] alpha={alpha} q={q} ({l}, {mu}): {x:?} vs {y:?}", f.id()));
        }
    }
    let mut out = Outcome::new(
        failures.is_empty(),
        format!("{done} random configs with m = 1, worst relative difference {worst:e} (tol {SWAP_TOL:e})"),
    );
    let mut posed = 0;
    for _ in 0..200 {
        let f = &corpus[rng.gen_range(0..corpus.len())];
        let a: f64 = rng.gen_range(0.1..3.0);
        let i = iv(a, a + rng.gen_range(0.1..3.0));
        let (l, mu) = (rng.gen_range(0.0..5.0), rng.gen_range(0.0..5.0));
        let p = Params::new(1.0, 0.5, l, mu, 1.0).unwrap();
        let reflected = Params { lambda: mu, mu: l, ..p };
        if bound(Theorem::Thm11, f, i, p).is_some() && bound(Theorem::Thm11, &f.reflected(&i), i, reflected).is_some() {
            posed += 1;
        }
    }
    out = out.note(format!(
        "diagnostic: with m = 0.5 the reflected configuration is well-posed in {posed} of 200 draws; \
         the bound needs the reflected f on [a, b/m], which extends past a + b"
    ));
    for f in failures.into_iter().take(5) {
        out = out.note(f);
    }
    out
}

fn main() -> ExitCode {
    let criteria: [Criterion; 8] = [
        ("integration-by-parts identity", criterion_1),
        ("coefficient oracle", criterion_2),
        ("soundness sweep", criterion_3),
        ("reduction identities", criterion_4),
        ("worked values", criterion_5),
        ("special means", criterion_6),
        ("determinism", criterion_7),
        ("swap symmetry", criterion_8),
    ];
    let start = Instant::now();
    let mut failed = 0;
    for (k, (name, run)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let outcome = std::panic::catch_unwind(run).unwrap_or_else(|_| Outcome::new(false, "panicked"));
        if !outcome.pass {
            failed += 1;
        }
        println!(
            "criterion {} {name}: {} ({:.2}s) {}",
            k + 1,
            if outcome.pass { "PASS" } else { "FAIL" },
            t.elapsed().as_secs_f64(),
            outcome.detail
        );
        for n in &outcome.notes {
            println!("    {n}");
        }
    }
    println!(
        "acceptance: {} of {} criteria passed in {:.1}s",
        criteria.len() - failed,
        criteria.len(),
        start.elapsed().as_secs_f64()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
