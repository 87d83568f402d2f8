use canonloop::enumerate::{enumerate_shapes, enumerate_structures, histograms};
use canonloop::loopgf::{cross_derivation_check, loop_gf, shape_gf, GfRequest, ShapeGfTable};
use canonloop::matchings::{brute_force_matchings, fk_counts, q0_roots_check};
use canonloop::singularity::{clt_empirical, growth_check, mu_sigma, tables, DEFAULT_DIGITS};
use canonloop::{ExactRational, LoopKind, Result, UPoly};
use serde_json::{json, Value};

use crate::output::Document;
use crate::{Case, Cli, Command, Scope};

pub struct Outcome {
    pub document: Document,
    pub passed: bool,
}

fn ok(document: Document) -> Result<Outcome> {
    Ok(Outcome {
        document,
        passed: true,
    })
}

fn to_strings<T: ToString>(values: &[T]) -> Vec<String> {
    values.iter().map(T::to_string).collect()
}

pub fn run(cli: &Cli) -> Result<Outcome> {
    match &cli.command {
        Command::Fk { k, n_max } => fk(*k, *n_max),
        Command::Shapes { k, s_max, brute_force } => shapes(*k, *s_max, *brute_force),
        Command::Gf { case, order, n, u_cap } => gf(*case, *order, *n, *u_cap),
        Command::Enum { kind, k, tau, n, list } => enumeration(kind.map(Into::into), *k, *tau, *n, *list),
        Command::Check { scope } => check(*scope),
        Command::Singularity { case } => singularity(*case, cli.precision.unwrap_or(DEFAULT_DIGITS)),
        Command::Tables { kind } => table_grid(kind.map(Into::into), cli.precision.unwrap_or(6)),
        Command::Clt { case, n_list } => clt(*case, n_list),
        Command::Growth {
            case,
            n,
            ratio_tol,
            exponent_tol,
        } => growth(*case, *n, *ratio_tol, *exponent_tol),
    }
}

fn fk(k: usize, n_max: usize) -> Result<Outcome> {
    let t = fk_counts(k, n_max)?;
    let rows = t
        .values
        .iter()
        .enumerate()
        .map(|(n, v)| vec![n.to_string(), v.to_string()])
        .collect();
    ok(Document::new(serde_json::to_value(&t).expect("serializable"), &["n", "count"], rows))
}

fn shape_rows(t: &ShapeGfTable) -> Vec<Vec<String>> {
    let mut rows = Vec::new();
    for (s, row) in t.entries.iter().enumerate() {
        for (m, c) in row.iter().enumerate() {
            rows.push(vec![s.to_string(), m.to_string(), c.to_string()]);
        }
    }
    rows
}

fn shapes(k: usize, s_max: usize, brute_force: bool) -> Result<Outcome> {
    let t = if brute_force {
        enumerate_shapes(k, s_max)?
    } else {
        shape_gf(k, s_max)?
    };
    ok(Document::new(
        serde_json::to_value(&t).expect("serializable"),
        &["s", "m", "count"],
        shape_rows(&t),
    ))
}

fn poly_json(n: usize, p: &UPoly) -> Value {
    json!({ "n": n, "poly": p.to_string(), "coeffs": to_strings(p.coeffs()) })
}

fn gf(case: Case, order: Option<usize>, single: Option<usize>, u_cap: Option<usize>) -> Result<Outcome> {
    let kind: LoopKind = case.kind.into();
    let n_top = single.or(order).unwrap_or(10);
    let mut req = GfRequest::new(kind, case.k, case.tau, n_top);
    if let Some(cap) = u_cap {
        req = req.with_u_cap(cap);
    }
    let series = loop_gf(&req)?;
    let range: Vec<usize> = match single {
        Some(n) => vec![n],
        None => (0..=n_top).collect(),
    };
    let coefficients: Vec<Value> = range.iter().map(|&n| poly_json(n, series.coeff(n))).collect();
    let rows = range
        .iter()
        .map(|&n| vec![n.to_string(), series.coeff(n).to_string()])
        .collect();
    let json = json!({
        "kind": kind,
        "k": case.k,
        "tau": case.tau,
        "order": req.order,
        "u_cap": req.u_cap,
        "coefficients": coefficients,
    });
    ok(Document::new(json, &["n", "poly"], rows))
}

fn enumeration(kind: Option<LoopKind>, k: usize, tau: usize, n: usize, list: bool) -> Result<Outcome> {
    if list {
        let all = enumerate_structures(k, tau, n)?;
        let diagrams: Vec<_> = all.iter().map(|s| &s.diagram).collect();
        let rows = diagrams
            .iter()
            .map(|d| {
                let arcs: Vec<String> = d.arcs.iter().map(|(i, j)| format!("{i}-{j}")).collect();
                vec![d.n.to_string(), arcs.join(" ")]
            })
            .collect();
        let json = json!({ "k": k, "tau": tau, "n": n, "count": all.len(), "structures": diagrams });
        return ok(Document::new(json, &["n", "arcs"], rows));
    }
    let hist = histograms(k, tau, n)?;
    let kinds: Vec<LoopKind> = match kind {
        Some(kind) => vec![kind],
        None => LoopKind::ALL.to_vec(),
    };
    let mut entries = Vec::new();
    let mut rows = Vec::new();
    for kind in kinds {
        let p = &hist[LoopKind::ALL.iter().position(|&x| x == kind).expect("listed kind")];
        entries.push(json!({ "kind": kind, "poly": p.to_string(), "coeffs": to_strings(p.coeffs()) }));
        rows.push(vec![kind.to_string(), p.to_string()]);
    }
    let json = json!({ "k": k, "tau": tau, "n": n, "histograms": entries });
    ok(Document::new(json, &["kind", "poly"], rows))
}

struct CaseResult {
    suite: &'static str,
    case: String,
    passed: bool,
    detail: String,
}

fn check(scope: Scope) -> Result<Outcome> {
    let (n_enum, n_cross, s_shapes) = match scope {
        Scope::Quick => (9, 10, 4),
        _ => (12, 14, 5),
    };
    let grid = [(2, 1), (2, 2), (3, 1), (3, 2)];
    let mut results = Vec::new();

    for k in 2..=4 {
        let det = fk_counts(k, 6)?;
        let brute: Vec<String> = (0..=6)
            .map(|n| brute_force_matchings(k, n).map(|v| v.to_string()))
            .collect::<Result<_>>()?;
        let passed = brute == to_strings(&det.values);
        results.push(CaseResult {
            suite: "matchings",
            case: format!("k={k} n<=6"),
            passed,
            detail: brute.join(","),
        });
    }
    for k in 2..=7 {
        let r = q0_roots_check(k)?;
        results.push(CaseResult {
            suite: "ode-roots",
            case: format!("k={k}"),
            passed: r.passed(),
            detail: String::new(),
        });
    }
    for (k, tau) in grid {
        let gfs: Vec<_> = LoopKind::ALL
            .iter()
            .map(|&kind| loop_gf(&GfRequest::new(kind, k, tau, n_enum)))
            .collect::<Result<_>>()?;
        let mut first_bad: Vec<Option<usize>> = vec![None; 3];
        for n in 0..=n_enum {
            let hist = histograms(k, tau, n)?;
            for i in 0..3 {
                if first_bad[i].is_none() && gfs[i].coeff(n) != &hist[i] {
                    first_bad[i] = Some(n);
                }
            }
        }
        for (i, kind) in LoopKind::ALL.iter().enumerate() {
            results.push(CaseResult {
                suite: "gf-vs-enum",
                case: format!("{kind} k={k} tau={tau} n<={n_enum}"),
                passed: first_bad[i].is_none(),
                detail: first_bad[i].map(|n| format!("first mismatch at n={n}")).unwrap_or_default(),
            });
        }
        let one = ExactRational::from_integer(1.into());
        let mut totals = Vec::new();
        for kind in LoopKind::ALL {
            let req = GfRequest::new(kind, k, tau, n_cross);
            let r = cross_derivation_check(&req)?;
            results.push(CaseResult {
                suite: "shape-sum",
                case: format!("{kind} k={k} tau={tau} N={n_cross}"),
                passed: r.matches,
                detail: r.first_mismatch.map(|n| format!("first mismatch at n={n}")).unwrap_or_default(),
            });
            totals.push(loop_gf(&req)?.specialize(&one));
        }
        results.push(CaseResult {
            suite: "totals",
            case: format!("k={k} tau={tau} N={n_cross}"),
            passed: totals.windows(2).all(|w| w[0] == w[1]),
            detail: String::new(),
        });
    }
    for k in [2, 3] {
        results.push(CaseResult {
            suite: "shapes",
            case: format!("k={k} s<={s_shapes}"),
            passed: enumerate_shapes(k, s_shapes)? == shape_gf(k, s_shapes)?,
            detail: String::new(),
        });
    }
    if scope == Scope::Full {
        for cell in tables(&LoopKind::ALL, 6)? {
            results.push(CaseResult {
                suite: "tables",
                case: format!("{} k={} tau={}", cell.kind, cell.k, cell.tau),
                passed: cell.passed(),
                detail: format!("{}/{}", cell.mu, cell.sigma2),
            });
        }
    }

    let passed = results.iter().all(|r| r.passed);
    let cases: Vec<Value> = results
        .iter()
        .map(|r| json!({ "suite": r.suite, "case": r.case, "passed": r.passed, "detail": r.detail }))
        .collect();
    let rows = results
        .iter()
        .map(|r| vec![r.suite.to_string(), r.case.clone(), r.passed.to_string(), r.detail.clone()])
        .collect();
    let json = json!({ "passed": passed, "cases": cases });
    Ok(Outcome {
        document: Document::new(json, &["suite", "case", "passed", "detail"], rows),
        passed,
    })
}

fn singularity(case: Case, digits: usize) -> Result<Outcome> {
    let r = mu_sigma(case.kind.into(), case.k, case.tau)?.render(digits);
    let rows = vec![vec![
        r.kind.to_string(),
        r.k.to_string(),
        r.tau.to_string(),
        r.gamma0.clone(),
        r.dgamma.clone(),
        r.d2gamma.clone(),
        r.mu.clone(),
        r.sigma2.clone(),
        r.dominance.to_string(),
        r.validated.to_string(),
    ]];
    let passed = r.dominance && r.derivatives_agree;
    Ok(Outcome {
        document: Document::new(
            serde_json::to_value(&r).expect("serializable"),
            &["kind", "k", "tau", "gamma0", "dgamma", "d2gamma", "mu", "sigma2", "dominance", "validated"],
            rows,
        ),
        passed,
    })
}

fn table_grid(kind: Option<LoopKind>, digits: usize) -> Result<Outcome> {
    let kinds = match kind {
        Some(kind) => vec![kind],
        None => LoopKind::ALL.to_vec(),
    };
    let cells = tables(&kinds, digits)?;
    let passed = cells.iter().all(|c| c.passed());
    let rows = cells
        .iter()
        .map(|c| {
            vec![
                c.kind.to_string(),
                c.k.to_string(),
                c.tau.to_string(),
                c.mu.clone(),
                c.sigma2.clone(),
                c.published_mu.clone().unwrap_or_default(),
                c.published_sigma2.clone().unwrap_or_default(),
                c.matches.map(|m| m.to_string()).unwrap_or_default(),
            ]
        })
        .collect();
    let json = json!({ "passed": passed, "cells": cells });
    Ok(Outcome {
        document: Document::new(
            json,
            &["kind", "k", "tau", "mu", "sigma2", "published_mu", "published_sigma2", "match"],
            rows,
        ),
        passed,
    })
}

fn clt(case: Case, n_list: &[usize]) -> Result<Outcome> {
    let r = clt_empirical(case.kind.into(), case.k, case.tau, n_list)?;
    let rows = r
        .rows
        .iter()
        .map(|row| {
            vec![
                row.n.to_string(),
                row.mean.clone(),
                row.variance.clone(),
                format!("{:.9}", row.mean_gap),
                row.kolmogorov.map(|d| format!("{d:.9}")).unwrap_or_default(),
            ]
        })
        .collect();
    Ok(Outcome {
        passed: r.passed(),
        document: Document::new(
            serde_json::to_value(&r).expect("serializable"),
            &["n", "mean", "variance", "mean_gap", "kolmogorov"],
            rows,
        ),
    })
}

fn growth(case: Case, n: usize, ratio_tol: f64, exponent_tol: f64) -> Result<Outcome> {
    let r = growth_check(case.kind.into(), case.k, case.tau, n)?;
    let passed = r.ratio_within(ratio_tol) && r.exponent_within(exponent_tol);
    let mut json = serde_json::to_value(&r).expect("serializable");
    json["passed"] = json!(passed);
    let rows = vec![vec![
        r.n.to_string(),
        format!("{:.9}", r.ratio),
        format!("{:.9}", r.target),
        format!("{:.9}", r.relative_error),
        format!("{:.9}", r.exponent_estimate),
        format!("{:.9}", r.exponent_target),
        passed.to_string(),
    ]];
    Ok(Outcome {
        passed,
        document: Document::new(
            json,
            &["n", "ratio", "target", "relative_error", "exponent_estimate", "exponent_target", "passed"],
            rows,
        ),
    })
}
