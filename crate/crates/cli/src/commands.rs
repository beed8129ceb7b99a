//! One function per subcommand. Each runs its checks against the job,
//! appends report lines, and lets the verdicts decide the exit status.

use serde_json::{json, Value};

use multirees::groebner::{buchberger, initial_ideal};
use multirees::polycore::{fmt_rat, rat};
use multirees::rees::{
    central_fiber, check_flatness, domain_test, ord_multiplicativity_check,
    verify_graded_bookkeeping, weight_cone_sample, BookkeepingReport, DomainOutcome,
    FlatnessReport, FlatnessVerdict,
};
use multirees::toric::{
    cartier_multiple, check_noncartier_sum, check_valuative_ideal, divisor_valuation, is_cartier,
    CartierResult,
};
use multirees::{Budget, CentralFiber, IndexWindow, Polynomial, Rational, ReesWindow, TermOrder};

use crate::job::JobSpec;
use crate::report::Report;
use crate::Failure;

fn poly_strings(polys: &[Polynomial]) -> Vec<String> {
    polys.iter().map(|p| p.to_string()).collect()
}

fn rat_string(r: &Rational) -> String {
    fmt_rat(r)
}

pub fn cmd_gb(job: &JobSpec, report: &mut Report, budget: &Budget) -> Result<(), Failure> {
    let ring = job.ring()?;
    let ideal = job.ideal(&ring)?;
    let gb = buchberger(&ideal, &TermOrder::GrevLex, budget)?;
    let leads: Vec<String> = gb
        .leading_monomials()
        .into_iter()
        .map(|m| {
            Polynomial::term(&ring, m, rat(1))
                .expect("lead monomials build terms")
                .to_string()
        })
        .collect();
    report.push(
        "groebner_basis",
        json!({ "order": "grevlex", "generators": job.relations.len() }),
        "computed",
        json!({ "basis": poly_strings(gb.basis()), "leading": leads }),
        None,
        true,
    );
    Ok(())
}

pub fn cmd_initial(job: &JobSpec, report: &mut Report, budget: &Budget) -> Result<(), Failure> {
    let ring = job.ring()?;
    let ideal = job.ideal(&ring)?;
    let weight = job.weight(&ring)?;
    let initial = initial_ideal(&ideal, &weight, budget)?;
    report.push(
        "initial_ideal",
        json!({ "weight": &job.weight }),
        "computed",
        json!({ "generators": poly_strings(initial.gens()) }),
        None,
        true,
    );
    Ok(())
}

fn flatness_line(report: &mut Report, outcome: &FlatnessReport, source: &str) {
    let params = json!({
        "N": outcome.degree_bound,
        "W": outcome.window.bounds(),
        "source": source,
    });
    match &outcome.verdict {
        FlatnessVerdict::CertifiedOnWindow => report.push(
            "flatness",
            params,
            "certified",
            json!({ "cells": outcome.cells.len(), "violations": 0 }),
            None,
            true,
        ),
        FlatnessVerdict::Violation(w) => {
            let violations = outcome.cells.iter().filter(|c| c.is_violation()).count();
            report.push(
                "flatness",
                params,
                "violation",
                json!({ "cells": outcome.cells.len(), "violations": violations }),
                Some(json!({
                    "subset": &w.subset,
                    "m": &w.m,
                    "n": w.n,
                    "position": w.position,
                    "dim": w.dim,
                    "cycle": &w.cycle,
                })),
                false,
            );
        }
    }
}

pub fn cmd_flatness(job: &JobSpec, report: &mut Report, budget: &Budget) -> Result<(), Failure> {
    let (window, source) = if job.raw.is_some() {
        (job.raw_window(budget)?, "raw")
    } else {
        (job.rees_window(budget)?.subspaces(), "family")
    };
    let outcome = check_flatness(&window, budget)?;
    flatness_line(report, &outcome, source);
    Ok(())
}

fn fiber_lines(
    job: &JobSpec,
    report: &mut Report,
    fiber: &CentralFiber,
    budget: &Budget,
) -> Result<(), Failure> {
    let window = job.window()?;
    let window_params = json!({ "N": window.degree_bound, "W": &window.bounds });

    let support: Vec<Value> = fiber
        .pieces()
        .filter(|p| p.dim > 0)
        .map(|p| json!([p.n, &p.m, p.dim]))
        .collect();
    report.push(
        "fiber_table",
        window_params.clone(),
        "computed",
        json!({ "totals": fiber.totals(), "support": support }),
        None,
        true,
    );

    let cone = weight_cone_sample(fiber);
    let holes: Vec<Value> = cone.holes.iter().map(|(n, m)| json!([n, m])).collect();
    report.push(
        "weight_cone",
        window_params.clone(),
        if cone.saturated { "saturated" } else { "holes" },
        json!({
            "rays": &cone.extreme_rays,
            "support_size": cone.support.len(),
            "holes": holes,
        }),
        None,
        cone.saturated,
    );

    let d = job
        .domain_degree
        .unwrap_or_else(|| (window.degree_bound / 2).min(2));
    match domain_test(fiber, d, budget)? {
        DomainOutcome::Pass { pairs_checked } => report.push(
            "domain",
            json!({ "degree": d }),
            "pass",
            json!({ "pairs": pairs_checked }),
            None,
            true,
        ),
        DomainOutcome::ZeroDivisor { a, b } => report.push(
            "domain",
            json!({ "degree": d }),
            "zero_divisor",
            json!({}),
            Some(json!({
                "a": { "n": a.n, "m": &a.m, "rep": a.rep.to_string() },
                "b": { "n": b.n, "m": &b.m, "rep": b.rep.to_string() },
            })),
            false,
        ),
    }

    let mut tables: Vec<BookkeepingReport> = Vec::new();
    for alpha in job.weight_vectors()? {
        let ledger = verify_graded_bookkeeping(fiber, &alpha, budget)?;
        let mismatches: Vec<Value> = ledger
            .mismatches
            .iter()
            .map(|m| {
                json!({
                    "n": m.n,
                    "level": rat_string(&m.level),
                    "direct": m.direct,
                    "fiber_sum": m.fiber_sum,
                })
            })
            .collect();
        let clean = ledger.is_clean();
        report.push(
            "bookkeeping",
            json!({ "alpha": alpha.to_string() }),
            if clean { "clean" } else { "mismatch" },
            json!({
                "levels": ledger.levels_checked,
                "window_sufficient": ledger.window_sufficient,
            }),
            if clean { None } else { Some(json!(mismatches)) },
            clean,
        );
        tables.push(ledger);
    }

    if tables.len() > 1 {
        let identical = tables
            .windows(2)
            .all(|pair| pair[0].fiber_table == pair[1].fiber_table);
        report.push(
            "alpha_independence",
            json!({ "alphas": &job.alphas }),
            if identical { "identical" } else { "differs" },
            json!({ "tables": tables.len() }),
            None,
            identical,
        );
    }

    Ok(())
}

fn mult_line(job: &JobSpec, report: &mut Report, budget: &Budget) -> Result<(), Failure> {
    let Some(mult) = &job.mult else {
        return Ok(());
    };
    let family = job.family(budget)?;
    let alpha = job
        .weight_vectors()?
        .into_iter()
        .next()
        .expect("weight_vectors rejects empty alphas");
    let outcome = ord_multiplicativity_check(
        &family,
        &alpha,
        &mult.bounds,
        mult.pairs,
        mult.max_degree,
        job.seed,
        budget,
    )?;
    let failures: Vec<&String> = outcome.failures.iter().take(5).collect();
    report.push(
        "ord_multiplicativity",
        json!({
            "alpha": alpha.to_string(),
            "pairs": mult.pairs,
            "max_degree": mult.max_degree,
            "bounds": &mult.bounds,
            "seed": job.seed,
        }),
        if outcome.all_equal() { "additive" } else { "violated" },
        json!({
            "equal": outcome.equal,
            "boundary_flags": outcome.boundary_flags,
            "failures": failures,
        }),
        None,
        outcome.all_equal(),
    );
    Ok(())
}

pub fn cmd_fiber(job: &JobSpec, report: &mut Report, budget: &Budget) -> Result<(), Failure> {
    let window = job.rees_window(budget)?;
    let fiber = central_fiber(&window, budget)?;
    fiber_lines(job, report, &fiber, budget)?;
    mult_line(job, report, budget)
}

pub fn cmd_toric(job: &JobSpec, report: &mut Report, _budget: &Budget) -> Result<(), Failure> {
    let spec = job.toric()?;
    let model = spec.model()?;
    let alphas = spec.weight_vectors()?;
    let bounds = spec.lattice_box(model.rank())?;

    for divisor in spec.divisors() {
        let coefficients = divisor.coefficients().to_vec();
        let params = json!({ "divisor": &coefficients });
        let mut valuations = Vec::with_capacity(alphas.len());
        for alpha in &alphas {
            let value = divisor_valuation(&model, &divisor, alpha)?;
            valuations.push(json!({ "alpha": alpha.to_string(), "value": rat_string(&value) }));
        }
        match is_cartier(&model, &divisor)? {
            CartierResult::Cartier { witness } => report.push(
                "cartier",
                params.clone(),
                "cartier",
                json!({ "witness": witness, "valuations": valuations }),
                None,
                true,
            ),
            CartierResult::NotCartier {
                solution,
                denominator,
            } => {
                let (factor, witness) = cartier_multiple(&model, &divisor)?;
                report.push(
                    "cartier",
                    params.clone(),
                    "not_cartier",
                    json!({
                        "solution": solution.iter().map(rat_string).collect::<Vec<_>>(),
                        "denominator": denominator,
                        "multiple": { "factor": factor, "witness": witness },
                        "valuations": valuations,
                    }),
                    None,
                    true,
                );
                let sum = check_noncartier_sum(&model, &divisor, &bounds)?;
                report.push(
                    "section_sum",
                    params.clone(),
                    if sum.verified() { "verified" } else { "counterexample" },
                    json!({ "sections": sum.sections }),
                    if sum.verified() {
                        None
                    } else {
                        Some(json!(sum.counterexamples))
                    },
                    sum.verified(),
                );
            }
        }

        for alpha in &alphas {
            for lambda in &spec.lambdas {
                let check = check_valuative_ideal(&model, &divisor, alpha, &rat(*lambda), &bounds)?;
                let mismatches: Vec<Value> = check
                    .mismatches
                    .iter()
                    .map(|(point, value)| json!({ "point": point, "value": rat_string(value) }))
                    .collect();
                report.push(
                    "valuative_levels",
                    json!({
                        "divisor": &coefficients,
                        "alpha": alpha.to_string(),
                        "lambda": lambda,
                    }),
                    if check.verified() { "verified" } else { "mismatch" },
                    json!({ "sections": check.sections }),
                    if check.verified() {
                        None
                    } else {
                        Some(json!(mismatches))
                    },
                    check.verified(),
                );
            }
        }
    }
    Ok(())
}

fn binom(n: u64, k: u64) -> u64 {
    if k > n {
        return 0;
    }
    let mut value = 1u64;
    for j in 0..k {
        value = value * (n - j) / (j + 1);
    }
    value
}

/// Degree-n dimension of a hypersurface ring on six variables cut by one
/// cubic, the expected central-fiber total.
fn cubic_total(n: u64) -> u64 {
    binom(n + 5, 5) - binom(n + 2, 5)
}

pub fn cmd_example41(
    job: &JobSpec,
    report: &mut Report,
    budget: &Budget,
    golden: bool,
) -> Result<(), Failure> {
    let ring = job.ring()?;
    let ideal = job.ideal(&ring)?;
    let weight = job.weight(&ring)?;
    let initial = initial_ideal(&ideal, &weight, budget)?;
    let initial_gens = poly_strings(initial.gens());
    report.push(
        "initial_ideal",
        json!({ "weight": &job.weight }),
        "computed",
        json!({ "generators": initial_gens.clone() }),
        None,
        true,
    );
    if golden {
        let expected = vec!["x^3 + y^3 + y*z^2".to_string()];
        let matched = initial_gens == expected;
        report.push(
            "golden_initial",
            json!({}),
            if matched { "match" } else { "mismatch" },
            json!({ "expected": expected, "got": initial_gens }),
            None,
            matched,
        );
    }

    let window = job.window()?;
    let family = job.family(budget)?;
    let flat_bounds = vec![window.degree_bound.saturating_sub(2); family.rank()];
    let flat_window = ReesWindow::build(
        &family,
        window.degree_bound,
        IndexWindow::new(flat_bounds)?,
        budget,
    )?;
    let outcome = check_flatness(&flat_window.subspaces(), budget)?;
    flatness_line(report, &outcome, "family");

    let fiber_window = job.rees_window(budget)?;
    let fiber = central_fiber(&fiber_window, budget)?;
    fiber_lines(job, report, &fiber, budget)?;
    mult_line(job, report, budget)?;

    if golden {
        let totals = fiber.totals();
        let expected: Vec<usize> = (0..=window.degree_bound)
            .map(|n| cubic_total(n) as usize)
            .collect();
        let matched = totals == expected;
        report.push(
            "golden_totals",
            json!({ "N": window.degree_bound }),
            if matched { "match" } else { "mismatch" },
            json!({ "expected": expected, "got": totals }),
            None,
            matched,
        );

        let cone = weight_cone_sample(&fiber);
        let expected_rays = vec![vec![1, 0, 0], vec![1, 0, 1], vec![1, 1, 0]];
        let matched = cone.extreme_rays == expected_rays && cone.saturated;
        report.push(
            "golden_cone",
            json!({}),
            if matched { "match" } else { "mismatch" },
            json!({ "expected": expected_rays, "got": cone.extreme_rays }),
            None,
            matched,
        );
    }
    Ok(())
}
