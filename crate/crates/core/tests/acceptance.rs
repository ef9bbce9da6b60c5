//! End-to-end acceptance checks. Each criterion prints one PASS/FAIL line;
//! the process exits nonzero if any criterion fails.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use k3_curves::bn::{bn_general, BnRoute, RESIDUAL_TRIPLES};
use k3_curves::existence::{bn_curve_exists, ClauseReading};
use k3_curves::families::{
    derived_admissible, family, node_rows, registry, registry_issues, theorem_result,
};
use k3_curves::verify::{
    independent_bn, oracle_ell_threshold, prodell_table, run_suite, Suite, SweepOptions,
    ELL_THRESHOLDS, HODGE_LATTICES, HODGE_PAIRS,
};

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn residual_table() -> Outcome {
    let mut general = Vec::new();
    for (n, d, g) in RESIDUAL_TRIPLES {
        let closed = bn_general(n, d, g).map_err(|e| format!("({n},{d},{g}): {e}"))?;
        ensure(
            closed.route != BnRoute::Oracle,
            format!("({n},{d},{g}) was not decided by a closed form"),
        )?;
        let oracle = independent_bn(n, d, g)
            .map_err(|e| format!("({n},{d},{g}): {e}"))?
            .ok_or(format!("({n},{d},{g}): oracle inconclusive"))?;
        ensure(
            oracle == closed.bn_general,
            format!(
                "({n},{d},{g}): closed form {} vs oracle {oracle}",
                closed.bn_general
            ),
        )?;
        if closed.bn_general {
            general.push((n, d, g));
        }
    }
    ensure(
        general == [(8, 8, 2), (9, 9, 2)],
        format!("BN general at {general:?}"),
    )?;
    Ok("12 triples, BN general only at (8,8,2) and (9,9,2)".into())
}

fn ell_thresholds() -> Outcome {
    let mut got = Vec::new();
    for n in 2..=9 {
        got.push(
            oracle_ell_threshold(n)
                .map_err(|e| e.to_string())?
                .unwrap_or(-1),
        );
    }
    ensure(got == ELL_THRESHOLDS, format!("thresholds {got:?}"))?;
    Ok(format!("thresholds {got:?}"))
}

fn prodell_agreement() -> Outcome {
    let rows = prodell_table().map_err(|e| e.to_string())?;
    let bad: Vec<_> = rows.iter().filter(|(_, o, c)| *o as i64 != *c).collect();
    ensure(
        bad.is_empty(),
        format!("{} mismatches, first {:?}", bad.len(), bad.first()),
    )?;
    Ok(format!("{} (n, d, b) cases agree", rows.len()))
}

fn subset_property() -> Outcome {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(1)
        .build()
        .map_err(|e| e.to_string())?;
    let report = pool.install(|| run_suite(Suite::Subset, SweepOptions::default()));
    ensure(
        report.cardinality == 11 * 40 * 41,
        format!("{} points", report.cardinality),
    )?;
    let violations: Vec<_> = report
        .discrepancies
        .iter()
        .map(|d| d.point.as_str())
        .collect();
    ensure(
        violations.is_empty(),
        format!("violations at {}", violations.join(" ")),
    )?;
    Ok(format!("{} points, 0 violations", report.cardinality))
}

const NODE_TABLE: [&str; 16] = [
    "(5) ⊆ P^4 | (4,1) ⊆ P^4 | 16",
    "(5) ⊆ P^4 | (3,2) ⊆ P^4 | 36",
    "(4,2) ⊆ P^5 | (4,1,1) ⊆ P^5 | 4",
    "(4,2) ⊆ P^5 | (3,2,1) ⊆ P^5 | 18",
    "(4,2) ⊆ P^5 | (2,2,2) ⊆ P^5 | 32",
    "(3,3) ⊆ P^5 | (3,2,1) ⊆ P^5 | 12",
    "(3,3) ⊆ P^5 | (2,2,2) ⊆ P^5 | 32",
    "(3,2,2) ⊆ P^6 | (3,2,1,1) ⊆ P^6 | 6",
    "(3,2,2) ⊆ P^6 | (2,2,2,1) ⊆ P^6 | 16",
    "(2,2,2,2) ⊆ P^7 | (2,2,2,1,1) ⊆ P^7 | 8",
    "(3,1,1) ∩ G(2,V^5) ⊆ P^7 | (2,1,1,1) ∩ G(2,V^5) ⊆ P^6 | 20",
    "(2,2,1) ∩ G(2,V^5) ⊆ P^8 | (2,1,1,1) ∩ G(2,V^5) ⊆ P^6 | 10",
    "(2,1^6) ∩ Σ^10_12 ⊆ P^9 | (1^8) ∩ Σ^10_12 ⊆ P^7 | 12",
    "(2,1^4) ∩ G(V^6,2) ⊆ P^10 | (1^6) ∩ G(V^6,2) ⊆ P^8 | 14",
    "(2,1,1) ∩ Σ^6_16 ⊆ P^11 | (1^4) ∩ Σ^6_16 ⊆ P^9 | 16",
    "(2,1) ∩ Σ^5_18 ⊆ P^12 | (1^3) ∩ Σ^5_18 ⊆ P^10 | 18",
];

const GENUS_CAPS: [(char, i64); 11] = [
    ('a', 34),
    ('b', 30),
    ('c', 30),
    ('d', 14),
    ('e', 6),
    ('f', 18),
    ('g', 8),
    ('h', 10),
    ('i', 12),
    ('j', 14),
    ('k', 16),
];

fn registry_check() -> Outcome {
    ensure(registry().len() == 11, "registry does not hold 11 families")?;
    let issues = registry_issues();
    ensure(issues.is_empty(), format!("{issues:?}"))?;
    for (label, cap) in GENUS_CAPS {
        let f = family(label).map_err(|e| e.to_string())?;
        ensure(
            f.conditions.genus_cap() == cap && cap == f.max_nodes() - 2,
            format!(
                "({label}) cap {} vs m - 2 = {}",
                f.conditions.genus_cap(),
                f.max_nodes() - 2
            ),
        )?;
    }
    let rows = node_rows();
    ensure(rows == NODE_TABLE, format!("node table differs: {rows:#?}"))?;
    Ok("11 caps equal m - 2, 16 construction rows match".into())
}

fn consistency() -> Outcome {
    let corrected = run_suite(Suite::Consistency, SweepOptions::default());
    ensure(
        corrected.discrepancies.is_empty() && corrected.counts_consistent(),
        format!(
            "corrected reading: {} exceptions",
            corrected.discrepancies.len()
        ),
    )?;
    let literal = run_suite(
        Suite::Consistency,
        SweepOptions {
            reading: ClauseReading::Literal,
            ..Default::default()
        },
    );
    ensure(
        !literal.discrepancies.is_empty(),
        "literal reading reported nothing",
    )?;
    ensure(
        literal
            .discrepancies
            .iter()
            .all(|d| d.expected && d.point.starts_with("(9,")),
        format!(
            "literal reading strays outside genus 9: {:?}",
            literal.discrepancies
        ),
    )?;
    let points: Vec<_> = literal
        .discrepancies
        .iter()
        .map(|d| d.point.as_str())
        .collect();
    Ok(format!(
        "corrected clean, literal differs at {}",
        points.join(" ")
    ))
}

fn hodge() -> Outcome {
    let report = run_suite(Suite::Hodge, SweepOptions::default());
    ensure(
        report.cardinality == HODGE_LATTICES * HODGE_PAIRS,
        "wrong sample size",
    )?;
    ensure(
        report.passed(),
        format!("{} failures", report.discrepancies.len()),
    )?;
    Ok(format!("{} pairs", report.cardinality))
}

fn oracle_structure() -> Outcome {
    let report = run_suite(Suite::Stripping, SweepOptions::default());
    ensure(
        report.passed(),
        format!(
            "{} failures, first {:?}",
            report.unexpected(),
            report.discrepancies.first()
        ),
    )?;
    Ok(format!("{} checks", report.cardinality))
}

fn reduction_invariance() -> Outcome {
    let report = run_suite(Suite::Reductions, SweepOptions::default());
    ensure(
        report.passed(),
        format!(
            "{} failures, first {:?}",
            report.unexpected(),
            report.discrepancies.first()
        ),
    )?;
    Ok(format!("{} checks", report.cardinality))
}

fn spot_verdicts() -> Outcome {
    let lit = |l, d, g| {
        theorem_result(l, d, g)
            .map(|v| v.admissible)
            .map_err(|e| e.to_string())
    };
    let der = |l, d, g| {
        derived_admissible(l, d, g)
            .map(|v| v.admissible)
            .map_err(|e| e.to_string())
    };
    ensure(lit('a', 7, 4)? && der('a', 7, 4)?, "(a,7,4) should hold")?;
    ensure(!lit('a', 5, 3)?, "(a,5,3) should fail")?;
    ensure(lit('b', 3, 1)?, "(b,3,1) should hold")?;
    ensure(
        !lit('h', 13, 7)? && !der('h', 13, 7)?,
        "(h,13,7) should fail both ways",
    )?;
    ensure(lit('k', 19, 9)?, "(k,19,9) should hold")?;
    let v = bn_curve_exists(5, 12, 9, ClauseReading::Corrected).map_err(|e| e.to_string())?;
    ensure(
        v.exists && v.case_label == "bncurves.iii.b",
        format!("genus 5 (12,9): {} {}", v.exists, v.case_label),
    )?;
    Ok("6 spot verdicts".into())
}

type Criterion = (&'static str, fn() -> Outcome, u64);

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("residual table", residual_table, 10),
        ("elliptic thresholds", ell_thresholds, 10),
        ("product formula", prodell_agreement, 30),
        ("subset property", subset_property, 60),
        ("registry", registry_check, 10),
        ("consistency", consistency, 30),
        ("discriminant identity", hodge, 5),
        ("oracle structure", oracle_structure, 120),
        ("reduction invariance", reduction_invariance, 60),
        ("spot verdicts", spot_verdicts, 10),
    ];
    let mut failed = 0;
    for (i, (name, check, limit)) in criteria.into_iter().enumerate() {
        let start = Instant::now();
        let outcome = check();
        let elapsed = start.elapsed();
        let outcome = match outcome {
            Ok(msg) if elapsed > Duration::from_secs(limit) => {
                Err(format!("{msg}, but took {elapsed:.2?} (limit {limit}s)"))
            }
            other => other,
        };
        match outcome {
            Ok(msg) => println!("criterion {:>2} PASS {name}: {msg} ({elapsed:.2?})", i + 1),
            Err(msg) => {
                failed += 1;
                println!("criterion {:>2} FAIL {name}: {msg} ({elapsed:.2?})", i + 1);
            }
        }
    }
    println!("{} of 10 criteria passed", 10 - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
