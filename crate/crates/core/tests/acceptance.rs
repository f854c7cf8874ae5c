//! One pass/fail line per acceptance criterion, each at exact equality.

use std::collections::BTreeMap;
use std::time::Instant;

use wgg_core::verify::{self, Limits, SuiteReport, DEFAULT_SEED};

const CRITERIA: [&str; 9] = [
    "worked example polynomial",
    "subset expansion equals deletion-contraction",
    "forest expansion equals Q(u, y-1, 0)",
    "coloring counts agree four ways",
    "improper set exactly B",
    "arrangement counts equal enumeration",
    "piecewise polynomial above threshold",
    "structural suites",
    "Tutte axioms for the gain-free polynomial",
];

fn line(report: &SuiteReport) -> String {
    let mut s = format!(
        "    {}: {}/{} passed (needs >= {})",
        report.name, report.passed, report.cases, report.required
    );
    if let Some(f) = &report.first_failure {
        s.push_str(&format!("; first failure: {f}"));
    }
    for note in &report.notes {
        s.push_str(&format!("\n      note: {note}"));
    }
    s
}

#[test]
fn acceptance() {
    let limits = Limits::default();
    let started = Instant::now();
    let mut by_criterion: BTreeMap<u8, Vec<(SuiteReport, f64)>> = BTreeMap::new();
    let mut timed = |reports: Vec<SuiteReport>, t: Instant| {
        let secs = t.elapsed().as_secs_f64();
        for r in reports {
            by_criterion.entry(r.criterion).or_default().push((r, secs));
        }
    };
    let t = Instant::now();
    timed(vec![verify::suite_worked_example()], t);
    let t = Instant::now();
    timed(vec![verify::suite_expansions(DEFAULT_SEED, limits)], t);
    let t = Instant::now();
    timed(vec![verify::suite_forest_expansion(DEFAULT_SEED, limits)], t);
    let t = Instant::now();
    timed(vec![verify::suite_coloring(DEFAULT_SEED, limits)], t);
    let t = Instant::now();
    timed(vec![verify::suite_improper_exactly(DEFAULT_SEED, limits)], t);
    let t = Instant::now();
    timed(vec![verify::suite_geometry(DEFAULT_SEED, limits)], t);
    let t = Instant::now();
    timed(verify::suite_piecewise(DEFAULT_SEED, limits), t);
    let t = Instant::now();
    timed(verify::suite_structure(DEFAULT_SEED, limits), t);
    let t = Instant::now();
    timed(vec![verify::suite_tutte_axioms(DEFAULT_SEED, limits)], t);

    let mut all_ok = true;
    for (k, title) in CRITERIA.iter().enumerate() {
        let criterion = k as u8 + 1;
        let reports = by_criterion.get(&criterion).map(Vec::as_slice).unwrap_or(&[]);
        let ok = !reports.is_empty() && reports.iter().all(|(r, _)| r.ok());
        let secs = reports.first().map_or(0.0, |(_, s)| *s);
        println!("criterion {criterion} {}: {title} ({secs:.2} s)", if ok { "PASS" } else { "FAIL" });
        for (r, _) in reports {
            println!("{}", line(r));
        }
        all_ok &= ok;
    }
    println!("total {:.2} s, seed {DEFAULT_SEED}", started.elapsed().as_secs_f64());
    assert!(all_ok, "at least one acceptance criterion failed");
}
