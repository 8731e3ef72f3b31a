//! Full-scale acceptance gate: runs every verification check at its pinned
//! sample counts and prints one pass/fail line per criterion. The two
//! long-running checks also enforce wall-clock ceilings here (the reports
//! themselves carry no timing, so reruns stay bit-reproducible).

use std::time::Instant;

use secrecy_regions::algebra::equiv::Verdict;
use secrecy_regions::suite::{run_check, SuiteOptions, CHECK_NAMES};

/// Wall-clock ceilings in seconds, by check name.
fn ceiling(name: &str) -> Option<f64> {
    match name {
        "derivation-equivalences" => Some(600.0),
        "finite-length-trend" => Some(900.0),
        _ => None,
    }
}

#[test]
fn acceptance_battery() {
    let opts = SuiteOptions::default();
    let mut failures = Vec::new();

    for (i, name) in CHECK_NAMES.iter().enumerate() {
        let start = Instant::now();
        let report = run_check(name, &opts).expect("known check name");
        let elapsed = start.elapsed().as_secs_f64();

        let mut ok = report.verdict == Verdict::Pass;
        let mut note = String::new();
        if let Some(limit) = ceiling(name) {
            if elapsed > limit {
                ok = false;
                note = format!(" [over {limit}s ceiling]");
            }
        }
        println!(
            "criterion {}: {} — {} in {:.1}s{}",
            i + 1,
            name,
            if ok { "PASS" } else { "FAIL" },
            elapsed,
            note,
        );
        if !ok {
            failures.push(format!("criterion {} ({name}): {:#}", i + 1, report.detail));
        }
    }

    assert!(failures.is_empty(), "failed criteria:\n{}", failures.join("\n"));
}
