//! Acceptance criteria 1-11 at full scale, one pass/fail line each.

use std::time::Instant;

use cuspflow::parallel::worker_count;
use cuspflow::verify::{run_check, Scale, CHECKS};

#[test]
fn acceptance() {
    let workers = worker_count(0);
    let mut failed = Vec::new();
    for id in 1..=CHECKS.len() {
        let t0 = Instant::now();
        let r = run_check(id, Scale::Full, workers, 20_240_601);
        let verdict = if r.passed { "PASS" } else { "FAIL" };
        println!("criterion {:>2} {verdict} [{:.1}s] {}: {}", r.id, t0.elapsed().as_secs_f64(), r.name, r.detail);
        if !r.passed {
            failed.push(id);
        }
    }
    assert!(failed.is_empty(), "failing criteria: {failed:?}");
}
