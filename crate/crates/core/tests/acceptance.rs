//! Acceptance criteria 1 to 8: one PASS/FAIL line each, exit status 1 if any fails.
//!
//! `cargo test --test acceptance -- 3 8` runs only the listed criteria.

use std::process::ExitCode;

use o2hopf_core::verify;

fn main() -> ExitCode {
    let picked: Vec<u8> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let ids: Vec<u8> = verify::ALL.iter().copied().filter(|i| picked.is_empty() || picked.contains(i)).collect();
    let mut failed = Vec::new();
    for id in ids {
        let r = verify::run_criterion(id).expect("known criterion");
        println!("{}", r.summary_line());
        for c in &r.checks {
            println!("       {} {}: {}", if c.passed { "ok  " } else { "FAIL" }, c.label, c.detail);
        }
        if !r.passed {
            failed.push(id);
        }
    }
    if failed.is_empty() {
        println!("acceptance: all criteria passed");
        ExitCode::SUCCESS
    } else {
        println!("acceptance: failed criteria {failed:?}");
        ExitCode::FAILURE
    }
}
