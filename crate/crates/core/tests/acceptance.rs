//! One PASS/FAIL line per acceptance criterion; nonzero exit on any failure.

use std::process::ExitCode;

use holocenter_core::acceptance;

fn main() -> ExitCode {
    let outcomes = acceptance::run_all();
    for o in &outcomes {
        println!("{}", o.line());
    }
    let failed: Vec<u32> = outcomes.iter().filter(|o| !o.passed).map(|o| o.id).collect();
    println!("acceptance: {} of {} criteria passed", outcomes.len() - failed.len(), outcomes.len());
    if failed.is_empty() && outcomes.len() == 8 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
