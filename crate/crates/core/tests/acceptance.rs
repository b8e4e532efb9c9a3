//! Runs every acceptance criterion and prints one PASS/FAIL line for each.
//!
//! Set `CLIPTREE_QUICK=1` for reduced sample counts.

use std::process::ExitCode;

use cliptree_core::verify::{run_all, VerifyOptions};

fn main() -> ExitCode {
    let options = VerifyOptions {
        quick: std::env::var_os("CLIPTREE_QUICK").is_some_and(|v| v != "0"),
        ..VerifyOptions::default()
    };
    let results = run_all(&options, |r| println!("{r}"));
    let failed = results.iter().filter(|r| !r.passed).count();
    println!("acceptance: {} passed, {failed} failed", results.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
