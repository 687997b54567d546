//! Runs every acceptance criterion at full ensemble size, one line per criterion.
//!
//! `PARITY_ACCEPTANCE_FAST=1` switches to the small ensembles with widened statistical margins.

use std::process::ExitCode;

use parity_experiments::acceptance::{Settings, Suite};

fn main() -> ExitCode {
    let fast = std::env::var("PARITY_ACCEPTANCE_FAST").is_ok_and(|v| v == "1");
    let settings = if fast { Settings::fast() } else { Settings::full() };
    println!("acceptance: {} trajectories per ensemble", settings.n);
    let suite = Suite::new(settings);
    let mut failed = 0;
    for id in 1..=10 {
        let r = suite.run(id);
        println!("{r}");
        if !r.passed {
            failed += 1;
        }
    }
    println!("acceptance: {} passed, {failed} failed", 10 - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
