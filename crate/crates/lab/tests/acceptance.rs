//! Every criterion at its stated tolerance with the default configuration.
//! Prints one line per criterion and fails if any does.

use std::process::ExitCode;
use std::time::Instant;

use cdlab::suite::run_criteria;
use cdlab::ExperimentConfig;

fn main() -> ExitCode {
    let cfg = ExperimentConfig::default();
    let ids: Vec<u32> = (1..=14).collect();
    let start = Instant::now();
    let mut clock = Instant::now();
    let result = run_criteria(&ids, &cfg, |a| {
        println!("{}  [{:.1} s]", a.line(), clock.elapsed().as_secs_f64());
        clock = Instant::now();
    });
    match result {
        Ok((assertions, _)) => {
            let failed = assertions.iter().filter(|a| !a.passed).count();
            println!(
                "acceptance: {} passed, {failed} failed, {:.1} s",
                assertions.len() - failed,
                start.elapsed().as_secs_f64()
            );
            if failed == 0 { ExitCode::SUCCESS } else { ExitCode::FAILURE }
        }
        Err(e) => {
            println!("acceptance: aborted: {e:#}");
            ExitCode::FAILURE
        }
    }
}
