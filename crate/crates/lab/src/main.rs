use std::process::ExitCode;

use clap::Parser;

use cdlab::config::{Cli, UsageError};
use cdlab::output::write_results;
use cdlab::suite::run_suite;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let cfg = match cli.flags.resolve() {
        Ok(c) => c,
        Err(e) => {
            eprintln!("usage error: {e}");
            return ExitCode::from(2);
        }
    };
    let report = match run_suite(cli.command, &cfg, |a| println!("{}", a.line())) {
        Ok(r) => r,
        Err(e) => {
            if let Some(u) = e.downcast_ref::<UsageError>() {
                eprintln!("usage error: {u}");
                return ExitCode::from(2);
            }
            eprintln!("error: {e:#}");
            return ExitCode::from(3);
        }
    };
    if let Some(dir) = &cfg.out {
        if let Err(e) = write_results(&report, cfg.format, dir) {
            eprintln!("error: cannot write results to {}: {e}", dir.display());
            return ExitCode::from(3);
        }
    }
    let failed = report.assertions.iter().filter(|a| !a.passed).count();
    println!("{} of {} checks passed in {:.1} s", report.assertions.len() - failed, report.assertions.len(), report.wall_clock_seconds);
    if failed == 0 { ExitCode::SUCCESS } else { ExitCode::from(1) }
}
