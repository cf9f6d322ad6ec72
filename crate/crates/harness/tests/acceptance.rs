//! All twelve acceptance criteria at default size, seed 0. Prints one
//! PASS/FAIL line per criterion and exits non-zero if any fails.

use std::process::ExitCode;

use nsk_harness::checks::{Criterion, Size};

fn main() -> ExitCode {
    let mut failed = 0;
    for c in Criterion::ALL {
        let line = match c.run(Size::Default, 0) {
            Ok(o) => {
                failed += usize::from(!o.passed);
                format!("{} ({:.1} s)", o.line(), o.seconds)
            }
            Err(e) => {
                failed += 1;
                format!("FAIL c{:02} {}: error: {e:#}", c.number(), c.title())
            }
        };
        println!("{line}");
    }
    println!("acceptance: {} of {} criteria passed", Criterion::ALL.len() - failed, Criterion::ALL.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
