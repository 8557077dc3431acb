//! Runs every check bundle and prints one line per check.

use paucity::harness::suite::SUITES;
use paucity::harness::run_suite;

fn main() {
    for name in SUITES {
        let summary = run_suite(name, 0).unwrap();
        for c in &summary.checks {
            println!("{name}: {} {} ({} cases)", if c.passed { "ok" } else { "FAILED" }, c.name, c.cases);
        }
    }
}
