//! Runs the ten acceptance criteria and prints one line per criterion.
//!
//! Two criteria are known not to hold: the triangle inequality for the
//! tangency parameter (it is not a pseudo-metric; see the counterexample in
//! `tests/curves.rs`) and the quasi-product exponent for generic
//! `(alpha, zeta)`, where the bound is an upper bound with slack growing like
//! a power of `delta`. They run and report FAIL, but do not fail the build.

//! Built without the test harness so the report is never captured.

use cinematic::validation;

const SEED: u64 = 2;
const KNOWN_UNATTAINABLE: [usize; 2] = [1, 5];

fn main() {
    let reports = validation::run_all(SEED);
    let mut unexpected = Vec::new();
    for r in &reports {
        let known = KNOWN_UNATTAINABLE.contains(&r.id);
        let note = if !r.passed && known { "  (known unattainable)" } else { "" };
        println!("{r}{note}");
        if !r.passed && !known {
            unexpected.push(r.id);
        }
    }
    let passed = reports.iter().filter(|r| r.passed).count();
    println!("{passed}/{} criteria passed", reports.len());
    if !unexpected.is_empty() {
        eprintln!("criteria failed: {unexpected:?}");
        std::process::exit(1);
    }
}
