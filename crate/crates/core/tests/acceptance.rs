//! The ten acceptance criteria, one line each. Exits nonzero if any check
//! fails or overruns its time budget.

use gasket_solenoid::verify::{criterion, TOLERANCES};

fn main() {
    for (name, value) in TOLERANCES {
        println!("tolerance {name} = {value:e}");
    }
    let mut failed = Vec::new();
    for id in 1..=10 {
        let report = criterion(id).expect("criterion id in range");
        println!("{}", report.line());
        if !report.ok() {
            failed.push(report.id.clone());
        }
    }
    if failed.is_empty() {
        println!("acceptance: 10/10 criteria passed");
    } else {
        println!("acceptance: failed criteria {}", failed.join(", "));
        std::process::exit(1);
    }
}
