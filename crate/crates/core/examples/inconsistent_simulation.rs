//! Boosting three samples where two share a feature but not a label.

use parse_ensemble::ensemble::{diagnose_weights, simulate, simulation_csv, simulation_ledger};

fn main() -> parse_ensemble::Result<()> {
    let rows = simulate(6);
    print!("{}", simulation_csv(&rows));
    // Weight piles onto the two conflicting samples.
    let d = diagnose_weights(&simulation_ledger(&simulate(30)), 3, 2)?;
    print!("{}", d.heaviest_csv(None));
    Ok(())
}
