//! Sweep the state balance alpha^2 and print the sweep table as CSV.
//! Shows the planner's required trial count diverging at the maximally
//! entangled point and falling as the state gets more unbalanced.
//!
//!     cargo run --release --example sweep_alpha

use collapse_probe::montecarlo::TrialConfig;
use collapse_probe::report::sweep_csv;
use collapse_probe::stats::{significance_sweep, LambdaSource, SweepAxis};

fn main() -> collapse_probe::Result<()> {
    let mut base = TrialConfig::default();
    base.n_trials = 1_000_000_000; // planned trial count entering delta_n

    let grid = [0.5, 0.55, 0.6, 0.65, 0.7, 0.75, 0.8, 0.85, 0.9];
    let result = significance_sweep(
        &base,
        LambdaSource::Analytics,
        6.0,
        SweepAxis::Alpha2,
        &grid,
        false,
    )?;

    print!("{}", sweep_csv(&result));
    eprintln!();
    for d in &result.diagnostics {
        eprintln!("diagnostic: {d}");
    }
    Ok(())
}
