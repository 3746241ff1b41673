//! Run the cross-oracle verification suite on the reference configuration
//! and print one line per check.
//!
//!     cargo run --release --example verify

use collapse_probe::cli::{cmd_verify, VerifyTolerances};
use collapse_probe::config::RunConfig;

fn main() -> collapse_probe::Result<()> {
    let mut cfg = RunConfig::default();
    cfg.n_trials = 1_000_000; // enough for tight Monte Carlo bounds
    let outcome = cmd_verify(&cfg, &VerifyTolerances::default())?;
    print!("{}", outcome.render_text());
    std::process::exit(if outcome.passed { 0 } else { 1 });
}
