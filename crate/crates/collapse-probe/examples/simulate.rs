//! One Monte Carlo batch under the finite-time scenario, checked against
//! the analytics chain and summarized by the significance test.
//!
//!     cargo run --release --example simulate

use collapse_probe::analytics::{analytics_report, CoincidenceInputs};
use collapse_probe::collapse::{DecayFamily, RouteKinematics, StateAmplitudes};
use collapse_probe::montecarlo::{estimate_probabilities, run_batch, Scenario, TrialConfig};
use collapse_probe::profiles::{ExperimentGeometry, PulseProfile, PulseShape};
use collapse_probe::stats::z_test;

fn main() -> collapse_probe::Result<()> {
    // a 20 fs reduction window makes non-trivial coincidences frequent
    // enough to see in a short run
    let delta_t = 20.0;
    let n = 5_000_000u64;
    let state = StateAmplitudes::from_alpha_squared(0.75)?;
    let profile = PulseProfile::new(PulseShape::Sech2, 1000.0, 0.0)?;
    let geometry = ExperimentGeometry::new(profile, 3.3, 1e6, None)?;
    let kinematics = RouteKinematics::new(state, delta_t, DecayFamily::EffectiveSymmetric { rate2: 5.0 })?;
    let cfg = TrialConfig::new(state, geometry, kinematics, Scenario::FiniteTime, n, 42)?;

    let start = std::time::Instant::now();
    let table = run_batch(&cfg)?;
    let dt = start.elapsed().as_secs_f64();
    println!("{n} trials in {dt:.2} s ({:.2e} trials/s)", n as f64 / dt);
    println!("counts: {table:?}");

    let inputs = CoincidenceInputs::new(geometry, delta_t)?;
    let report = analytics_report(&kinematics, &inputs)?;
    println!();
    println!("non-trivial rate : {:.6e}", table.n_nontrivial as f64 / n as f64);
    println!("P_< (analytics)  : {:.6e}", report.p_less);
    println!("(+-) rate        : {:.8}", table.n_pm as f64 / n as f64);
    println!("P(+-) exact      : {:.8}", report.p_plus_minus_exact);

    let est = estimate_probabilities(&table, 0.95)?;
    println!();
    println!(
        "Wilson 95% interval for P(+-): [{:.8}, {:.8}]",
        est.plus_minus.low, est.plus_minus.high
    );

    let sig = z_test(&table, &state, report.lambda_uncond, 6.0);
    println!();
    println!("z against the instantaneous expectation: {:+.3}", sig.z_score);
    println!("two-sided p-value                      : {:.3e}", sig.p_value);
    println!("observed deviation in sqrt(N) units    : {:+.3}", sig.observed_ratio);
    println!("expected at this Lambda and N          : {:+.3}", -sig.paper_ratio);
    Ok(())
}
