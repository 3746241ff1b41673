//! Acceptance suite: one test per criterion, each printing its pass/fail
//! line through the harness. Tolerances are pinned here, not configurable.
//!
//! Criteria 1 and 3 assert the published magnitude of the coincidence
//! probability and the quality of the small-parameter approximation. Both
//! fail, and are expected to fail, because the quoted "P_< ~ 1e-4" figure
//! comes from the approximate formula, which is not a correct limit of the
//! closed form: in the wide-window regime it overshoots the exact band
//! integral by a factor approaching 3/2 (the sech^2 autocorrelation is
//! flatter than sech^2). The closed form and the quadrature agree with
//! each other to full precision — that agreement, and every other
//! criterion, passes. See tests below for the measured numbers.

use collapse_probe::analytics::{
    analytics_report, p_less_approx, p_less_closed_form, p_less_quadrature, CoincidenceInputs,
};
use collapse_probe::collapse::{DecayFamily, RouteKinematics, StateAmplitudes};
use collapse_probe::montecarlo::{run_batch, run_batch_partitioned, Scenario, TrialConfig};
use collapse_probe::profiles::{ExperimentGeometry, PulseProfile, PulseShape};
use collapse_probe::stats::{self, required_trials, two_sample_proportion_z, z_test, LambdaSource};

fn sech_geometry(sigma: f64, delay: f64, window: f64) -> ExperimentGeometry {
    let p = PulseProfile::new(PulseShape::Sech2, sigma, 0.0).unwrap();
    ExperimentGeometry::new(p, delay, window, None).unwrap()
}

fn config(
    alpha2: f64,
    delta_t: f64,
    family: DecayFamily,
    scenario: Scenario,
    n: u64,
    seed: u64,
) -> TrialConfig {
    let state = StateAmplitudes::from_alpha_squared(alpha2).unwrap();
    let geometry = sech_geometry(1000.0, 3.3, 1e6);
    let kinematics = RouteKinematics::new(state, delta_t, family).unwrap();
    TrialConfig::new(state, geometry, kinematics, scenario, n, seed).unwrap()
}

fn effective(rate2: f64) -> DecayFamily {
    DecayFamily::EffectiveSymmetric { rate2 }
}

/// Criterion 1: at sigma_t = 1 ps, T = 3.3 fs, window 1 ns, delta_t =
/// 0.1 fs the closed form and the quadrature agree to < 1e-8 relative and
/// both lie in [0.8, 1.2] x 1e-4.
#[test]
fn c1_coincidence_probability_paper_scenario() {
    let start = std::time::Instant::now();
    let inputs = CoincidenceInputs::new(sech_geometry(1000.0, 3.3, 1e6), 0.1).unwrap();
    let quad = p_less_quadrature(&inputs).unwrap();
    let closed = p_less_closed_form(1000.0, 3.3, 1e6, 0.1);

    let rel = (closed - quad).abs() / quad;
    assert!(rel < 1e-8, "closed vs quadrature rel err {rel:e}");
    assert!(start.elapsed().as_secs_f64() < 1.0);

    for (name, v) in [("p_less_closed_form", closed), ("p_less_quadrature", quad)] {
        assert!(
            (0.8e-4..=1.2e-4).contains(&v),
            "{name} = {v:.6e} outside [0.8e-4, 1.2e-4]: the exact band integral is 2/3 of \
             the quoted 1e-4 figure, which stems from the approximate formula \
             (here {:.6e}); the two implementations agree with each other to {rel:.1e}",
            p_less_approx(1000.0, 3.3, 1e6, 0.1),
        );
    }
}

/// Criterion 2: closed form vs quadrature to < 1e-8 relative over a
/// 5^4 grid spanning three decades per parameter, including the
/// near-cancellation region T ~ delta_t.
#[test]
fn c2_closed_vs_quadrature_grid() {
    let start = std::time::Instant::now();
    let decades = |lo: f64, n: usize, span: f64| -> Vec<f64> {
        (0..n).map(|i| lo * 10f64.powf(span * i as f64 / (n - 1) as f64)).collect()
    };
    let sigmas = decades(100.0, 5, 3.0);
    let delays = decades(0.33, 5, 3.0);
    let windows = decades(1e4, 5, 3.0);
    let deltas = decades(0.01, 5, 3.0);

    let mut checked = 0usize;
    let mut worst = (0.0f64, String::new());
    for &s in &sigmas {
        for &t in &delays {
            for &w in &windows {
                for &d in &deltas {
                    let inputs = CoincidenceInputs::new(sech_geometry(s, t, w), d).unwrap();
                    let quad = p_less_quadrature(&inputs).unwrap();
                    let closed = p_less_closed_form(s, t, w, d);
                    let rel = (closed - quad).abs() / quad.abs().max(1e-300);
                    if rel > worst.0 {
                        worst = (rel, format!("sigma={s} T={t} W={w} d={d}"));
                    }
                    checked += 1;
                }
            }
        }
    }
    assert_eq!(checked, 625);
    assert!(worst.0 < 1e-8, "worst rel err {:e} at {}", worst.0, worst.1);

    // T = delta_t makes A_0 = 0 exactly; straddle it on both sides
    for sigma in [100.0, 1000.0, 10000.0] {
        for d in [0.1, 1.0] {
            for t in [d * (1.0 - 1e-9), d, d * (1.0 + 1e-9)] {
                let inputs = CoincidenceInputs::new(sech_geometry(sigma, t, 1e6), d).unwrap();
                let quad = p_less_quadrature(&inputs).unwrap();
                let closed = p_less_closed_form(sigma, t, 1e6, d);
                let rel = (closed - quad).abs() / quad;
                assert!(rel < 1e-8, "near-cancellation sigma={sigma} T={t} d={d}: rel {rel:e}");
            }
        }
    }
    assert!(start.elapsed().as_secs_f64() < 60.0);
}

/// Criterion 3: the approximation stays within 1% of the closed form
/// whenever delta_t, T < sigma_t/100 and window > 5 sigma_t.
#[test]
fn c3_approximation_regime() {
    let start = std::time::Instant::now();
    let sigma = 1000.0;
    let mut worst = (0.0f64, String::new());
    for t in [0.0, 0.33, 3.3, 9.9] {
        for d in [0.01, 0.1, 1.0, 9.9] {
            for w in [5.5 * sigma, 20.0 * sigma, 1000.0 * sigma] {
                let closed = p_less_closed_form(sigma, t, w, d);
                let approx = p_less_approx(sigma, t, w, d);
                let rel = (approx - closed).abs() / closed;
                if rel > worst.0 {
                    worst = (rel, format!("T={t} d={d} W={w}"));
                }
            }
        }
    }
    assert!(start.elapsed().as_secs_f64() < 10.0);
    assert!(
        worst.0 < 0.01,
        "approximation misses the closed form by {:.1}% at {} (bound 1%): in the wide-window \
         regime the approximate formula exceeds the exact band integral by a factor \
         approaching 3/2 everywhere in its own validity domain",
        100.0 * worst.0,
        worst.1
    );
}

/// Criterion 4: required_trials(K=6, alpha^2=3/4, Lambda=2e-4) is exactly
/// 9e8.
#[test]
fn c4_planner_reproduction() {
    assert_eq!(required_trials(6.0, 0.75, 2e-4), Some(900_000_000));
    // arithmetic identity behind it: 36 / (2e-4)^2
    let plan = stats::plan(
        &StateAmplitudes::from_alpha_squared(0.75).unwrap(),
        2e-4,
        LambdaSource::PaperLiteral,
        6.0,
    )
    .unwrap();
    assert_eq!(plan.required_n, 900_000_000);
}

/// Criterion 5: at N = 1e7 (defaults, finite-time, effective-symmetric)
/// the non-trivial rate matches P_< and the (+-) rate matches the exact
/// outcome probability within 4 binomial sigma; likewise for the Gaussian
/// profile.
#[test]
fn c5_monte_carlo_vs_analytics() {
    for shape in [PulseShape::Sech2, PulseShape::Gaussian] {
        let n = 10_000_000u64;
        let state = StateAmplitudes::from_alpha_squared(0.75).unwrap();
        let profile = PulseProfile::new(shape, 1000.0, 0.0).unwrap();
        let geometry = ExperimentGeometry::new(profile, 3.3, 1e6, None).unwrap();
        let kinematics = RouteKinematics::new(state, 0.1, effective(5.0)).unwrap();
        let cfg =
            TrialConfig::new(state, geometry, kinematics, Scenario::FiniteTime, n, 501).unwrap();

        let start = std::time::Instant::now();
        let table = run_batch(&cfg).unwrap();
        let elapsed = start.elapsed().as_secs_f64();
        assert!(elapsed <= 2.0, "batch took {elapsed:.2} s, contract is <= 2 s");

        let inputs = CoincidenceInputs::new(geometry, 0.1).unwrap();
        let p_less = p_less_quadrature(&inputs).unwrap();
        let p_pm = collapse_probe::analytics::p_plus_minus_exact(&kinematics, &inputs).unwrap();

        let nf = n as f64;
        let sd_nt = (p_less * (1.0 - p_less) / nf).sqrt();
        let got_nt = table.n_nontrivial as f64 / nf;
        assert!(
            (got_nt - p_less).abs() < 4.0 * sd_nt,
            "{shape:?}: nontrivial rate {got_nt:e} vs {p_less:e} (4sd = {:e})",
            4.0 * sd_nt
        );

        let sd_pm = (p_pm * (1.0 - p_pm) / nf).sqrt();
        let got_pm = table.n_pm as f64 / nf;
        assert!(
            (got_pm - p_pm).abs() < 4.0 * sd_pm,
            "{shape:?}: plus-minus rate {got_pm} vs {p_pm} (4sd = {:e})",
            4.0 * sd_pm
        );
    }
}

/// Criterion 6a: the balanced state is a null configuration: the expected
/// deviation vanishes identically and the z-scores stay small.
#[test]
fn c6a_null_balanced_state() {
    assert_eq!(stats::deviation_delta_n(0.5, 2e-4, 1_000_000_000), 0.0);

    let mut zs = Vec::new();
    for seed in 0..20u64 {
        let cfg = config(0.5, 0.1, effective(5.0), Scenario::FiniteTime, 10_000_000, 600 + seed);
        let table = run_batch(&cfg).unwrap();
        let r = z_test(&table, &cfg.state, 2e-4, 6.0);
        zs.push(r.z_score.abs());
    }
    zs.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let median = 0.5 * (zs[9] + zs[10]);
    assert!(median < 2.0, "median |z| = {median}");
}

/// Criterion 6b: the swap-covariant family is statistically
/// indistinguishable from instantaneous collapse: per-seed two-sample
/// proportion tests reject at most at the nominal 1% rate, and the pooled
/// test does not reject.
#[test]
fn c6b_null_covariant_family() {
    let start = std::time::Instant::now();
    let n = 1_000_000u64;
    let family = DecayFamily::SingleShapeCovariant { rate: 5.0 };
    let mut rejections = 0;
    let mut pooled_a = collapse_probe::montecarlo::CountTable::default();
    let mut pooled_b = collapse_probe::montecarlo::CountTable::default();
    for seed in 0..50u64 {
        let a = run_batch(&config(0.75, 20.0, family, Scenario::FiniteTime, n, 700 + seed)).unwrap();
        let b =
            run_batch(&config(0.75, 20.0, family, Scenario::Instantaneous, n, 10_700 + seed)).unwrap();
        if two_sample_proportion_z(&a, &b).abs() > 2.5758 {
            rejections += 1;
        }
        pooled_a = pooled_a.merge(a);
        pooled_b = pooled_b.merge(b);
    }
    // 50 tests at 1%: expect ~0.5 rejections; 3 is far outside chance
    assert!(rejections <= 3, "{rejections} rejections of 50 at the 1% level");
    let z = two_sample_proportion_z(&pooled_a, &pooled_b);
    assert!(z.abs() < 2.5758, "pooled two-sample z = {z}");
    assert!(start.elapsed().as_secs_f64() < 120.0);
}

/// Criterion 7: end-to-end power. With Lambda fixed by the analytics chain
/// and N = required_trials(6, alpha^2, Lambda), finite-time batches show a
/// median deviation of 4.5..8 fluctuation units in the sqrt(N) metric. The
/// published 6.0 ratio is reproduced only under lambda_source =
/// paper_literal, and the Lambda-normalization discrepancy is flagged in
/// the analytics report.
///
/// Run at delta_t = 20 fs, where the analytics Lambda makes the required
/// trial count tractable; the property under test does not depend on the
/// parameter point.
#[test]
fn c7_end_to_end_power() {
    let start = std::time::Instant::now();
    let delta_t = 20.0;
    let state = StateAmplitudes::from_alpha_squared(0.75).unwrap();
    let geometry = sech_geometry(1000.0, 3.3, 1e6);
    let kinematics = RouteKinematics::new(state, delta_t, effective(5.0)).unwrap();
    let inputs = CoincidenceInputs::new(geometry, delta_t).unwrap();
    let report = analytics_report(&kinematics, &inputs).unwrap();

    let lambda_eff = LambdaSource::Analytics.effective_lambda(&report);
    let n = required_trials(6.0, 0.75, lambda_eff).unwrap();
    assert!(n < 100_000_000, "required N = {n} not tractable");

    let mut ratios = Vec::new();
    for seed in 0..20u64 {
        let cfg = TrialConfig::new(state, geometry, kinematics, Scenario::FiniteTime, n, 800 + seed)
            .unwrap();
        let table = run_batch(&cfg).unwrap();
        let r = z_test(&table, &state, lambda_eff, 6.0);
        ratios.push(r.observed_ratio.abs());
    }
    ratios.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let median = 0.5 * (ratios[9] + ratios[10]);
    assert!(
        (4.5..=8.0).contains(&median),
        "median |observed ratio| = {median} outside [4.5, 8] at N = {n}"
    );

    // paper-literal reproduction: the expected ratio at N = 9e8 is 6.0
    let table = collapse_probe::montecarlo::CountTable {
        n_pm: 675_000_000,
        n_mp: 225_000_000,
        n_nontrivial: 0,
        n_route1: 0,
        n_route2: 0,
        n_total: 900_000_000,
    };
    let literal = z_test(&table, &state, collapse_probe::analytics::LAMBDA_LITERAL, 6.0);
    assert!((literal.paper_ratio - 6.0).abs() < 1e-9, "paper_ratio = {}", literal.paper_ratio);
    // under the analytics source the same configuration gives a different
    // ratio: the normalization discrepancy must be flagged in the report
    let default_inputs = CoincidenceInputs::new(geometry, 0.1).unwrap();
    let default_kin = RouteKinematics::new(state, 0.1, effective(5.0)).unwrap();
    let default_report = analytics_report(&default_kin, &default_inputs).unwrap();
    assert!(default_report.lambda_literal_exceeds_bound);
    assert!(default_report.lambda_literal > 0.75 * default_report.p_less);

    assert!(start.elapsed().as_secs_f64() < 1800.0);
}

/// Criterion 8: identical count tables across 1/8/64 partitions and
/// across consecutive runs.
#[test]
fn c8_determinism_and_partition_invariance() {
    let start = std::time::Instant::now();
    let cfg = config(0.75, 20.0, effective(5.0), Scenario::FiniteTime, 2_000_000, 901);
    let p1 = run_batch_partitioned(&cfg, 1).unwrap();
    let p8 = run_batch_partitioned(&cfg, 8).unwrap();
    let p64 = run_batch_partitioned(&cfg, 64).unwrap();
    assert_eq!(p1, p8);
    assert_eq!(p1, p64);
    let again = run_batch_partitioned(&cfg, 1).unwrap();
    assert_eq!(p1, again);
    assert!(start.elapsed().as_secs_f64() < 60.0);
}

/// Criterion 9: under the instantaneous scenario the z-test rejects at the
/// nominal 5% level between 3% and 7% of the time (400 seeds, N = 1e6).
#[test]
fn c9_calibration_under_null() {
    let start = std::time::Instant::now();
    let seeds = 400u64;
    let mut rejections = 0u32;
    for seed in 0..seeds {
        let cfg = config(0.75, 0.1, effective(5.0), Scenario::Instantaneous, 1_000_000, 9_000 + seed);
        let table = run_batch(&cfg).unwrap();
        let r = z_test(&table, &cfg.state, 2e-4, 6.0);
        if r.p_value < 0.05 {
            rejections += 1;
        }
    }
    let rate = rejections as f64 / seeds as f64;
    assert!((0.03..=0.07).contains(&rate), "rejection rate {rate} outside [0.03, 0.07]");
    assert!(start.elapsed().as_secs_f64() < 120.0);
}
