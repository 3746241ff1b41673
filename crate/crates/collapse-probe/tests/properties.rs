//! Property tests: inverse-function contracts, merge algebra, and config
//! echo fidelity.

use collapse_probe::config::{parse_config, FamilyKind, OutputFormat, RunConfig};
use collapse_probe::montecarlo::{CountTable, Scenario};
use collapse_probe::profiles::{PulseProfile, PulseShape};
use collapse_probe::stats::LambdaSource;
use proptest::prelude::*;

fn shape_strategy() -> impl Strategy<Value = PulseShape> {
    prop_oneof![Just(PulseShape::Sech2), Just(PulseShape::Gaussian)]
}

proptest! {
    // quantile inverts the CDF in probability space across shapes, widths,
    // and centers
    #[test]
    fn quantile_cdf_contract(
        shape in shape_strategy(),
        sigma in 1e-3f64..1e6,
        center in -1e6f64..1e6,
        u in 1e-9f64..=0.999_999_999,
    ) {
        let p = PulseProfile::new(shape, sigma, center).unwrap();
        let x = p.quantile(u).unwrap();
        let back = p.cdf(x);
        prop_assert!((back - u).abs() <= 1e-11 * u, "u={u} back={back}");
    }

    #[test]
    fn count_table_merge_is_abelian(
        a in any::<[u32; 5]>(),
        b in any::<[u32; 5]>(),
        c in any::<[u32; 5]>(),
    ) {
        let mk = |v: [u32; 5]| CountTable {
            n_pm: v[0] as u64,
            n_mp: v[1] as u64,
            n_nontrivial: v[2] as u64,
            n_route1: v[3] as u64,
            n_route2: v[4] as u64,
            n_total: v[0] as u64 + v[1] as u64,
        };
        let (a, b, c) = (mk(a), mk(b), mk(c));
        prop_assert_eq!(a.merge(b), b.merge(a));
        prop_assert_eq!(a.merge(b).merge(c), a.merge(b.merge(c)));
    }
}

fn config_strategy() -> impl Strategy<Value = RunConfig> {
    (
        (
            0.01f64..0.99,                       // alpha2
            shape_strategy(),                    // profile
            1.0f64..1e5,                         // sigma_t
            0.0f64..100.0,                       // delay_t
            0.1f64..100.0,                       // lambda1
            0.1f64..100.0,                       // lambda2
            1u64..1_000_000_000,                 // n_trials
            any::<u64>(),                        // seed
        ),
        (
            0u64..256,                           // partitions
            prop_oneof![Just(Scenario::Instantaneous), Just(Scenario::FiniteTime)],
            prop_oneof![
                Just(FamilyKind::TwoShapeExponential),
                Just(FamilyKind::TwoShapeLinear),
                Just(FamilyKind::SingleShapeCovariant),
                Just(FamilyKind::EffectiveSymmetric),
            ],
            prop_oneof![Just(LambdaSource::Analytics), Just(LambdaSource::PaperLiteral)],
            0.5f64..0.999,                       // confidence_level
            0.5f64..12.0,                        // k_sigma
            prop_oneof![Just(OutputFormat::Csv), Just(OutputFormat::Json)],
            "[a-z0-9_./-]{0,16}",                // output_path (no '#', no spaces)
        ),
    )
        .prop_map(
            |(
                (alpha2, profile, sigma_t, delay_t, lambda1, lambda2, n_trials, seed),
                (partitions, scenario, family, lambda_source, confidence_level, k_sigma, output_format, output_path),
            )| {
                // window wide enough to hold the pulses and any delta_t below
                let window_dt = 2e4 * sigma_t.max(1.0);
                RunConfig {
                    alpha2,
                    profile,
                    sigma_t,
                    delay_t,
                    window_dt,
                    window_origin: 0.5 * delay_t - 0.5 * window_dt,
                    delta_t: sigma_t * 1e-3,
                    scenario,
                    family,
                    lambda1,
                    lambda2,
                    n_trials,
                    seed,
                    partitions,
                    lambda_source,
                    confidence_level,
                    k_sigma,
                    output_path,
                    output_format,
                }
            },
        )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]
    // parse(emit(config)) reproduces the configuration exactly
    #[test]
    fn config_echo_fidelity(cfg in config_strategy()) {
        let text = cfg.emit();
        let back = parse_config(&text).unwrap();
        prop_assert_eq!(back, cfg);
    }
}
