//! Monte Carlo trial engine.
//!
//! One trial: draw both hit times from the window-truncated profiles, form
//! the difference y, and decide the outcome. If the collapse is treated as
//! instantaneous, or the second hit arrives after the reduction window has
//! closed, the outcome is plain Born statistics. Otherwise the second hit
//! interrupts the reduction: a single uniform decides route and outcome
//! jointly against the route-resolved amplitude probabilities, so a trial
//! never costs more than three uniform draws and two quantile evaluations.
//!
//! Trials are keyed by `(seed, trial index)`: a batch is bit-reproducible
//! for a given configuration no matter how many partitions execute it.

use crate::collapse::{Route, RouteKinematics, StateAmplitudes};
use crate::error::{Error, Result};
use crate::profiles::{ExperimentGeometry, TruncatedSampler};
use crate::rng::SimRng;
use rayon::prelude::*;
use statrs::distribution::{ContinuousCDF, Normal};

/// Which collapse hypothesis drives the outcome law.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scenario {
    Instantaneous,
    FiniteTime,
}

/// Polarization outcome of one coincidence pair.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Outcome {
    PlusMinus,
    MinusPlus,
}

/// Full simulation configuration for one batch.
#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct TrialConfig {
    pub state: StateAmplitudes,
    pub geometry: ExperimentGeometry,
    pub kinematics: RouteKinematics,
    pub scenario: Scenario,
    pub n_trials: u64,
    pub seed: u64,
}

impl TrialConfig {
    pub fn new(
        state: StateAmplitudes,
        geometry: ExperimentGeometry,
        kinematics: RouteKinematics,
        scenario: Scenario,
        n_trials: u64,
        seed: u64,
    ) -> Result<Self> {
        if n_trials < 1 {
            return Err(Error::Config("n_trials must be at least 1".into()));
        }
        if kinematics.state() != &state {
            return Err(Error::Config(
                "kinematics were built for a different state".into(),
            ));
        }
        if kinematics.delta_t() >= geometry.window_dt {
            return Err(Error::Config(format!(
                "delta_t = {} must be smaller than the window {}",
                kinematics.delta_t(),
                geometry.window_dt
            )));
        }
        Ok(TrialConfig { state, geometry, kinematics, scenario, n_trials, seed })
    }
}

/// Record of a single trial.
#[derive(Clone, Copy, Debug)]
pub struct TrialOutcome {
    pub outcome: Outcome,
    /// Hit-time difference t_L - t_R; its sign records which detector fired
    /// first (the outcome law does not depend on it: the filters are
    /// parallel).
    pub y: f64,
    /// Set when the second hit interrupted an ongoing reduction.
    pub nontrivial: bool,
    /// Route taken, recorded for non-trivial trials.
    pub route: Option<Route>,
}

/// Mergeable tallies of one batch. Merging is field-wise addition.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct CountTable {
    pub n_pm: u64,
    pub n_mp: u64,
    pub n_nontrivial: u64,
    pub n_route1: u64,
    pub n_route2: u64,
    pub n_total: u64,
}

impl CountTable {
    pub fn record(&mut self, trial: &TrialOutcome) {
        self.n_total += 1;
        match trial.outcome {
            Outcome::PlusMinus => self.n_pm += 1,
            Outcome::MinusPlus => self.n_mp += 1,
        }
        if trial.nontrivial {
            self.n_nontrivial += 1;
            match trial.route {
                Some(Route::One) => self.n_route1 += 1,
                Some(Route::Two) => self.n_route2 += 1,
                None => {}
            }
        }
    }

    pub fn merge(self, other: CountTable) -> CountTable {
        CountTable {
            n_pm: self.n_pm + other.n_pm,
            n_mp: self.n_mp + other.n_mp,
            n_nontrivial: self.n_nontrivial + other.n_nontrivial,
            n_route1: self.n_route1 + other.n_route1,
            n_route2: self.n_route2 + other.n_route2,
            n_total: self.n_total + other.n_total,
        }
    }
}

/// Precomputed per-batch state: everything a trial needs, resolved once.
struct TrialEngine {
    left: TruncatedSampler,
    right: TruncatedSampler,
    kinematics: RouteKinematics,
    alpha_sq: f64,
    beta_sq: f64,
    delta_t: f64,
    inv_delta_t: f64,
    instantaneous: bool,
}

impl TrialEngine {
    fn new(config: &TrialConfig) -> Result<Self> {
        let delta_t = config.kinematics.delta_t();
        Ok(TrialEngine {
            left: config.geometry.left_sampler()?,
            right: config.geometry.right_sampler()?,
            kinematics: config.kinematics,
            alpha_sq: config.state.alpha_sq(),
            beta_sq: config.state.beta_sq(),
            delta_t,
            inv_delta_t: if delta_t > 0.0 { 1.0 / delta_t } else { 0.0 },
            instantaneous: config.scenario == Scenario::Instantaneous,
        })
    }

    #[inline]
    fn run(&self, rng: &mut SimRng) -> TrialOutcome {
        let t_l = self.left.sample(rng);
        let t_r = self.right.sample(rng);
        let y = t_l - t_r;
        let tau = y.abs();
        let u = rng.next_f64();

        if self.instantaneous || tau >= self.delta_t {
            let outcome = if u < self.alpha_sq { Outcome::PlusMinus } else { Outcome::MinusPlus };
            return TrialOutcome { outcome, y, nontrivial: false, route: None };
        }

        // one uniform decides route and outcome jointly: conditioned on the
        // route, the rescaled remainder of u is again uniform
        let x = tau * self.inv_delta_t;
        if u < self.alpha_sq {
            let a1_sq = self.kinematics.survivor_sq_at_fraction(Route::One, x);
            let outcome =
                if u < self.alpha_sq * a1_sq { Outcome::PlusMinus } else { Outcome::MinusPlus };
            TrialOutcome { outcome, y, nontrivial: true, route: Some(Route::One) }
        } else {
            let d2 = self.kinematics.doomed_at_fraction(Route::Two, x);
            let outcome = if u - self.alpha_sq < self.beta_sq * (d2 * d2) {
                Outcome::PlusMinus
            } else {
                Outcome::MinusPlus
            };
            TrialOutcome { outcome, y, nontrivial: true, route: Some(Route::Two) }
        }
    }
}

/// Run one trial on an explicit stream. The batch runner keys a fresh
/// stream per trial index; use that for reproducible bulk runs.
pub fn run_trial(config: &TrialConfig, rng: &mut SimRng) -> Result<TrialOutcome> {
    Ok(TrialEngine::new(config)?.run(rng))
}

fn run_range(engine: &TrialEngine, seed: u64, range: std::ops::Range<u64>) -> CountTable {
    let mut table = CountTable::default();
    for i in range {
        let mut rng = SimRng::for_stream(seed, i);
        table.record(&engine.run(&mut rng));
    }
    table
}

/// Execute the batch with automatic partitioning. The result is a pure
/// function of `(config, seed)`.
pub fn run_batch(config: &TrialConfig) -> Result<CountTable> {
    run_batch_partitioned(config, 0)
}

/// Execute the batch split into `partitions` contiguous ranges
/// (0 = choose automatically). Partitioning cannot change the result:
/// every trial owns a stream keyed by its index.
pub fn run_batch_partitioned(config: &TrialConfig, partitions: u64) -> Result<CountTable> {
    let engine = TrialEngine::new(config)?;
    let n = config.n_trials;
    let parts = if partitions == 0 {
        // blocks sized for parallel efficiency without per-block overhead
        (n / (1 << 16)).clamp(1, 4096)
    } else {
        partitions.min(n)
    };
    let chunk = n.div_ceil(parts);
    let ranges: Vec<std::ops::Range<u64>> =
        (0..parts).map(|k| (k * chunk).min(n)..((k + 1) * chunk).min(n)).collect();

    let table = ranges
        .into_par_iter()
        .map(|r| run_range(&engine, config.seed, r))
        .reduce(CountTable::default, CountTable::merge);

    debug_assert_eq!(table.n_total, n);
    check_invariants(&table)?;
    Ok(table)
}

fn check_invariants(table: &CountTable) -> Result<()> {
    if table.n_pm + table.n_mp != table.n_total
        || table.n_route1 + table.n_route2 != table.n_nontrivial
    {
        return Err(Error::Numerical("count table invariants violated".into()));
    }
    Ok(())
}

/// Point estimate with a Wilson score interval.
#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct WilsonInterval {
    pub estimate: f64,
    pub low: f64,
    pub high: f64,
}

fn wilson(successes: u64, n: u64, z: f64) -> WilsonInterval {
    let nf = n as f64;
    let p = successes as f64 / nf;
    let z2 = z * z;
    let denom = 1.0 + z2 / nf;
    let center = (p + z2 / (2.0 * nf)) / denom;
    let half = z * (p * (1.0 - p) / nf + z2 / (4.0 * nf * nf)).sqrt() / denom;
    WilsonInterval { estimate: p, low: (center - half).max(0.0), high: (center + half).min(1.0) }
}

/// Estimated outcome and non-trivial rates for a batch.
#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct Estimates {
    pub confidence_level: f64,
    pub plus_minus: WilsonInterval,
    pub nontrivial: WilsonInterval,
}

/// Wilson-score intervals at the given confidence level.
pub fn estimate_probabilities(table: &CountTable, confidence_level: f64) -> Result<Estimates> {
    if table.n_total == 0 {
        return Err(Error::Domain("cannot estimate probabilities from an empty table".into()));
    }
    if !(confidence_level > 0.0 && confidence_level < 1.0) {
        return Err(Error::Config(format!(
            "confidence_level must be in (0,1), got {confidence_level}"
        )));
    }
    let normal = Normal::new(0.0, 1.0).expect("unit normal");
    let z = normal.inverse_cdf(1.0 - (1.0 - confidence_level) / 2.0);
    Ok(Estimates {
        confidence_level,
        plus_minus: wilson(table.n_pm, table.n_total, z),
        nontrivial: wilson(table.n_nontrivial, table.n_total, z),
    })
}

/// The worked default configuration: alpha = sqrt(3)/2, sigma_t = 1 ps,
/// T = 3.3 fs, window 1 ns, delta_t = 0.1 fs, effective-symmetric
/// exponential decay with rate 5, finite-time scenario.
impl Default for TrialConfig {
    fn default() -> Self {
        use crate::collapse::DecayFamily;
        use crate::profiles::{PulseProfile, PulseShape};
        let state = StateAmplitudes::from_alpha_squared(0.75).expect("valid default state");
        let profile = PulseProfile::new(PulseShape::Sech2, 1000.0, 0.0).expect("valid default profile");
        let geometry = ExperimentGeometry::new(profile, 3.3, 1e6, None).expect("valid default geometry");
        let kinematics = RouteKinematics::new(state, 0.1, DecayFamily::EffectiveSymmetric { rate2: 5.0 })
            .expect("valid default kinematics");
        TrialConfig {
            state,
            geometry,
            kinematics,
            scenario: Scenario::FiniteTime,
            n_trials: 10_000_000,
            seed: 1,
        }
    }
}
