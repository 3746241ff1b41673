//! Coincidence statistics for discriminating instantaneous from
//! finite-time collapse of an entangled two-photon polarization state.
//!
//! The model: each photon triggers a microscopic "hit" at a random time
//! drawn from its temporal intensity profile inside the measurement
//! window. A hit starts a reduction that takes a duration `delta_t` to
//! complete along one of two kinematic routes selected with Born
//! frequencies. When the second hit lands while the first reduction is
//! still running — a rare coincidence within `delta_t` — the outcome law
//! deviates from plain Born statistics by an amount controlled by the
//! decaying route amplitudes. Accumulated over many pairs, the deviation
//! separates the two scenarios.
//!
//! The crate provides:
//!
//! * [`profiles`] — pulse shapes as hit-time densities with exact CDF,
//!   quantile, and window-truncated sampling;
//! * [`collapse`] — the route kinematics and decay families, including a
//!   swap-covariant null family and the symmetry-completed effective
//!   family;
//! * [`analytics`] — band probability `P_<` (quadrature, closed form,
//!   approximation), the relative-time density, `Lambda`/`Gamma`, and
//!   outcome probabilities;
//! * [`montecarlo`] — a reproducible trial engine with per-trial random
//!   streams and mergeable count tables;
//! * [`stats`] — deviation and required-trial formulas, z-tests,
//!   calibration helpers, parameter sweeps, and the experiment planner;
//! * [`config`], [`report`], [`cli`] — flat key-value configuration,
//!   self-contained result records, and the command layer behind the
//!   `collapse-probe` binary.
//!
//! Start with the examples: each one exercises a single capability
//! (`cargo run --example analyze`, `simulate`, `families`, `sweep_alpha`,
//! `plan`, `sample_profiles`, `verify`).

pub mod analytics;
pub mod cli;
pub mod collapse;
pub mod config;
pub mod error;
pub mod montecarlo;
pub mod profiles;
pub mod quad;
pub mod report;
pub mod rng;
pub mod stats;

pub use analytics::{AnalyticsReport, CoincidenceInputs};
pub use collapse::{DecayFamily, Route, RouteKinematics, StateAmplitudes};
pub use config::{parse_config, OutputFormat, RunConfig};
pub use error::{Error, Result};
pub use montecarlo::{run_batch, run_trial, CountTable, Scenario, TrialConfig};
pub use profiles::{ExperimentGeometry, PulseProfile, PulseShape};
pub use report::ResultRecord;
pub use rng::SimRng;
pub use stats::{LambdaSource, SignificanceReport, SweepAxis};
