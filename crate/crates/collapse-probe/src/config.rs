//! Flat key-value run configuration.
//!
//! One `key = value` pair per line, `#` starts a comment. Time values take
//! optional `fs`, `ps`, or `ns` suffixes and are normalized to femtoseconds
//! on ingestion. Defaults are the worked reference scenario, so an empty
//! document is a valid, meaningful configuration.
//!
//! Documented keys: alpha2, profile, sigma_t, delay_T, window_dt,
//! window_origin, delta_t, scenario, family, lambda1, lambda2, n_trials,
//! seed, partitions, lambda_source, confidence_level, k_sigma, output_path,
//! output_format.

use crate::collapse::{DecayFamily, RouteKinematics, StateAmplitudes};
use crate::error::{Error, Result};
use crate::montecarlo::{Scenario, TrialConfig};
use crate::profiles::{ExperimentGeometry, PulseProfile, PulseShape};
use crate::stats::LambdaSource;

/// Tag selecting the decay family; lambda1/lambda2 carry its two shape
/// parameters (rates for exponential shapes, exponents for the linear
/// family; single-shape families use lambda2).
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FamilyKind {
    TwoShapeExponential,
    TwoShapeLinear,
    SingleShapeCovariant,
    EffectiveSymmetric,
}

/// Output encoding of result records.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OutputFormat {
    Csv,
    Json,
}

/// Fully resolved run configuration. All times in femtoseconds.
#[derive(Clone, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct RunConfig {
    pub alpha2: f64,
    pub profile: PulseShape,
    pub sigma_t: f64,
    pub delay_t: f64,
    pub window_dt: f64,
    pub window_origin: f64,
    pub delta_t: f64,
    pub scenario: Scenario,
    pub family: FamilyKind,
    pub lambda1: f64,
    pub lambda2: f64,
    pub n_trials: u64,
    pub seed: u64,
    /// Parallelism hint for batch execution; 0 = automatic. Cannot affect
    /// results.
    pub partitions: u64,
    pub lambda_source: LambdaSource,
    pub confidence_level: f64,
    pub k_sigma: f64,
    /// Empty string writes to stdout.
    pub output_path: String,
    pub output_format: OutputFormat,
}

impl Default for RunConfig {
    fn default() -> Self {
        let window_dt = 1e6;
        let delay_t = 3.3;
        RunConfig {
            alpha2: 0.75,
            profile: PulseShape::Sech2,
            sigma_t: 1000.0,
            delay_t,
            window_dt,
            // centered on the midpoint of the two pulse centers
            window_origin: 0.5 * delay_t - 0.5 * window_dt,
            delta_t: 0.1,
            scenario: Scenario::FiniteTime,
            family: FamilyKind::EffectiveSymmetric,
            lambda1: 5.0,
            lambda2: 5.0,
            n_trials: 10_000_000,
            seed: 1,
            partitions: 0,
            lambda_source: LambdaSource::Analytics,
            confidence_level: 0.95,
            k_sigma: 6.0,
            output_path: String::new(),
            output_format: OutputFormat::Json,
        }
    }
}

impl RunConfig {
    /// Decay family with the configured shape parameters.
    pub fn decay_family(&self) -> DecayFamily {
        match self.family {
            FamilyKind::TwoShapeExponential => {
                DecayFamily::TwoShapeExponential { rate1: self.lambda1, rate2: self.lambda2 }
            }
            FamilyKind::TwoShapeLinear => {
                DecayFamily::TwoShapeLinear { exponent1: self.lambda1, exponent2: self.lambda2 }
            }
            FamilyKind::SingleShapeCovariant => {
                DecayFamily::SingleShapeCovariant { rate: self.lambda2 }
            }
            FamilyKind::EffectiveSymmetric => {
                DecayFamily::EffectiveSymmetric { rate2: self.lambda2 }
            }
        }
    }

    pub fn state(&self) -> Result<StateAmplitudes> {
        StateAmplitudes::from_alpha_squared(self.alpha2)
    }

    pub fn geometry(&self) -> Result<ExperimentGeometry> {
        let profile = PulseProfile::new(self.profile, self.sigma_t, 0.0)?;
        ExperimentGeometry::new(profile, self.delay_t, self.window_dt, Some(self.window_origin))
    }

    /// Build the validated simulation configuration; re-checks every
    /// component invariant.
    pub fn trial_config(&self) -> Result<TrialConfig> {
        let state = self.state()?;
        let geometry = self.geometry()?;
        let kinematics = RouteKinematics::new(state, self.delta_t, self.decay_family())?;
        TrialConfig::new(state, geometry, kinematics, self.scenario, self.n_trials, self.seed)
    }

    /// Validate the whole configuration by constructing every component.
    pub fn validate(&self) -> Result<()> {
        self.trial_config()?;
        if !(self.confidence_level > 0.0 && self.confidence_level < 1.0) {
            return Err(Error::Config(format!(
                "confidence_level must be in (0,1), got {}",
                self.confidence_level
            )));
        }
        if !(self.k_sigma > 0.0) {
            return Err(Error::Config(format!("k_sigma must be positive, got {}", self.k_sigma)));
        }
        Ok(())
    }

    /// Render as a parseable key-value document with all values resolved
    /// (times in femtoseconds).
    pub fn emit(&self) -> String {
        let scenario = match self.scenario {
            Scenario::Instantaneous => "instantaneous",
            Scenario::FiniteTime => "finite_time",
        };
        let family = match self.family {
            FamilyKind::TwoShapeExponential => "two_shape_exponential",
            FamilyKind::TwoShapeLinear => "two_shape_linear",
            FamilyKind::SingleShapeCovariant => "single_shape_covariant",
            FamilyKind::EffectiveSymmetric => "effective_symmetric",
        };
        let profile = match self.profile {
            PulseShape::Sech2 => "sech2",
            PulseShape::Gaussian => "gaussian",
        };
        let source = match self.lambda_source {
            LambdaSource::Analytics => "analytics",
            LambdaSource::PaperLiteral => "paper_literal",
        };
        let format = match self.output_format {
            OutputFormat::Csv => "csv",
            OutputFormat::Json => "json",
        };
        format!(
            "alpha2 = {}\nprofile = {}\nsigma_t = {}\ndelay_T = {}\nwindow_dt = {}\n\
             window_origin = {}\ndelta_t = {}\nscenario = {}\nfamily = {}\nlambda1 = {}\n\
             lambda2 = {}\nn_trials = {}\nseed = {}\npartitions = {}\nlambda_source = {}\n\
             confidence_level = {}\nk_sigma = {}\noutput_path = {}\noutput_format = {}\n",
            self.alpha2,
            profile,
            self.sigma_t,
            self.delay_t,
            self.window_dt,
            self.window_origin,
            self.delta_t,
            scenario,
            family,
            self.lambda1,
            self.lambda2,
            self.n_trials,
            self.seed,
            self.partitions,
            source,
            self.confidence_level,
            self.k_sigma,
            self.output_path,
            format
        )
    }
}

fn parse_f64(key: &str, line_no: usize, value: &str) -> Result<f64> {
    value.parse::<f64>().map_err(|_| {
        Error::Config(format!("line {line_no}: key `{key}`: cannot parse `{value}` as a number"))
    })
}

fn parse_u64(key: &str, line_no: usize, value: &str) -> Result<u64> {
    value.parse::<u64>().map_err(|_| {
        Error::Config(format!(
            "line {line_no}: key `{key}`: cannot parse `{value}` as a nonnegative integer"
        ))
    })
}

/// Parse a time value with optional fs/ps/ns suffix into femtoseconds.
fn parse_time(key: &str, line_no: usize, value: &str) -> Result<f64> {
    let v = value.trim();
    let (num, scale) = if let Some(stripped) = v.strip_suffix("fs") {
        (stripped, 1.0)
    } else if let Some(stripped) = v.strip_suffix("ps") {
        (stripped, 1e3)
    } else if let Some(stripped) = v.strip_suffix("ns") {
        (stripped, 1e6)
    } else {
        (v, 1.0)
    };
    Ok(parse_f64(key, line_no, num.trim())? * scale)
}

/// Parse a configuration document on top of the defaults.
pub fn parse_config(text: &str) -> Result<RunConfig> {
    let mut cfg = RunConfig::default();
    let mut window_origin_explicit = false;

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = match raw.find('#') {
            Some(pos) => &raw[..pos],
            None => raw,
        };
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| {
            Error::Config(format!("line {line_no}: expected `key = value`, got `{line}`"))
        })?;
        let key = key.trim();
        let value = value.trim();
        match key {
            "alpha2" => cfg.alpha2 = parse_f64(key, line_no, value)?,
            "profile" => {
                cfg.profile = match value {
                    "sech2" => PulseShape::Sech2,
                    "gaussian" => PulseShape::Gaussian,
                    other => {
                        return Err(Error::Config(format!(
                            "line {line_no}: key `profile`: unknown shape `{other}` (sech2|gaussian)"
                        )))
                    }
                }
            }
            "sigma_t" => cfg.sigma_t = parse_time(key, line_no, value)?,
            "delay_T" => cfg.delay_t = parse_time(key, line_no, value)?,
            "window_dt" => cfg.window_dt = parse_time(key, line_no, value)?,
            "window_origin" => {
                if value == "auto" {
                    window_origin_explicit = false;
                } else {
                    cfg.window_origin = parse_time(key, line_no, value)?;
                    window_origin_explicit = true;
                }
            }
            "delta_t" => cfg.delta_t = parse_time(key, line_no, value)?,
            "scenario" => {
                cfg.scenario = match value {
                    "instantaneous" => Scenario::Instantaneous,
                    "finite_time" => Scenario::FiniteTime,
                    other => {
                        return Err(Error::Config(format!(
                            "line {line_no}: key `scenario`: unknown scenario `{other}` \
                             (instantaneous|finite_time)"
                        )))
                    }
                }
            }
            "family" => {
                cfg.family = match value {
                    "two_shape_exponential" => FamilyKind::TwoShapeExponential,
                    "two_shape_linear" => FamilyKind::TwoShapeLinear,
                    "single_shape_covariant" => FamilyKind::SingleShapeCovariant,
                    "effective_symmetric" => FamilyKind::EffectiveSymmetric,
                    other => {
                        return Err(Error::Config(format!(
                            "line {line_no}: key `family`: unknown family `{other}`"
                        )))
                    }
                }
            }
            "lambda1" => cfg.lambda1 = parse_f64(key, line_no, value)?,
            "lambda2" => cfg.lambda2 = parse_f64(key, line_no, value)?,
            "n_trials" => cfg.n_trials = parse_u64(key, line_no, value)?,
            "seed" => cfg.seed = parse_u64(key, line_no, value)?,
            "partitions" => cfg.partitions = parse_u64(key, line_no, value)?,
            "lambda_source" => {
                cfg.lambda_source = match value {
                    "analytics" => LambdaSource::Analytics,
                    "paper_literal" => LambdaSource::PaperLiteral,
                    other => {
                        return Err(Error::Config(format!(
                            "line {line_no}: key `lambda_source`: unknown source `{other}` \
                             (analytics|paper_literal)"
                        )))
                    }
                }
            }
            "confidence_level" => cfg.confidence_level = parse_f64(key, line_no, value)?,
            "k_sigma" => cfg.k_sigma = parse_f64(key, line_no, value)?,
            "output_path" => cfg.output_path = value.to_string(),
            "output_format" => {
                cfg.output_format = match value {
                    "csv" => OutputFormat::Csv,
                    "json" => OutputFormat::Json,
                    other => {
                        return Err(Error::Config(format!(
                            "line {line_no}: key `output_format`: unknown format `{other}` (csv|json)"
                        )))
                    }
                }
            }
            other => {
                return Err(Error::Config(format!("line {line_no}: unknown key `{other}`")));
            }
        }
        // geometry-dependent default tracks the keys above unless the
        // origin was pinned explicitly
        if !window_origin_explicit {
            cfg.window_origin = 0.5 * cfg.delay_t - 0.5 * cfg.window_dt;
        }
    }

    cfg.validate()?;
    Ok(cfg)
}
