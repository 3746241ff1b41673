//! Self-contained result records and their CSV/JSON renderings.
//!
//! A record echoes the fully resolved configuration (times in fs), so
//! re-running the echoed config reproduces its counts exactly. Column order
//! and field names are fixed; schema tests assert them byte-exactly.

use crate::analytics::AnalyticsReport;
use crate::config::{FamilyKind, OutputFormat, RunConfig};
use crate::montecarlo::{CountTable, Estimates, Scenario};
use crate::profiles::PulseShape;
use crate::stats::{LambdaSource, SignificanceReport, SweepResult};

/// Everything one run produced.
#[derive(Clone, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct ResultRecord {
    pub version: String,
    pub seed: u64,
    pub config: RunConfig,
    pub analytics: AnalyticsReport,
    pub counts: Option<CountTable>,
    pub estimates: Option<Estimates>,
    pub significance: Option<SignificanceReport>,
    pub timestamp_unix_s: u64,
}

pub fn artifact_version() -> String {
    env!("CARGO_PKG_VERSION").to_string()
}

pub fn unix_timestamp() -> u64 {
    std::time::SystemTime::now()
        .duration_since(std::time::UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0)
}

fn scenario_str(s: Scenario) -> &'static str {
    match s {
        Scenario::Instantaneous => "instantaneous",
        Scenario::FiniteTime => "finite_time",
    }
}

fn family_str(f: FamilyKind) -> &'static str {
    match f {
        FamilyKind::TwoShapeExponential => "two_shape_exponential",
        FamilyKind::TwoShapeLinear => "two_shape_linear",
        FamilyKind::SingleShapeCovariant => "single_shape_covariant",
        FamilyKind::EffectiveSymmetric => "effective_symmetric",
    }
}

fn profile_str(p: PulseShape) -> &'static str {
    match p {
        PulseShape::Sech2 => "sech2",
        PulseShape::Gaussian => "gaussian",
    }
}

fn source_str(s: LambdaSource) -> &'static str {
    match s {
        LambdaSource::Analytics => "analytics",
        LambdaSource::PaperLiteral => "paper_literal",
    }
}

/// Fixed column order for single-run records.
pub const RECORD_CSV_HEADER: &str = "version,seed,alpha2,profile,sigma_t,delay_T,window_dt,\
window_origin,delta_t,scenario,family,lambda1,lambda2,n_trials,partitions,lambda_source,\
confidence_level,k_sigma,p_less,p_less_closed,p_less_approx,lambda,gamma,lambda_hat,gamma_hat,\
p_plus_minus_exact,p_plus_minus_symmetric,symmetry_residual,delta_n_per_trial,n_pm,n_mp,\
n_nontrivial,n_route1,n_route2,n_total,z_score,p_value,paper_ratio,observed_ratio,required_n,\
timestamp";

/// Render one record as CSV (header plus one row).
pub fn record_csv(r: &ResultRecord) -> String {
    let c = &r.config;
    let a = &r.analytics;
    let counts = r.counts.as_ref();
    let sig = r.significance.as_ref();
    let opt_u64 = |v: Option<u64>| v.map(|x| x.to_string()).unwrap_or_default();
    let opt_f64 = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
    let required = sig
        .map(|s| s.required_n.map(|n| n.to_string()).unwrap_or_else(|| "infeasible".into()))
        .unwrap_or_default();
    let row = format!(
        "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
        r.version,
        r.seed,
        c.alpha2,
        profile_str(c.profile),
        c.sigma_t,
        c.delay_t,
        c.window_dt,
        c.window_origin,
        c.delta_t,
        scenario_str(c.scenario),
        family_str(c.family),
        c.lambda1,
        c.lambda2,
        c.n_trials,
        c.partitions,
        source_str(c.lambda_source),
        c.confidence_level,
        c.k_sigma,
        a.p_less,
        a.p_less_closed,
        a.p_less_approx,
        a.lambda_uncond,
        a.gamma_uncond,
        a.lambda_cond,
        a.gamma_cond,
        a.p_plus_minus_exact,
        a.p_plus_minus_symmetric,
        a.symmetry_residual,
        a.delta_n_per_trial,
        opt_u64(counts.map(|t| t.n_pm)),
        opt_u64(counts.map(|t| t.n_mp)),
        opt_u64(counts.map(|t| t.n_nontrivial)),
        opt_u64(counts.map(|t| t.n_route1)),
        opt_u64(counts.map(|t| t.n_route2)),
        opt_u64(counts.map(|t| t.n_total)),
        opt_f64(sig.map(|s| s.z_score)),
        opt_f64(sig.map(|s| s.p_value)),
        opt_f64(sig.map(|s| s.paper_ratio)),
        opt_f64(sig.map(|s| s.observed_ratio)),
        required,
        r.timestamp_unix_s,
    );
    format!("{RECORD_CSV_HEADER}\n{row}\n")
}

pub fn record_json(r: &ResultRecord) -> String {
    let mut s = serde_json::to_string_pretty(r).expect("record serializes");
    s.push('\n');
    s
}

/// Fixed column order for sweep tables: the nine documented columns plus a
/// trailing per-row error marker (empty on success).
pub const SWEEP_CSV_HEADER: &str =
    "axis_value,p_less,lambda,lambda_hat,p_plus_minus,delta_n,required_n,z,seed,error";

pub fn sweep_csv(result: &SweepResult) -> String {
    let mut out = String::from(SWEEP_CSV_HEADER);
    out.push('\n');
    for p in &result.points {
        let required = p.required_n.map(|n| n.to_string()).unwrap_or_else(|| "infeasible".into());
        let z = p.z.map(|z| z.to_string()).unwrap_or_default();
        let error = p.error.clone().unwrap_or_default().replace(',', ";");
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{}\n",
            p.axis_value,
            p.p_less,
            p.lambda,
            p.lambda_hat,
            p.p_plus_minus,
            p.delta_n,
            required,
            z,
            p.seed,
            error
        ));
    }
    out
}

pub fn sweep_json(result: &SweepResult) -> String {
    let mut s = serde_json::to_string_pretty(result).expect("sweep serializes");
    s.push('\n');
    s
}

/// Render a record in the configured format.
pub fn render_record(r: &ResultRecord, format: OutputFormat) -> String {
    match format {
        OutputFormat::Csv => record_csv(r),
        OutputFormat::Json => record_json(r),
    }
}
