//! Thin command dispatcher for the collapse-probe library.
//!
//! Exit codes: 0 success, 1 verification failure, 2 usage error,
//! 3 infeasible plan, 4 numerical failure.

use clap::{Parser, Subcommand};
use collapse_probe::cli::{self, VerifyTolerances};
use collapse_probe::config::{parse_config, OutputFormat, RunConfig};
use collapse_probe::error::Error;
use collapse_probe::report;
use collapse_probe::stats::SweepAxis;

#[derive(Parser)]
#[command(
    name = "collapse-probe",
    version,
    about = "Coincidence statistics for instantaneous vs finite-time collapse of entangled photon pairs"
)]
struct Args {
    /// Configuration file (flat `key = value` lines, `#` comments).
    #[arg(long, global = true)]
    config: Option<std::path::PathBuf>,

    /// Inline overrides applied after the file, e.g. --set alpha2=0.6.
    #[arg(long = "set", global = true, value_name = "KEY=VALUE")]
    set: Vec<String>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Closed-form and quadrature analytics for one configuration.
    Analyze,
    /// Monte Carlo batch plus significance test; deterministic per seed.
    Simulate,
    /// Sweep one parameter over a grid.
    Sweep {
        /// Axis: delta_t | alpha2 | delay_T | lambda_rate.
        #[arg(long)]
        axis: String,
        /// Comma-separated grid values (axis units; delta_t and delay_T in fs).
        #[arg(long, value_delimiter = ',')]
        grid: Vec<f64>,
        /// Also run a Monte Carlo batch per grid point.
        #[arg(long)]
        mc: bool,
    },
    /// Required trial count and laboratory duration for a significance target.
    Plan {
        /// Significance target in standard deviations (default: k_sigma from config).
        #[arg(long)]
        k_sigma: Option<f64>,
    },
    /// Run the cross-oracle verification suite.
    Verify,
}

fn load_config(args: &Args) -> Result<RunConfig, Error> {
    let mut text = match &args.config {
        Some(path) => std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?,
        None => String::new(),
    };
    for pair in &args.set {
        text.push('\n');
        text.push_str(pair);
    }
    parse_config(&text)
}

fn run(args: &Args) -> Result<i32, Error> {
    let config = load_config(args)?;
    match &args.command {
        Command::Analyze => {
            let record = cli::cmd_analyze(&config)?;
            cli::write_output(&config, &report::render_record(&record, config.output_format))?;
            Ok(0)
        }
        Command::Simulate => {
            let record = cli::cmd_simulate(&config)?;
            cli::write_output(&config, &report::render_record(&record, config.output_format))?;
            Ok(0)
        }
        Command::Sweep { axis, grid, mc } => {
            let axis = SweepAxis::parse(axis)?;
            let result = cli::cmd_sweep(&config, axis, grid, *mc)?;
            let text = match config.output_format {
                OutputFormat::Csv => report::sweep_csv(&result),
                OutputFormat::Json => report::sweep_json(&result),
            };
            cli::write_output(&config, &text)?;
            if result.warnings > 0 {
                eprintln!("sweep finished with {} warning(s); see error column", result.warnings);
            }
            Ok(0)
        }
        Command::Plan { k_sigma } => {
            let plan = cli::cmd_plan(&config, *k_sigma)?;
            let mut text = serde_json::to_string_pretty(&plan).expect("plan serializes");
            text.push('\n');
            cli::write_output(&config, &text)?;
            Ok(0)
        }
        Command::Verify => {
            let outcome = cli::cmd_verify(&config, &VerifyTolerances::default())?;
            cli::write_output(&config, &outcome.render_text())?;
            Ok(if outcome.passed { 0 } else { 1 })
        }
    }
}

fn main() {
    let args = Args::parse();
    match run(&args) {
        Ok(code) => std::process::exit(code),
        Err(e) => {
            // infeasible plans still emit an explicit machine-readable record
            if let Error::Infeasible(reason) = &e {
                println!("{{\n  \"infeasible\": true,\n  \"reason\": \"{reason}\"\n}}");
            }
            eprintln!("error: {e}");
            std::process::exit(e.exit_code());
        }
    }
}
