use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use mmwave::channel::{noise_power, path_loss, received_power, sinr};
use mmwave::engine::{run_scenario, SchemeSelection, SweepOptions};
use mmwave::Scenario;

use crate::error::CliError;
use crate::output::{events_jsonl, results_csv, write_all_atomic};
use crate::svg::success_rate_chart;

pub const RESULTS_FILE: &str = "results.csv";
pub const EVENTS_FILE: &str = "events.jsonl";
pub const FIGURE_FILE: &str = "figure_success_rate.svg";

#[derive(Debug, Parser)]
#[command(name = "mmwave", version, about = "Slotted mmWave downlink simulator: single- vs. multi-gNB transmission")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run the speed sweep and write results.csv and the success-rate figure.
    Run(RunArgs),
    /// Check a scenario file and print the effective configuration.
    Validate {
        /// Scenario JSON file.
        path: PathBuf,
    },
    /// Print the link budget at one distance with zero interference.
    Linkbudget(LinkBudgetArgs),
}

#[derive(Debug, Args)]
pub struct RunArgs {
    /// Scenario JSON file; built-in defaults when omitted.
    #[arg(long)]
    pub scenario: Option<PathBuf>,
    /// Comma-separated speeds in km/h.
    #[arg(long, value_delimiter = ',')]
    pub speeds: Option<Vec<f64>>,
    /// Independent runs per (speed, scheme).
    #[arg(long)]
    pub seeds: Option<u64>,
    /// Base seed all run seeds derive from.
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, value_enum)]
    pub scheme: Option<SchemeArg>,
    /// Output directory.
    #[arg(long, default_value = "out")]
    pub out: PathBuf,
    /// Also write the per-event trace (events.jsonl).
    #[arg(long)]
    pub trace: bool,
    /// Suppress the summary table.
    #[arg(long)]
    pub quiet: bool,
    /// Worker threads; defaults to the number of CPUs.
    #[arg(long)]
    pub jobs: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum SchemeArg {
    Single,
    Multi,
    Both,
}

impl From<SchemeArg> for SchemeSelection {
    fn from(s: SchemeArg) -> Self {
        match s {
            SchemeArg::Single => SchemeSelection::Single,
            SchemeArg::Multi => SchemeSelection::Multi,
            SchemeArg::Both => SchemeSelection::Both,
        }
    }
}

#[derive(Debug, Args)]
pub struct LinkBudgetArgs {
    /// Transmitter-receiver distance in metres (>= 1).
    #[arg(long)]
    pub distance: f64,
    /// Combined beamforming gain in dB.
    #[arg(long, default_value_t = 0.0)]
    pub gain_db: f64,
    /// Shadowing term in dB.
    #[arg(long, default_value_t = 0.0)]
    pub shadow_db: f64,
    /// Subpath attenuation in dB; the scenario value when omitted.
    #[arg(long)]
    pub delta_db: Option<f64>,
    /// Scenario JSON supplying the radio parameters.
    #[arg(long)]
    pub scenario: Option<PathBuf>,
}

fn read_scenario(path: &Path) -> Result<Scenario, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    Scenario::from_json(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
}

fn load(path: Option<&Path>) -> Result<Scenario, CliError> {
    match path {
        Some(p) => read_scenario(p),
        None => Ok(Scenario::default()),
    }
}

fn ensure_valid(scenario: &Scenario) -> Result<(), CliError> {
    let issues = scenario.validate();
    if issues.is_empty() {
        Ok(())
    } else {
        Err(CliError::Invalid(issues.iter().map(ToString::to_string).collect()))
    }
}

/// Command-line values override file values, which override defaults.
pub fn apply_overrides(mut scenario: Scenario, args: &RunArgs) -> Scenario {
    if let Some(speeds) = &args.speeds {
        scenario.speed_sweep = speeds.clone();
    }
    if let Some(n) = args.seeds {
        scenario.seeds = n;
    }
    if let Some(seed) = args.seed {
        scenario.seed = seed;
    }
    if let Some(s) = args.scheme {
        scenario.scheme = s.into();
    }
    scenario
}

pub fn cmd_run(args: &RunArgs) -> Result<String, CliError> {
    let scenario = apply_overrides(load(args.scenario.as_deref())?, args);
    ensure_valid(&scenario)?;
    if args.jobs == Some(0) {
        return Err(CliError::Config("--jobs must be >= 1".into()));
    }
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(j) = args.jobs {
        pool = pool.num_threads(j);
    }
    let pool = pool
        .build()
        .map_err(|e| CliError::Config(format!("cannot start worker pool: {e}")))?;
    let result = pool.install(|| run_scenario(&scenario, &SweepOptions { trace: args.trace }))?;

    let mut files = vec![
        (RESULTS_FILE, results_csv(&result.rows)),
        (FIGURE_FILE, success_rate_chart(&result.rows)),
    ];
    if args.trace {
        files.push((EVENTS_FILE, events_jsonl(&result.events)));
    }
    let written = write_all_atomic(&args.out, &files)?;

    let mut report = String::new();
    if !args.quiet {
        report.push_str("speed_kmh  scheme  seeds  success_rate  stderr    handovers  cluster_size\n");
        for r in &result.rows {
            report.push_str(&format!(
                "{:>9.1}  {:<6}  {:>5}  {:>12.6}  {:>8.6}  {:>9.3}  {:>12.3}\n",
                r.speed_kmh,
                r.scheme,
                r.seeds,
                r.success_rate_mean,
                r.success_rate_stderr,
                r.handovers_mean,
                r.cluster_size_mean
            ));
        }
        for p in written {
            report.push_str(&format!("wrote {}\n", p.display()));
        }
    }
    Ok(report)
}

pub fn cmd_validate(path: &Path) -> Result<String, CliError> {
    let scenario = read_scenario(path)?;
    ensure_valid(&scenario)?;
    let mut echo = serde_json::to_string_pretty(&scenario).expect("scenario always serializes");
    echo.push('\n');
    Ok(echo)
}

pub fn cmd_linkbudget(args: &LinkBudgetArgs) -> Result<String, CliError> {
    let scenario = load(args.scenario.as_deref())?;
    ensure_valid(&scenario)?;
    if !(args.distance >= 1.0 && args.distance.is_finite()) {
        return Err(CliError::Config(format!(
            "--distance must be a finite value >= 1 m, got {}",
            args.distance
        )));
    }
    let delta = args.delta_db.unwrap_or(scenario.subpath_attenuation_db);
    let pl = path_loss(&scenario.path_loss_params(), args.distance, args.shadow_db)?;
    let budget = received_power(scenario.tx_power_dbm, args.gain_db, delta, pl);
    let noise = noise_power(scenario.bandwidth_ghz * 1e9, scenario.noise_dbm_hz)?;
    let report = sinr(budget.rx_power_dbm, f64::NEG_INFINITY, noise, scenario.min_sinr_db);
    Ok(format!(
        "distance_m     {:.3}\n\
         path_loss_db   {:.3}\n\
         rx_power_dbm   {:.3}\n\
         noise_dbm      {:.3}\n\
         sinr_db        {:.3}\n\
         min_sinr_db    {:.3}\n\
         verdict        {}\n",
        args.distance,
        pl,
        budget.rx_power_dbm,
        noise,
        report.sinr_db,
        scenario.min_sinr_db,
        if report.satisfied { "satisfied" } else { "not satisfied" }
    ))
}

impl Cli {
    /// Runs the selected command and returns its standard output.
    pub fn execute(&self) -> Result<String, CliError> {
        match &self.command {
            Command::Run(args) => cmd_run(args),
            Command::Validate { path } => cmd_validate(path),
            Command::Linkbudget(args) => cmd_linkbudget(args),
        }
    }
}
