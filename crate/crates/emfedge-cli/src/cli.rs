//! Command-line interface: `run`, `sweep`, `validate`, `oracle`.

use std::fs;
use std::path::PathBuf;
use std::time::Instant;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use emfedge::config::{ConfigError, ConstraintMode};
use emfedge::engine::{
    aggregate_tradeoff, default_v_grid, realization_seed, run_realizations_with_series,
    Simulation,
};
use emfedge::metrics::TradeoffPoint;
use emfedge::solvers::battery::{run_battery, BatteryConfig};
use emfedge::SimConfig;

use crate::output::{write_results, OutputBundle, TimeSeries};

#[derive(Parser, Debug)]
#[command(
    name = "emfedge",
    version,
    about = "Slot-based simulator for energy- and EMF-exposure-aware edge computation offloading"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Run one realization at the configured V and persist its metrics
    Run(CommonArgs),
    /// Sweep the Lyapunov parameter V and write the trade-off table
    Sweep(CommonArgs),
    /// Check a config file and report every violated invariant
    Validate(CommonArgs),
    /// Run the solver-vs-oracle battery and report deviations
    Oracle(OracleArgs),
}

#[derive(Args, Debug, Clone)]
pub struct CommonArgs {
    /// Scenario config file (TOML); omitted fields fall back to the
    /// built-in reference scenario
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Constraint mode override: unconstrained | constrained | constrained-no-meh
    #[arg(long)]
    pub mode: Option<ConstraintMode>,
    /// Base RNG seed override
    #[arg(long)]
    pub seed: Option<u64>,
    /// Output directory (default: $EMFEDGE_OUT_DIR, then ./out)
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Comma-separated V values (sweep; for run, a single value)
    #[arg(long = "v-list", value_delimiter = ',')]
    pub v_list: Option<Vec<f64>>,
    /// Number of Monte Carlo realizations override
    #[arg(long)]
    pub realizations: Option<usize>,
    /// Dump per-slot time series, one CSV per realization
    #[arg(long)]
    pub timeseries: bool,
}

#[derive(Args, Debug, Clone)]
pub struct OracleArgs {
    /// Random uplink states checked against the power grid scan
    #[arg(long, default_value_t = 1000)]
    pub states: usize,
    /// Grid resolution for the uplink scan, W
    #[arg(long, default_value_t = 1e-6)]
    pub resolution: f64,
    /// Random CPU instances checked against exhaustive enumeration
    #[arg(long, default_value_t = 500)]
    pub cpu_instances: usize,
    /// Random composed-slot instances checked against the joint grid
    #[arg(long, default_value_t = 50)]
    pub dpp_instances: usize,
    #[arg(long, default_value_t = 7)]
    pub seed: u64,
}

/// Executes a parsed command; returns the process exit code.
pub fn execute(cli: Cli) -> Result<i32> {
    match cli.command {
        Command::Run(args) => run_single(&args),
        Command::Sweep(args) => run_sweep_cmd(&args),
        Command::Validate(args) => validate(&args),
        Command::Oracle(args) => oracle(&args),
    }
}

fn load_config(args: &CommonArgs) -> Result<SimConfig> {
    let mut cfg = match &args.config {
        Some(path) => {
            let text = fs::read_to_string(path)
                .with_context(|| format!("reading config {}", path.display()))?;
            SimConfig::from_toml_str(&text)
                .map_err(|e| anyhow::anyhow!("{path}: {e}", path = path.display()))?
        }
        None => SimConfig::paper_baseline(),
    };
    if let Some(mode) = args.mode {
        cfg.constraint_mode = mode;
    }
    if let Some(seed) = args.seed {
        cfg.rng_seed = seed;
    }
    if let Some(n) = args.realizations {
        cfg.num_realizations = n;
    }
    Ok(cfg)
}

fn out_dir(args: &CommonArgs) -> PathBuf {
    args.out
        .clone()
        .or_else(|| std::env::var_os("EMFEDGE_OUT_DIR").map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("out"))
}

fn validate(args: &CommonArgs) -> Result<i32> {
    let cfg = load_config(args)?;
    match cfg.validate() {
        Ok(()) => {
            println!("config OK");
            Ok(0)
        }
        Err(e @ ConfigError::Invalid(_)) => {
            eprintln!("{e}");
            Ok(1)
        }
        Err(e) => Err(e.into()),
    }
}

fn run_single(args: &CommonArgs) -> Result<i32> {
    let mut cfg = load_config(args)?;
    if let Some(vs) = &args.v_list {
        match vs.as_slice() {
            [v] => cfg.lyapunov_v = *v,
            _ => bail!("run takes a single V; use the sweep subcommand for several"),
        }
    }
    cfg.validate()?;
    let start = Instant::now();
    let mut sim = Simulation::new(&cfg, cfg.rng_seed)?;
    if args.timeseries {
        sim = sim.with_time_series();
    }
    let mut result = sim.run();
    let point = aggregate_tradeoff(cfg.lyapunov_v, std::slice::from_ref(&result))?;
    print_point(&point);

    let mut time_series = Vec::new();
    if let Some(records) = result.time_series.take() {
        time_series.push(TimeSeries {
            label: format!("seed{}", result.seed),
            records,
        });
    }
    let bundle = OutputBundle {
        tradeoff: vec![point],
        time_series,
        config_echo_toml: cfg.to_toml_string(),
        seeds: vec![cfg.rng_seed],
        command: command_line(),
        wall_time_s: start.elapsed().as_secs_f64(),
    };
    let files = write_results(&bundle, &out_dir(args))?;
    println!("results written to {}", files.dir.display());
    Ok(0)
}

fn run_sweep_cmd(args: &CommonArgs) -> Result<i32> {
    let cfg = load_config(args)?;
    cfg.validate()?;
    let v_values: Vec<f64> = args
        .v_list
        .clone()
        .or_else(|| cfg.v_sweep.clone())
        .unwrap_or_else(default_v_grid);
    if v_values.is_empty() {
        bail!("empty V list");
    }
    let seeds: Vec<u64> = (0..cfg.num_realizations)
        .map(|i| realization_seed(cfg.rng_seed, i))
        .collect();

    let start = Instant::now();
    let mut points: Vec<TradeoffPoint> = Vec::with_capacity(v_values.len());
    let mut time_series = Vec::new();
    for (vi, &v) in v_values.iter().enumerate() {
        let mut cfg_v = cfg.clone();
        cfg_v.lyapunov_v = v;
        let mut runs = run_realizations_with_series(&cfg_v, &seeds, args.timeseries)?;
        let point = aggregate_tradeoff(v, &runs)?;
        print_point(&point);
        points.push(point);
        if args.timeseries {
            for run in &mut runs {
                if let Some(records) = run.time_series.take() {
                    time_series.push(TimeSeries {
                        label: format!("v{}_seed{}", vi, run.seed),
                        records,
                    });
                }
            }
        }
    }
    let bundle = OutputBundle {
        tradeoff: points,
        time_series,
        config_echo_toml: cfg.to_toml_string(),
        seeds,
        command: command_line(),
        wall_time_s: start.elapsed().as_secs_f64(),
    };
    let files = write_results(&bundle, &out_dir(args))?;
    println!("results written to {}", files.dir.display());
    Ok(0)
}

fn oracle(args: &OracleArgs) -> Result<i32> {
    let report = run_battery(&BatteryConfig {
        uplink_states: args.states,
        uplink_resolution_w: args.resolution,
        cpu_instances: args.cpu_instances,
        dpp_instances: args.dpp_instances,
        dpp_power_grid: 151,
        seed: args.seed,
    });
    println!("{report}");
    if report.passed() {
        println!("oracle battery: PASS");
        Ok(0)
    } else {
        eprintln!("oracle battery: FAIL");
        Ok(1)
    }
}

fn print_point(p: &TradeoffPoint) {
    println!(
        "V={:<10.3e} rate {:8.2} Mb/s (±{:.2})  max-pixel EMF {:6.2} mW/m² (±{:.2})  device {:5.2} mW  MEH {:6.2} W  delay {:7.2} ms",
        p.lyapunov_v,
        p.sum_rate_bps.mean / 1e6,
        p.sum_rate_bps.std / 1e6,
        p.max_pixel_emf_w_per_m2.mean * 1e3,
        p.max_pixel_emf_w_per_m2.std * 1e3,
        p.mean_device_power_w.mean * 1e3,
        p.meh_power_w.mean,
        p.mean_delay_s.mean * 1e3,
    );
}

fn command_line() -> String {
    std::env::args().collect::<Vec<_>>().join(" ")
}
