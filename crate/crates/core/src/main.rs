use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use wom_density::cli::{self, render, Format, RunConfig};
use wom_density::{Error, Result};

/// Ratings-density analysis of online word-of-mouth.
#[derive(Parser)]
#[command(name = "wom-density", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Parse and validate a dataset and report panel exclusions.
    Validate(DataArgs),
    /// Summary statistics, density rankings, score usage, ECDF, lag correlation, demographics.
    Metrics(DataArgs),
    /// OLS, Breusch–Pagan test, WLS and hypothesis verdicts.
    Regress(DataArgs),
    /// Generate a synthetic dataset, optionally with a recovery experiment.
    Simulate(SimArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Text,
    Json,
}

#[derive(Args)]
struct CommonArgs {
    /// TOML file with defaults; flags take precedence.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<FormatArg>,
    /// Output file (report) or, for simulate, output directory (dataset).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Ticket price used to turn revenue into viewers.
    #[arg(long)]
    ticket_price: Option<f64>,
}

#[derive(Args)]
struct DataArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Directory holding ratings.csv, items.csv, sales.csv, critics.csv and optionally profiles.csv.
    #[arg(long)]
    data_dir: Option<PathBuf>,
    #[arg(long)]
    ratings: Option<PathBuf>,
    #[arg(long)]
    items: Option<PathBuf>,
    #[arg(long)]
    sales: Option<PathBuf>,
    #[arg(long)]
    critics: Option<PathBuf>,
    #[arg(long)]
    profiles: Option<PathBuf>,
    #[arg(long)]
    max_week: Option<u32>,
    #[arg(long)]
    alpha: Option<f64>,
    /// Items listed at each end of the density ranking.
    #[arg(long)]
    top_k: Option<usize>,
}

#[derive(Args)]
struct SimArgs {
    #[command(flatten)]
    common: CommonArgs,
    #[arg(long)]
    seed: Option<u64>,
    /// Number of items to generate.
    #[arg(long = "items")]
    n_items: Option<usize>,
    #[arg(long)]
    weeks: Option<u32>,
    /// Run a recovery experiment with this many replications.
    #[arg(long)]
    recover: Option<usize>,
    /// Override a true coefficient, e.g. --beta MKT=0.03.
    #[arg(long, value_parser = parse_beta)]
    beta: Vec<(String, f64)>,
    #[arg(long)]
    noise_sd: Option<f64>,
}

fn parse_beta(s: &str) -> std::result::Result<(String, f64), String> {
    let (k, v) = s.split_once('=').ok_or("expected NAME=VALUE")?;
    let v: f64 = v.trim().parse().map_err(|e| format!("bad value in `{s}`: {e}"))?;
    Ok((k.trim().to_string(), v))
}

fn base_config(common: &CommonArgs) -> Result<RunConfig> {
    let mut cfg = match &common.config {
        Some(p) => RunConfig::from_toml_file(p)?,
        None => RunConfig::default(),
    };
    if let Some(f) = common.format {
        cfg.format = match f {
            FormatArg::Text => Format::Text,
            FormatArg::Json => Format::Json,
        };
    }
    if common.out.is_some() {
        cfg.out = common.out.clone();
    }
    if common.ticket_price.is_some() {
        cfg.ticket_price = common.ticket_price;
    }
    Ok(cfg)
}

fn data_config(a: &DataArgs) -> Result<RunConfig> {
    let mut cfg = base_config(&a.common)?;
    if let Some(dir) = &a.data_dir {
        let with_profiles = dir.join("profiles.csv").exists();
        cfg = cfg.with_data_dir(dir, with_profiles);
    }
    let set = |slot: &mut Option<PathBuf>, v: &Option<PathBuf>| {
        if v.is_some() {
            *slot = v.clone();
        }
    };
    set(&mut cfg.ratings, &a.ratings);
    set(&mut cfg.items, &a.items);
    set(&mut cfg.sales, &a.sales);
    set(&mut cfg.critics, &a.critics);
    set(&mut cfg.profiles, &a.profiles);
    if let Some(v) = a.max_week {
        cfg.max_week = v;
    }
    if let Some(v) = a.alpha {
        cfg.alpha = v;
    }
    if let Some(v) = a.top_k {
        cfg.top_k = v;
    }
    Ok(cfg)
}

fn sim_config(a: &SimArgs) -> Result<RunConfig> {
    let mut cfg = base_config(&a.common)?;
    let s = &mut cfg.simulate;
    if let Some(v) = a.seed {
        s.config.seed = v;
    }
    if let Some(v) = a.n_items {
        s.config.n_items = v;
    }
    if let Some(v) = a.weeks {
        s.config.weeks = v;
    }
    if a.recover.is_some() {
        s.recover = a.recover;
    }
    if a.noise_sd.is_some() {
        s.noise_sd = a.noise_sd;
    }
    for (k, v) in &a.beta {
        s.beta.insert(k.clone(), *v);
    }
    Ok(cfg)
}

fn emit<T: Serialize>(cfg: &RunConfig, report: &T, text: impl FnOnce(&T) -> String, to_file: bool) -> Result<()> {
    let body = match cfg.format {
        Format::Json => serde_json::to_string_pretty(report).map_err(|e| Error::Serialize(e.to_string()))? + "\n",
        Format::Text => text(report),
    };
    match (&cfg.out, to_file) {
        (Some(path), true) => std::fs::write(path, body).map_err(|source| Error::Io {
            path: path.clone(),
            source,
        }),
        _ => {
            print!("{body}");
            Ok(())
        }
    }
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Validate(a) => {
            let cfg = data_config(&a)?;
            emit(&cfg, &cli::cmd_validate(&cfg)?, render::render_validate, true)
        }
        Command::Metrics(a) => {
            let cfg = data_config(&a)?;
            emit(&cfg, &cli::cmd_metrics(&cfg)?, render::render_metrics, true)
        }
        Command::Regress(a) => {
            let cfg = data_config(&a)?;
            emit(&cfg, &cli::cmd_regress(&cfg)?, render::render_regress, true)
        }
        Command::Simulate(a) => {
            let cfg = sim_config(&a)?;
            emit(&cfg, &cli::cmd_simulate(&cfg)?, render::render_simulate, false)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            if let Some(hint) = cli::remediation(&e) {
                eprintln!("hint: {hint}");
            }
            ExitCode::from(cli::exit_code(&e) as u8)
        }
    }
}
