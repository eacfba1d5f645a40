//! Subcommand logic behind the `wom-density` binary. Each command takes a
//! [`RunConfig`] and returns a serializable report; [`render`] turns
//! reports into text tables.

pub mod render;

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::dataset::{build_panel, parse_dataset, write_dataset, Dataset, DatasetPaths, PanelDiagnostics, DEFAULT_MAX_WEEK};
use crate::econometrics::{
    breusch_pagan, build_design, evaluate_hypotheses, fit_ols, fit_wls, significance_code, BPTestResult,
    DesignSpec, HypothesisReport, RegressionFit,
};
use crate::error::{Error, ErrorKind, Result};
use crate::metrics::{
    demographic_summary, first_week_density_ecdf, lag_correlation, market_weekly_series, rank_by_density,
    score_histogram, summary_stats, AgeBracket, DemographicSummary, DensityRanking, EcdfPoint,
    LagCorrelationTable, ScoreHistogram, SummaryStats, DEFAULT_AGE_BRACKETS,
};
use crate::simulator::{recovery_experiment, simulate_dataset, RecoveryReport, SimConfig, TrueModel};

pub const DEFAULT_ALPHA: f64 = 0.05;
pub const DEFAULT_TOP_K: usize = 5;
pub const DEFAULT_MAX_LAG: u32 = 3;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Text,
    Json,
}

/// Everything a subcommand needs. Loaded from an optional TOML file, then
/// overridden field by field by command-line flags.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub ratings: Option<PathBuf>,
    pub items: Option<PathBuf>,
    pub sales: Option<PathBuf>,
    pub critics: Option<PathBuf>,
    pub profiles: Option<PathBuf>,
    pub ticket_price: Option<f64>,
    pub max_week: u32,
    pub alpha: f64,
    pub format: Format,
    /// Report destination; for `simulate`, the directory for the dataset files.
    pub out: Option<PathBuf>,
    pub top_k: usize,
    pub max_lag: u32,
    pub age_brackets: Vec<AgeBracket>,
    pub design: DesignSpec,
    pub simulate: SimulateOptions,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimulateOptions {
    /// Replications of the recovery experiment; none when absent.
    pub recover: Option<usize>,
    /// Coefficient overrides on top of the default truth.
    pub beta: BTreeMap<String, f64>,
    pub noise_sd: Option<f64>,
    pub config: SimConfig,
}

impl Default for SimulateOptions {
    fn default() -> Self {
        SimulateOptions {
            recover: None,
            beta: BTreeMap::new(),
            noise_sd: None,
            config: SimConfig::default(),
        }
    }
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            ratings: None,
            items: None,
            sales: None,
            critics: None,
            profiles: None,
            ticket_price: None,
            max_week: DEFAULT_MAX_WEEK,
            alpha: DEFAULT_ALPHA,
            format: Format::Text,
            out: None,
            top_k: DEFAULT_TOP_K,
            max_lag: DEFAULT_MAX_LAG,
            age_brackets: DEFAULT_AGE_BRACKETS.to_vec(),
            design: DesignSpec::default(),
            simulate: SimulateOptions::default(),
        }
    }
}

impl RunConfig {
    pub fn from_toml_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| {
            if source.kind() == std::io::ErrorKind::NotFound {
                Error::MissingFile { path: path.to_path_buf() }
            } else {
                Error::Io {
                    path: path.to_path_buf(),
                    source,
                }
            }
        })?;
        toml::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
    }

    /// Input files, all inside `dir` under their default names.
    pub fn with_data_dir(mut self, dir: &Path, with_profiles: bool) -> Self {
        let p = DatasetPaths::in_dir(dir, with_profiles);
        self.ratings = Some(p.ratings);
        self.items = Some(p.items);
        self.sales = Some(p.sales);
        self.critics = Some(p.critics);
        self.profiles = p.profiles;
        self
    }

    fn paths(&self) -> Result<DatasetPaths> {
        let need = |p: &Option<PathBuf>, flag: &str| {
            p.clone().ok_or_else(|| Error::Config(format!("--{flag} is required")))
        };
        Ok(DatasetPaths {
            ratings: need(&self.ratings, "ratings")?,
            items: need(&self.items, "items")?,
            sales: need(&self.sales, "sales")?,
            critics: need(&self.critics, "critics")?,
            profiles: self.profiles.clone(),
        })
    }

    fn check(&self) -> Result<()> {
        if self.max_week == 0 {
            return Err(Error::Config("max_week must be at least 1".into()));
        }
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(Error::Config(format!("alpha must be in (0, 1), got {}", self.alpha)));
        }
        if let Some(p) = self.ticket_price {
            if !(p.is_finite() && p > 0.0) {
                return Err(Error::Config(format!("ticket_price must be positive, got {p}")));
            }
        }
        Ok(())
    }

    /// Parses and validates the input files.
    pub fn load_dataset(&self) -> Result<Dataset> {
        self.check()?;
        let price = self
            .ticket_price
            .ok_or_else(|| Error::Config("--ticket-price is required".into()))?;
        parse_dataset(&self.paths()?, price)
    }
}

/// Process exit code for a failed command.
pub fn exit_code(err: &Error) -> i32 {
    match err.kind() {
        ErrorKind::Config => 2,
        ErrorKind::Data => 3,
        ErrorKind::Numerical => 4,
    }
}

/// A suggestion printed after errors the user can act on.
pub fn remediation(err: &Error) -> Option<&'static str> {
    match err {
        Error::RankDeficient { .. } => Some(
            "drop the listed columns from the design, e.g. a tracked genre no item carries, \
             or add items that vary in them",
        ),
        Error::InsufficientData { .. } => {
            Some("the model needs more usable item-weeks than regressors; add items or raise --max-week")
        }
        Error::Replication { source, .. } => remediation(source),
        _ => None,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidateReport {
    pub items: usize,
    pub ratings: usize,
    pub critic_reviews: usize,
    pub sales_rows: usize,
    pub profiles: Option<usize>,
    pub panel_rows: usize,
    pub diagnostics: PanelDiagnostics,
}

pub fn cmd_validate(cfg: &RunConfig) -> Result<ValidateReport> {
    let ds = cfg.load_dataset()?;
    let panel = build_panel(&ds, cfg.max_week)?;
    Ok(ValidateReport {
        items: ds.items.len(),
        ratings: ds.ratings.len(),
        critic_reviews: ds.critics.len(),
        sales_rows: ds.sales.len(),
        profiles: ds.profiles.as_ref().map(Vec::len),
        panel_rows: panel.rows.len(),
        diagnostics: panel.diagnostics,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    pub summary_stats: SummaryStats,
    pub rankings: DensityRanking,
    pub histogram: ScoreHistogram,
    pub ecdf: Vec<EcdfPoint>,
    /// Volume against lagged revenue on market-wide calendar weeks; `None`
    /// when the series is too short for the requested lags.
    pub lag_correlation: Option<LagCorrelationTable>,
    pub demographics: Option<DemographicSummary>,
}

pub fn cmd_metrics(cfg: &RunConfig) -> Result<MetricsReport> {
    let ds = cfg.load_dataset()?;
    metrics_report(&ds, cfg)
}

pub fn metrics_report(ds: &Dataset, cfg: &RunConfig) -> Result<MetricsReport> {
    let panel = build_panel(ds, cfg.max_week)?;
    let series = market_weekly_series(ds, cfg.max_week);
    let lag = match lag_correlation(&series.volume, &series.revenue, cfg.max_lag) {
        Ok(t) => Some(t),
        Err(Error::InsufficientData { .. }) => None,
        Err(e) => return Err(e),
    };
    Ok(MetricsReport {
        summary_stats: summary_stats(ds, &panel.rows),
        rankings: rank_by_density(&panel.rows, &ds.items, cfg.top_k)?,
        histogram: score_histogram(&ds.ratings),
        ecdf: first_week_density_ecdf(&panel.rows)?,
        lag_correlation: lag,
        demographics: ds
            .profiles
            .as_ref()
            .map(|p| demographic_summary(p, &cfg.age_brackets)),
    })
}

/// One coefficient as printed in a regression table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TermReport {
    pub name: String,
    pub coefficient: f64,
    pub std_error: f64,
    pub t_value: f64,
    pub p_value: f64,
    pub significance: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitReport {
    pub weighted: bool,
    pub n_obs: usize,
    pub df_residual: usize,
    pub r_squared: f64,
    pub adj_r_squared: f64,
    pub sigma: f64,
    pub terms: Vec<TermReport>,
}

impl FitReport {
    pub fn term(&self, name: &str) -> Option<&TermReport> {
        self.terms.iter().find(|t| t.name == name)
    }
}

impl From<&RegressionFit> for FitReport {
    fn from(fit: &RegressionFit) -> Self {
        FitReport {
            weighted: fit.weighted,
            n_obs: fit.n_obs,
            df_residual: fit.df_residual,
            r_squared: fit.r_squared,
            adj_r_squared: fit.adj_r_squared,
            sigma: fit.sigma,
            terms: fit
                .terms
                .iter()
                .map(|t| TermReport {
                    name: t.name.clone(),
                    coefficient: t.coefficient,
                    std_error: t.std_error,
                    t_value: t.t_value,
                    p_value: t.p_value,
                    significance: significance_code(t.p_value).map(String::from),
                })
                .collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegressReport {
    pub ols: FitReport,
    /// Breusch–Pagan test on the OLS residuals.
    pub bp_test: BPTestResult,
    pub wls: FitReport,
    pub hypotheses: HypothesisReport,
}

pub fn cmd_regress(cfg: &RunConfig) -> Result<RegressReport> {
    let ds = cfg.load_dataset()?;
    regress_report(&ds, cfg)
}

pub fn regress_report(ds: &Dataset, cfg: &RunConfig) -> Result<RegressReport> {
    let panel = build_panel(ds, cfg.max_week)?;
    let design = build_design(&panel.rows, &cfg.design)?;
    let ols = fit_ols(&design)?;
    let bp_test = breusch_pagan(&ols, &design)?;
    let wls = fit_wls(&design)?;
    let hypotheses = evaluate_hypotheses(&wls, cfg.alpha)?;
    Ok(RegressReport {
        ols: (&ols).into(),
        bp_test,
        wls: (&wls).into(),
        hypotheses,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulateReport {
    pub seed: u64,
    pub files: DatasetPaths,
    pub items: usize,
    pub ratings: usize,
    pub item_weeks: usize,
    pub skipped: Vec<String>,
    pub recovery: Option<RecoveryReport>,
}

/// The truth used by `simulate`: the default coefficients with overrides applied.
pub fn simulation_model(cfg: &RunConfig) -> Result<TrueModel> {
    let mut model = TrueModel::published();
    let spec = cfg.simulate.config.design_spec();
    for (name, value) in &cfg.simulate.beta {
        model.set_coefficient(name, *value, &spec)?;
    }
    if let Some(sd) = cfg.simulate.noise_sd {
        model.noise_sd = sd;
    }
    if let Some(p) = cfg.ticket_price {
        model.ticket_price = p;
    }
    model.validate(&spec)?;
    Ok(model)
}

pub fn cmd_simulate(cfg: &RunConfig) -> Result<SimulateReport> {
    if let Some(p) = cfg.ticket_price {
        if !(p.is_finite() && p > 0.0) {
            return Err(Error::Config(format!("ticket_price must be positive, got {p}")));
        }
    }
    let out = cfg
        .out
        .as_deref()
        .ok_or_else(|| Error::Config("--out <DIR> is required for simulate".into()))?;
    let model = simulation_model(cfg)?;
    let sim_cfg = &cfg.simulate.config;
    let sim = simulate_dataset(&model, sim_cfg)?;
    let files = write_dataset(out, &sim.dataset)?;
    let recovery = match cfg.simulate.recover {
        Some(reps) => Some(recovery_experiment(&model, sim_cfg, reps)?),
        None => None,
    };
    Ok(SimulateReport {
        seed: sim_cfg.seed,
        files,
        items: sim.dataset.items.len(),
        ratings: sim.dataset.ratings.len(),
        item_weeks: sim.cells.len(),
        skipped: sim.skipped,
        recovery,
    })
}
