use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{simulate_stream, SimConfig, TrueModel};
use crate::dataset::build_panel;
use crate::econometrics::{build_design, fit_ols, fit_wls, RegressionFit};
use crate::error::{Error, Result};

/// Sampling behaviour of one coefficient across replications.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoefficientRecovery {
    pub name: String,
    pub truth: f64,
    pub wls_mean: f64,
    pub wls_sd: Option<f64>,
    pub wls_mean_std_error: f64,
    pub ols_mean: f64,
    pub ols_sd: Option<f64>,
    /// Share of replications with `|β̂ − β| < 3·SE` under WLS.
    pub coverage: f64,
    /// OLS sampling variance over WLS sampling variance.
    pub variance_ratio: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RecoveryReport {
    pub reps: usize,
    pub n_items: usize,
    pub weeks: u32,
    pub seed: u64,
    pub mean_panel_rows: f64,
    pub coefficients: Vec<CoefficientRecovery>,
}

impl RecoveryReport {
    pub fn coefficient(&self, name: &str) -> Option<&CoefficientRecovery> {
        self.coefficients.iter().find(|c| c.name == name)
    }
}

/// Both fits of one replication.
#[derive(Debug, Clone, PartialEq)]
pub struct Replicate {
    pub wls: RegressionFit,
    pub ols: RegressionFit,
    pub panel_rows: usize,
}

/// Simulates and fits replication `rep`. Replication r draws from random
/// stream r + 1 of the config's seed, so results do not depend on the
/// order in which replications run.
pub fn replicate(model: &TrueModel, config: &SimConfig, rep: usize) -> Result<Replicate> {
    let run = || -> Result<Replicate> {
        let sim = simulate_stream(model, config, rep as u64 + 1)?;
        let panel = build_panel(&sim.dataset, config.weeks)?;
        let design = build_design(&panel.rows, &config.design_spec())?;
        Ok(Replicate {
            wls: fit_wls(&design)?,
            ols: fit_ols(&design)?,
            panel_rows: panel.rows.len(),
        })
    };
    run().map_err(|source| Error::Replication {
        rep,
        source: Box::new(source),
    })
}

fn mean_sd(v: &[f64]) -> (f64, Option<f64>) {
    let n = v.len() as f64;
    let mean = v.iter().sum::<f64>() / n;
    let sd = (v.len() > 1).then(|| (v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt());
    (mean, sd)
}

/// Runs `reps` independent simulate-and-fit replications in parallel.
pub fn recovery_experiment(model: &TrueModel, config: &SimConfig, reps: usize) -> Result<RecoveryReport> {
    if reps == 0 {
        return Err(Error::Config("reps must be at least 1".into()));
    }
    let results: Vec<Replicate> = (0..reps)
        .into_par_iter()
        .map(|r| replicate(model, config, r))
        .collect::<Result<_>>()?;

    let names: Vec<String> = results[0].wls.names().into_iter().map(String::from).collect();
    let coefficients = names
        .iter()
        .enumerate()
        .map(|(j, name)| {
            let truth = model.coefficient(name);
            let wls: Vec<f64> = results.iter().map(|r| r.wls.terms[j].coefficient).collect();
            let ols: Vec<f64> = results.iter().map(|r| r.ols.terms[j].coefficient).collect();
            let covered = results
                .iter()
                .filter(|r| {
                    let t = &r.wls.terms[j];
                    (t.coefficient - truth).abs() < 3.0 * t.std_error
                })
                .count();
            let (wls_mean, wls_sd) = mean_sd(&wls);
            let (ols_mean, ols_sd) = mean_sd(&ols);
            CoefficientRecovery {
                name: name.clone(),
                truth,
                wls_mean,
                wls_sd,
                wls_mean_std_error: results.iter().map(|r| r.wls.terms[j].std_error).sum::<f64>() / reps as f64,
                ols_mean,
                ols_sd,
                coverage: covered as f64 / reps as f64,
                variance_ratio: match (wls_sd, ols_sd) {
                    (Some(w), Some(o)) if w > 0.0 => Some((o * o) / (w * w)),
                    _ => None,
                },
            }
        })
        .collect();

    Ok(RecoveryReport {
        reps,
        n_items: config.n_items,
        weeks: config.weeks,
        seed: config.seed,
        mean_panel_rows: results.iter().map(|r| r.panel_rows as f64).sum::<f64>() / reps as f64,
        coefficients,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn one_item_one_week_is_insufficient() {
        let cfg = SimConfig {
            n_items: 1,
            weeks: 1,
            ..SimConfig::default()
        };
        let err = recovery_experiment(&TrueModel::published(), &cfg, 1).unwrap_err();
        match err {
            Error::Replication { rep: 0, source } => {
                assert!(matches!(*source, Error::InsufficientData { .. }), "{source}")
            }
            other => panic!("unexpected {other}"),
        }
    }

    #[test]
    fn zero_reps_rejected() {
        assert!(recovery_experiment(&TrueModel::published(), &SimConfig::default(), 0).is_err());
    }
}
